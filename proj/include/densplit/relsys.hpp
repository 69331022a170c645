#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "densplit/omega_set.hpp"

namespace densplit {

/// A finite relational system (X, rel, Y); rel[x][y] says x is below y.
/// At most 64 points on each side.
struct FiniteRelSys {
  std::vector<std::string> xs;
  std::vector<std::string> ys;
  std::vector<std::vector<bool>> rel;

  bool operator==(const FiniteRelSys&) const = default;
};

/// Throws PreconditionError when the shape is wrong, some x is below no y, or
/// some y is above every x.
void validate(const FiniteRelSys& r);

/// Least size of a subset of X with no common upper bound in Y.
std::size_t bounding_number(const FiniteRelSys& r);
/// Least size of a subset of Y that bounds every x.
std::size_t dominating_number(const FiniteRelSys& r);

/// (Y, not-above, X).
FiniteRelSys dual(const FiniteRelSys& r);

/// f maps X0 to X1, g maps Y1 to Y0 (by index).
struct TukeyPair {
  std::vector<std::size_t> f;
  std::vector<std::size_t> g;
};

struct TukeyVerdict {
  bool holds = true;
  std::optional<std::pair<std::size_t, std::size_t>> counterexample;  // (x0, y1), least in input order
};

/// Checks that f(x0) below y1 implies x0 below g(y1), over all of X0 x Y1.
TukeyVerdict check_tukey(const FiniteRelSys& r0, const FiniteRelSys& r1, const TukeyPair& pair);

/// The pair (g, f) between the duals of r1 and r0.
TukeyPair reversed(const TukeyPair& pair);

/// first: R0 -> R1, second: R1 -> R2; returns (f2 ∘ f1, g1 ∘ g2).
TukeyPair compose(const TukeyPair& first, const TukeyPair& second);

TukeyPair identity_pair(const FiniteRelSys& r);

struct SparseRangeRow {
  std::size_t n;
  BigNat lo;  // r_(2^n)
  BigNat hi;  // r_(2^(n+1))
  Rational max_ratio;
  BigNat at;  // least k in (lo, hi] attaining it
  Rational bound;
  bool ok;
};

struct SparseRangeResult {
  std::size_t threshold;            // N as given
  std::size_t effective_threshold;  // max(N, 1)
  std::vector<SparseRangeRow> rows;
  bool holds = true;
  bool zero_splits = false;  // the last row's ratio is at most the tolerance
};

/// For each n <= n_max and every k with r_(2^n) < k <= r_(2^(n+1)), checks
/// |ran(x) ∩ R ∩ k| / |R ∩ k| <= (N' + n)/2^n exactly, where r_j is the j-th
/// element of R and N' = max(N, 1). Throws PreconditionError naming n when
/// x(n) < r_(2^n) for some N <= n <= n_max, or when x is not increasing.
SparseRangeResult sparse_range_check(const OmegaSet& r, const std::function<BigNat(std::size_t)>& x, std::size_t threshold,
                          std::size_t n_max, const Rational& tolerance = Rational(1, 20));

struct GalleryEntry {
  std::string name;
  std::string note;
  FiniteRelSys system;
};

/// Finite truncations: "dom:L:v", "reap:n", "reap-rho:n:p/q:band".
GalleryEntry gallery(const std::string& name);
std::vector<std::string> gallery_names();

}  // namespace densplit
