#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "densplit/certificate.hpp"
#include "densplit/omega_set.hpp"
#include "densplit/partition.hpp"

namespace densplit {

/// A finite partial choice of subsets n ↦ p(n) ⊆ I_n, ordered by extension.
class Condition {
 public:
  Condition() = default;

  bool defined_at(std::size_t n) const { return values_.count(n) != 0; }
  const IntervalSubset& at(std::size_t n) const;
  std::vector<std::size_t> domain() const;
  const std::map<std::size_t, IntervalSubset>& values() const { return values_; }

  /// A stronger condition with p(n) = value; n must be fresh.
  Condition extend(const IntervalSubset& value) const;
  /// True when this condition's map extends `weaker`'s (same subsets by identity).
  bool extends(const Condition& weaker) const;

 private:
  std::map<std::size_t, IntervalSubset> values_;
};

/// Least n with 2^(1-n) <= 1/2 - eps.
std::size_t min_index_for_eps(const Rational& eps);

struct DefeatRound {
  std::size_t index;
  bool majority;         // |S ∩ I_n| > |I_n| / 2
  BigNat hits;           // |S ∩ I_n|
};

struct DefeatResult {
  SymbolicSet x;
  Condition condition;
  std::vector<DefeatRound> rounds;
  std::vector<Certificate> certificates;
};

/// Builds X so that the ratio |S ∩ X ∩ I_{<=n}| / |X ∩ I_{<=n}| leaves
/// [1/2 - eps, 1/2 + eps] at each chosen n. Intervals not in the final
/// condition hold their least element.
DefeatResult defeat_bisector(const OmegaSet& s, const Rational& eps, const IntervalPartition& partition,
                             const Condition& start, std::size_t rounds);

struct CentredThresholds {
  std::size_t n0;
  std::size_t k0;
};

/// n0: least n with (1 + 2^-n)(1/2 + eps) < 1/2 + eps' and 1/2 - eps - 2^-n > 1/2 - eps'.
/// k0: least k with 2^-k / (1/2 - eps') + 1 <= 1 / (1/2 + eps).
CentredThresholds centred_thresholds(const Rational& eps, const Rational& eps_prime);

/// Certificate that the union X of the per-interval sets E_k pushes the ratio
/// of any B with B ∩ I_n ⊇ E_n above 1/2 + eps at I_{<=n}.
Certificate centred_escape(const SymbolicSet& e, const Rational& eps, const Rational& eps_prime, std::size_t n);

/// Q_m = I_{2^m} ∪ ... ∪ I_{2^m + 2^m - 1}: returns (first index, count).
std::pair<std::size_t, std::size_t> laver_blocks(std::size_t m);

struct Slalom {
  IntervalPartition partition;
  /// blocks[m][j] is the j-th candidate subset for block m; it is used on
  /// interval I_{2^m + j}. blocks[m].size() must be 2^m.
  std::vector<std::vector<OmegaSet>> blocks;
  /// branch[m] < 2^m picks the candidate the hidden set follows in block m.
  std::vector<std::size_t> branch;
};

struct SlalomEscape {
  SymbolicSet x;
  Certificate certificate;
};

SlalomEscape laver_escape(const Slalom& slalom, const Rational& eps, const Rational& eps_prime, std::size_t m);

/// The ratio a certificate's chain starts from.
Rational certified_ratio(const Certificate& cert);

}  // namespace densplit
