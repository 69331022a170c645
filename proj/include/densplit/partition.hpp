#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "densplit/bigint.hpp"
#include "densplit/omega_set.hpp"

namespace densplit {

/// How interval sizes grow.
struct GrowthRule {
  enum class Mode { minimal, factor };
  Mode mode = Mode::minimal;
  Rational factor = 1;  // used by Mode::factor; the minimal size is multiplied by it
  bool even_sizes = false;

  static GrowthRule minimal(bool even = false) { return {Mode::minimal, Rational(1), even}; }
  static GrowthRule scaled(const Rational& f, bool even = false) { return {Mode::factor, f, even}; }
  /// "minimal" or "factor:<rational>".
  static GrowthRule parse(const std::string& text, bool even = false);
  std::string describe() const;
};

/// A partition of the naturals into consecutive intervals I_0, I_1, ...
/// Boundaries are materialized lazily and never change once computed.
/// Concurrent readers are safe.
class IntervalPartition {
 public:
  static constexpr std::size_t kMaxIntervals = 4096;

  /// Growth-rule partitions extend on demand; `count` intervals are built up front.
  static IntervalPartition build(const GrowthRule& rule, std::size_t count = 8);
  static IntervalPartition minimal(std::size_t count = 8, bool even_sizes = false);
  /// Fixed boundaries b_0 = 0 < b_1 < ... given explicitly; no extension.
  static IntervalPartition from_boundaries(std::vector<BigNat> boundaries);

  bool extensible() const;
  const std::optional<GrowthRule>& rule() const;

  /// Number of intervals materialized so far.
  std::size_t materialized() const;
  /// Start of I_n, i.e. |I_0| + ... + |I_{n-1}|.
  BigNat start(std::size_t n) const;
  BigNat end(std::size_t n) const { return start(n + 1); }
  BigNat size(std::size_t n) const { return end(n) - start(n); }
  /// Index n with x in I_n.
  std::size_t interval_of(const BigNat& x) const;

  /// The minimum admissible size of I_n given the sizes of I_0..I_{n-1}.
  BigNat minimum_size(std::size_t n) const;

  std::string describe() const;
  bool same_as(const IntervalPartition& other) const { return impl_ == other.impl_; }

  struct Impl;

 private:
  explicit IntervalPartition(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

/// Outcome of checking the growth condition |I_0| >= 2, |I_n| > 2^n b_n.
struct GrowthVerdict {
  bool ok = true;
  std::optional<std::size_t> violation;
  std::string reason;
};

GrowthVerdict verify_growth(const IntervalPartition& p, std::size_t depth);

/// A subset of a single interval I_n, stored as pattern ∩ I_n together with
/// its exact cardinality.
class IntervalSubset {
 public:
  enum class Kind { full, empty, first, last, singleton, trace, complement_trace, bits, custom };

  static IntervalSubset full(const IntervalPartition& p, std::size_t n);
  static IntervalSubset none(const IntervalPartition& p, std::size_t n);
  /// The least s elements of I_n.
  static IntervalSubset first(const IntervalPartition& p, std::size_t n, const BigNat& s);
  /// The greatest s elements of I_n.
  static IntervalSubset last(const IntervalPartition& p, std::size_t n, const BigNat& s);
  static IntervalSubset singleton(const IntervalPartition& p, std::size_t n);
  /// S ∩ I_n.
  static IntervalSubset trace(const IntervalPartition& p, std::size_t n, const OmegaSet& s);
  /// I_n \ S.
  static IntervalSubset complement_trace(const IntervalPartition& p, std::size_t n, const OmegaSet& s);
  /// Membership of b_n + i given by bits[i]; bits.size() must equal |I_n|.
  static IntervalSubset bits(const IntervalPartition& p, std::size_t n, const std::vector<bool>& bits);
  /// pattern ∩ I_n for an arbitrary pattern (counted exactly).
  static IntervalSubset custom(const IntervalPartition& p, std::size_t n, const OmegaSet& pattern, std::string label);

  std::size_t index() const { return index_; }
  Kind kind() const { return kind_; }
  const OmegaSet& pattern() const { return pattern_; }
  const BigNat& cardinality() const { return cardinality_; }
  const BigNat& interval_size() const { return interval_size_; }
  std::string label() const;

 private:
  IntervalSubset(std::size_t n, Kind kind, OmegaSet pattern, BigNat card, BigNat size, std::string label)
      : index_(n), kind_(kind), pattern_(std::move(pattern)), cardinality_(std::move(card)),
        interval_size_(std::move(size)), label_(std::move(label)) {}

  std::size_t index_;
  Kind kind_;
  OmegaSet pattern_;
  BigNat cardinality_;
  BigNat interval_size_;
  std::string label_;
};

using SubsetRule = std::function<IntervalSubset(const IntervalPartition&, std::size_t)>;

/// A set given interval by interval: on I_k it is rule(k), unless an override
/// is present. Counting is exact at any scale as long as each piece is.
class SymbolicSet {
 public:
  SymbolicSet(IntervalPartition partition, SubsetRule rule, std::string label, Tri finite = Tri::no,
              Tri cofinite = Tri::unknown);

  const IntervalPartition& partition() const;
  const IntervalSubset& on(std::size_t k) const;
  OmegaSet as_set() const;
  const std::string& label() const;

  /// New set agreeing with this one except on the given intervals.
  SymbolicSet with(const std::map<std::size_t, IntervalSubset>& changes) const;

  /// Σ_{j<k} |X ∩ I_j|.
  BigNat count_before(std::size_t k) const;

  class Node;

 private:
  explicit SymbolicSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend std::optional<SymbolicSet> as_symbolic(const OmegaSet& s);
};

std::optional<SymbolicSet> as_symbolic(const OmegaSet& s);

// Common interval-symbolic sets.
SymbolicSet first_halves(const IntervalPartition& p);   // first ceil(|I_k|/2) of each interval
SymbolicSet last_halves(const IntervalPartition& p);    // last ceil(|I_k|/2)
SymbolicSet interval_minima(const IntervalPartition& p);
SymbolicSet all_intervals(const IntervalPartition& p);
SymbolicSet alternating_intervals(const IntervalPartition& p);  // all of I_k for even k, nothing for odd k
/// S ∩ I_k on intervals lying entirely below the explicit cap, the even
/// numbers of I_k beyond it.
SymbolicSet capped_trace(const IntervalPartition& p, const OmegaSet& s);
SymbolicSet traces(const IntervalPartition& p, const OmegaSet& s);

}  // namespace densplit
