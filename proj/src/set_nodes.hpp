#pragma once

// Concrete descriptor nodes. Internal to the library.

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "densplit/set_node.hpp"

namespace densplit::detail {

inline std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

/// Explicit prefix [0, prefix_len) followed by a repeating pattern whose phase
/// is anchored at 0: bit k (k >= prefix_len) is pattern[k mod period].
class PeriodicNode final : public SetNode {
 public:
  PeriodicNode(std::vector<bool> prefix, std::vector<bool> pattern, std::string label);

  NodeKind kind() const override { return NodeKind::periodic; }
  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  std::optional<BigNat> count_leaf(const BigNat& lo, const BigNat& hi) const override;
  std::optional<BigNat> kth_leaf(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override;
  Tri cofinite() const override;

  bool prefix_bit(std::uint64_t k) const { return prefix_[k]; }
  bool pattern_bit(std::uint64_t r) const { return pattern_[r]; }
  std::uint64_t prefix_len() const { return prefix_.size(); }
  std::uint64_t period() const { return pattern_.size(); }
  bool is_everything() const;
  bool is_nothing() const;

  static std::string render(const std::vector<bool>& prefix, const std::vector<bool>& pattern);

 private:
  BigNat count_below(const BigNat& x) const;

  std::vector<bool> prefix_;
  std::vector<bool> pattern_;
  std::vector<std::uint64_t> prefix_cum_;   // prefix_cum_[i] = ones in prefix[0, i)
  std::vector<std::uint64_t> pattern_cum_;  // likewise for the pattern
};

class BernoulliNode final : public SetNode {
 public:
  BernoulliNode(const Rational& p, std::uint64_t seed);

  NodeKind kind() const override { return NodeKind::bernoulli; }
  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  std::optional<BigNat> kth_leaf(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override { return Tri::no; }
  Tri cofinite() const override { return Tri::no; }

  const Rational& probability() const { return p_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Rational p_;
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t threshold_;
};

class RangeNode final : public SetNode {
 public:
  RangeNode(BigNat lo, BigNat hi);

  NodeKind kind() const override { return NodeKind::range; }
  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  std::optional<BigNat> count_leaf(const BigNat& lo, const BigNat& hi) const override;
  std::optional<BigNat> kth_leaf(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override { return Tri::yes; }
  Tri cofinite() const override { return Tri::no; }

  const BigNat& lo() const { return lo_; }
  const BigNat& hi() const { return hi_; }

 private:
  BigNat lo_;
  BigNat hi_;
};

/// A strictly increasing enumeration: infinite (generator) or a finite list.
class SparseNode final : public SetNode {
 public:
  SparseNode(std::string label, std::function<BigNat(std::uint64_t)> element, bool canonical);
  explicit SparseNode(std::vector<BigNat> elements);

  NodeKind kind() const override { return NodeKind::sparse; }
  bool contains(std::uint64_t k) const override { return contains_big(big(k)); }
  bool contains_big(const BigNat& k) const override;
  std::optional<BigNat> count_leaf(const BigNat& lo, const BigNat& hi) const override;
  std::optional<BigNat> kth_leaf(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override { return list_ ? Tri::yes : Tri::no; }
  Tri cofinite() const override { return Tri::no; }

  /// Number of elements below x.
  std::uint64_t rank(const BigNat& x) const;
  /// Element j, or nullopt past the end of a finite list.
  std::optional<BigNat> element(std::uint64_t j) const;

 private:
  std::function<BigNat(std::uint64_t)> generator_;
  std::optional<std::vector<BigNat>> list_;
};

class EveryOtherNode final : public SetNode {
 public:
  explicit EveryOtherNode(OmegaSet target);

  NodeKind kind() const override { return NodeKind::every_other; }
  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  std::optional<BigNat> count_leaf(const BigNat& lo, const BigNat& hi) const override;
  std::optional<BigNat> kth_leaf(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override { return target_.finite(); }
  Tri cofinite() const override { return Tri::no; }

 private:
  OmegaSet target_;
};

class CachedNode final : public SetNode {
 public:
  CachedNode(OmegaSet inner, std::uint64_t horizon);

  NodeKind kind() const override { return NodeKind::cached; }
  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  std::optional<BigNat> count_leaf(const BigNat& lo, const BigNat& hi) const override;
  std::optional<BigNat> kth_leaf(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override { return inner_.finite(); }
  Tri cofinite() const override { return inner_.cofinite(); }

  const OmegaSet& inner() const { return inner_; }
  std::uint64_t horizon() const { return horizon_; }

 private:
  std::uint64_t count_cached(std::uint64_t lo, std::uint64_t hi) const;

  OmegaSet inner_;
  std::uint64_t horizon_;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> cumulative_;
};

class CombinationNode final : public SetNode {
 public:
  CombinationNode(SetOp op, OmegaSet a, std::optional<OmegaSet> b);

  NodeKind kind() const override { return NodeKind::combination; }
  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
  Tri finite() const override { return finite_; }
  Tri cofinite() const override { return cofinite_; }

  SetOp op() const { return op_; }
  const OmegaSet& left() const { return a_; }
  const OmegaSet& right() const { return *b_; }

 private:
  SetOp op_;
  OmegaSet a_;
  std::optional<OmegaSet> b_;
  Tri finite_;
  Tri cofinite_;
};

class DyadicBandsNode final : public PiecewiseNode {
 public:
  explicit DyadicBandsNode(unsigned parity);

  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  std::vector<Piece> pieces(const BigNat& lo, const BigNat& hi) const override;
  Tri finite() const override { return Tri::no; }
  Tri cofinite() const override { return Tri::no; }

 private:
  unsigned parity_;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace densplit::detail
