#pragma once

// Extension interface for set descriptors. Most code should only need
// omega_set.hpp; this header is for modules that contribute new node kinds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "densplit/omega_set.hpp"

namespace densplit {

enum class NodeKind { periodic, bernoulli, range, sparse, every_other, cached, combination, piecewise };

class SetNode {
 public:
  explicit SetNode(std::string description, bool canonical = true)
      : description_(std::move(description)), canonical_(canonical) {}
  SetNode(const SetNode&) = delete;
  SetNode& operator=(const SetNode&) = delete;
  virtual ~SetNode() = default;

  virtual NodeKind kind() const = 0;
  virtual bool contains(std::uint64_t k) const = 0;
  virtual bool contains_big(const BigNat& k) const;

  /// Exact |node ∩ [lo, hi)| without scanning, when the descriptor allows it.
  virtual std::optional<BigNat> count_leaf(const BigNat& lo, const BigNat& hi) const;

  /// Writes bits [64*first_word, 64*(first_word + out.size())) into `out`.
  virtual void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const;

  virtual std::optional<BigNat> kth_leaf(const BigNat& /*k*/) const { return std::nullopt; }

  virtual Tri finite() const = 0;
  virtual Tri cofinite() const = 0;

  const std::string& describe() const { return description_; }
  /// True when describe() determines the set, so equal descriptions mean equal sets.
  bool canonical() const { return canonical_; }

 private:
  std::string description_;
  bool canonical_;
};

/// A contiguous part of a piecewise set: its members in [lo, hi) are exactly
/// the members of `pattern` there.
struct Piece {
  BigNat lo;
  BigNat hi;
  OmegaSet pattern;
  std::optional<BigNat> cardinality;
};

/// Sets defined block by block, e.g. per interval of a partition.
class PiecewiseNode : public SetNode {
 public:
  using SetNode::SetNode;

  NodeKind kind() const final { return NodeKind::piecewise; }
  /// Pieces covering [lo, hi) in increasing order, clipped to [lo, hi).
  virtual std::vector<Piece> pieces(const BigNat& lo, const BigNat& hi) const = 0;

  bool contains(std::uint64_t k) const override;
  bool contains_big(const BigNat& k) const override;
  void fill(std::uint64_t first_word, std::span<std::uint64_t> out) const override;
};

namespace detail {

/// Exact count if possible (symbolically, or by scanning below the cap).
std::optional<BigNat> try_count(const OmegaSet& s, const BigNat& lo, const BigNat& hi);

/// ORs the members of s in [lo, hi) into `out`, whose bit 0 is element
/// 64*first_word. [lo, hi) must lie inside the window covered by `out`.
void or_into(const OmegaSet& s, std::uint64_t first_word, std::span<std::uint64_t> out,
             std::uint64_t lo, std::uint64_t hi);

}  // namespace detail

}  // namespace densplit
