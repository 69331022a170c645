#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "densplit/bigint.hpp"

namespace densplit {

/// Three-valued answer for properties that are not always decidable from a
/// descriptor (e.g. whether an intersection of two sets is finite).
enum class Tri { no, yes, unknown };

enum class SetOp { intersect, unite, difference, complement };

class SetNode;

/// An infinite (or flagged finite) subset of the naturals, given by an
/// immutable descriptor tree. Copies share the tree.
class OmegaSet {
 public:
  explicit OmegaSet(std::shared_ptr<const SetNode> node);

  const SetNode& node() const { return *node_; }
  const std::shared_ptr<const SetNode>& ptr() const { return node_; }

  bool contains(std::uint64_t k) const;
  bool contains(const BigNat& k) const;

  Tri finite() const;
  Tri cofinite() const;
  bool known_finite() const { return finite() == Tri::yes; }

  const std::string& describe() const;

 private:
  std::shared_ptr<const SetNode> node_;
};

// Leaf descriptors.
OmegaSet omega();
OmegaSet empty_set();
OmegaSet progression(std::uint64_t a, std::uint64_t d);
/// Bits of `prefix` cover [0, prefix.size()); beyond that, k is a member iff
/// pattern[k mod pattern.size()] is set.
OmegaSet periodic(const std::vector<bool>& prefix, const std::vector<bool>& pattern,
                  std::string label = {});
/// Member k iff a keyed hash of k falls below p; a pure function of (p, seed, k).
OmegaSet bernoulli(const Rational& p, std::uint64_t seed);
OmegaSet range_set(const BigNat& lo, const BigNat& hi);
OmegaSet powers_of(std::uint64_t base);
/// {2^(2^n) : n in omega}.
OmegaSet tower();
/// Strictly increasing, unbounded enumeration given by `element`.
OmegaSet sequence(std::string label, std::function<BigNat(std::uint64_t)> element);
OmegaSet finite_set(std::vector<BigNat> elements);
/// {k >= 1 : floor(log2 k) = parity (mod 2)}; relative density oscillates
/// between 1/3 and 2/3.
OmegaSet dyadic_bands(unsigned parity);
/// Every second element of `target`, starting with its least element.
OmegaSet every_other(const OmegaSet& target);
/// Same set; bits below `horizon` are materialized once and served from memory.
OmegaSet cached(const OmegaSet& s, std::uint64_t horizon);

// Boolean combinations. Combinations of eventually periodic sets collapse to
// a single periodic descriptor; a few algebraic identities are applied.
OmegaSet combine(SetOp op, const OmegaSet& a, const std::optional<OmegaSet>& b = std::nullopt);
OmegaSet intersect(const OmegaSet& a, const OmegaSet& b);
OmegaSet unite(const OmegaSet& a, const OmegaSet& b);
OmegaSet difference(const OmegaSet& a, const OmegaSet& b);
OmegaSet complement(const OmegaSet& a);

/// Identity of descriptors (shared node or equal canonical description); this
/// is not extensional equality.
bool same_set(const OmegaSet& a, const OmegaSet& b);

/// Explicit bits of a set below `horizon`.
struct Prefix {
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> words;

  bool test(std::uint64_t k) const { return (words[k >> 6] >> (k & 63)) & 1U; }
  std::uint64_t count() const;
  std::vector<std::uint64_t> members() const;
  bool operator==(const Prefix&) const = default;
};

Prefix materialize_prefix(const OmegaSet& s, std::uint64_t n);

/// |s ∩ [0, n)|, exact. Throws HorizonOverflow when the descriptor can only be
/// counted by scanning and n exceeds the explicit cap.
BigNat count_below(const OmegaSet& s, const BigNat& n);
BigNat count_range(const OmegaSet& s, const BigNat& lo, const BigNat& hi);

/// The k-th element (0-indexed) of the increasing enumeration.
BigNat kth_element(const OmegaSet& s, const BigNat& k);

/// O(1) prefix counts below a fixed horizon after one materialization pass.
class PrefixCounter {
 public:
  PrefixCounter(const OmegaSet& s, std::uint64_t horizon);

  std::uint64_t horizon() const { return prefix_.horizon; }
  std::uint64_t count_below(std::uint64_t n) const;

 private:
  Prefix prefix_;
  std::vector<std::uint64_t> cumulative_;
};

}  // namespace densplit
