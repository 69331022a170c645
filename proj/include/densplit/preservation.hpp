#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "densplit/density.hpp"
#include "densplit/omega_set.hpp"
#include "densplit/partition.hpp"

namespace densplit {

/// A set H of interval indices with subsets E_k ⊆ I_k, each holding more than
/// a quarter of its interval.
struct GoodPair {
  OmegaSet h;
  SymbolicSet e;
  Rational epsilon;
};

/// Throws PreconditionError naming the first k < horizon_k with |E_k|/|I_k| <= 1/4.
void check_pair(const GoodPair& pair, std::size_t horizon_k);

struct RelationVerdict {
  bool holds = true;
  std::optional<std::size_t> witness;  // least failing k
  Rational lhs;                        // |X ∩ E_k| at the witness
  Rational rhs;                        // (1/2 + eps)(|X ∩ I_k| + |I_<k|) at the witness
};

/// Checks |X ∩ E_k| < (1/2 + eps)(|X ∩ I_k| + |I_<k|) for every k in H ∩ [n, horizon_k).
RelationVerdict sq_rel_holds(const OmegaSet& x, const GoodPair& pair, std::size_t n, std::size_t horizon_k);

struct AboveWitness {
  GoodPair pair;
  int branch;     // 1: many intervals at most 3/4 full; 2: eventually dense
  std::size_t n;  // the relation holds from this index on
};

/// A pair that X relates to. Indices at or beyond horizon_k all belong to H.
AboveWitness witness_above(const OmegaSet& x, const IntervalPartition& partition, const Rational& eps,
                           std::size_t horizon_k);

struct BelowWitness {
  SymbolicSet x;
  int branch;  // 1: complement of the E_k on H; 2: one point per interval
};

/// A set related to `pair` from index 1 on.
BelowWitness witness_below(const GoodPair& pair, std::size_t horizon_k);

struct Escape {
  OmegaSet y;
  std::size_t k;
  RelationVerdict after;
};

/// Y agrees with X below m and everywhere except one interval I_k (k in H,
/// min I_k >= m), where Y ∩ I_k = E_k and the relation fails.
Escape nwd_escape(const OmegaSet& x, const GoodPair& pair, std::size_t n, const BigNat& m, std::size_t horizon_k);

struct ReapMap {
  GoodPair pair;
  OmegaSet s_prime;  // S or its complement
  bool complemented;
  std::vector<bool> in_h;  // membership of k < horizon_k in H
};

ReapMap reap_tukey_map(const OmegaSet& s, const IntervalPartition& partition, const Rational& eps,
                       std::size_t horizon_k);

struct ContractRow {
  std::size_t k;
  Rational left;   // |X ∩ E_k| / (|X ∩ I_k| + |I_<k|)
  Rational right;  // |S' ∩ X ∩ I_<=k| / |X ∩ I_<=k|
};

struct ReapContract {
  SplitVerdict band;                        // S against X at the element horizon
  std::vector<ContractRow> rows;            // k in H with X ∩ I_<=k non-empty
  std::vector<std::size_t> empty_prefixes;  // k in H with X ∩ I_<=k empty (reported, not failed)
  bool chain_ok = true;                     // left <= right on every row
  std::optional<std::size_t> k0;            // from here on right < 1/2 + eps
  std::optional<RelationVerdict> relation;  // sq_rel_holds(X, pair, k0)
  bool holds = false;                       // band fails, or chain_ok && k0 && relation holds
};

ReapContract check_reap_contract(const ReapMap& map, const OmegaSet& s, const OmegaSet& x, std::size_t horizon_k,
                                 const BigNat& element_horizon);

}  // namespace densplit
