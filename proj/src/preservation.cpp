#include "densplit/preservation.hpp"

#include <stdexcept>

#include "densplit/errors.hpp"

namespace densplit {

namespace {

BigNat exact(const OmegaSet& s, const BigNat& lo, const BigNat& hi) {
  try {
    return count_range(s, lo, hi);
  } catch (const HorizonOverflow&) {
    throw PreconditionError("missing exact cardinality of " + s.describe() + " on [" + lo.get_str() + ", " +
                            hi.get_str() + ")");
  }
}

OmegaSet indices_with_tail(const std::vector<bool>& prefix) { return periodic(prefix, {true}); }

}  // namespace

void check_pair(const GoodPair& pair, std::size_t horizon_k) {
  const IntervalPartition& p = pair.e.partition();
  for (std::size_t k = 0; k < horizon_k; ++k) {
    if (4 * pair.e.on(k).cardinality() <= p.size(k)) {
      throw PreconditionError("|E_" + std::to_string(k) + "| / |I_" + std::to_string(k) + "| is not above 1/4");
    }
  }
}

RelationVerdict sq_rel_holds(const OmegaSet& x, const GoodPair& pair, std::size_t n, std::size_t horizon_k) {
  const IntervalPartition& p = pair.e.partition();
  const Rational factor = Rational(1, 2) + pair.epsilon;
  RelationVerdict v;
  for (std::size_t k = n; k < horizon_k; ++k) {
    if (!pair.h.contains(big(k))) continue;
    const BigNat lo = p.start(k);
    const BigNat hi = p.end(k);
    const BigNat in_e = exact(intersect(x, pair.e.on(k).pattern()), lo, hi);
    const BigNat in_i = exact(x, lo, hi);
    Rational lhs(in_e);
    Rational rhs = factor * Rational(in_i + lo);
    if (!(lhs < rhs)) {
      v.holds = false;
      v.witness = k;
      v.lhs = lhs;
      v.rhs = rhs;
      return v;
    }
  }
  return v;
}

AboveWitness witness_above(const OmegaSet& x, const IntervalPartition& partition, const Rational& eps,
                           std::size_t horizon_k) {
  if (horizon_k < 2) throw PreconditionError("horizon must cover at least two intervals");
  std::vector<bool> sparse(horizon_k);
  std::size_t count = 0;
  std::optional<std::size_t> last_sparse;
  for (std::size_t k = 0; k < horizon_k; ++k) {
    const BigNat inside = exact(x, partition.start(k), partition.end(k));
    sparse[k] = 4 * inside < 3 * partition.size(k);
    if (sparse[k]) {
      ++count;
      last_sparse = k;
    }
  }
  if (2 * count >= horizon_k) {
    SymbolicSet e(
        partition,
        [x](const IntervalPartition& p, std::size_t k) {
          if (4 * count_range(x, p.start(k), p.end(k)) < 3 * p.size(k)) {
            return IntervalSubset::complement_trace(p, k, x);
          }
          return IntervalSubset::full(p, k);
        },
        "iv:outside(" + x.describe() + ")");
    return {{indices_with_tail(sparse), e, eps}, 1, 1};
  }
  const std::size_t cut = std::max<std::size_t>(2, last_sparse ? *last_sparse + 1 : 0);
  SymbolicSet e(
      partition,
      [cut](const IntervalPartition& p, std::size_t k) {
        if (k < cut) return IntervalSubset::full(p, k);
        const BigNat size = p.size(k);
        BigNat take = 5 * size / 16;
        while (4 * take <= size) take += 1;
        while (8 * take >= 3 * size) take -= 1;
        if (4 * take <= size) {
          throw std::logic_error("interval " + std::to_string(k) + " too small for a (1/4, 3/8) subset");
        }
        return IntervalSubset::first(p, k, take);
      },
      "iv:five-sixteenths");
  return {{indices_with_tail(std::vector<bool>(cut, false)), e, eps}, 2, 0};
}

BelowWitness witness_below(const GoodPair& pair, std::size_t horizon_k) {
  const IntervalPartition& p = pair.e.partition();
  const OmegaSet h = pair.h;
  const SymbolicSet e = pair.e;
  SymbolicSet rest(
      p,
      [h, e](const IntervalPartition& q, std::size_t k) {
        if (!h.contains(big(k))) return IntervalSubset::full(q, k);
        return IntervalSubset::complement_trace(q, k, e.on(k).pattern());
      },
      "iv:outside-pair");
  std::size_t nonempty = 0;
  for (std::size_t k = 0; k < horizon_k; ++k) {
    if (sgn(rest.on(k).cardinality()) > 0) ++nonempty;
  }
  if (2 * nonempty >= horizon_k) return {rest, 1};
  return {interval_minima(p), 2};
}

Escape nwd_escape(const OmegaSet& x, const GoodPair& pair, std::size_t n, const BigNat& m, std::size_t horizon_k) {
  RelationVerdict before = sq_rel_holds(x, pair, n, horizon_k);
  if (!before.holds) throw PreconditionError("X is not related to the pair from index " + std::to_string(n));
  const IntervalPartition& p = pair.e.partition();
  const Rational factor = Rational(1, 2) + pair.epsilon;
  for (std::size_t k = n; k < horizon_k; ++k) {
    if (!pair.h.contains(big(k)) || p.start(k) < m) continue;
    const IntervalSubset& ek = pair.e.on(k);
    const Rational r = ratio(ek.cardinality(), p.size(k));
    if (!(r > factor * (r + pow2(-static_cast<long>(k))))) continue;
    // |Y ∩ E_k| = |E_k| and |Y ∩ I_k| = |E_k| once Y ∩ I_k = E_k.
    if (Rational(ek.cardinality()) < factor * Rational(ek.cardinality() + p.start(k))) continue;
    OmegaSet y = x;
    if (auto sx = as_symbolic(x); sx && sx->partition().same_as(p)) {
      y = sx->with({{k, ek}}).as_set();
    } else {
      OmegaSet window = range_set(p.start(k), p.end(k));
      y = unite(difference(x, window), intersect(ek.pattern(), window));
    }
    RelationVerdict after = sq_rel_holds(y, pair, n, horizon_k);
    if (after.holds || *after.witness != k) throw std::logic_error("escape did not fail at the modified interval");
    return {y, k, after};
  }
  throw PreconditionError("no interval below index " + std::to_string(horizon_k) +
                          " is large enough for an escape; extend the horizon");
}

ReapMap reap_tukey_map(const OmegaSet& s, const IntervalPartition& partition, const Rational& eps,
                       std::size_t horizon_k) {
  if (s.finite() == Tri::yes) throw PreconditionError("S must be infinite");
  std::size_t heavy = 0;
  for (std::size_t k = 0; k < horizon_k; ++k) {
    if (4 * exact(s, partition.start(k), partition.end(k)) > partition.size(k)) ++heavy;
  }
  const bool complemented = 2 * heavy < horizon_k;
  const OmegaSet chosen = complemented ? complement(s) : s;
  std::vector<bool> in_h(horizon_k);
  for (std::size_t k = 0; k < horizon_k; ++k) {
    in_h[k] = 4 * exact(chosen, partition.start(k), partition.end(k)) > partition.size(k);
  }
  SymbolicSet e(
      partition,
      [chosen](const IntervalPartition& p, std::size_t k) {
        IntervalSubset t = IntervalSubset::trace(p, k, chosen);
        return 4 * t.cardinality() > p.size(k) ? t : IntervalSubset::full(p, k);
      },
      "iv:reap(" + chosen.describe() + ")");
  return {{indices_with_tail(in_h), e, eps}, chosen, complemented, in_h};
}

ReapContract check_reap_contract(const ReapMap& map, const OmegaSet& s, const OmegaSet& x, std::size_t horizon_k,
                                 const BigNat& element_horizon) {
  const IntervalPartition& p = map.pair.e.partition();
  const Rational upper = Rational(1, 2) + map.pair.epsilon;
  ReapContract c;
  SplitParams params;
  params.epsilon = map.pair.epsilon;
  c.band = split_verdict(SplitKind::eps_band, s, x, params, element_horizon);

  const OmegaSet both = intersect(map.s_prime, x);
  for (std::size_t k = 0; k < horizon_k; ++k) {
    if (!map.pair.h.contains(big(k))) continue;
    const BigNat end = p.end(k);
    const BigNat prefix_x = exact(x, BigNat(0), end);
    if (sgn(prefix_x) == 0) {
      c.empty_prefixes.push_back(k);
      continue;
    }
    const BigNat in_i = exact(x, p.start(k), end);
    const BigNat in_e = exact(intersect(x, map.pair.e.on(k).pattern()), p.start(k), end);
    ContractRow row{k, ratio(in_e, in_i + p.start(k)), ratio(exact(both, BigNat(0), end), prefix_x)};
    if (row.left > row.right) c.chain_ok = false;
    c.rows.push_back(std::move(row));
  }
  for (std::size_t i = c.rows.size(); i-- > 0;) {
    if (c.rows[i].right >= upper) break;
    c.k0 = c.rows[i].k;
  }
  if (c.k0) c.relation = sq_rel_holds(x, map.pair, *c.k0, horizon_k);
  c.holds = !c.band.holds_numerically || (c.chain_ok && c.k0 && c.relation->holds);
  return c;
}

}  // namespace densplit
