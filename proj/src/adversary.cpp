#include "densplit/adversary.hpp"

#include <stdexcept>

#include "densplit/errors.hpp"

namespace densplit {

const IntervalSubset& Condition::at(std::size_t n) const {
  auto it = values_.find(n);
  if (it == values_.end()) throw PreconditionError("condition undefined at " + std::to_string(n));
  return it->second;
}

std::vector<std::size_t> Condition::domain() const {
  std::vector<std::size_t> d;
  for (const auto& [n, v] : values_) d.push_back(n);
  return d;
}

Condition Condition::extend(const IntervalSubset& value) const {
  if (defined_at(value.index())) {
    throw PreconditionError("condition already defined at " + std::to_string(value.index()));
  }
  Condition c = *this;
  c.values_.emplace(value.index(), value);
  return c;
}

bool Condition::extends(const Condition& weaker) const {
  for (const auto& [n, v] : weaker.values_) {
    auto it = values_.find(n);
    if (it == values_.end()) return false;
    const IntervalSubset& mine = it->second;
    if (mine.cardinality() != v.cardinality() || !same_set(mine.pattern(), v.pattern())) return false;
  }
  return true;
}

std::size_t min_index_for_eps(const Rational& eps) {
  if (eps <= 0 || eps >= Rational(1, 2)) throw PreconditionError("epsilon must lie in (0, 1/2)");
  const Rational gap = Rational(1, 2) - eps;
  std::size_t n = 0;
  while (pow2(1 - static_cast<long>(n)) > gap) ++n;
  return n;
}

namespace {

void check_band(const Rational& eps, const Rational& eps_prime) {
  if (eps <= 0 || eps >= eps_prime || eps_prime >= Rational(1, 2)) {
    throw PreconditionError("need 0 < epsilon < epsilon' < 1/2");
  }
}

void record_partition(Certificate& cert, const IntervalPartition& p) {
  if (p.rule()) {
    cert.partition = *p.rule();
    return;
  }
  std::vector<BigNat> b;
  for (std::size_t i = 0; i <= cert.index + 1; ++i) b.push_back(p.start(i));
  cert.boundaries = std::move(b);
}

void seal(Certificate& cert) {
  cert.steps = derive_steps(cert.kind, cert.raw, cert.epsilon, cert.epsilon_prime);
  CertificateCheck check = verify_certificate(cert);
  if (!check.ok) throw std::logic_error("emitted certificate fails verification: " + check.failures.front());
}

BigNat exact_count(const OmegaSet& s, const BigNat& lo, const BigNat& hi, std::size_t n) {
  try {
    return count_range(s, lo, hi);
  } catch (const HorizonOverflow&) {
    throw PreconditionError("no exact cardinality of " + s.describe() + " on I_" + std::to_string(n) +
                            "; supply an interval-symbolic descriptor");
  }
}

}  // namespace

DefeatResult defeat_bisector(const OmegaSet& s, const Rational& eps, const IntervalPartition& partition,
                             const Condition& start, std::size_t rounds) {
  if (rounds < 1) throw PreconditionError("need at least one round");
  if (s.finite() == Tri::yes) throw PreconditionError("S must be infinite: " + s.describe());
  const std::size_t n_min = min_index_for_eps(eps);

  Condition q = start;
  std::vector<DefeatRound> played;
  std::size_t n = n_min;
  for (std::size_t r = 0; r < rounds; ++r, ++n) {
    while (q.defined_at(n)) ++n;
    GrowthVerdict g = verify_growth(partition, n + 1);
    if (!g.ok) throw PreconditionError("partition violates the growth condition: " + g.reason);
    const BigNat lo = partition.start(n);
    const BigNat hi = partition.end(n);
    const BigNat hits = exact_count(s, lo, hi, n);
    const bool majority = 2 * hits > hi - lo;
    q = q.extend(majority ? IntervalSubset::trace(partition, n, s)
                          : IntervalSubset::complement_trace(partition, n, s));
    played.push_back({n, majority, hits});
  }

  auto chosen = q.values();
  SymbolicSet x(
      partition,
      [chosen](const IntervalPartition& p, std::size_t k) {
        auto it = chosen.find(k);
        return it != chosen.end() ? it->second : IntervalSubset::singleton(p, k);
      },
      "defeat");

  DefeatResult result{x, q, played, {}};
  const OmegaSet both = intersect(s, x.as_set());
  for (const DefeatRound& round : played) {
    const std::size_t k = round.index;
    Certificate cert;
    cert.kind = round.majority ? ChainKind::majority_case : ChainKind::minority_case;
    cert.conclusion = round.majority ? Conclusion::at_least_upper : Conclusion::at_most_lower;
    cert.index = k;
    cert.epsilon = eps;
    const BigNat size = partition.size(k);
    cert.raw["n"] = big(k);
    cert.raw["before"] = partition.start(k);
    cert.raw["size"] = size;
    if (round.majority) cert.raw["hit"] = round.hits;
    else cert.raw["miss"] = size - round.hits;
    cert.raw["num"] = exact_count(both, BigNat(0), partition.end(k), k);
    cert.raw["den"] = x.count_before(k + 1);
    record_partition(cert, partition);
    seal(cert);
    result.certificates.push_back(std::move(cert));
  }
  return result;
}

CentredThresholds centred_thresholds(const Rational& eps, const Rational& eps_prime) {
  check_band(eps, eps_prime);
  const Rational half(1, 2);
  std::size_t n0 = 0;
  while (!((1 + pow2(-static_cast<long>(n0))) * (half + eps) < half + eps_prime &&
           half - eps - pow2(-static_cast<long>(n0)) > half - eps_prime)) {
    ++n0;
  }
  std::size_t k0 = 0;
  const Rational margin = half - eps_prime;
  const Rational bound = 1 / (half + eps);
  while (pow2(-static_cast<long>(k0)) / margin + 1 > bound) ++k0;
  return {n0, k0};
}

Certificate centred_escape(const SymbolicSet& e, const Rational& eps, const Rational& eps_prime, std::size_t n) {
  const CentredThresholds t = centred_thresholds(eps, eps_prime);
  if (n < t.k0) {
    throw PreconditionError("n = " + std::to_string(n) + " is below the threshold " + std::to_string(t.k0));
  }
  const IntervalPartition& p = e.partition();
  const Rational lo = Rational(1, 2) - eps_prime;
  const Rational hi = Rational(1, 2) + eps_prime;
  for (std::size_t k = 0; k <= n; ++k) {
    const IntervalSubset& ek = e.on(k);
    Rational r = ratio(ek.cardinality(), p.size(k));
    if (sgn(ek.cardinality()) == 0 || r <= lo || r >= hi) {
      throw PreconditionError("E_" + std::to_string(k) + " has ratio " + to_string(r) + " outside (" +
                              to_string(lo) + ", " + to_string(hi) + ")");
    }
  }
  Certificate cert;
  cert.kind = ChainKind::centred_chain;
  cert.conclusion = Conclusion::at_least_upper;
  cert.index = n;
  cert.epsilon = eps;
  cert.epsilon_prime = eps_prime;
  cert.raw["n"] = big(n);
  cert.raw["before"] = p.start(n);
  cert.raw["size"] = p.size(n);
  cert.raw["chosen"] = e.on(n).cardinality();
  cert.raw["prior"] = e.count_before(n);
  record_partition(cert, p);
  seal(cert);
  return cert;
}

std::pair<std::size_t, std::size_t> laver_blocks(std::size_t m) {
  if (m >= 62) throw PreconditionError("block index too large");
  return {std::size_t{1} << m, std::size_t{1} << m};
}

SlalomEscape laver_escape(const Slalom& slalom, const Rational& eps, const Rational& eps_prime, std::size_t m) {
  check_band(eps, eps_prime);
  if (slalom.blocks.size() <= m || slalom.branch.size() <= m) {
    throw PreconditionError("slalom has no block " + std::to_string(m));
  }
  for (std::size_t j = 0; j < slalom.blocks.size(); ++j) {
    if (slalom.blocks[j].size() != laver_blocks(j).second) {
      throw PreconditionError("slalom block " + std::to_string(j) + " has " + std::to_string(slalom.blocks[j].size()) +
                              " candidates, expected " + std::to_string(laver_blocks(j).second));
    }
  }
  const Rational margin = Rational(1, 2) - eps_prime;
  const Rational reach = 1 / (pow2(-(1L << m)) / margin + 1);
  if (reach < Rational(1, 2) + eps) {
    throw PreconditionError("block " + std::to_string(m) + " is below the escape threshold: " + to_string(reach) +
                            " < 1/2 + " + to_string(eps));
  }
  const std::size_t branch = slalom.branch[m];
  if (branch >= laver_blocks(m).second) throw PreconditionError("branch value out of range");

  const IntervalPartition& p = slalom.partition;
  auto blocks = slalom.blocks;
  SymbolicSet x(
      p,
      [blocks](const IntervalPartition& q, std::size_t k) {
        if (k == 0) return IntervalSubset::none(q, 0);
        std::size_t block = 0;
        while ((std::size_t{2} << block) <= k) ++block;
        if (block >= blocks.size()) return IntervalSubset::singleton(q, k);
        return IntervalSubset::trace(q, k, blocks[block][k - (std::size_t{1} << block)]);
      },
      "slalom");

  const Rational lo = Rational(1, 2) - eps_prime;
  const Rational hi = Rational(1, 2) + eps_prime;
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i < slalom.blocks[j].size(); ++i) {
      const std::size_t k = (std::size_t{1} << j) + i;
      const BigNat c = exact_count(slalom.blocks[j][i], p.start(k), p.end(k), k);
      Rational r = ratio(c, p.size(k));
      if (r <= lo || r >= hi) {
        throw PreconditionError("candidate " + std::to_string(i) + " of block " + std::to_string(j) + " has ratio " +
                                to_string(r) + " on I_" + std::to_string(k) + ", outside the band");
      }
    }
  }

  const std::size_t k = laver_blocks(m).first + branch;
  Certificate cert;
  cert.kind = ChainKind::slalom_chain;
  cert.conclusion = Conclusion::at_least_upper;
  cert.index = k;
  cert.epsilon = eps;
  cert.epsilon_prime = eps_prime;
  cert.raw["k"] = big(k);
  cert.raw["m"] = big(m);
  cert.raw["branch"] = big(branch);
  cert.raw["before"] = p.start(k);
  cert.raw["size"] = p.size(k);
  cert.raw["chosen"] = x.on(k).cardinality();
  cert.raw["prior"] = x.count_before(k);
  record_partition(cert, p);
  seal(cert);
  return {x, cert};
}

Rational certified_ratio(const Certificate& cert) {
  if (cert.steps.empty()) throw PreconditionError("certificate has no steps");
  return cert.steps.front().lhs;
}

}  // namespace densplit
