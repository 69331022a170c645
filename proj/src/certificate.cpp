#include "densplit/certificate.hpp"

#include "densplit/errors.hpp"

namespace densplit {

namespace {

const BigNat& field(const std::map<std::string, BigNat>& raw, const std::string& name) {
  auto it = raw.find(name);
  if (it == raw.end()) throw PreconditionError("certificate lacks raw field '" + name + "'");
  return it->second;
}

Rational quotient(const Rational& a, const Rational& b) {
  if (sgn(b) == 0) throw PreconditionError("zero denominator in certificate step");
  return a / b;
}

Rational reciprocal_plus_one(const Rational& t) { return quotient(Rational(1), t + 1); }

long exponent_of(const BigNat& n) {
  if (!n.fits_slong_p()) throw PreconditionError("certificate index too large");
  return n.get_si();
}

}  // namespace

std::vector<InequalityStep> derive_steps(ChainKind kind, const std::map<std::string, BigNat>& raw,
                                         const Rational& epsilon, const std::optional<Rational>& epsilon_prime) {
  const Rational upper = Rational(1, 2) + epsilon;
  const Rational lower = Rational(1, 2) - epsilon;
  const Rational before(field(raw, "before"));
  const Rational size(field(raw, "size"));
  std::vector<InequalityStep> steps;
  switch (kind) {
    case ChainKind::majority_case: {
      const long n = exponent_of(field(raw, "n"));
      const Rational hit(field(raw, "hit"));
      const Rational a = quotient(Rational(field(raw, "num")), Rational(field(raw, "den")));
      const Rational b = quotient(hit, before + hit);
      const Rational c = reciprocal_plus_one(quotient(before, hit));
      const Rational d = reciprocal_plus_one(quotient(before, size / 2));
      const Rational e = reciprocal_plus_one(pow2(1 - n));
      steps = {{a, Relation::ge, b}, {b, Relation::eq, c}, {c, Relation::gt, d}, {d, Relation::gt, e},
               {e, Relation::ge, upper}};
      break;
    }
    case ChainKind::minority_case: {
      const long n = exponent_of(field(raw, "n"));
      const Rational miss(field(raw, "miss"));
      const Rational a = quotient(Rational(field(raw, "num")), Rational(field(raw, "den")));
      const Rational b = quotient(before, miss);
      const Rational c = quotient(before, size / 2);
      const Rational d = pow2(1 - n);
      steps = {{a, Relation::le, b}, {b, Relation::le, c}, {c, Relation::lt, d}, {d, Relation::le, lower}};
      break;
    }
    case ChainKind::centred_chain:
    case ChainKind::slalom_chain: {
      if (!epsilon_prime) throw PreconditionError("chain needs epsilon'");
      const Rational margin = Rational(1, 2) - *epsilon_prime;
      const Rational chosen(field(raw, "chosen"));
      const Rational prior(field(raw, "prior"));
      const long k = exponent_of(field(raw, kind == ChainKind::centred_chain ? "n" : "k"));
      const Rational a = quotient(chosen, prior + chosen);
      const Rational b = quotient(chosen, before + chosen);
      const Rational c = reciprocal_plus_one(quotient(before, chosen));
      const Rational d = reciprocal_plus_one(quotient(before, margin * size));
      const Rational e = reciprocal_plus_one(quotient(pow2(-k), margin));
      steps = {{a, Relation::ge, b}, {b, Relation::eq, c}, {c, Relation::gt, d}, {d, Relation::gt, e}};
      if (kind == ChainKind::slalom_chain) {
        const BigNat& m = field(raw, "m");
        if (!m.fits_ulong_p() || m.get_ui() > 62) throw PreconditionError("block index too large");
        const Rational f = reciprocal_plus_one(quotient(pow2(-(1L << m.get_ui())), margin));
        steps.push_back({e, Relation::ge, f});
        steps.push_back({f, Relation::ge, upper});
      } else {
        steps.push_back({e, Relation::ge, upper});
      }
      break;
    }
  }
  return steps;
}

bool relation_holds(const Rational& lhs, Relation rel, const Rational& rhs) {
  switch (rel) {
    case Relation::ge: return lhs >= rhs;
    case Relation::gt: return lhs > rhs;
    case Relation::eq: return lhs == rhs;
    case Relation::le: return lhs <= rhs;
    case Relation::lt: return lhs < rhs;
  }
  return false;
}

CertificateCheck verify_certificate(const Certificate& cert) {
  CertificateCheck check;
  auto fail = [&](std::string why) {
    check.ok = false;
    check.failures.push_back(std::move(why));
  };

  if (cert.epsilon <= 0 || cert.epsilon >= Rational(1, 2)) fail("epsilon outside (0, 1/2)");
  if (cert.epsilon_prime && (*cert.epsilon_prime <= cert.epsilon || *cert.epsilon_prime >= Rational(1, 2))) {
    fail("epsilon' outside (epsilon, 1/2)");
  }

  const std::string index_field = cert.kind == ChainKind::slalom_chain ? "k" : "n";
  if (auto it = cert.raw.find(index_field); it == cert.raw.end() || it->second != big(cert.index)) {
    fail("raw index disagrees with the certified index");
  }
  if (cert.kind == ChainKind::slalom_chain) {
    auto m = cert.raw.find("m");
    auto b = cert.raw.find("branch");
    if (m == cert.raw.end() || b == cert.raw.end() || !m->second.fits_ulong_p() || m->second.get_ui() > 62 ||
        b->second >= BigNat(1) << m->second.get_ui() ||
        (BigNat(1) << m->second.get_ui()) + b->second != big(cert.index)) {
      fail("slalom index is not 2^m + branch with branch < 2^m");
    }
  }

  // Interval sizes must match the partition that produced them.
  try {
    std::optional<IntervalPartition> p;
    if (cert.partition) p = IntervalPartition::build(*cert.partition, cert.index + 1);
    if (cert.boundaries) p = IntervalPartition::from_boundaries(*cert.boundaries);
    if (p) {
      if (cert.raw.count("before") && cert.raw.at("before") != p->start(cert.index)) {
        fail("raw |I_<n| disagrees with the partition");
      }
      if (cert.raw.count("size") && cert.raw.at("size") != p->size(cert.index)) {
        fail("raw |I_n| disagrees with the partition");
      }
    }
  } catch (const std::exception& e) {
    fail(std::string("partition check failed: ") + e.what());
  }

  std::vector<InequalityStep> expected;
  try {
    expected = derive_steps(cert.kind, cert.raw, cert.epsilon, cert.epsilon_prime);
  } catch (const std::exception& e) {
    fail(std::string("cannot recompute steps: ") + e.what());
    return check;
  }
  if (expected.size() != cert.steps.size()) {
    fail("step count " + std::to_string(cert.steps.size()) + " differs from recomputed " +
         std::to_string(expected.size()));
    return check;
  }
  const bool upward = cert.conclusion == Conclusion::at_least_upper;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const InequalityStep& s = cert.steps[i];
    const std::string where = "step " + std::to_string(i + 1);
    if (!(s == expected[i])) fail(where + " differs from the value recomputed from raw cardinalities");
    if (!relation_holds(s.lhs, s.rel, s.rhs)) fail(where + " does not hold");
    if (i + 1 < cert.steps.size() && s.rhs != cert.steps[i + 1].lhs) fail(where + " does not chain to the next");
    bool direction_ok = upward ? (s.rel == Relation::ge || s.rel == Relation::gt || s.rel == Relation::eq)
                               : (s.rel == Relation::le || s.rel == Relation::lt || s.rel == Relation::eq);
    if (!direction_ok) fail(where + " points the wrong way for the conclusion");
  }
  const Rational goal = upward ? Rational(Rational(1, 2) + cert.epsilon) : Rational(Rational(1, 2) - cert.epsilon);
  if (!cert.steps.empty() && cert.steps.back().rhs != goal) fail("chain does not end at the concluded bound");
  return check;
}

const char* relation_symbol(Relation rel) {
  switch (rel) {
    case Relation::ge: return ">=";
    case Relation::gt: return ">";
    case Relation::eq: return "=";
    case Relation::le: return "<=";
    case Relation::lt: return "<";
  }
  return "?";
}

Relation parse_relation(const std::string& text) {
  if (text == ">=") return Relation::ge;
  if (text == ">") return Relation::gt;
  if (text == "=") return Relation::eq;
  if (text == "<=") return Relation::le;
  if (text == "<") return Relation::lt;
  throw ParseError("unknown relation '" + text + "'");
}

const char* chain_kind_name(ChainKind kind) {
  switch (kind) {
    case ChainKind::majority_case: return "majority-case";
    case ChainKind::minority_case: return "minority-case";
    case ChainKind::centred_chain: return "centred-chain";
    case ChainKind::slalom_chain: return "slalom-chain";
  }
  return "?";
}

ChainKind parse_chain_kind(const std::string& text) {
  if (text == "majority-case") return ChainKind::majority_case;
  if (text == "minority-case") return ChainKind::minority_case;
  if (text == "centred-chain") return ChainKind::centred_chain;
  if (text == "slalom-chain") return ChainKind::slalom_chain;
  throw ParseError("unknown certificate kind '" + text + "'");
}

}  // namespace densplit
