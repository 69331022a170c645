#include <doctest.h>

#include "densplit/adversary.hpp"
#include "densplit/descriptor.hpp"
#include "densplit/errors.hpp"
#include "densplit/json_io.hpp"

using namespace densplit;

namespace {

// Least n with 2^-n strictly below t, by doubling.
std::size_t least_power_below(const Rational& t) {
  std::size_t n = 0;
  Rational p = 1;
  while (!(p < t)) {
    p /= 2;
    ++n;
  }
  return n;
}

std::size_t least_power_at_most(const Rational& t) {
  std::size_t n = 0;
  Rational p = 1;
  while (p > t) {
    p /= 2;
    ++n;
  }
  return n;
}

// n0 from 2^-n < min((e' - e)/(1/2 + e), e' - e); k0 from 2^-k <= (1/(1/2 + e) - 1)(1/2 - e').
CentredThresholds thresholds_oracle(const Rational& e, const Rational& ep) {
  const Rational gap = ep - e;
  const Rational n_bound = std::min(Rational(gap / (Rational(1, 2) + e)), gap);
  const Rational k_bound = (1 / (Rational(1, 2) + e) - 1) * (Rational(1, 2) - ep);
  return {least_power_below(n_bound), least_power_at_most(k_bound)};
}

std::vector<OmegaSet> battery(const IntervalPartition& p) {
  return {parse_set("evens"), parse_set("iv:capped(bern(1/2,7))", &p), parse_set("osc"),
          parse_set("iv:first-half", &p), parse_set("per(,110)")};
}

}  // namespace

TEST_CASE("least admissible index") {
  CHECK(min_index_for_eps(Rational(1, 10)) == 3);  // 2^-2 <= 2/5 fails at n = 2
  CHECK(min_index_for_eps(Rational(1, 4)) == 3);
  CHECK(min_index_for_eps(Rational(2, 5)) == 5);
  CHECK_THROWS_AS(min_index_for_eps(Rational(1, 2)), PreconditionError);
}

TEST_CASE("conditions extend") {
  IntervalPartition p = IntervalPartition::minimal();
  Condition a;
  Condition b = a.extend(IntervalSubset::full(p, 3));
  Condition c = b.extend(IntervalSubset::singleton(p, 5));
  CHECK(c.extends(b));
  CHECK(c.extends(a));
  CHECK_FALSE(b.extends(c));
  CHECK_THROWS_AS(c.extend(IntervalSubset::none(p, 3)), PreconditionError);
  CHECK(c.domain() == std::vector<std::size_t>{3, 5});
}

TEST_CASE("defeating a bisector") {
  IntervalPartition p = IntervalPartition::minimal();
  for (const OmegaSet& s : battery(p)) {
    for (const Rational& eps : {Rational(1, 10), Rational(1, 4), Rational(2, 5)}) {
      CAPTURE(s.describe());
      CAPTURE(to_string(eps));
      DefeatResult r = defeat_bisector(s, eps, p, Condition{}, 3);
      REQUIRE(r.certificates.size() == 3);
      for (std::size_t i = 0; i < 3; ++i) {
        const Certificate& c = r.certificates[i];
        CHECK(verify_certificate(c).ok);
        const std::size_t n = c.index;
        // Second route: per-interval counts summed by hand.
        BigNat num = 0, den = 0;
        for (std::size_t k = 0; k <= n; ++k) {
          const OmegaSet piece = r.x.on(k).pattern();
          num += count_range(intersect(s, piece), p.start(k), p.end(k));
          den += r.x.on(k).cardinality();
        }
        const Rational q = ratio(num, den);
        CHECK(q == certified_ratio(c));
        CHECK((q > Rational(1, 2) + eps || q < Rational(1, 2) - eps));
        if (p.end(n) <= 200000) {
          Prefix xs = materialize_prefix(r.x.as_set(), to_u64(p.end(n)));
          Prefix ss = materialize_prefix(s, to_u64(p.end(n)));
          std::uint64_t both = 0;
          for (std::size_t w = 0; w < xs.words.size(); ++w) both += __builtin_popcountll(xs.words[w] & ss.words[w]);
          CHECK(both == num);
          CHECK(xs.count() == den);
        }
      }
      CHECK(r.condition.domain().size() == 3);
    }
  }
}

TEST_CASE("defeat respects a starting condition") {
  IntervalPartition p = IntervalPartition::minimal();
  Condition start = Condition{}.extend(IntervalSubset::full(p, 3));
  DefeatResult r = defeat_bisector(parse_set("evens"), Rational(1, 10), p, start, 2);
  CHECK(r.condition.extends(start));
  CHECK(r.rounds[0].index == 4);
  CHECK(r.rounds[1].index == 5);
}

TEST_CASE("defeat rejects partitions without growth") {
  IntervalPartition bad = IntervalPartition::from_boundaries({BigNat(0), BigNat(2), BigNat(6), BigNat(40), BigNat(400)});
  CHECK_THROWS_AS(defeat_bisector(parse_set("evens"), Rational(1, 10), bad, Condition{}, 1), PreconditionError);
}

TEST_CASE("centred thresholds") {
  CentredThresholds t = centred_thresholds(Rational(1, 10), Rational(1, 5));
  CHECK(t.n0 == 4);
  CHECK(t.k0 == 3);
  for (auto [e, ep] : std::vector<std::pair<Rational, Rational>>{{Rational(1, 10), Rational(1, 5)},
                                                                  {Rational(1, 5), Rational(21, 100)},
                                                                  {Rational(1, 100), Rational(2, 5)},
                                                                  {Rational(1, 4), Rational(1, 3)}}) {
    CentredThresholds got = centred_thresholds(e, ep);
    CentredThresholds want = thresholds_oracle(e, ep);
    CHECK(got.n0 == want.n0);
    CHECK(got.k0 == want.k0);
  }
  CentredThresholds near = centred_thresholds(Rational(1, 5), Rational(21, 100));
  CHECK(near.n0 == 7);
  CHECK(near.k0 == 4);
  CHECK_THROWS_AS(centred_thresholds(Rational(1, 5), Rational(1, 10)), PreconditionError);
}

TEST_CASE("k0 does not grow when only epsilon' shrinks") {
  const Rational e(1, 10);
  std::size_t last = centred_thresholds(e, Rational(49, 100)).k0;
  for (int num = 48; num >= 11; --num) {
    std::size_t k0 = centred_thresholds(e, Rational(num, 100)).k0;
    CHECK(k0 <= last);
    last = k0;
  }
}

TEST_CASE("centred escape certificates") {
  IntervalPartition p = IntervalPartition::minimal();
  for (SymbolicSet e : {first_halves(p), last_halves(p), capped_trace(p, parse_set("evens"))}) {
    for (std::size_t n = 3; n <= 8; ++n) {
      Certificate c = centred_escape(e, Rational(1, 10), Rational(1, 5), n);
      CHECK(verify_certificate(c).ok);
      const Rational q = ratio(e.on(n).cardinality(), e.count_before(n + 1));
      CHECK(q == certified_ratio(c));
      CHECK(q >= Rational(3, 5));
    }
  }
  CHECK_THROWS_AS(centred_escape(first_halves(p), Rational(1, 10), Rational(1, 5), 2), PreconditionError);
  CHECK_THROWS_AS(centred_escape(interval_minima(p), Rational(1, 10), Rational(1, 5), 4), PreconditionError);
}

TEST_CASE("slalom escape certificates") {
  IntervalPartition p = IntervalPartition::minimal();
  const std::vector<OmegaSet> pool{parse_set("evens"), parse_set("odds"), parse_set("per(,110)"),
                                   parse_set("per(,100)"), parse_set("union(prog(0,4),prog(1,4))")};
  Slalom sl{p, {}, {}};
  for (std::size_t m = 0; m < 3; ++m) {
    std::vector<OmegaSet> block;
    for (std::size_t j = 0; j < laver_blocks(m).second; ++j) block.push_back(pool[(m + j) % pool.size()]);
    sl.blocks.push_back(block);
    sl.branch.push_back(m % laver_blocks(m).second);
  }
  for (std::size_t b = 0; b < 4; ++b) {
    sl.branch[2] = b;
    SlalomEscape esc = laver_escape(sl, Rational(1, 10), Rational(1, 5), 2);
    CHECK(verify_certificate(esc.certificate).ok);
    CHECK(esc.certificate.index == 4 + b);
    const std::size_t k = 4 + b;
    const BigNat inside = count_range(esc.x.as_set(), p.start(k), p.end(k));
    const BigNat upto = count_below(esc.x.as_set(), p.end(k));
    CHECK(ratio(inside, upto) == certified_ratio(esc.certificate));
    CHECK(ratio(inside, upto) >= Rational(3, 5));
  }
  CHECK(laver_escape(sl, Rational(1, 10), Rational(1, 5), 2).x.on(0).cardinality() == 0);
  // Block 1 reaches only 1/(2^-2/(3/10) + 1) = 6/11 < 3/5.
  CHECK_THROWS_AS(laver_escape(sl, Rational(1, 10), Rational(1, 5), 1), PreconditionError);
  sl.blocks[1].pop_back();
  CHECK_THROWS_AS(laver_escape(sl, Rational(1, 10), Rational(1, 5), 2), PreconditionError);
}

TEST_CASE("tampered certificates are rejected") {
  IntervalPartition p = IntervalPartition::minimal();
  std::vector<Certificate> certs = defeat_bisector(parse_set("evens"), Rational(1, 4), p, Condition{}, 3).certificates;
  certs.push_back(centred_escape(first_halves(p), Rational(1, 10), Rational(1, 5), 4));
  for (const Certificate& c : certs) {
    const Json j = to_json(c);
    CHECK(verify_certificate(certificate_from_json(j)).ok);
    for (const auto& [key, value] : j["raw"].items()) {
      for (int delta : {-1, 1}) {
        Json t = j;
        BigNat v(value.get<std::string>());
        if (v == 0 && delta < 0) continue;
        v += delta;
        t["raw"][key] = v.get_str();
        CAPTURE(key);
        CHECK_FALSE(verify_certificate(certificate_from_json(t)).ok);
      }
    }
    Json bumped = j;
    bumped["steps"][0]["lhs"] = to_string(rational_from_json(j["steps"][0]["lhs"]) + 1);
    CHECK_FALSE(verify_certificate(certificate_from_json(bumped)).ok);
    Json eps = j;
    eps["epsilon"] = "1/100";
    CHECK_FALSE(verify_certificate(certificate_from_json(eps)).ok);
  }
}

TEST_CASE("malformed certificates fail to parse") {
  CHECK_THROWS_AS(certificate_from_json(Json::parse(R"({"kind":"majority-case"})")), ParseError);
  CHECK_THROWS_AS(certificate_from_json(Json::parse(R"({"kind":"nope","index":1})")), ParseError);
}
