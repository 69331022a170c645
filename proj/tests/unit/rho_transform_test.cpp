#include <doctest.h>

#include <random>

#include "densplit/descriptor.hpp"
#include "densplit/errors.hpp"
#include "densplit/rho_transform.hpp"

using namespace densplit;

namespace {

// m-th binary digit of num/den as floor(num * 2^m / den) mod 2.
bool binary_digit(const Rational& q, std::size_t m) {
  BigNat scaled = (BigNat(q.get_num()) << m) / q.get_den();
  return mpz_odd_p(scaled.get_mpz_t());
}

Rational power(Rational b, long e) {
  Rational r = 1;
  if (e < 0) {
    b = 1 / b;
    e = -e;
  }
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

Rational random_unit(std::mt19937_64& rng, unsigned max_den) {
  unsigned den = 2 + rng() % (max_den - 1);
  unsigned num = 1 + rng() % (den - 1);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::vector<OmegaSet> structured_family(const IntervalPartition& p) {
  return {parse_set("evens"), parse_set("prog(1,3)"), parse_set("osc"), parse_set("iv:first-half", &p),
          parse_set("per(,110)")};
}

}  // namespace

TEST_CASE("binary digits") {
  LevelSelection half = binary_digits(Rational(1, 2), 10);
  CHECK(half.levels == std::vector<std::size_t>{1});
  CHECK(half.residual == 0);
  CHECK(binary_digits(Rational(11, 16), 10).levels == std::vector<std::size_t>{1, 3, 4});
  LevelSelection third = binary_digits(Rational(1, 3), 8);
  CHECK(third.levels == std::vector<std::size_t>{2, 4, 6, 8});
  CHECK(third.residual == Rational(1, 768));
  CHECK_THROWS_AS(binary_digits(Rational(1), 4), PreconditionError);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Rational q = random_unit(rng, 5000);
    const std::size_t k = 1 + rng() % 30;
    LevelSelection s = binary_digits(q, k);
    std::vector<std::size_t> want;
    for (std::size_t m = 1; m <= k; ++m) {
      if (binary_digit(q, m)) want.push_back(m);
    }
    CHECK(s.levels == want);
    CHECK(s.residual >= 0);
    CHECK(s.residual < pow2(-static_cast<long>(k)));
  }
}

TEST_CASE("greedy expansions in a non-integer base") {
  BaseExpansion one = greedy_base_digits(Rational(1), Rational(3, 2), 5);
  REQUIRE(one.digits.size() == 1);
  CHECK(one.digits[0].exponent == 0);
  CHECK(one.digits[0].digit == 1);
  CHECK(one.residual == 0);
  // Frozen from an exact fractions oracle: 5/2 = (3/2)^2 + (3/2)^-4 + 17/324.
  BaseExpansion e = greedy_base_digits(Rational(5, 2), Rational(3, 2), 8);
  CHECK(e.leading == 2);
  REQUIRE(e.digits.size() == 2);
  CHECK(e.digits[0].exponent == 2);
  CHECK(e.digits[1].exponent == -4);
  CHECK(e.residual == Rational(17, 324));
  CHECK(e.residual_bound == Rational(32, 243));
  BaseExpansion bin = greedy_base_digits(Rational(1, 2), Rational(2), 4);
  REQUIRE(bin.digits.size() == 1);
  CHECK(bin.digits[0].exponent == -1);
  CHECK_THROWS_AS(greedy_base_digits(Rational(1), Rational(1), 3), PreconditionError);
}

TEST_CASE("expansions reconstruct their input") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Rational x(1 + rng() % 1000, 1 + rng() % 97);
    x.canonicalize();
    Rational b(101 + rng() % 300, 100);
    b.canonicalize();
    const std::size_t k = 1 + rng() % 12;
    BaseExpansion e = greedy_base_digits(x, b, k);
    Rational sum = e.residual;
    for (const BaseDigit& d : e.digits) {
      CHECK(Rational(d.digit) < b);
      CHECK(d.exponent <= e.leading);
      CHECK(d.exponent > e.leading - static_cast<long>(k));
      sum += Rational(d.digit) * power(b, d.exponent);
    }
    CHECK(sum == x);
    CHECK(power(b, e.leading) <= x);
    CHECK(power(b, e.leading + 1) > x);
    CHECK(e.residual >= 0);
    CHECK(e.residual < e.residual_bound);
  }
}

TEST_CASE("level selection") {
  const Rational rho(3, 5);
  LevelSelection s = select_levels(geometric_weights(rho), Rational(1, 2), 12);
  REQUIRE(s.levels.size() >= 2);
  CHECK(s.levels[0] == 1);
  CHECK(s.levels[1] == 4);
  CHECK(s.trace[0] == Rational(1, 10));
  CHECK(s.trace[2] == Rational(1, 10));
  CHECK(select_levels(dyadic_weights(), Rational(11, 16), 10).levels == binary_digits(Rational(11, 16), 10).levels);
  Rational total = 0;
  for (std::size_t m = 1; m <= 6; ++m) total += geometric_weights(rho)(m);
  LevelSelection all = select_levels(geometric_weights(rho), total, 6);
  CHECK(all.levels.size() == 6);
  CHECK(all.residual == 0);
}

TEST_CASE("greedy residual for rho at least 1/2 is below rho^K") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Rational rho = random_unit(rng, 200);
    if (rho < Rational(1, 2)) rho = 1 - rho;
    LevelSelection s = select_levels(geometric_weights(rho), Rational(1, 2), 10);
    CHECK(s.residual <= power(rho, 10));
  }
}

TEST_CASE("squaring chain") {
  SquaringPlan p = squaring_chain(Rational(3, 4));
  CHECK(p.squarings == 1);
  CHECK(p.result == Rational(9, 16));
  SquaringPlan low = squaring_chain(Rational(1, 5));
  CHECK(low.steps.front() == PlanStep::complement);
  CHECK(low.result == Rational(16, 25));
  CHECK(squaring_chain(Rational(1, 2)).steps.empty());
  CHECK_FALSE(squaring_chain(Rational(1, 2), true).steps.empty());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    SquaringPlan q = squaring_chain(random_unit(rng, 1000));
    CHECK(q.steps.size() <= 64);
    CHECK(q.result > Rational(1, 3));
    CHECK(q.result < Rational(2, 3));
  }
}

TEST_CASE("oracles") {
  CHECK_THROWS_AS(SplitterOracle::bernoulli(Rational(1), 1), PreconditionError);
  OracleContext ctx;
  SUBCASE("round robin halves a single target exactly") {
    SplitterOracle rr = SplitterOracle::round_robin();
    OracleDraw d = rr.draw({parse_set("evens")}, ctx);
    for (std::uint64_t k = 0; k < 1000; ++k) CHECK(d.s.contains(k) == (k % 4 == 0));
    CHECK_THROWS_AS(rr.draw({parse_set("evens"), omega()}, ctx), PreconditionError);
  }
  SUBCASE("Bernoulli oracle splits a structured family") {
    IntervalPartition p = IntervalPartition::minimal();
    OracleDraw d = SplitterOracle::bernoulli(Rational(1, 2), 4).draw(structured_family(p), ctx);
    REQUIRE(d.verdicts.size() == 5);
    for (const SplitVerdict& v : d.verdicts) CHECK(v.diagnostics.max_tail_deviation <= Rational(1, 100));
    OracleDraw again = SplitterOracle::bernoulli(Rational(1, 2), 4).draw(structured_family(p), ctx);
    CHECK(materialize_prefix(again.s, 100000) == materialize_prefix(d.s, 100000));
  }
  SUBCASE("composite targets") {
    SplitterOracle b = SplitterOracle::bernoulli(Rational(3, 4), 2);
    CHECK(SplitterOracle::squared(b).target() == Rational(9, 16));
    CHECK(SplitterOracle::complemented(b).target() == Rational(1, 4));
    CHECK(SplitterOracle::following(b, squaring_chain(Rational(3, 4))).target() == Rational(9, 16));
    OracleDraw d = SplitterOracle::squared(b).draw({omega()}, ctx);
    CHECK(d.verdicts[0].holds_numerically);
  }
}

TEST_CASE("half-mode chain densities") {
  ChainConfig cfg;
  cfg.depth = 4;
  SplitChain c = build_chain({omega()}, SplitterOracle::bernoulli(Rational(1, 2), 9), ChainMode::half, cfg);
  CHECK(c.within_band);
  for (const LevelCheck& l : c.checks) {
    CHECK(l.nested_deviation <= Rational(2, 100));
    CHECK(l.difference_deviation <= Rational(2, 100));
  }
  CHECK(partition_law_holds(c, 1000000));
  // Telescoping at shared checkpoints.
  for (std::size_t m = 1; m <= 4; ++m) {
    DensityReport whole = density_report(c.nested[m - 1], omega(), BigNat(1000000));
    DensityReport kept = density_report(c.nested[m], omega(), BigNat(1000000));
    DensityReport dropped = density_report(c.differences[m - 1], omega(), BigNat(1000000));
    for (std::size_t i = 0; i < whole.ratios.size(); ++i) CHECK(whole.ratios[i] == kept.ratios[i] + dropped.ratios[i]);
  }
}

TEST_CASE("round-robin chain is exact") {
  ChainConfig cfg;
  cfg.depth = 3;
  cfg.horizon = 100000;
  OmegaSet evens = parse_set("evens");
  SplitChain c = build_chain({evens}, SplitterOracle::round_robin(), ChainMode::half, cfg);
  for (std::size_t m = 1; m <= 3; ++m) {
    DensityReport r = density_report(c.nested[m], evens, BigNat(100000), CheckpointRule::every(BigNat(16 * 125)),
                                     Rational(1, 2), pow2(-static_cast<long>(m)));
    CHECK(r.max_tail_deviation == 0);
  }
}

TEST_CASE("rho-mode chain densities") {
  ChainConfig cfg;
  cfg.depth = 3;
  SplitChain c = build_chain({omega()}, SplitterOracle::bernoulli(Rational(3, 5), 2), ChainMode::rho, cfg);
  for (const LevelCheck& l : c.checks) CHECK(l.difference_deviation <= Rational(2, 100));
  CHECK_THROWS_AS(build_chain({omega()}, SplitterOracle::bernoulli(Rational(3, 5), 2), ChainMode::half, cfg),
                  PreconditionError);
  CHECK_THROWS_AS(build_chain({parse_set("list(1,2,3)")}, SplitterOracle::bernoulli(Rational(1, 2), 2), ChainMode::half,
                              cfg),
                  PreconditionError);
}

TEST_CASE("transformations") {
  IntervalPartition p = IntervalPartition::minimal();
  TransformConfig cfg;
  cfg.horizon = 200000;
  cfg.tolerance = Rational(3, 100);
  SUBCASE("forward") {
    TransformResult r = transform_splitter(structured_family(p), Direction::half_to_rho, Rational(7, 16), cfg);
    CHECK(r.selection.levels == std::vector<std::size_t>{2, 3, 4});
    CHECK(r.ok);
  }
  SUBCASE("converse, direct") {
    TransformResult r = transform_splitter(structured_family(p), Direction::rho_to_half, Rational(11, 20), cfg);
    CHECK(r.path == "direct");
    CHECK(r.selection.residual < Rational(1, 100));
    CHECK(r.ok);
  }
  SUBCASE("converse, squaring") {
    TransformResult r = transform_splitter(structured_family(p), Direction::rho_to_half, Rational(3, 4), cfg);
    CHECK(r.path == "squaring");
    CHECK(r.plan.squarings == 1);
    CHECK(r.effective_rho == Rational(9, 16));
    CHECK(r.ok);
  }
  SUBCASE("residual budget too small") {
    cfg.residual_tolerance = Rational(1, 1000000000);
    CHECK_THROWS_AS(transform_splitter({omega()}, Direction::rho_to_half, Rational(3, 4), cfg), ConvergenceError);
  }
}
