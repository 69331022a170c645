#include <doctest.h>

#include <bit>
#include <random>

#include "densplit/descriptor.hpp"
#include "densplit/errors.hpp"
#include "densplit/json_io.hpp"
#include "densplit/relsys.hpp"

using namespace densplit;

namespace {

FiniteRelSys make(std::size_t nx, std::size_t ny, const std::function<bool(std::size_t, std::size_t)>& rel) {
  FiniteRelSys r;
  for (std::size_t i = 0; i < nx; ++i) r.xs.push_back("x" + std::to_string(i));
  for (std::size_t j = 0; j < ny; ++j) r.ys.push_back("y" + std::to_string(j));
  r.rel.assign(nx, std::vector<bool>(ny, false));
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) r.rel[i][j] = rel(i, j);
  }
  return r;
}

bool valid(const FiniteRelSys& r) {
  for (const auto& row : r.rel) {
    bool any = false;
    for (bool b : row) any = any || b;
    if (!any) return false;
  }
  for (std::size_t j = 0; j < r.ys.size(); ++j) {
    bool all = true;
    for (const auto& row : r.rel) all = all && row[j];
    if (all) return false;
  }
  return true;
}

FiniteRelSys random_system(std::mt19937_64& rng) {
  for (;;) {
    const std::size_t nx = 1 + rng() % 8, ny = 1 + rng() % 8;
    const unsigned fill = 20 + rng() % 60;
    FiniteRelSys r = make(nx, ny, [&](std::size_t, std::size_t) { return rng() % 100 < fill; });
    if (valid(r)) return r;
  }
}

// Brute force over all subset masks, smallest first.
std::size_t brute_bounding(const FiniteRelSys& r) {
  std::size_t best = 99;
  for (std::uint64_t m = 1; m < (1ULL << r.xs.size()); ++m) {
    bool bounded = false;
    for (std::size_t j = 0; j < r.ys.size() && !bounded; ++j) {
      bool all = true;
      for (std::size_t i = 0; i < r.xs.size(); ++i) all = all && (!((m >> i) & 1) || r.rel[i][j]);
      bounded = all;
    }
    if (!bounded) best = std::min<std::size_t>(best, std::popcount(m));
  }
  return best;
}

std::size_t brute_dominating(const FiniteRelSys& r) {
  std::size_t best = 99;
  for (std::uint64_t m = 1; m < (1ULL << r.ys.size()); ++m) {
    bool covers = true;
    for (std::size_t i = 0; i < r.xs.size() && covers; ++i) {
      bool hit = false;
      for (std::size_t j = 0; j < r.ys.size(); ++j) hit = hit || (((m >> j) & 1) && r.rel[i][j]);
      covers = hit;
    }
    if (covers) best = std::min<std::size_t>(best, std::popcount(m));
  }
  return best;
}

TukeyPair random_pair(std::mt19937_64& rng, std::size_t x0, std::size_t x1, std::size_t y1, std::size_t y0) {
  TukeyPair p;
  for (std::size_t i = 0; i < x0; ++i) p.f.push_back(rng() % x1);
  for (std::size_t j = 0; j < y1; ++j) p.g.push_back(rng() % y0);
  return p;
}

// R0 on (X0, Y0) with x0 below y0 whenever the connection requires it, plus random extras.
std::optional<FiniteRelSys> pullback(std::mt19937_64& rng, const FiniteRelSys& r1, const TukeyPair& p, std::size_t y0) {
  FiniteRelSys r0 = make(p.f.size(), y0, [&](std::size_t, std::size_t) { return rng() % 4 == 0; });
  for (std::size_t i = 0; i < p.f.size(); ++i) {
    for (std::size_t j = 0; j < r1.ys.size(); ++j) {
      if (r1.rel[p.f[i]][j]) r0.rel[i][p.g[j]] = true;
    }
  }
  if (!valid(r0)) return std::nullopt;
  return r0;
}

}  // namespace

TEST_CASE("small systems") {
  const FiniteRelSys id = make(3, 3, [](std::size_t i, std::size_t j) { return i == j; });
  CHECK(bounding_number(id) == 2);
  CHECK(dominating_number(id) == 3);
  const FiniteRelSys d = dual(id);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(d.rel[i][j] == (i != j));
  }
  const FiniteRelSys two = make(2, 2, [](std::size_t i, std::size_t j) { return i == j; });
  CHECK(bounding_number(two) == 2);
  CHECK(dominating_number(two) == 2);
  const FiniteRelSys le = make(3, 2, [](std::size_t i, std::size_t j) { return i <= j; });
  CHECK_THROWS_AS(validate(le), PreconditionError);
  CHECK_THROWS_AS(bounding_number(le), PreconditionError);
  // One column covers all but x3, a second covers x3.
  const FiniteRelSys cover = make(4, 3, [](std::size_t i, std::size_t j) { return j == 0 ? i < 3 : j == 1 ? i == 3 : i == 1; });
  CHECK(dominating_number(cover) == 2);
}

TEST_CASE("duality against brute force") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const FiniteRelSys r = random_system(rng);
    const FiniteRelSys d = dual(r);
    CHECK(dual(d) == r);
    CHECK(bounding_number(r) == brute_bounding(r));
    CHECK(dominating_number(r) == brute_dominating(r));
    CHECK(bounding_number(d) == dominating_number(r));
    CHECK(dominating_number(d) == bounding_number(r));
  }
}

TEST_CASE("larger dominating search") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    FiniteRelSys r;
    do {
      r = make(12, 21, [&](std::size_t, std::size_t) { return rng() % 5 == 0; });
    } while (!valid(r));
    CHECK(dominating_number(r) == brute_dominating(r));
  }
}

TEST_CASE("Tukey connections") {
  const FiniteRelSys id = make(3, 3, [](std::size_t i, std::size_t j) { return i == j; });
  CHECK(check_tukey(id, id, identity_pair(id)).holds);
  // G sends everything to y0, which bounds only x0.
  TukeyPair bad{{0, 1, 2}, {0, 0, 0}};
  TukeyVerdict v = check_tukey(id, id, bad);
  CHECK_FALSE(v.holds);
  REQUIRE(v.counterexample);
  CHECK(*v.counterexample == std::pair<std::size_t, std::size_t>{1, 1});

  std::mt19937_64 rng(99);
  int accepted = 0;
  while (accepted < 100) {
    const FiniteRelSys r1 = random_system(rng);
    const std::size_t x0 = 1 + rng() % 7, y0 = 2 + rng() % 6;
    const TukeyPair p = random_pair(rng, x0, r1.xs.size(), r1.ys.size(), y0);
    auto r0 = pullback(rng, r1, p, y0);
    if (!r0) continue;
    ++accepted;
    REQUIRE(check_tukey(*r0, r1, p).holds);
    CHECK(bounding_number(*r0) >= bounding_number(r1));
    CHECK(dominating_number(*r0) <= dominating_number(r1));
    CHECK(check_tukey(dual(r1), dual(*r0), reversed(p)).holds);
  }

  // Reversal agrees on arbitrary (mostly rejected) pairs.
  for (int t = 0; t < 200; ++t) {
    const FiniteRelSys a = random_system(rng), b = random_system(rng);
    const TukeyPair p = random_pair(rng, a.xs.size(), b.xs.size(), b.ys.size(), a.ys.size());
    CHECK(check_tukey(a, b, p).holds == check_tukey(dual(b), dual(a), reversed(p)).holds);
  }
}

TEST_CASE("composition of accepted connections") {
  std::mt19937_64 rng(31);
  int done = 0;
  while (done < 50) {
    const FiniteRelSys r2 = random_system(rng);
    const std::size_t x1 = 1 + rng() % 6, y1 = 2 + rng() % 5;
    const TukeyPair p12 = random_pair(rng, x1, r2.xs.size(), r2.ys.size(), y1);
    auto r1 = pullback(rng, r2, p12, y1);
    if (!r1) continue;
    const std::size_t x0 = 1 + rng() % 6, y0 = 2 + rng() % 5;
    const TukeyPair p01 = random_pair(rng, x0, x1, y1, y0);
    auto r0 = pullback(rng, *r1, p01, y0);
    if (!r0) continue;
    ++done;
    const TukeyPair c = compose(p01, p12);
    for (std::size_t i = 0; i < x0; ++i) CHECK(c.f[i] == p12.f[p01.f[i]]);
    for (std::size_t j = 0; j < r2.ys.size(); ++j) CHECK(c.g[j] == p01.g[p12.g[j]]);
    CHECK(check_tukey(*r0, r2, c).holds);
  }
}

TEST_CASE("sparse range bound for powers of two") {
  const OmegaSet pow2set = parse_set("pow(2)");
  const OmegaSet tw = tower();
  SparseRangeResult r = sparse_range_check(pow2set, [&](std::size_t n) { return kth_element(tw, BigNat(n)); }, 1, 10);
  CHECK(r.holds);
  CHECK(r.effective_threshold == 1);
  REQUIRE(r.rows.size() == 11);
  for (const SparseRangeRow& row : r.rows) {
    CHECK(row.ok);
    CHECK(row.max_ratio <= row.bound);
    CHECK(row.bound == Rational(1 + row.n) / pow2(static_cast<long>(row.n)));
  }
  // Direct count for the first rows: R = {1, 2, 4, ...}, ran(x) = {2, 4, 16, 256, ...}.
  for (std::size_t n = 0; n <= 3; ++n) {
    const std::uint64_t lo = 1ULL << (1ULL << n), hi = 1ULL << (1ULL << (n + 1));
    Rational best = 0;
    for (std::uint64_t k = lo + 1; k <= hi; ++k) {
      std::uint64_t in_r = 0, in_both = 0;
      for (std::uint64_t e = 1; e < k; e <<= 1) {
        ++in_r;
        const bool tower_member = e == 2 || e == 4 || e == 16 || e == 256 || e == 65536;
        if (tower_member) ++in_both;
      }
      best = std::max(best, Rational(in_both, in_r));
    }
    best.canonicalize();
    CHECK(r.rows[n].max_ratio == best);
  }
  // Threshold 0 is evaluated with the bound at threshold 1.
  CHECK(sparse_range_check(pow2set, [&](std::size_t n) { return kth_element(tw, BigNat(n)); }, 0, 6).effective_threshold == 1);
}

TEST_CASE("sparse range bound errors and evens") {
  const OmegaSet evens = parse_set("evens");
  SparseRangeResult e = sparse_range_check(evens, [&](std::size_t n) -> BigNat { return kth_element(evens, BigNat(1) << n) + 1; }, 1, 8);
  CHECK(e.holds);
  for (const SparseRangeRow& row : e.rows) CHECK(row.max_ratio == 0);
  CHECK_THROWS_WITH_AS(sparse_range_check(evens, [](std::size_t n) { return BigNat(n); }, 2, 8),
                       doctest::Contains("n = 2"), PreconditionError);
  CHECK_THROWS_AS(sparse_range_check(evens, [](std::size_t) { return BigNat(1000000); }, 0, 3), PreconditionError);
}

TEST_CASE("gallery and serialization") {
  for (const std::string name : {"dom:2:3", "reap:4", "reap-rho:4:1/3:1/6"}) {
    GalleryEntry g = gallery(name);
    CHECK_FALSE(g.system.xs.empty());
    CHECK_FALSE(g.note.empty());
    const FiniteRelSys back = relsys_from_json(to_json(g.system));
    CHECK(back == g.system);
  }
  CHECK_NOTHROW(validate(gallery("reap:4").system));
  CHECK_THROWS_AS(validate(gallery("dom:2:3").system), PreconditionError);
  CHECK_THROWS_AS(gallery("nope"), ParseError);
  CHECK_THROWS_AS(gallery("reap:9"), PreconditionError);
  const TukeyPair p{{1, 0}, {2, 0, 1}};
  const TukeyPair q = tukey_pair_from_json(to_json(p));
  CHECK(q.f == p.f);
  CHECK(q.g == p.g);
}
