#include "densplit/rho_transform.hpp"

#include <cmath>
#include <sstream>

#include "densplit/errors.hpp"
#include "set_nodes.hpp"

namespace densplit {

namespace {

void require_unit_open(const Rational& rho, const char* what) {
  if (rho <= 0 || rho >= 1) throw PreconditionError(std::string(what) + " must lie in (0, 1)");
}

Rational power(const Rational& base, std::size_t e) {
  Rational r = 1;
  Rational b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Rational power(const Rational& base, long e) {
  if (e >= 0) return power(base, static_cast<std::size_t>(e));
  return 1 / power(base, static_cast<std::size_t>(-e));
}

// Rounded up to 1/10000.
Rational round_up(double v) {
  return Rational(BigNat(static_cast<long>(std::ceil(v * 10000.0))), 10000);
}

}  // namespace

LevelSelection binary_digits(const Rational& rho, std::size_t k) {
  require_unit_open(rho, "rho");
  return select_levels(dyadic_weights(), rho, k);
}

BaseExpansion greedy_base_digits(const Rational& x, const Rational& b, std::size_t k) {
  if (b <= 1) throw PreconditionError("base must exceed 1");
  if (x <= 0) throw PreconditionError("x must be positive");
  if (k == 0) throw PreconditionError("at least one digit position is needed");
  long n = 0;
  if (x >= 1) {
    while (power(b, n + 1) <= x) ++n;
  } else {
    while (power(b, n) > x) --n;
  }
  BaseExpansion e{n, {}, x, power(b, n - static_cast<long>(k) + 1)};
  BigNat cap(b.get_num() / b.get_den());
  if (BigNat(cap * b.get_den()) != b.get_num()) cap += 1;  // ceil(b)
  cap -= 1;
  for (std::size_t i = 0; i < k; ++i) {
    const long exponent = n - static_cast<long>(i);
    const Rational place = power(b, exponent);
    Rational q = e.residual / place;
    BigNat digit = q.get_num() / q.get_den();
    if (digit > cap) digit = cap;
    if (sgn(digit) == 0) continue;
    e.residual -= Rational(digit) * place;
    e.digits.push_back({exponent, digit});
  }
  return e;
}

LevelWeights dyadic_weights() {
  return [](std::size_t m) -> Rational { return pow2(-static_cast<long>(m)); };
}

LevelWeights geometric_weights(const Rational& rho) {
  require_unit_open(rho, "rho");
  return [rho](std::size_t m) -> Rational { return power(rho, m - 1) * (1 - rho); };
}

LevelSelection select_levels(const LevelWeights& weights, const Rational& target, std::size_t k) {
  if (target <= 0) throw PreconditionError("target must be positive");
  LevelSelection sel{{}, target, {}};
  for (std::size_t m = 1; m <= k; ++m) {
    Rational w = weights(m);
    if (w <= 0) throw PreconditionError("weights must be positive");
    if (w <= sel.residual) {
      sel.levels.push_back(m);
      sel.residual -= w;
    }
    sel.trace.push_back(sel.residual);
  }
  return sel;
}

SquaringPlan squaring_chain(const Rational& rho, bool force, std::size_t max_iterations) {
  require_unit_open(rho, "rho");
  const Rational low(1, 3), high(2, 3);
  SquaringPlan plan{{}, rho, rho, 0};
  auto inside = [&](const Rational& r) { return r > low && r < high; };
  while (!inside(plan.result) || (force && plan.steps.empty())) {
    if (plan.steps.size() >= max_iterations) {
      throw ConvergenceError("squaring chain for " + to_string(rho) + " did not settle within " +
                             std::to_string(max_iterations) + " steps");
    }
    // Inside the band a forced step squares from above 1/2 and flips from below.
    const bool flip = inside(plan.result) ? plan.result < Rational(1, 2) : plan.result <= low;
    if (flip) {
      plan.result = 1 - plan.result;
      plan.steps.push_back(PlanStep::complement);
    } else {
      plan.result *= plan.result;
      plan.steps.push_back(PlanStep::square);
      ++plan.squarings;
    }
  }
  return plan;
}

struct SplitterOracle::Impl {
  enum class Kind { bernoulli, round_robin, squared, complemented };
  Kind kind;
  Rational p;
  std::uint64_t seed = 0;
  std::shared_ptr<const Impl> base;
};

SplitterOracle SplitterOracle::bernoulli(const Rational& p, std::uint64_t seed) {
  require_unit_open(p, "oracle probability");
  return SplitterOracle(std::make_shared<Impl>(Impl{Impl::Kind::bernoulli, p, seed, nullptr}));
}

SplitterOracle SplitterOracle::round_robin() {
  return SplitterOracle(std::make_shared<Impl>(Impl{Impl::Kind::round_robin, Rational(1, 2), 0, nullptr}));
}

SplitterOracle SplitterOracle::squared(const SplitterOracle& base) {
  return SplitterOracle(
      std::make_shared<Impl>(Impl{Impl::Kind::squared, base.target() * base.target(), 0, base.impl_}));
}

SplitterOracle SplitterOracle::complemented(const SplitterOracle& base) {
  return SplitterOracle(std::make_shared<Impl>(Impl{Impl::Kind::complemented, 1 - base.target(), 0, base.impl_}));
}

SplitterOracle SplitterOracle::following(const SplitterOracle& base, const SquaringPlan& plan) {
  if (base.target() != plan.start) throw PreconditionError("plan does not start at the oracle's target");
  SplitterOracle o = base;
  for (PlanStep step : plan.steps) o = step == PlanStep::square ? squared(o) : complemented(o);
  return o;
}

const Rational& SplitterOracle::target() const { return impl_->p; }

std::string SplitterOracle::describe() const {
  switch (impl_->kind) {
    case Impl::Kind::bernoulli: return "bernoulli(" + to_string(impl_->p) + "," + std::to_string(impl_->seed) + ")";
    case Impl::Kind::round_robin: return "round-robin";
    case Impl::Kind::squared: return "squared(" + SplitterOracle(impl_->base).describe() + ")";
    case Impl::Kind::complemented: return "complemented(" + SplitterOracle(impl_->base).describe() + ")";
  }
  return "?";
}

OmegaSet SplitterOracle::candidate(const std::vector<OmegaSet>& family, std::uint64_t salt) const {
  switch (impl_->kind) {
    case Impl::Kind::bernoulli:
      return densplit::bernoulli(impl_->p, detail::mix64(impl_->seed ^ detail::mix64(salt)));
    case Impl::Kind::round_robin:
      if (family.size() != 1) throw PreconditionError("round-robin oracle needs a single target");
      return every_other(family.front());
    case Impl::Kind::squared: {
      SplitterOracle base(impl_->base);
      OmegaSet a = base.candidate(family, detail::mix64(salt ^ 0x5175));
      std::vector<OmegaSet> cut;
      cut.reserve(family.size());
      for (const OmegaSet& x : family) cut.push_back(intersect(a, x));
      return intersect(a, base.candidate(cut, detail::mix64(salt ^ 0xb0b)));
    }
    case Impl::Kind::complemented:
      return complement(SplitterOracle(impl_->base).candidate(family, salt));
  }
  throw std::logic_error("unknown oracle kind");
}

OracleDraw SplitterOracle::draw(const std::vector<OmegaSet>& family, const OracleContext& ctx) const {
  if (family.empty()) throw PreconditionError("family must be non-empty");
  const Rational p = target();
  const double spread = std::sqrt(to_double(p * (1 - p)));
  std::ostringstream failures;
  for (int attempt = 0; attempt < ctx.max_attempts; ++attempt) {
    const std::uint64_t salt = (static_cast<std::uint64_t>(ctx.stage) << 32) + static_cast<std::uint64_t>(attempt);
    OracleDraw d{cached(candidate(family, salt), ctx.horizon), attempt + 1, {}, {}};
    bool ok = true;
    for (std::size_t j = 0; j < family.size() && ok; ++j) {
      SplitParams params;
      params.rho = p;
      params.tolerance = ctx.tolerance;
      SplitVerdict v = split_verdict(SplitKind::rho, d.s, family[j], params, big(ctx.horizon));
      const BigNat& n = v.diagnostics.total[v.diagnostics.tail_begin];
      Rational tol = std::max(ctx.tolerance, round_up(4.0 * spread / std::sqrt(to_double(Rational(n)))));
      v.holds_numerically = v.diagnostics.max_tail_deviation <= tol;
      if (!v.holds_numerically) {
        ok = false;
        failures << " attempt " << attempt << ": member " << j << " deviation "
                 << to_double(v.diagnostics.max_tail_deviation) << " > " << to_double(tol) << ";";
      }
      d.verdicts.push_back(std::move(v));
      d.tolerances.push_back(tol);
    }
    if (ok) return d;
    if (impl_->kind == Impl::Kind::round_robin) break;  // deterministic; resampling cannot help
  }
  throw ConvergenceError("oracle " + describe() + " exhausted at stage " + std::to_string(ctx.stage) + ":" +
                         failures.str());
}

SplitChain build_chain(const std::vector<OmegaSet>& family, const SplitterOracle& oracle, ChainMode mode,
                       const ChainConfig& cfg) {
  if (family.empty()) throw PreconditionError("family must be non-empty");
  if (cfg.depth == 0) throw PreconditionError("depth must be at least 1");
  for (const OmegaSet& x : family) {
    if (x.finite() == Tri::yes) throw PreconditionError("family member is finite: " + x.describe());
  }
  const Rational p = oracle.target();
  if (mode == ChainMode::half && p != Rational(1, 2)) throw PreconditionError("half mode needs a 1/2 oracle");

  SplitChain chain;
  chain.family = family;
  chain.mode = mode;
  chain.rho = p;
  chain.horizon = cfg.horizon;
  chain.band = cfg.band;
  chain.nested.push_back(omega());

  std::vector<OmegaSet> current = family;
  OracleContext ctx{cfg.horizon, cfg.tolerance, cfg.max_attempts, 0};
  for (std::size_t m = 1; m <= cfg.depth; ++m) {
    ctx.stage = m;
    OracleDraw d = oracle.draw(current, ctx);
    const OmegaSet& prev = chain.nested.back();
    chain.stages.push_back(d.s);
    chain.attempts.push_back(d.attempts);
    chain.differences.push_back(cached(difference(prev, d.s), cfg.horizon));
    chain.nested.push_back(cached(intersect(prev, d.s), cfg.horizon));
    for (std::size_t j = 0; j < family.size(); ++j) {
      current[j] = cached(intersect(chain.nested.back(), family[j]), cfg.horizon);
    }
  }

  const BigNat h = big(cfg.horizon);
  for (std::size_t j = 0; j < family.size(); ++j) {
    for (std::size_t m = 1; m <= cfg.depth; ++m) {
      const Rational nested_target = power(p, m);
      const Rational diff_target = power(p, m - 1) * (1 - p);
      LevelCheck c{j, m,
                   density_report(chain.nested[m], family[j], h, {}, Rational(1, 2), nested_target).max_tail_deviation,
                   density_report(chain.differences[m - 1], family[j], h, {}, Rational(1, 2), diff_target)
                       .max_tail_deviation};
      if (c.nested_deviation > cfg.band || c.difference_deviation > cfg.band) chain.within_band = false;
      chain.checks.push_back(std::move(c));
    }
  }
  return chain;
}

bool partition_law_holds(const SplitChain& chain, std::uint64_t h) {
  const BigNat hi = big(h);
  for (const OmegaSet& x : chain.family) {
    for (std::size_t m = 1; m < chain.nested.size(); ++m) {
      BigNat whole = count_below(intersect(chain.nested[m - 1], x), hi);
      BigNat kept = count_below(intersect(chain.nested[m], x), hi);
      BigNat dropped = count_below(intersect(chain.differences[m - 1], x), hi);
      if (whole != kept + dropped) return false;
    }
  }
  return true;
}

namespace {

OmegaSet union_of_levels(const SplitChain& chain, const std::vector<std::size_t>& levels) {
  if (levels.empty()) return empty_set();
  OmegaSet s = chain.differences[levels.front() - 1];
  for (std::size_t i = 1; i < levels.size(); ++i) s = unite(s, chain.differences[levels[i] - 1]);
  return cached(s, chain.horizon);
}

std::string residual_trace(const std::vector<LevelSelection>& attempts) {
  std::ostringstream out;
  for (std::size_t a = 0; a < attempts.size(); ++a) {
    out << (a ? "; " : "") << "attempt " << a << ":";
    for (const Rational& r : attempts[a].trace) out << " " << to_string(r);
  }
  return out.str();
}

}  // namespace

TransformResult transform_splitter(const std::vector<OmegaSet>& family, Direction direction, const Rational& rho,
                                   const TransformConfig& cfg) {
  require_unit_open(rho, "rho");
  ChainConfig cc{cfg.depth, cfg.horizon, cfg.oracle_tolerance, cfg.tolerance, cfg.max_attempts};
  TransformResult r{direction, rho, {}, {}, rho, {}, {}, empty_set(), {}, {}, false, {}};
  Rational goal;
  if (direction == Direction::half_to_rho) {
    r.path = "binary";
    r.chain = build_chain(family, SplitterOracle::bernoulli(Rational(1, 2), cfg.seed), ChainMode::half, cc);
    r.selection = binary_digits(rho, cfg.depth);
    r.attempts.push_back(r.selection);
    r.allowed = cfg.tolerance + pow2(-static_cast<long>(cfg.depth));
    goal = rho;
  } else {
    const SplitterOracle base = SplitterOracle::bernoulli(rho, cfg.seed);
    r.selection = select_levels(geometric_weights(rho), Rational(1, 2), cfg.depth);
    r.attempts.push_back(r.selection);
    if (rho < Rational(2, 3) && r.selection.residual <= cfg.residual_tolerance) {
      r.path = "direct";
      r.chain = build_chain(family, base, ChainMode::rho, cc);
    } else {
      r.path = "squaring";
      r.plan = squaring_chain(rho, true);
      r.effective_rho = r.plan.result;
      r.selection = select_levels(geometric_weights(r.effective_rho), Rational(1, 2), cfg.depth);
      r.attempts.push_back(r.selection);
      if (r.selection.residual > cfg.residual_tolerance) {
        throw ConvergenceError("level selection residual above " + to_string(cfg.residual_tolerance) + " (" +
                               residual_trace(r.attempts) + ")");
      }
      r.chain = build_chain(family, SplitterOracle::following(base, r.plan), ChainMode::rho, cc);
    }
    r.allowed = cfg.tolerance + r.selection.residual;
    goal = Rational(1, 2);
  }
  r.s = union_of_levels(r.chain, r.selection.levels);
  r.ok = true;
  for (const OmegaSet& x : family) {
    SplitParams params;
    params.rho = goal;
    params.tolerance = r.allowed;
    MemberVerdict mv{x.describe(), split_verdict(SplitKind::rho, r.s, x, params, big(cfg.horizon))};
    r.ok = r.ok && mv.verdict.holds_numerically;
    r.members.push_back(std::move(mv));
  }
  return r;
}

const char* direction_name(Direction d) { return d == Direction::half_to_rho ? "half-to-rho" : "rho-to-half"; }

}  // namespace densplit
