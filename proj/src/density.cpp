#include "densplit/density.hpp"

#include <algorithm>

#include "densplit/config.hpp"
#include "densplit/errors.hpp"

namespace densplit {

namespace {

std::vector<BigNat> checkpoints_for(const CheckpointRule& rule, const BigNat& horizon) {
  std::vector<BigNat> points;
  if (!rule.points.empty()) {
    for (const auto& p : rule.points) {
      if (sgn(p) > 0 && p < horizon) points.push_back(p);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
  } else {
    BigNat stride = rule.stride;
    if (sgn(stride) <= 0) stride = std::max(BigNat(1), BigNat(horizon / 100));
    for (BigNat n = stride; n < horizon; n += stride) points.push_back(n);
  }
  points.push_back(horizon);
  return points;
}

bool explicit_scale(const BigNat& horizon) { return fits_u64(horizon) && to_u64(horizon) <= explicit_cap(); }

}  // namespace

DensityReport density_report(const OmegaSet& s, const OmegaSet& x, const BigNat& horizon, const CheckpointRule& rule,
                             const Rational& tail_window, const std::optional<Rational>& target) {
  if (x.finite() == Tri::yes) throw PreconditionError("the reference set X must be infinite: " + x.describe());
  if (tail_window <= 0 || tail_window >= 1) throw PreconditionError("tail window must lie in (0,1)");
  if (sgn(horizon) <= 0) throw PreconditionError("horizon must be positive");

  DensityReport r;
  r.horizon = horizon;
  r.tail_window = tail_window;
  r.target = target;

  const std::vector<BigNat> points = checkpoints_for(rule, horizon);
  const OmegaSet both = intersect(s, x);
  std::vector<BigNat> in_counts;
  std::vector<BigNat> x_counts;
  if (explicit_scale(horizon)) {
    const std::uint64_t n = to_u64(horizon);
    PrefixCounter xc(x, n);
    PrefixCounter bc(both, n);
    for (const auto& p : points) {
      x_counts.push_back(big(xc.count_below(to_u64(p))));
      in_counts.push_back(big(bc.count_below(to_u64(p))));
    }
  } else {
    for (const auto& p : points) {
      x_counts.push_back(count_below(x, p));
      in_counts.push_back(count_below(both, p));
    }
  }
  if (x_counts.back() < 10) {
    throw PreconditionError("X too sparse below the horizon: |X ∩ " + horizon.get_str() + "| = " +
                            x_counts.back().get_str() + " < 10");
  }

  bool tail_started = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (sgn(x_counts[i]) == 0) continue;
    r.checkpoints.push_back(points[i]);
    r.inside.push_back(in_counts[i]);
    r.total.push_back(x_counts[i]);
    r.ratios.push_back(ratio(in_counts[i], x_counts[i]));
    if (!tail_started && Rational(points[i]) >= tail_window * Rational(horizon)) {
      r.tail_begin = r.checkpoints.size() - 1;
      tail_started = true;
    }
  }

  r.upper_est = r.ratios[r.tail_begin];
  r.lower_est = r.ratios[r.tail_begin];
  Rational worst = 0;
  for (std::size_t i = r.tail_begin; i < r.ratios.size(); ++i) {
    const Rational& q = r.ratios[i];
    r.upper_est = std::max(r.upper_est, q);
    r.lower_est = std::min(r.lower_est, q);
    if (target) worst = std::max(worst, Rational(abs(q - *target)));
  }
  r.max_tail_deviation = target ? worst : Rational(r.upper_est - r.lower_est);
  return r;
}

DensityBounds upper_lower_density(const OmegaSet& s, const OmegaSet& x, const BigNat& horizon,
                                  const CheckpointRule& rule, const Rational& tail_window) {
  DensityReport r = density_report(s, x, horizon, rule, tail_window);
  return {r.upper_est, r.lower_est};
}

SplitVerdict split_verdict(SplitKind kind, const OmegaSet& s, const OmegaSet& x, const SplitParams& params,
                           const BigNat& horizon) {
  if (params.tolerance < 0) throw PreconditionError("tolerance must be non-negative");
  SplitVerdict v{kind, false, {}, BigNat(0), BigNat(0), BigNat(0)};
  switch (kind) {
    case SplitKind::classical: {
      v.diagnostics = density_report(s, x, horizon, params.checkpoints, params.tail_window);
      v.inside_count = v.diagnostics.inside.back();
      v.outside_count = v.diagnostics.total.back() - v.inside_count;
      v.growth_floor = std::max(BigNat(1), BigNat(sqrt(v.diagnostics.total.back())));
      v.holds_numerically = v.inside_count >= v.growth_floor && v.outside_count >= v.growth_floor;
      break;
    }
    case SplitKind::rho:
      if (params.rho <= 0 || params.rho >= 1) throw PreconditionError("rho must lie in (0,1)");
      v.diagnostics = density_report(s, x, horizon, params.checkpoints, params.tail_window, params.rho);
      v.holds_numerically = v.diagnostics.max_tail_deviation <= params.tolerance;
      break;
    case SplitKind::eps_band: {
      if (params.epsilon <= 0 || params.epsilon >= Rational(1, 2)) {
        throw PreconditionError("epsilon must lie in (0, 1/2)");
      }
      v.diagnostics = density_report(s, x, horizon, params.checkpoints, params.tail_window, Rational(1, 2));
      v.holds_numerically = v.diagnostics.max_tail_deviation < params.epsilon;
      break;
    }
    case SplitKind::zero:
    case SplitKind::one: {
      if (s.finite() == Tri::yes || s.cofinite() == Tri::yes) {
        throw PreconditionError("0/1-splitting needs S infinite and co-infinite: " + s.describe());
      }
      Rational goal = kind == SplitKind::zero ? Rational(0) : Rational(1);
      v.diagnostics = density_report(s, x, horizon, params.checkpoints, params.tail_window, goal);
      v.holds_numerically = v.diagnostics.max_tail_deviation <= params.tolerance;
      break;
    }
  }
  return v;
}

Rational compose_densities(ComposeMode mode, const Rational& r0, const Rational& r1) {
  if (r0 < 0 || r0 > 1 || r1 < 0 || r1 > 1) throw PreconditionError("densities must lie in [0,1]");
  if (mode == ComposeMode::intersect) return r0 * r1;
  return r0 + r1 - r0 * r1;
}

const char* split_kind_name(SplitKind kind) {
  switch (kind) {
    case SplitKind::classical: return "classical";
    case SplitKind::rho: return "rho";
    case SplitKind::eps_band: return "eps_band";
    case SplitKind::zero: return "zero";
    case SplitKind::one: return "one";
  }
  return "?";
}

}  // namespace densplit
