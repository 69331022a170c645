#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "densplit/bigint.hpp"
#include "densplit/omega_set.hpp"

namespace densplit {

/// Where ratios are sampled. With neither field set, the horizon is divided
/// into 100 equal strides. The horizon itself is always a checkpoint.
struct CheckpointRule {
  BigNat stride = 0;
  std::vector<BigNat> points;

  static CheckpointRule every(const BigNat& stride) { return {stride, {}}; }
  static CheckpointRule at(std::vector<BigNat> points) { return {BigNat(0), std::move(points)}; }
};

struct DensityReport {
  BigNat horizon;
  std::vector<BigNat> checkpoints;  // those with X ∩ n non-empty
  std::vector<BigNat> inside;       // |S ∩ X ∩ n|
  std::vector<BigNat> total;        // |X ∩ n|
  std::vector<Rational> ratios;
  Rational tail_window;
  std::size_t tail_begin = 0;  // first checkpoint index with n >= w * horizon
  Rational upper_est;
  Rational lower_est;
  std::optional<Rational> target;
  /// Max |ratio - target| over the tail, or upper - lower without a target.
  Rational max_tail_deviation;
};

DensityReport density_report(const OmegaSet& s, const OmegaSet& x, const BigNat& horizon,
                             const CheckpointRule& rule = {}, const Rational& tail_window = Rational(1, 2),
                             const std::optional<Rational>& target = std::nullopt);

struct DensityBounds {
  Rational upper;
  Rational lower;
};

DensityBounds upper_lower_density(const OmegaSet& s, const OmegaSet& x, const BigNat& horizon,
                                  const CheckpointRule& rule = {}, const Rational& tail_window = Rational(1, 2));

enum class SplitKind { classical, rho, eps_band, zero, one };

struct SplitParams {
  Rational rho = Rational(1, 2);
  Rational epsilon = Rational(1, 10);
  Rational tolerance = Rational(1, 100);
  CheckpointRule checkpoints;
  Rational tail_window = Rational(1, 2);
};

struct SplitVerdict {
  SplitKind kind;
  bool holds_numerically = false;
  DensityReport diagnostics;
  // Classical splitting: the two counts at the horizon and the floor they must reach.
  BigNat inside_count;
  BigNat outside_count;
  BigNat growth_floor;
};

SplitVerdict split_verdict(SplitKind kind, const OmegaSet& s, const OmegaSet& x, const SplitParams& params,
                           const BigNat& horizon);

enum class ComposeMode { intersect, unite };

/// Density of A∩B (resp. A∪B) in X when A has density r0 in X and B has
/// density r1 in A∩X (resp. in X \ A).
Rational compose_densities(ComposeMode mode, const Rational& r0, const Rational& r1);

const char* split_kind_name(SplitKind kind);

}  // namespace densplit
