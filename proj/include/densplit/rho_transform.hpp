#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "densplit/density.hpp"
#include "densplit/omega_set.hpp"

namespace densplit {

/// A set of levels m >= 1 with the exact residual target - Σ w_m.
struct LevelSelection {
  std::vector<std::size_t> levels;
  Rational residual;
  std::vector<Rational> trace;  // residual after each level 1..K
};

/// m-th binary digit of rho for m <= k; dyadic rho terminates.
LevelSelection binary_digits(const Rational& rho, std::size_t k);

struct BaseDigit {
  long exponent;
  BigNat digit;
};

struct BaseExpansion {
  long leading;                   // greatest n with b^n <= x
  std::vector<BaseDigit> digits;  // non-zero digits, descending exponents
  Rational residual;
  Rational residual_bound;  // b^(leading - k + 1)
};

/// Greedy expansion x = Σ c_n b^n over k digit positions starting at the leading one.
BaseExpansion greedy_base_digits(const Rational& x, const Rational& b, std::size_t k);

using LevelWeights = std::function<Rational(std::size_t)>;

/// w_m = 2^-m.
LevelWeights dyadic_weights();
/// w_m = rho^(m-1) (1 - rho).
LevelWeights geometric_weights(const Rational& rho);

/// Ascending greedy: take m iff w_m <= remaining residual.
LevelSelection select_levels(const LevelWeights& weights, const Rational& target, std::size_t k);

enum class PlanStep { square, complement };

struct SquaringPlan {
  std::vector<PlanStep> steps;
  Rational start;
  Rational result;  // in (1/3, 2/3)
  std::size_t squarings = 0;
};

/// Squares rho (complementing whenever it is at most 1/3) until it lands in
/// (1/3, 2/3). With `force`, at least one step is taken. Throws
/// ConvergenceError after max_iterations steps.
SquaringPlan squaring_chain(const Rational& rho, bool force = false, std::size_t max_iterations = 64);

/// Candidate validation settings shared by oracles and chains.
struct OracleContext {
  std::uint64_t horizon = 1'000'000;
  Rational tolerance = Rational(1, 100);
  int max_attempts = 16;
  std::size_t stage = 0;
};

struct OracleDraw {
  OmegaSet s;
  int attempts = 0;
  std::vector<SplitVerdict> verdicts;
  std::vector<Rational> tolerances;  // per member
};

/// Produces sets that numerically p-split every member of a family.
class SplitterOracle {
 public:
  static SplitterOracle bernoulli(const Rational& p, std::uint64_t seed);
  /// Every second element of the single target; an exact 1/2-splitter.
  static SplitterOracle round_robin();
  /// A ∩ B with B drawn against the family cut down to A; targets p^2.
  static SplitterOracle squared(const SplitterOracle& base);
  /// Complement of the base output; targets 1 - p.
  static SplitterOracle complemented(const SplitterOracle& base);
  /// Applies a squaring plan step by step.
  static SplitterOracle following(const SplitterOracle& base, const SquaringPlan& plan);

  const Rational& target() const;
  std::string describe() const;

  /// Unvalidated candidate; a pure function of (family, salt).
  OmegaSet candidate(const std::vector<OmegaSet>& family, std::uint64_t salt) const;

  /// Draws candidates until one passes split_verdict(rho p) against every
  /// member. The tolerance per member is the larger of ctx.tolerance and four
  /// standard deviations at the tail's start. Throws ConvergenceError when
  /// attempts run out.
  OracleDraw draw(const std::vector<OmegaSet>& family, const OracleContext& ctx) const;

  struct Impl;

 private:
  explicit SplitterOracle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

enum class ChainMode { half, rho };

struct LevelCheck {
  std::size_t member;
  std::size_t level;
  Rational nested_deviation;      // I_m against p^m
  Rational difference_deviation;  // D_m against p^(m-1)(1-p)
};

struct SplitChain {
  std::vector<OmegaSet> family;
  ChainMode mode = ChainMode::half;
  Rational rho;
  std::uint64_t horizon = 0;
  std::vector<OmegaSet> stages;       // S_1..S_M
  std::vector<OmegaSet> nested;       // I_0 = ω, I_1..I_M
  std::vector<OmegaSet> differences;  // D_1..D_M at index m-1
  std::vector<int> attempts;
  std::vector<LevelCheck> checks;
  Rational band;
  bool within_band = true;
};

struct ChainConfig {
  std::size_t depth = 8;
  std::uint64_t horizon = 1'000'000;
  Rational tolerance = Rational(1, 100);  // oracle validation floor
  Rational band = Rational(2, 100);       // level density diagnostics
  int max_attempts = 16;
};

SplitChain build_chain(const std::vector<OmegaSet>& family, const SplitterOracle& oracle, ChainMode mode,
                       const ChainConfig& cfg);

/// Exact counts: |X ∩ I_(m-1) ∩ h| = |X ∩ I_m ∩ h| + |X ∩ D_m ∩ h| for every member and level.
bool partition_law_holds(const SplitChain& chain, std::uint64_t h);

enum class Direction { half_to_rho, rho_to_half };

struct TransformConfig {
  std::size_t depth = 8;
  std::uint64_t horizon = 1'000'000;
  Rational tolerance = Rational(2, 100);           // band on the final verdicts
  Rational residual_tolerance = Rational(1, 100);  // converse level selection
  Rational oracle_tolerance = Rational(1, 100);
  std::uint64_t seed = 1;
  int max_attempts = 16;
};

struct MemberVerdict {
  std::string label;
  SplitVerdict verdict;
};

struct TransformResult {
  Direction direction;
  Rational rho;
  std::string path;  // "binary", "direct" or "squaring"
  SquaringPlan plan;
  Rational effective_rho;
  LevelSelection selection;
  std::vector<LevelSelection> attempts;  // every level selection tried, in order
  OmegaSet s;
  Rational allowed;  // band tolerance plus residual bound
  std::vector<MemberVerdict> members;
  bool ok = false;
  SplitChain chain;
};

/// Builds a Bernoulli splitting chain and assembles a rho-splitter (or a
/// bisector) from its level differences.
TransformResult transform_splitter(const std::vector<OmegaSet>& family, Direction direction, const Rational& rho,
                                   const TransformConfig& cfg);

const char* direction_name(Direction d);

}  // namespace densplit
