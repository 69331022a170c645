#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "densplit/bigint.hpp"
#include "densplit/partition.hpp"

namespace densplit {

enum class Relation { ge, gt, eq, le, lt };

struct InequalityStep {
  Rational lhs;
  Relation rel;
  Rational rhs;
  bool operator==(const InequalityStep&) const = default;
};

enum class ChainKind {
  majority_case,  // the chosen interval is mostly inside S; X takes S there
  minority_case,  // at most half inside S; X takes the rest of the interval
  centred_chain,  // assembled X from per-interval E_n of near-half size
  slalom_chain,   // assembled X from slalom blocks, escape at k = 2^m + b(m)
};

enum class Conclusion { at_least_upper, at_most_lower };

/// An exact transcript of one inequality chain. `raw` holds the interval
/// cardinalities from which every step is recomputed.
struct Certificate {
  ChainKind kind;
  std::size_t index = 0;  // n (or k for slalom chains)
  Rational epsilon;
  std::optional<Rational> epsilon_prime;
  std::map<std::string, BigNat> raw;
  std::vector<InequalityStep> steps;
  Conclusion conclusion;
  std::optional<GrowthRule> partition;             // rule that produced the intervals, if any
  std::optional<std::vector<BigNat>> boundaries;   // or explicit boundaries b_0..b_{index+1}
};

/// The steps implied by the raw cardinalities. Throws PreconditionError when a
/// required field is missing or a denominator vanishes.
std::vector<InequalityStep> derive_steps(ChainKind kind, const std::map<std::string, BigNat>& raw,
                                         const Rational& epsilon, const std::optional<Rational>& epsilon_prime);

struct CertificateCheck {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Recomputes every step from the raw cardinalities (and interval sizes from
/// the recorded partition), then checks each relation exactly.
CertificateCheck verify_certificate(const Certificate& cert);

bool relation_holds(const Rational& lhs, Relation rel, const Rational& rhs);
const char* relation_symbol(Relation rel);
Relation parse_relation(const std::string& text);
const char* chain_kind_name(ChainKind kind);
ChainKind parse_chain_kind(const std::string& text);

}  // namespace densplit
