#pragma once

#include <cstddef>

#include <json.hpp>

#include "densplit/adversary.hpp"
#include "densplit/certificate.hpp"
#include "densplit/density.hpp"
#include "densplit/omega_set.hpp"
#include "densplit/partition.hpp"
#include "densplit/preservation.hpp"
#include "densplit/relsys.hpp"
#include "densplit/rho_transform.hpp"

namespace densplit {

using Json = nlohmann::ordered_json;

// Rationals are "p/q" strings, naturals decimal strings.
Json to_json(const Rational& q);
Json to_json(const BigNat& n);
Rational rational_from_json(const Json& j);
BigNat natural_from_json(const Json& j);

Json to_json(const InequalityStep& step);
Json to_json(const Certificate& cert);
/// Throws ParseError on missing or malformed fields.
Certificate certificate_from_json(const Json& j);

Json to_json(const DensityReport& r);
Json to_json(const SplitVerdict& v);

/// Boundaries b_0..b_count and the growth verdict.
Json partition_to_json(const IntervalPartition& p, std::size_t count);

/// Run-length encoded: the first bit, then alternating run lengths.
Json to_json(const Prefix& prefix);
Prefix prefix_from_json(const Json& j);

Json to_json(const DefeatResult& r);
Json to_json(const GoodPair& pair, std::size_t horizon_k);
Json to_json(const RelationVerdict& v);
Json to_json(const ReapContract& c);

Json to_json(const LevelSelection& s);
Json to_json(const SquaringPlan& plan);
Json to_json(const SplitChain& chain);
Json to_json(const TransformResult& r);

/// {"X": [...], "Y": [...], "rel": ["0110", ...]}
Json to_json(const FiniteRelSys& r);
FiniteRelSys relsys_from_json(const Json& j);
Json to_json(const TukeyPair& p);
TukeyPair tukey_pair_from_json(const Json& j);
Json to_json(const SparseRangeResult& r);

}  // namespace densplit
