#include "densplit/json_io.hpp"

#include "densplit/errors.hpp"

namespace densplit {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field: ") + key);
  return j.at(key);
}

std::string text(const Json& j, const char* what) {
  if (!j.is_string()) throw ParseError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

const char* conclusion_name(Conclusion c) {
  return c == Conclusion::at_least_upper ? "at_least_upper" : "at_most_lower";
}

Json rationals(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const Rational& q : v) a.push_back(to_json(q));
  return a;
}

}  // namespace

Json to_json(const Rational& q) { return to_string(q); }
Json to_json(const BigNat& n) { return n.get_str(); }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  return parse_rational(text(j, "rational"));
}

BigNat natural_from_json(const Json& j) {
  if (j.is_number_unsigned()) return big(j.get<std::uint64_t>());
  const std::string s = text(j, "natural");
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw ParseError("bad natural: " + s);
  return BigNat(s);
}

Json to_json(const InequalityStep& step) {
  return Json{{"lhs", to_json(step.lhs)}, {"rel", relation_symbol(step.rel)}, {"rhs", to_json(step.rhs)}};
}

Json to_json(const Certificate& cert) {
  Json j;
  j["kind"] = chain_kind_name(cert.kind);
  j["index"] = cert.index;
  j["epsilon"] = to_json(cert.epsilon);
  if (cert.epsilon_prime) j["epsilon_prime"] = to_json(*cert.epsilon_prime);
  Json raw = Json::object();
  for (const auto& [k, v] : cert.raw) raw[k] = to_json(v);
  j["raw"] = raw;
  Json steps = Json::array();
  for (const InequalityStep& s : cert.steps) steps.push_back(to_json(s));
  j["steps"] = steps;
  j["conclusion"] = conclusion_name(cert.conclusion);
  if (cert.partition) {
    j["partition"] = {{"rule", cert.partition->describe()}, {"even_sizes", cert.partition->even_sizes}};
  }
  if (cert.boundaries) {
    Json b = Json::array();
    for (const BigNat& v : *cert.boundaries) b.push_back(to_json(v));
    j["boundaries"] = b;
  }
  return j;
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  try {
    c.kind = parse_chain_kind(text(field(j, "kind"), "kind"));
    const Json& idx = field(j, "index");
    if (!idx.is_number_unsigned()) throw ParseError("index must be a natural number");
    c.index = idx.get<std::size_t>();
    c.epsilon = rational_from_json(field(j, "epsilon"));
    if (j.contains("epsilon_prime")) c.epsilon_prime = rational_from_json(j.at("epsilon_prime"));
    const Json& raw = field(j, "raw");
    if (!raw.is_object()) throw ParseError("raw must be an object");
    for (const auto& [k, v] : raw.items()) c.raw[k] = natural_from_json(v);
    const Json& steps = field(j, "steps");
    if (!steps.is_array()) throw ParseError("steps must be an array");
    for (const Json& s : steps) {
      c.steps.push_back({rational_from_json(field(s, "lhs")), parse_relation(text(field(s, "rel"), "rel")),
                         rational_from_json(field(s, "rhs"))});
    }
    const std::string concl = text(field(j, "conclusion"), "conclusion");
    if (concl == "at_least_upper") {
      c.conclusion = Conclusion::at_least_upper;
    } else if (concl == "at_most_lower") {
      c.conclusion = Conclusion::at_most_lower;
    } else {
      throw ParseError("unknown conclusion: " + concl);
    }
    if (j.contains("partition")) {
      const Json& p = j.at("partition");
      const Json& even = field(p, "even_sizes");
      if (!even.is_boolean()) throw ParseError("even_sizes must be a boolean");
      c.partition = GrowthRule::parse(text(field(p, "rule"), "rule"), even.get<bool>());
    }
    if (j.contains("boundaries")) {
      std::vector<BigNat> b;
      for (const Json& v : j.at("boundaries")) b.push_back(natural_from_json(v));
      c.boundaries = std::move(b);
    }
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return c;
}

Json to_json(const DensityReport& r) {
  Json j;
  j["horizon"] = to_json(r.horizon);
  j["tail_window"] = to_json(r.tail_window);
  j["tail_begin"] = r.tail_begin < r.checkpoints.size() ? to_json(r.checkpoints[r.tail_begin]) : Json(nullptr);
  j["target"] = r.target ? to_json(*r.target) : Json(nullptr);
  j["upper_est"] = to_json(r.upper_est);
  j["lower_est"] = to_json(r.lower_est);
  j["max_tail_deviation"] = to_json(r.max_tail_deviation);
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    rows.push_back({{"n", to_json(r.checkpoints[i])},
                    {"inside", to_json(r.inside[i])},
                    {"total", to_json(r.total[i])},
                    {"ratio", to_json(r.ratios[i])}});
  }
  j["checkpoints"] = rows;
  return j;
}

Json to_json(const SplitVerdict& v) {
  Json j;
  j["kind"] = split_kind_name(v.kind);
  j["holds"] = v.holds_numerically;
  if (v.kind == SplitKind::classical) {
    j["inside_count"] = to_json(v.inside_count);
    j["outside_count"] = to_json(v.outside_count);
    j["growth_floor"] = to_json(v.growth_floor);
  }
  j["report"] = to_json(v.diagnostics);
  return j;
}

Json partition_to_json(const IntervalPartition& p, std::size_t count) {
  Json j;
  j["describe"] = p.describe();
  Json b = Json::array();
  Json sizes = Json::array();
  for (std::size_t n = 0; n <= count; ++n) b.push_back(to_json(p.start(n)));
  for (std::size_t n = 0; n < count; ++n) sizes.push_back(to_json(p.size(n)));
  j["boundaries"] = b;
  j["sizes"] = sizes;
  GrowthVerdict g = verify_growth(p, count);
  j["growth_ok"] = g.ok;
  if (!g.ok) {
    j["violation"] = *g.violation;
    j["reason"] = g.reason;
  }
  return j;
}

Json to_json(const Prefix& prefix) {
  Json runs = Json::array();
  bool first_bit = prefix.horizon > 0 && prefix.test(0);
  bool current = first_bit;
  std::uint64_t len = 0;
  for (std::uint64_t k = 0; k < prefix.horizon; ++k) {
    if (prefix.test(k) == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = !current;
      len = 1;
    }
  }
  if (len) runs.push_back(len);
  return Json{{"horizon", prefix.horizon}, {"first", first_bit ? 1 : 0}, {"runs", runs}};
}

Prefix prefix_from_json(const Json& j) {
  Prefix p;
  try {
    p.horizon = field(j, "horizon").get<std::uint64_t>();
    bool bit = field(j, "first").get<int>() != 0;
    p.words.assign((p.horizon + 63) / 64, 0);
    std::uint64_t k = 0;
    for (const Json& r : field(j, "runs")) {
      const std::uint64_t len = r.get<std::uint64_t>();
      if (len > p.horizon - k) throw ParseError("runs exceed the horizon");
      if (bit) {
        for (std::uint64_t i = k; i < k + len; ++i) p.words[i >> 6] |= std::uint64_t{1} << (i & 63);
      }
      k += len;
      bit = !bit;
    }
    if (k != p.horizon) throw ParseError("runs do not cover the horizon");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return p;
}

Json to_json(const DefeatResult& r) {
  Json j;
  j["x"] = r.x.label();
  Json rounds = Json::array();
  for (const DefeatRound& d : r.rounds) {
    rounds.push_back({{"index", d.index}, {"majority", d.majority}, {"hits", to_json(d.hits)}});
  }
  j["rounds"] = rounds;
  Json dom = Json::array();
  for (std::size_t n : r.condition.domain()) dom.push_back(n);
  j["condition_domain"] = dom;
  Json certs = Json::array();
  for (const Certificate& c : r.certificates) certs.push_back(to_json(c));
  j["certificates"] = certs;
  return j;
}

Json to_json(const GoodPair& pair, std::size_t horizon_k) {
  Json j;
  j["epsilon"] = to_json(pair.epsilon);
  j["h"] = pair.h.describe();
  Json rows = Json::array();
  const IntervalPartition& p = pair.e.partition();
  for (std::size_t k = 0; k < horizon_k; ++k) {
    const IntervalSubset& e = pair.e.on(k);
    rows.push_back({{"k", k},
                    {"in_h", pair.h.contains(big(k))},
                    {"e", e.label()},
                    {"cardinality", to_json(e.cardinality())},
                    {"interval_size", to_json(p.size(k))}});
  }
  j["intervals"] = rows;
  return j;
}

Json to_json(const RelationVerdict& v) {
  Json j{{"holds", v.holds}};
  if (v.witness) {
    j["witness"] = *v.witness;
    j["lhs"] = to_json(v.lhs);
    j["rhs"] = to_json(v.rhs);
  }
  return j;
}

Json to_json(const ReapContract& c) {
  Json j;
  j["band"] = to_json(c.band);
  Json rows = Json::array();
  for (const ContractRow& r : c.rows) {
    rows.push_back({{"k", r.k}, {"left", to_json(r.left)}, {"right", to_json(r.right)}});
  }
  j["rows"] = rows;
  j["empty_prefixes"] = c.empty_prefixes;
  j["chain_ok"] = c.chain_ok;
  j["k0"] = c.k0 ? Json(*c.k0) : Json(nullptr);
  j["relation"] = c.relation ? to_json(*c.relation) : Json(nullptr);
  j["holds"] = c.holds;
  return j;
}

Json to_json(const LevelSelection& s) {
  return Json{{"levels", s.levels}, {"residual", to_json(s.residual)}, {"trace", rationals(s.trace)}};
}

Json to_json(const SquaringPlan& plan) {
  Json steps = Json::array();
  for (PlanStep s : plan.steps) steps.push_back(s == PlanStep::square ? "square" : "complement");
  return Json{{"start", to_json(plan.start)},
              {"result", to_json(plan.result)},
              {"squarings", plan.squarings},
              {"steps", steps}};
}

Json to_json(const SplitChain& chain) {
  Json j;
  j["mode"] = chain.mode == ChainMode::half ? "half" : "rho";
  j["rho"] = to_json(chain.rho);
  j["depth"] = chain.stages.size();
  j["horizon"] = chain.horizon;
  j["attempts"] = chain.attempts;
  j["band"] = to_json(chain.band);
  j["within_band"] = chain.within_band;
  Json checks = Json::array();
  for (const LevelCheck& c : chain.checks) {
    checks.push_back({{"member", c.member},
                      {"level", c.level},
                      {"nested_deviation", to_json(c.nested_deviation)},
                      {"difference_deviation", to_json(c.difference_deviation)}});
  }
  j["checks"] = checks;
  return j;
}

Json to_json(const TransformResult& r) {
  Json j;
  j["direction"] = direction_name(r.direction);
  j["rho"] = to_json(r.rho);
  j["path"] = r.path;
  if (r.path == "squaring") j["plan"] = to_json(r.plan);
  j["effective_rho"] = to_json(r.effective_rho);
  j["selection"] = to_json(r.selection);
  Json attempts = Json::array();
  for (const LevelSelection& s : r.attempts) attempts.push_back(to_json(s));
  j["selection_attempts"] = attempts;
  j["allowed"] = to_json(r.allowed);
  Json members = Json::array();
  for (const MemberVerdict& m : r.members) {
    members.push_back({{"set", m.label},
                       {"holds", m.verdict.holds_numerically},
                       {"max_tail_deviation", to_json(m.verdict.diagnostics.max_tail_deviation)},
                       {"upper_est", to_json(m.verdict.diagnostics.upper_est)},
                       {"lower_est", to_json(m.verdict.diagnostics.lower_est)}});
  }
  j["members"] = members;
  j["chain"] = to_json(r.chain);
  j["ok"] = r.ok;
  return j;
}

Json to_json(const FiniteRelSys& r) {
  Json rel = Json::array();
  for (const auto& row : r.rel) {
    std::string bits;
    for (bool b : row) bits += b ? '1' : '0';
    rel.push_back(bits);
  }
  return Json{{"X", r.xs}, {"Y", r.ys}, {"rel", rel}};
}

FiniteRelSys relsys_from_json(const Json& j) {
  FiniteRelSys r;
  try {
    for (const Json& x : field(j, "X")) r.xs.push_back(x.is_string() ? x.get<std::string>() : x.dump());
    for (const Json& y : field(j, "Y")) r.ys.push_back(y.is_string() ? y.get<std::string>() : y.dump());
    for (const Json& row : field(j, "rel")) {
      std::vector<bool> bits;
      if (row.is_string()) {
        for (char c : row.get<std::string>()) {
          if (c != '0' && c != '1') throw ParseError("relation rows use 0 and 1");
          bits.push_back(c == '1');
        }
      } else {
        for (const Json& b : row) bits.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
      }
      r.rel.push_back(std::move(bits));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  return r;
}

Json to_json(const TukeyPair& p) { return Json{{"f", p.f}, {"g", p.g}}; }

TukeyPair tukey_pair_from_json(const Json& j) {
  try {
    return {field(j, "f").get<std::vector<std::size_t>>(), field(j, "g").get<std::vector<std::size_t>>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const SparseRangeResult& r) {
  Json rows = Json::array();
  for (const SparseRangeRow& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"lo", to_json(row.lo)},
                    {"hi", to_json(row.hi)},
                    {"max_ratio", to_json(row.max_ratio)},
                    {"at", to_json(row.at)},
                    {"bound", to_json(row.bound)},
                    {"ok", row.ok}});
  }
  return Json{{"threshold", r.threshold},
              {"effective_threshold", r.effective_threshold},
              {"holds", r.holds},
              {"zero_splits", r.zero_splits},
              {"rows", rows}};
}

}  // namespace densplit
