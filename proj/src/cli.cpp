#include "densplit/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "densplit/adversary.hpp"
#include "densplit/descriptor.hpp"
#include "densplit/errors.hpp"
#include "densplit/json_io.hpp"

namespace densplit {

namespace {

struct Report {
  Json body;
  bool ok = true;
  std::string table;  // JSON pointer to an array of objects rendered by --output csv
};

struct Common {
  std::string output = "json";
  std::string partition = "minimal";
  bool even = false;
};

BigNat parse_natural(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw PreconditionError(std::string(what) + " must be a natural number: " + s);
  }
  return BigNat(s);
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  BigNat n = parse_natural(s, what);
  if (!fits_u64(n)) throw PreconditionError(std::string(what) + " is too large: " + s);
  return to_u64(n);
}

IntervalPartition make_partition(const Common& c) { return IntervalPartition::build(GrowthRule::parse(c.partition, c.even)); }

Json read_json_file(const std::string& path) {
  try {
    if (path == "-") return Json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open " + path);
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string csv_cell(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const Json& j, const std::string& path, std::ostream& out) {
  if (j.is_object() || j.is_array()) {
    std::size_t i = 0;
    for (const auto& [k, v] : j.items()) {
      flatten(v, path.empty() ? k : path + "." + (j.is_array() ? std::to_string(i) : k), out);
      ++i;
    }
    if (j.empty()) out << csv_cell(path) << "," << (j.is_array() ? "[]" : "{}") << "\n";
    return;
  }
  out << csv_cell(path) << "," << csv_cell(j) << "\n";
}

void render_csv(const Report& r, std::ostream& out) {
  if (!r.table.empty()) {
    const Json::json_pointer ptr(r.table);
    if (r.body.contains(ptr) && r.body.at(ptr).is_array() && !r.body.at(ptr).empty() &&
        r.body.at(ptr).front().is_object()) {
      const Json& rows = r.body.at(ptr);
      bool first = true;
      for (const auto& [k, v] : rows.front().items()) {
        out << (first ? "" : ",") << csv_cell(k);
        first = false;
      }
      out << "\n";
      for (const Json& row : rows) {
        first = true;
        for (const auto& [k, v] : rows.front().items()) {
          out << (first ? "" : ",") << (row.contains(k) ? csv_cell(row.at(k)) : "");
          first = false;
        }
        out << "\n";
      }
      return;
    }
  }
  out << "key,value\n";
  flatten(r.body, "", out);
}

void render_pretty(const Json& j, int indent, std::ostream& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& [k, v] : j.items()) {
    const std::string key = j.is_array() ? "-" : k + ":";
    if (v.is_structured() && !v.empty()) {
      bool scalars = v.is_array();
      for (const Json& e : v) scalars = scalars && !e.is_structured();
      if (scalars) {
        out << pad << key << " [";
        bool first = true;
        for (const Json& e : v) {
          out << (first ? "" : ", ") << (e.is_string() ? e.get<std::string>() : e.dump());
          first = false;
        }
        out << "]\n";
      } else {
        out << pad << key << "\n";
        render_pretty(v, indent + 2, out);
      }
    } else {
      out << pad << key << " " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

void emit(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    render_csv(r, out);
  } else if (format == "pretty") {
    render_pretty(r.body, 0, out);
  } else {
    out << r.body.dump(2) << "\n";
  }
}

SplitKind parse_kind(const std::string& s) {
  if (s == "classical") return SplitKind::classical;
  if (s == "rho") return SplitKind::rho;
  if (s == "eps-band") return SplitKind::eps_band;
  if (s == "zero") return SplitKind::zero;
  if (s == "one") return SplitKind::one;
  throw PreconditionError("unknown split kind: " + s);
}

std::vector<OmegaSet> default_family(const IntervalPartition& p) {
  return {parse_set("evens"), parse_set("prog(1,3)"), parse_set("osc"), parse_set("iv:first-half", &p),
          parse_set("per(,110)")};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact density and splitting toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--output", common.output, "json, csv or pretty")
      ->check(CLI::IsMember({"json", "csv", "pretty"}));
  app.add_option("--partition", common.partition, "minimal or factor:<rational>");
  app.add_flag("--even", common.even, "even interval sizes");

  std::function<Report()> action;

  // density
  auto* density = app.add_subcommand("density", "relative density of S in X and a splitting verdict");
  std::string d_s, d_x = "omega", d_horizon = "1000000", d_kind = "rho", d_rho = "1/2", d_eps = "1/10",
                   d_tol = "1/100", d_stride, d_tail = "1/2";
  density->add_option("--S", d_s)->required();
  density->add_option("--X", d_x);
  density->add_option("--horizon", d_horizon);
  density->add_option("--kind", d_kind, "classical, rho, eps-band, zero or one");
  density->add_option("--rho", d_rho);
  density->add_option("--epsilon", d_eps);
  density->add_option("--tolerance", d_tol);
  density->add_option("--stride", d_stride);
  density->add_option("--tail-window", d_tail);
  density->callback([&] {
    action = [&] {
      const IntervalPartition p = make_partition(common);
      SplitParams params;
      params.rho = parse_rational(d_rho);
      params.epsilon = parse_rational(d_eps);
      params.tolerance = parse_rational(d_tol);
      params.tail_window = parse_rational(d_tail);
      if (!d_stride.empty()) params.checkpoints = CheckpointRule::every(parse_natural(d_stride, "stride"));
      const SplitKind kind = parse_kind(d_kind);
      const OmegaSet s = parse_set(d_s, &p);
      const OmegaSet x = parse_set(d_x, &p);
      SplitVerdict v = split_verdict(kind, s, x, params, parse_natural(d_horizon, "horizon"));
      Json body{{"S", s.describe()}, {"X", x.describe()}};
      body.update(to_json(v));
      return Report{body, v.holds_numerically, "/report/checkpoints"};
    };
  });

  // adversary
  auto* adversary = app.add_subcommand("adversary", "build X defeating a candidate bisector, with certificates");
  std::string a_s, a_eps = "1/10";
  std::size_t a_rounds = 3;
  adversary->add_option("--S", a_s)->required();
  adversary->add_option("--epsilon", a_eps);
  adversary->add_option("--rounds", a_rounds);
  adversary->callback([&] {
    action = [&] {
      const IntervalPartition p = make_partition(common);
      const OmegaSet s = parse_set(a_s, &p);
      DefeatResult r = defeat_bisector(s, parse_rational(a_eps), p, Condition{}, a_rounds);
      Json body{{"S", s.describe()}, {"epsilon", to_json(parse_rational(a_eps))}, {"partition", p.describe()}};
      body.update(to_json(r));
      bool ok = true;
      Json ratios = Json::array();
      for (const Certificate& c : r.certificates) {
        ok = ok && verify_certificate(c).ok;
        ratios.push_back(to_json(certified_ratio(c)));
      }
      body["ratios"] = ratios;
      body["verified"] = ok;
      return Report{body, ok, "/rounds"};
    };
  });

  // preserve
  auto* preserve = app.add_subcommand("preserve", "good pairs and the quarter-fill relation");
  std::string p_op = "above", p_x = "evens", p_s = "bern(1/2,1)", p_eps = "1/10", p_m = "0", p_horizon = "1000000";
  std::size_t p_hk = 6;
  preserve->add_option("--op", p_op, "above, below, escape or reap")
      ->check(CLI::IsMember({"above", "below", "escape", "reap"}));
  preserve->add_option("--X", p_x);
  preserve->add_option("--S", p_s);
  preserve->add_option("--epsilon", p_eps);
  preserve->add_option("--intervals", p_hk, "number of intervals checked");
  preserve->add_option("--m", p_m, "escape: prefix kept below m");
  preserve->add_option("--horizon", p_horizon, "reap: element horizon of the band check");
  preserve->callback([&] {
    action = [&] {
      const IntervalPartition p = make_partition(common);
      const Rational eps = parse_rational(p_eps);
      Json body{{"op", p_op}, {"epsilon", to_json(eps)}, {"intervals", p_hk}};
      bool ok = true;
      std::string table;
      if (p_op == "above" || p_op == "escape") {
        const OmegaSet x = parse_set(p_x, &p);
        AboveWitness w = witness_above(x, p, eps, p_hk);
        body["X"] = x.describe();
        body["branch"] = w.branch;
        body["n"] = w.n;
        body["pair"] = to_json(w.pair, p_hk);
        RelationVerdict rel = sq_rel_holds(x, w.pair, w.n, p_hk);
        body["relation"] = to_json(rel);
        ok = rel.holds;
        if (p_op == "escape") {
          const BigNat m = parse_natural(p_m, "m");
          Escape e = nwd_escape(x, w.pair, w.n, m, p_hk);
          const BigNat moved = count_below(unite(difference(x, e.y), difference(e.y, x)), m);
          body["escape"] = {{"k", e.k}, {"after", to_json(e.after)}, {"changed_below_m", to_json(moved)}};
          ok = ok && !e.after.holds && sgn(moved) == 0;
        }
      } else {
        const OmegaSet s = parse_set(p_s, &p);
        ReapMap map = reap_tukey_map(s, p, eps, p_hk);
        body["S"] = s.describe();
        body["complemented"] = map.complemented;
        body["pair"] = to_json(map.pair, p_hk);
        if (p_op == "below") {
          check_pair(map.pair, p_hk);
          BelowWitness b = witness_below(map.pair, p_hk);
          RelationVerdict rel = sq_rel_holds(b.x.as_set(), map.pair, 1, p_hk);
          body["X"] = b.x.label();
          body["branch"] = b.branch;
          body["relation"] = to_json(rel);
          ok = rel.holds;
        } else {
          const OmegaSet x = parse_set(p_x, &p);
          ReapContract c = check_reap_contract(map, s, x, p_hk, parse_natural(p_horizon, "horizon"));
          body["X"] = x.describe();
          body["contract"] = to_json(c);
          ok = c.holds;
          table = "/contract/rows";
        }
      }
      return Report{body, ok, table};
    };
  });

  // transform
  auto* transform = app.add_subcommand("transform", "turn bisectors into rho-splitters and back");
  std::string t_rho = "1/2", t_dir = "half-to-rho", t_horizon = "1000000", t_tol = "2/100", t_res = "1/100";
  std::size_t t_depth = 8;
  std::uint64_t t_seed = 1;
  std::vector<std::string> t_family;
  transform->add_option("--rho", t_rho)->required();
  transform->add_option("--direction", t_dir)->check(CLI::IsMember({"half-to-rho", "rho-to-half"}));
  transform->add_option("--depth", t_depth);
  transform->add_option("--horizon", t_horizon);
  transform->add_option("--seed", t_seed);
  transform->add_option("--tolerance", t_tol);
  transform->add_option("--residual-tolerance", t_res);
  transform->add_option("--family", t_family, "set descriptors (default: five structured sets)");
  transform->callback([&] {
    action = [&] {
      const IntervalPartition p = make_partition(common);
      std::vector<OmegaSet> family;
      for (const std::string& f : t_family) family.push_back(parse_set(f, &p));
      if (family.empty()) family = default_family(p);
      TransformConfig cfg;
      cfg.depth = t_depth;
      cfg.horizon = parse_u64(t_horizon, "horizon");
      cfg.seed = t_seed;
      cfg.tolerance = parse_rational(t_tol);
      cfg.residual_tolerance = parse_rational(t_res);
      TransformResult r = transform_splitter(
          family, t_dir == "half-to-rho" ? Direction::half_to_rho : Direction::rho_to_half, parse_rational(t_rho), cfg);
      Json body{{"seed", t_seed}, {"depth", t_depth}, {"horizon", cfg.horizon}};
      body.update(to_json(r));
      return Report{body, r.ok, "/members"};
    };
  });

  // relsys
  auto* relsys = app.add_subcommand("relsys", "finite relational systems, Tukey connections, sparse ranges");
  std::string r_system, r_gallery, r_target, r_pair, r_r = "pow(2)", r_x = "tower";
  bool r_sparse = false;
  std::size_t r_threshold = 0, r_nmax = 10;
  relsys->add_option("--system", r_system, "JSON file {X, Y, rel}");
  relsys->add_option("--gallery", r_gallery, "dom:L:v, reap:n or reap-rho:n:p/q:band");
  relsys->add_option("--target", r_target, "second system for --pair");
  relsys->add_option("--pair", r_pair, "JSON file {f, g} from --system to --target");
  relsys->add_flag("--sparse-range", r_sparse, "sparse-range bound check");
  relsys->add_option("--R", r_r);
  relsys->add_option("--x", r_x, "set whose increasing enumeration is x");
  relsys->add_option("--threshold", r_threshold);
  relsys->add_option("--n-max", r_nmax);
  relsys->callback([&] {
    action = [&] {
      Json body = Json::object();
      bool ok = true;
      std::string table;
      if (r_sparse) {
        const IntervalPartition p = make_partition(common);
        const OmegaSet rset = parse_set(r_r, &p);
        const OmegaSet xset = parse_set(r_x, &p);
        SparseRangeResult f = sparse_range_check(
            rset, [&](std::size_t n) { return kth_element(xset, big(n)); }, r_threshold, r_nmax);
        body["R"] = rset.describe();
        body["x"] = xset.describe();
        body["sparse_range"] = to_json(f);
        ok = f.holds;
        table = "/sparse_range/rows";
      } else {
        if (r_system.empty() == r_gallery.empty()) throw PreconditionError("give exactly one of --system, --gallery");
        FiniteRelSys sys;
        if (!r_gallery.empty()) {
          GalleryEntry g = gallery(r_gallery);
          body["gallery"] = g.name;
          body["note"] = g.note;
          sys = g.system;
        } else {
          sys = relsys_from_json(read_json_file(r_system));
        }
        body["system"] = to_json(sys);
        try {
          validate(sys);
          body["valid"] = true;
        } catch (const PreconditionError& e) {
          if (r_gallery.empty()) throw;
          body["valid"] = false;
          body["reason"] = e.what();
        }
        if (body["valid"].get<bool>()) {
          const FiniteRelSys d = dual(sys);
          const std::size_t b = bounding_number(sys), dn = dominating_number(sys);
          const std::size_t db = bounding_number(d), dd = dominating_number(d);
          body["bounding"] = b;
          body["dominating"] = dn;
          body["dual_bounding"] = db;
          body["dual_dominating"] = dd;
          ok = db == dn && dd == b;
          if (!r_pair.empty()) {
            if (r_target.empty()) throw PreconditionError("--pair needs --target");
            const FiniteRelSys target = relsys_from_json(read_json_file(r_target));
            validate(target);
            const TukeyPair pair = tukey_pair_from_json(read_json_file(r_pair));
            TukeyVerdict v = check_tukey(sys, target, pair);
            Json tv{{"holds", v.holds}};
            if (v.counterexample) tv["counterexample"] = {v.counterexample->first, v.counterexample->second};
            body["tukey"] = tv;
            ok = ok && v.holds;
          }
        }
      }
      return Report{body, ok, table};
    };
  });

  // partition
  auto* partition = app.add_subcommand("partition", "interval boundaries and the growth check");
  std::size_t q_count = 8;
  std::string q_boundaries;
  partition->add_option("--count", q_count);
  partition->add_option("--boundaries", q_boundaries, "explicit comma-separated boundaries starting at 0");
  partition->callback([&] {
    action = [&] {
      std::optional<IntervalPartition> p;
      std::size_t count = q_count;
      if (!q_boundaries.empty()) {
        std::vector<BigNat> b;
        std::stringstream in(q_boundaries);
        for (std::string part; std::getline(in, part, ',');) b.push_back(parse_natural(part, "boundary"));
        if (b.size() < 2) throw PreconditionError("need at least two boundaries");
        p = IntervalPartition::from_boundaries(b);
        count = std::min(count, b.size() - 1);
      } else {
        p = make_partition(common);
      }
      Json body = partition_to_json(*p, count);
      return Report{body, body["growth_ok"].get<bool>(), ""};
    };
  });

  // verify-cert
  auto* verify = app.add_subcommand("verify-cert", "re-check serialized certificates exactly");
  std::string v_file = "-";
  verify->add_option("--file", v_file, "certificate JSON; '-' reads standard input");
  verify->callback([&] {
    action = [&] {
      Json doc = read_json_file(v_file);
      Json list = doc.is_array() ? doc : doc.contains("certificates") ? doc.at("certificates") : Json::array({doc});
      Json results = Json::array();
      bool ok = true;
      for (const Json& c : list) {
        CertificateCheck check = verify_certificate(certificate_from_json(c));
        ok = ok && check.ok;
        results.push_back({{"kind", c.value("kind", "")}, {"index", c.value("index", 0)}, {"ok", check.ok},
                           {"failures", check.failures}});
      }
      Json body{{"count", list.size()}, {"ok", ok}, {"results", results}};
      return Report{body, ok, "/results"};
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Report r = action();
    emit(r, common.output, out);
    return r.ok ? 0 : 1;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const HorizonOverflow& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace densplit
