#pragma once

// Scenario files (YAML), canonical JSON output and RFC-4180 CSV.
// Requires yaml-cpp and nlohmann/json.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "certificates.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "free_boundary.hpp"
#include "scenario.hpp"

namespace contact_stefan {

using ordered_json = nlohmann::ordered_json;

// Samples written to fields.csv / fronts.csv.
struct OutputGrid {
  double t_lo = 1e-4, t_hi = 1.0;
  int nt = 16, nz = 64;
  double z_extent = 3.0;  // fields cover z in [0, z_extent * r(t)]
};

struct ScenarioFile {
  std::string source;
  PhysicalScenario scenario;
  std::optional<AssumptionBounds> bounds;
  FreeBoundaryConfig solver;
  KernelConfig grid;
  ResidualGrid residual_grid;
  OutputGrid output;
};

inline SimilarityProblem make_problem(const ScenarioFile& f) {
  SimilarityProblem pb;
  pb.k = derive_constants(f.scenario);
  DimensionlessCoefficients d = build_dimensionless_coefficients(f.scenario);
  pb.phase1 = d.phase1;
  pb.phase2 = d.phase2;
  pb.cfg = f.grid;
  return pb;
}

// ---- YAML ----

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

inline std::string where(const std::string& src, int line) {
  return line > 0 ? src + ":" + std::to_string(line) : src;
}

struct YamlReader {
  std::string src;

  YAML::Node child(const YAML::Node& parent, const std::string& key, const std::string& path, bool required) const {
    if (!parent.IsMap())
      throw ParseError(where(src, line_of(parent)) + ": '" + path + "' must be a mapping", path, line_of(parent));
    YAML::Node n = parent[key];
    if (!n && required)
      throw ParseError(where(src, line_of(parent)) + ": missing required field '" + join(path, key) + "'",
                       join(path, key), line_of(parent));
    return n;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const YAML::Node& n, const std::string& field) const {
    try {
      double v = n.as<double>();
      if (!std::isfinite(v)) throw YAML::Exception(n.Mark(), "not finite");
      return v;
    } catch (const YAML::Exception&) {
      throw ParseError(where(src, line_of(n)) + ": field '" + field + "' must be a finite number", field,
                       line_of(n));
    }
  }

  double number(const YAML::Node& parent, const std::string& key, const std::string& path) const {
    return number(child(parent, key, path, true), join(path, key));
  }

  std::optional<double> optional_number(const YAML::Node& parent, const std::string& key,
                                        const std::string& path) const {
    YAML::Node n = child(parent, key, path, false);
    if (!n) return std::nullopt;
    return number(n, join(path, key));
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      throw ParseError(where(src, line_of(n)) + ": field '" + field + "' must be an integer", field, line_of(n));
    }
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar())
      throw ParseError(where(src, line_of(n)) + ": field '" + field + "' must be a string", field, line_of(n));
    return n.as<std::string>();
  }

  std::pair<double, double> pair(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence() || n.size() != 2)
      throw ParseError(where(src, line_of(n)) + ": field '" + field + "' must be a list [low, high]", field,
                       line_of(n));
    return {number(n[0], field), number(n[1], field)};
  }

  void reject_unknown(const YAML::Node& map, std::initializer_list<const char*> known, const std::string& path) const {
    for (const auto& kv : map) {
      std::string k = kv.first.as<std::string>();
      bool ok = false;
      for (const char* x : known) ok = ok || k == x;
      if (!ok)
        throw ParseError(where(src, line_of(kv.first)) + ": unknown field '" + join(path, k) + "'", join(path, k),
                         line_of(kv.first));
    }
  }
};

inline Family parse_family(const std::string& s, const std::string& field, const YamlReader& r, int line) {
  if (s == "constant") return Family::constant;
  if (s == "linear_in_f") return Family::linear_in_f;
  if (s == "power_law_in_eta") return Family::power_law_in_eta;
  throw ParseError(where(r.src, line) + ": field '" + field + "' has unknown family '" + s + "'", field, line);
}

inline CoefficientModel parse_model(const YAML::Node& n, const std::string& path, const YamlReader& r) {
  CoefficientModel m;
  r.reject_unknown(n, {"c", "gamma", "lambda", "rho"}, path);
  for (Role role : kRoles) {
    std::string rp = YamlReader::join(path, role_name(role));
    YAML::Node rn = r.child(n, role_name(role), path, true);
    r.reject_unknown(rn, {"family", "parameters"}, rp);
    YAML::Node fam = r.child(rn, "family", rp, true);
    YAML::Node par = r.child(rn, "parameters", rp, true);
    RoleModel rm;
    rm.family = parse_family(r.text(fam, rp + ".family"), rp + ".family", r, line_of(fam));
    if (!par.IsSequence())
      throw ParseError(where(r.src, line_of(par)) + ": field '" + rp + ".parameters' must be a list",
                       rp + ".parameters", line_of(par));
    rm.parameters.clear();
    for (const auto& p : par) rm.parameters.push_back(r.number(p, rp + ".parameters"));
    m[role] = rm;
  }
  return m;
}

inline const char* kScalarFields[] = {"T_ion", "T_b",    "T_m",   "Q0", "U_c", "l_m",    "gamma_m",
                                      "lambda0", "rho0", "c0", "gamma0", "nu",  "sigma1", "sigma2"};

inline const char* kBoundFields[] = {"mu",  "L1m", "L1M", "N1m", "N1M", "K1m", "K1M", "L2m", "L2M", "N2m",
                                     "N2M", "K2m", "K2M", "L1t", "N1t", "K1t", "L2t", "N2t", "K2t"};

}  // namespace detail

// Scalar scenario field by name; used by file parsing and by sweeps.
inline double& scenario_field(PhysicalScenario& s, const std::string& key) {
  static const std::map<std::string, double PhysicalScenario::*> fields = {
      {"T_ion", &PhysicalScenario::T_ion},     {"T_b", &PhysicalScenario::T_b},
      {"T_m", &PhysicalScenario::T_m},         {"Q0", &PhysicalScenario::Q0},
      {"U_c", &PhysicalScenario::U_c},         {"l_m", &PhysicalScenario::l_m},
      {"gamma_m", &PhysicalScenario::gamma_m}, {"lambda0", &PhysicalScenario::lambda0},
      {"rho0", &PhysicalScenario::rho0},       {"c0", &PhysicalScenario::c0},
      {"gamma0", &PhysicalScenario::gamma0},   {"nu", &PhysicalScenario::nu},
      {"sigma1", &PhysicalScenario::sigma1},   {"sigma2", &PhysicalScenario::sigma2}};
  auto it = fields.find(key);
  if (it == fields.end()) throw ParseError("unknown scalar scenario field '" + key + "'", key);
  return s.*(it->second);
}

inline double& bound_field(AssumptionBounds& b, const std::string& key) {
  static const std::map<std::string, double AssumptionBounds::*> fields = {
      {"mu", &AssumptionBounds::mu},   {"L1m", &AssumptionBounds::L1m}, {"L1M", &AssumptionBounds::L1M},
      {"N1m", &AssumptionBounds::N1m}, {"N1M", &AssumptionBounds::N1M}, {"K1m", &AssumptionBounds::K1m},
      {"K1M", &AssumptionBounds::K1M}, {"L2m", &AssumptionBounds::L2m}, {"L2M", &AssumptionBounds::L2M},
      {"N2m", &AssumptionBounds::N2m}, {"N2M", &AssumptionBounds::N2M}, {"K2m", &AssumptionBounds::K2m},
      {"K2M", &AssumptionBounds::K2M}, {"L1t", &AssumptionBounds::L1t}, {"N1t", &AssumptionBounds::N1t},
      {"K1t", &AssumptionBounds::K1t}, {"L2t", &AssumptionBounds::L2t}, {"N2t", &AssumptionBounds::N2t},
      {"K2t", &AssumptionBounds::K2t}};
  auto it = fields.find(key);
  if (it == fields.end()) throw ParseError("unknown assumption bound '" + key + "'", key);
  return b.*(it->second);
}

inline ScenarioFile parse_scenario(const std::string& text, const std::string& source = "<scenario>") {
  using namespace detail;
  YamlReader r{source};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(where(source, e.mark.line + 1) + ": " + e.msg, "", e.mark.line + 1);
  }
  if (!root || !root.IsMap()) throw ParseError(source + ": scenario must be a YAML mapping");
  std::vector<const char*> known(std::begin(kScalarFields), std::end(kScalarFields));
  for (const char* k : {"coeff_model_1", "coeff_model_2", "assumption_bounds", "solver", "grid", "residual_grid",
                        "output", "name", "description"})
    known.push_back(k);
  for (const auto& kv : root) {
    std::string k = kv.first.as<std::string>();
    if (std::find_if(known.begin(), known.end(), [&](const char* x) { return k == x; }) == known.end())
      throw ParseError(where(source, line_of(kv.first)) + ": unknown field '" + k + "'", k, line_of(kv.first));
  }

  ScenarioFile f;
  f.source = source;
  for (const char* k : kScalarFields) scenario_field(f.scenario, k) = r.number(root, k, "");
  f.scenario.coeff_model_1 = parse_model(r.child(root, "coeff_model_1", "", true), "coeff_model_1", r);
  f.scenario.coeff_model_2 = parse_model(r.child(root, "coeff_model_2", "", true), "coeff_model_2", r);
  try {
    validate(f.scenario);
  } catch (const NonPositiveParameter& e) {
    throw ParseError(source + ": invalid scenario: " + e.what());
  }

  if (YAML::Node b = r.child(root, "assumption_bounds", "", false)) {
    AssumptionBounds ab;
    r.reject_unknown(b, {"mu", "L1m", "L1M", "N1m", "N1M", "K1m", "K1M", "L2m", "L2M", "N2m", "N2M", "K2m", "K2M",
                         "L1t", "N1t", "K1t", "L2t", "N2t", "K2t"},
                     "assumption_bounds");
    for (const char* k : kBoundFields) bound_field(ab, k) = r.number(b, k, "assumption_bounds");
    try {
      validate(ab);
    } catch (const NonPositiveParameter& e) {
      throw ParseError(where(source, line_of(b)) + ": assumption_bounds: " + e.what(), "assumption_bounds",
                       line_of(b));
    }
    f.bounds = ab;
  }

  if (YAML::Node s = r.child(root, "solver", "", false)) {
    const std::string p = "solver";
    r.reject_unknown(s, {"s0_bracket", "r0_policy", "r0_bracket", "scalar_tol", "residual_tol", "max_bisections",
                         "scan_points", "fixed_point"},
                     p);
    auto& c = f.solver;
    if (YAML::Node n = s["s0_bracket"]) c.s0_bracket = r.pair(n, "solver.s0_bracket");
    if (YAML::Node n = s["r0_bracket"]) c.r0_bracket = r.pair(n, "solver.r0_bracket");
    if (YAML::Node n = s["r0_policy"]) {
      std::string v = r.text(n, "solver.r0_policy");
      if (v == "manual") c.r0_policy = R0Policy::manual;
      else if (v == "certificate") c.r0_policy = R0Policy::certificate;
      else throw ParseError(where(source, line_of(n)) + ": solver.r0_policy must be 'manual' or 'certificate'",
                            "solver.r0_policy", line_of(n));
    }
    if (auto v = r.optional_number(s, "scalar_tol", p)) c.scalar_tol = *v;
    if (auto v = r.optional_number(s, "residual_tol", p)) c.residual_tol = *v;
    if (YAML::Node n = s["max_bisections"]) c.max_bisections = r.integer(n, "solver.max_bisections");
    if (YAML::Node n = s["scan_points"]) c.scan_points = r.integer(n, "solver.scan_points");
    if (YAML::Node fp = s["fixed_point"]) {
      const std::string q = "solver.fixed_point";
      r.reject_unknown(fp, {"tol", "max_iter", "damping", "ratio_probe_pairs", "seed"}, q);
      if (auto v = r.optional_number(fp, "tol", q)) c.fixed_point.tol = *v;
      if (YAML::Node n = fp["max_iter"]) c.fixed_point.max_iter = r.integer(n, q + ".max_iter");
      if (auto v = r.optional_number(fp, "damping", q)) c.fixed_point.damping = *v;
      if (YAML::Node n = fp["ratio_probe_pairs"]) c.fixed_point.ratio_probe_pairs = r.integer(n, q + ".ratio_probe_pairs");
      if (YAML::Node n = fp["seed"]) {
        try {
          c.fixed_point.seed = n.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
          throw ParseError(where(source, line_of(n)) + ": field '" + q + ".seed' must be a non-negative integer",
                           q + ".seed", line_of(n));
        }
      }
    }
  }
  if (f.solver.r0_policy == R0Policy::certificate && !f.bounds)
    throw ParseError(source + ": solver.r0_policy 'certificate' needs an assumption_bounds section",
                     "assumption_bounds");
  f.solver.bounds = f.bounds;
  try {
    check_config(f.solver);
  } catch (const std::invalid_argument& e) {
    throw ParseError(source + ": solver: " + e.what(), "solver");
  }

  if (YAML::Node g = r.child(root, "grid", "", false)) {
    r.reject_unknown(g, {"n1", "n2", "stages", "u_floor", "rel_tol", "abs_tol"}, "grid");
    if (YAML::Node n = g["n1"]) f.grid.n1 = std::size_t(std::max(2, r.integer(n, "grid.n1")));
    if (YAML::Node n = g["n2"]) f.grid.n2 = std::size_t(std::max(2, r.integer(n, "grid.n2")));
    if (YAML::Node n = g["stages"]) f.grid.stages = r.integer(n, "grid.stages");
    if (auto v = r.optional_number(g, "u_floor", "grid")) f.grid.u_floor = *v;
    if (auto v = r.optional_number(g, "rel_tol", "grid")) f.grid.quad.rel_tol = *v;
    if (auto v = r.optional_number(g, "abs_tol", "grid")) f.grid.quad.abs_tol = *v;
    if (f.grid.stages < 1 || f.grid.stages > 16)
      throw ParseError(where(source, line_of(g)) + ": grid.stages must lie in [1, 16]", "grid.stages", line_of(g));
  }

  if (YAML::Node g = r.child(root, "residual_grid", "", false)) {
    const std::string p = "residual_grid";
    r.reject_unknown(g, {"t_lo", "t_hi", "nt", "nz", "solid_extent", "z_step", "t_step"}, p);
    auto& c = f.residual_grid;
    if (auto v = r.optional_number(g, "t_lo", p)) c.t_lo = *v;
    if (auto v = r.optional_number(g, "t_hi", p)) c.t_hi = *v;
    if (YAML::Node n = g["nt"]) c.nt = r.integer(n, p + ".nt");
    if (YAML::Node n = g["nz"]) c.nz = r.integer(n, p + ".nz");
    if (auto v = r.optional_number(g, "solid_extent", p)) c.solid_extent = *v;
    if (auto v = r.optional_number(g, "z_step", p)) c.z_step = *v;
    if (auto v = r.optional_number(g, "t_step", p)) c.t_step = *v;
  }

  if (YAML::Node g = r.child(root, "output", "", false)) {
    const std::string p = "output";
    r.reject_unknown(g, {"t_lo", "t_hi", "nt", "nz", "z_extent"}, p);
    auto& c = f.output;
    if (auto v = r.optional_number(g, "t_lo", p)) c.t_lo = *v;
    if (auto v = r.optional_number(g, "t_hi", p)) c.t_hi = *v;
    if (YAML::Node n = g["nt"]) c.nt = r.integer(n, p + ".nt");
    if (YAML::Node n = g["nz"]) c.nz = r.integer(n, p + ".nz");
    if (auto v = r.optional_number(g, "z_extent", p)) c.z_extent = *v;
  }
  return f;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", "", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ScenarioFile load_scenario(const std::string& path) { return parse_scenario(read_file(path), path); }

// ---- canonical JSON ----

namespace detail {

inline void format_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void escape(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += char(c);
        }
    }
  }
  out += '"';
}

inline void dump(std::string& out, const ordered_json& j, int indent) {
  std::string pad(indent + 2, ' '), close(indent, ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        escape(out, it.key());
        out += ": ";
        dump(out, it.value(), indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      bool scalars = std::all_of(j.begin(), j.end(), [](const auto& v) { return v.is_primitive(); });
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(out, j[i], indent + 2);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(out, j[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case ordered_json::value_t::string: escape(out, j.get<std::string>()); return;
    case ordered_json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case ordered_json::value_t::number_float: format_number(out, j.get<double>()); return;
    case ordered_json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
    case ordered_json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
    case ordered_json::value_t::null:
    default: out += "null"; return;
  }
}

}  // namespace detail

// Insertion-ordered keys, 17 significant digits, non-finite numbers as null.
inline std::string canonical_dump(const ordered_json& j) {
  std::string out;
  detail::dump(out, j, 0);
  out += "\n";
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

inline ordered_json read_json(const std::string& path) {
  std::string text = read_file(path);
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
}

// ---- JSON forms of the data model ----

inline ordered_json to_json(const RoleModel& m) {
  return ordered_json{{"family", family_name(m.family)}, {"parameters", m.parameters}};
}

inline ordered_json to_json(const CoefficientModel& m) {
  ordered_json j = ordered_json::object();
  for (Role r : kRoles) j[role_name(r)] = to_json(m[r]);
  return j;
}

inline ordered_json to_json(const AssumptionBounds& b) {
  ordered_json j = ordered_json::object();
  AssumptionBounds c = b;
  for (const char* k : detail::kBoundFields) j[k] = bound_field(c, k);
  return j;
}

inline ordered_json to_json(const ScenarioFile& f) {
  ordered_json j = ordered_json::object();
  PhysicalScenario s = f.scenario;
  for (const char* k : detail::kScalarFields) j[k] = scenario_field(s, k);
  j["coeff_model_1"] = to_json(s.coeff_model_1);
  j["coeff_model_2"] = to_json(s.coeff_model_2);
  if (f.bounds) j["assumption_bounds"] = to_json(*f.bounds);
  const auto& c = f.solver;
  j["solver"] = {{"s0_bracket", {c.s0_bracket.first, c.s0_bracket.second}},
                 {"r0_policy", c.r0_policy == R0Policy::manual ? "manual" : "certificate"},
                 {"r0_bracket", {c.r0_bracket.first, c.r0_bracket.second}},
                 {"scalar_tol", c.scalar_tol},
                 {"residual_tol", c.residual_tol},
                 {"max_bisections", c.max_bisections},
                 {"scan_points", c.scan_points},
                 {"fixed_point",
                  {{"tol", c.fixed_point.tol},
                   {"max_iter", c.fixed_point.max_iter},
                   {"damping", c.fixed_point.damping},
                   {"ratio_probe_pairs", c.fixed_point.ratio_probe_pairs},
                   {"seed", c.fixed_point.seed}}}};
  j["grid"] = {{"n1", f.grid.n1},           {"n2", f.grid.n2},
               {"stages", f.grid.stages},   {"u_floor", f.grid.u_floor},
               {"rel_tol", f.grid.quad.rel_tol}, {"abs_tol", f.grid.quad.abs_tol}};
  const auto& g = f.residual_grid;
  j["residual_grid"] = {{"t_lo", g.t_lo}, {"t_hi", g.t_hi},     {"nt", g.nt},         {"nz", g.nz},
                        {"solid_extent", g.solid_extent}, {"z_step", g.z_step}, {"t_step", g.t_step}};
  const auto& o = f.output;
  j["output"] = {{"t_lo", o.t_lo}, {"t_hi", o.t_hi}, {"nt", o.nt}, {"nz", o.nz}, {"z_extent", o.z_extent}};
  return j;
}

// The scenario section of a result file is a valid scenario document; the
// YAML reader accepts JSON, so it is parsed back through the same path.
inline ScenarioFile scenario_from_json(const ordered_json& j, const std::string& source) {
  return parse_scenario(j.dump(), source);
}

inline ordered_json to_json(const DimensionlessConstants& k) {
  return ordered_json{{"a", k.a},         {"B", k.B},   {"Q", k.Q},   {"M", k.M},
                      {"D1", k.D1},       {"D2", k.D2}, {"D1_star", k.D1_star},
                      {"D2_star", k.D2_star}, {"nu", k.nu}, {"mu", k.mu}, {"U_c", k.U_c}};
}

inline ordered_json to_json(const ReductionConsistency& r) {
  return ordered_json{{"conduction", r.conduction},
                      {"joule_phase1", r.joule_phase1},
                      {"joule_phase2", r.joule_phase2},
                      {"ok", r.ok()}};
}

inline ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

inline ordered_json to_json(const RootSearch& r) {
  return ordered_json{{"value", opt(r.root)}, {"status", r.status}, {"monotone", r.monotone}};
}

inline ordered_json to_json(const Certificate& c, const AssumptionBounds& b, const DimensionlessConstants& k) {
  const auto& p1 = c.phase1;
  const auto& p2 = c.phase2;
  const auto& reg = c.region;
  ordered_json j = ordered_json::object();
  j["s0"] = c.s0;
  j["r0"] = c.r0;
  j["H_inf"] = c.H.H_inf;
  j["H_sup"] = c.H.H_sup;
  j["H_tilde"] = c.H.H_tilde;
  j["phase1"] = {{"E1_inf", p1.E1_inf},         {"E1_tilde", p1.E1_tilde}, {"Phi1_tilde", p1.Phi1_tilde},
                 {"H1_inf_r0", p1.H1_inf(c.r0)}, {"H1_sup", p1.H1_sup},     {"H1_tilde", p1.H1_tilde},
                 {"G1_inf_r0", p1.G1_inf(c.r0)}, {"G1_sup", p1.G1_sup},     {"G1_tilde", p1.G1_tilde}};
  j["phase2"] = {{"E2_inf", p2.E2_inf},           {"E2_tilde", p2.E2_tilde},
                 {"Phi2_inf_at_inf", p2.Phi2_inf(kInf)}, {"Phi2_sup", p2.Phi2_sup},
                 {"Phi2_tilde", p2.Phi2_tilde},   {"H2_inf_at_inf", p2.H2_inf(kInf)},
                 {"H2_sup", p2.H2_sup},           {"H2_tilde", p2.H2_tilde},
                 {"G2_inf_at_inf", p2.G2_inf(kInf)}, {"G2_sup", p2.G2_sup},
                 {"G2_tilde", p2.G2_tilde}};
  j["eps1"] = c.eps.eps1;
  j["eps21"] = c.eps.eps21;
  j["eps22"] = c.eps.eps22;
  j["eps23"] = c.eps.eps23;
  j["eps2"] = c.eps.eps2;
  j["eps"] = c.eps.eps;
  j["j1"] = reg.j1;
  j["s1"] = to_json(reg.s1);
  j["j2"] = reg.j2;
  j["s2"] = to_json(reg.s2);
  j["r1"] = to_json(reg.r1);
  j["r2"] = to_json(reg.r2);
  j["r0_bar"] = opt(reg.r0_bar);
  j["r_B"] = to_json(reg.r_B);
  j["Z_inf"] = Z_inf(c.r0, c.s0, b, k);
  if (c.W) {
    j["W_inf"] = c.W->W_inf;
    j["W_sup"] = c.W->W_sup;
  } else {
    j["W_inf"] = nullptr;
    j["W_sup"] = nullptr;
  }
  j["in_Sigma"] = c.in_Sigma;
  j["sigma_reason"] = c.sigma_reason;
  j["hyp_eps1_ok"] = reg.hyp_eps1_ok;
  j["hyp_eps1_lhs"] = reg.hyp_eps1_printed;
  j["hyp_eps1_limit_ok"] = reg.hyp_eps1_limit_ok;
  j["hyp_eps1_limit_lhs"] = reg.hyp_eps1_limit;
  j["hyp_Zinfty_ok"] = reg.hyp_Zinfty_ok;
  j["hyp_Zinfty_lhs"] = reg.hyp_Zinfty;
  j["hyp_ec44_ok"] = c.hyp_ec44_ok ? ordered_json(*c.hyp_ec44_ok) : ordered_json(nullptr);
  j["hyp_X_lt_Y_at_r0_bar"] = c.hyp_X_lt_Y_ok ? ordered_json(*c.hyp_X_lt_Y_ok) : ordered_json(nullptr);
  j["D2_star_le_1"] = c.D2_star_le_1;
  j["eps_monotone"] = reg.eps_monotone;
  j["B_degenerate"] = reg.B_degenerate;
  return j;
}

inline ordered_json to_json(const AssumptionReport& r) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"worst_eta", c.worst_eta}, {"margin", c.margin}});
  return ordered_json{{"all_pass", r.all_pass()}, {"checks", checks}};
}

inline ordered_json to_json(const ResidualReport& r) {
  ordered_json j = ordered_json::object();
  for (const auto& i : r.items)
    j[i.name] = {{"max", i.max}, {"l2", i.l2}, {"count", i.count}, {"scale", i.scale}};
  return j;
}

inline ordered_json to_json(const ProfilePair& p) {
  return ordered_json{{"s0", p.s0}, {"r0", p.r0}, {"eta1", p.eta1()}, {"f1", p.f1}, {"u2", p.u2()}, {"f2", p.f2}};
}

inline ProfilePair profiles_from_json(const ordered_json& j, const std::string& source) {
  try {
    ProfilePair p;
    p.s0 = j.at("s0").get<double>();
    p.r0 = j.at("r0").get<double>();
    p.f1 = j.at("f1").get<std::vector<double>>();
    p.f2 = j.at("f2").get<std::vector<double>>();
    if (p.f1.size() < 2 || p.f2.size() < 2) throw ParseError(source + ": profile tables too short", "profiles");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": malformed profiles section: " + e.what(), "profiles");
  }
}

// ---- CSV ----

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += csv_field(cells[i]);
    }
    text_ += "\r\n";
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

inline std::string fields_csv(const std::vector<FieldRow>& rows) {
  CsvWriter w({"z", "t", "zone", "T", "phi"});
  for (const auto& r : rows)
    w.row({csv_number(r.z), csv_number(r.t), zone_name(r.zone), csv_number(r.T), r.phi ? csv_number(*r.phi) : ""});
  return w.str();
}

inline std::string fronts_csv(const std::vector<FrontRow>& rows) {
  CsvWriter w({"t", "s", "r"});
  for (const auto& r : rows) w.row({csv_number(r.t), csv_number(r.s), csv_number(r.r)});
  return w.str();
}

}  // namespace contact_stefan
