// contact-stefan: solve, certify, verify, sweep and export similarity solutions.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "contact_stefan/io.hpp"

#ifndef CONTACT_STEFAN_VERSION
#define CONTACT_STEFAN_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace contact_stefan;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kNoRoot = 2, kFixedPoint = 3, kBadInput = 4, kOther = 5 };

struct Common {
  std::string out = ".";
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool certify = false;
  std::vector<double> s0_bracket, r0_bracket;
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

ordered_json tool_json() { return {{"name", "contact-stefan"}, {"version", CONTACT_STEFAN_VERSION}}; }

void apply_overrides(ScenarioFile& f, const Common& c, ordered_json& overrides) {
  auto& s = f.solver;
  if (c.tol) s.fixed_point.tol = *c.tol, overrides["tol"] = *c.tol;
  if (c.max_iter) s.fixed_point.max_iter = *c.max_iter, overrides["max_iter"] = *c.max_iter;
  if (c.seed) s.fixed_point.seed = *c.seed, overrides["seed"] = *c.seed;
  if (!c.s0_bracket.empty()) s.s0_bracket = {c.s0_bracket[0], c.s0_bracket[1]}, overrides["s0_bracket"] = c.s0_bracket;
  if (!c.r0_bracket.empty()) {
    s.r0_bracket = {c.r0_bracket[0], c.r0_bracket[1]};
    s.r0_policy = R0Policy::manual;
    overrides["r0_bracket"] = c.r0_bracket;
  }
  if (c.certify) {
    if (!f.bounds) throw ParseError(f.source + ": --certify needs an assumption_bounds section", "assumption_bounds");
    overrides["certify"] = true;
  }
  try {
    check_config(s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid solver options: ") + e.what());
  }
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& input,
                    const ordered_json& overrides, const Common& c, const std::string& started,
                    const std::vector<std::string>& outputs) {
  ordered_json m;
  m["tool"] = tool_json();
  m["command"] = command;
  m["input"] = input;
  m["overrides"] = overrides.is_null() ? ordered_json::object() : overrides;
  m["output_dir"] = dir.string();
  m["seed"] = c.seed ? ordered_json(*c.seed) : ordered_json(nullptr);
  m["jobs"] = c.jobs;
  m["outputs"] = outputs;
  m["started_utc"] = started;
  m["finished_utc"] = utc_now();
  write_text((dir / "manifest.json").string(), canonical_dump(m));
}

ordered_json solution_json(const SimilaritySolution& s) {
  return {{"s0_hat", s.s0_hat},
          {"r0_star", s.r0_star},
          {"residual_Ec1", s.residual_Ec1},
          {"residual_Ec2", s.residual_Ec2},
          {"scale_Ec1", s.scale_Ec1},
          {"scale_Ec2", s.scale_Ec2},
          {"W", s.W},
          {"X", s.X},
          {"Y", s.Y},
          {"fixed_point_iterations", s.fixed_point_iterations},
          {"final_update_norm", s.final_update_norm},
          {"empirical_ratio", s.empirical_ratio},
          {"sign_configuration", s.sign_configuration},
          {"outer_bisections", s.outer_bisections},
          {"inner_bisections", s.inner_bisections},
          {"evaluations", s.log.size()}};
}

std::string evaluations_csv(const std::vector<EvalLogEntry>& log) {
  CsvWriter w({"index", "s0", "r0", "residual_Ec1", "residual_Ec2", "iterations"});
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& e = log[i];
    w.row({std::to_string(i), csv_number(e.s0), csv_number(e.r0), csv_number(e.ec1), csv_number(e.ec2),
           std::to_string(e.iterations)});
  }
  return w.str();
}

AssumptionReport check_assumptions(const ScenarioFile& f, const ProfilePair& profiles) {
  AssumptionProbe probe;
  probe.profiles = {profiles};
  return verify_assumptions(build_dimensionless_coefficients(f.scenario), *f.bounds, probe);
}

void write_tables(const fs::path& dir, const SolutionFields& fields, const OutputGrid& g) {
  write_text((dir / "fields.csv").string(), fields_csv(sample_fields(fields, g.t_lo, g.t_hi, g.nt, g.nz, g.z_extent)));
  write_text((dir / "fronts.csv").string(), fronts_csv(sample_fronts(fields, g.t_lo, g.t_hi, g.nt)));
}

void warn_consistency(const PhysicalScenario& s) {
  ReductionConsistency r = reduction_consistency(s);
  if (r.ok()) return;
  std::fprintf(stderr,
               "warning: reduced equations differ from the field equations "
               "(lambda0/(a c0 gamma0) - 1 = %.3g, sigma_i T_m - 1 = %.3g, %.3g); expect PDE residuals\n",
               r.conduction, r.joule_phase1, r.joule_phase2);
}

int cmd_solve(const std::string& path, const Common& c, bool tables) {
  std::string started = utc_now();
  ScenarioFile f = load_scenario(path);
  ordered_json overrides = ordered_json::object();
  apply_overrides(f, c, overrides);
  SimilarityProblem pb = make_problem(f);
  warn_consistency(f.scenario);
  SimilaritySolution sol = solve_outer_s0(pb, f.solver);
  SolutionFields fields(f.scenario, sol.context);
  ResidualReport residuals = pde_residual(fields, f.residual_grid);

  ordered_json j;
  j["tool"] = tool_json();
  j["command"] = "solve";
  j["scenario"] = to_json(f);
  j["constants"] = to_json(pb.k);
  j["consistency"] = to_json(reduction_consistency(f.scenario));
  j["solution"] = solution_json(sol);
  j["certificate"] = sol.certificate ? to_json(*sol.certificate, *f.bounds, pb.k) : ordered_json(nullptr);
  j["assumptions"] = f.bounds ? to_json(check_assumptions(f, sol.profiles)) : ordered_json(nullptr);
  j["residuals"] = to_json(residuals);
  j["profiles"] = to_json(sol.profiles);

  fs::path dir(c.out);
  fs::create_directories(dir);
  std::vector<std::string> outputs = {"solution.json", "evaluations.csv"};
  write_text((dir / "solution.json").string(), canonical_dump(j));
  write_text((dir / "evaluations.csv").string(), evaluations_csv(sol.log));
  if (tables) {
    write_tables(dir, fields, f.output);
    outputs.insert(outputs.end(), {"fields.csv", "fronts.csv"});
  }
  write_manifest(dir, "solve", path, overrides, c, started, outputs);

  std::printf("s0_hat   %.17g\nr0_star  %.17g\n", sol.s0_hat, sol.r0_star);
  std::printf("Ec1 %.3e  Ec2 %.3e  fixed-point iterations %d  empirical ratio %.4g\n",
              sol.residual_Ec1 / sol.scale_Ec1, sol.residual_Ec2 / sol.scale_Ec2, sol.fixed_point_iterations,
              sol.empirical_ratio);
  if (sol.certificate)
    std::printf("certificate: eps %.6g  in_Sigma %s (%s)\n", sol.certificate->eps.eps,
                sol.certificate->in_Sigma ? "true" : "false", sol.certificate->sigma_reason.c_str());
  std::printf("interior PDE residual %.3e\n", residuals.interior_max());
  return kOk;
}

int cmd_certify(const std::string& path, double s0, double r0, const Common& c) {
  std::string started = utc_now();
  ScenarioFile f = load_scenario(path);
  if (!f.bounds) throw ParseError(path + ": certify needs an assumption_bounds section", "assumption_bounds");
  SimilarityProblem pb = make_problem(f);
  Certificate cert = certify(s0, r0, *f.bounds, pb.k, f.solver.region);
  const auto& reg = cert.region;
  if (reg.r0_bar && reg.r_B.root) cert.W = compute_W_bounds(s0, r0, *reg.r0_bar, *reg.r_B.root, *f.bounds, pb.k);

  ordered_json j;
  j["tool"] = tool_json();
  j["command"] = "certify";
  j["scenario"] = to_json(f);
  j["constants"] = to_json(pb.k);
  j["certificate"] = to_json(cert, *f.bounds, pb.k);

  fs::path dir(c.out);
  fs::create_directories(dir);
  write_text((dir / "certificate.json").string(), canonical_dump(j));
  ordered_json overrides = {{"s0", s0}, {"r0", r0}};
  write_manifest(dir, "certify", path, overrides, c, started, {"certificate.json"});
  std::printf("eps %.6g (eps1 %.6g, eps2 %.6g)  in_Sigma %s (%s)\n", cert.eps.eps, cert.eps.eps1, cert.eps.eps2,
              cert.in_Sigma ? "true" : "false", cert.sigma_reason.c_str());
  return kOk;
}

struct LoadedSolution {
  ScenarioFile file;
  SimilarityProblem problem;
  ProfilePair profiles;
  ordered_json doc;
};

LoadedSolution load_solution(const std::string& path) {
  LoadedSolution L;
  L.doc = read_json(path);
  if (!L.doc.is_object() || !L.doc.contains("scenario") || !L.doc.contains("profiles"))
    throw ParseError(path + ": not a solution file (needs 'scenario' and 'profiles')", "scenario");
  L.file = scenario_from_json(L.doc["scenario"], path + "#scenario");
  L.problem = make_problem(L.file);
  L.profiles = profiles_from_json(L.doc["profiles"], path);
  return L;
}

int cmd_verify(const std::string& path, const Common& c, double pde_tol, double bc_tol, double perturb_r0) {
  std::string started = utc_now();
  LoadedSolution L = load_solution(path);
  ProfilePair p = L.profiles;
  p.r0 *= 1.0 + perturb_r0;
  auto ctx = std::make_shared<KernelContext>(L.problem, p);
  SolutionFields fields(L.file.scenario, ctx);
  ResidualReport rep = pde_residual(fields, L.file.residual_grid);

  static const std::vector<std::string> interior = {"heat_liquid", "heat_solid", "current_liquid", "current_solid"};
  ordered_json items = ordered_json::object();
  bool pass = true;
  double roundtrip = 0;
  bool have_recorded = perturb_r0 == 0 && L.doc.contains("residuals") && L.doc["residuals"].is_object();
  for (const auto& i : rep.items) {
    bool is_interior = std::find(interior.begin(), interior.end(), i.name) != interior.end();
    double tol = is_interior ? pde_tol : bc_tol;
    bool ok = i.max <= tol;
    pass = pass && ok;
    ordered_json e = {{"max", i.max}, {"l2", i.l2}, {"count", i.count}, {"scale", i.scale},
                      {"kind", is_interior ? "interior" : "boundary"}, {"threshold", tol}, {"pass", ok}};
    if (have_recorded && L.doc["residuals"].contains(i.name)) {
      const auto& rec = L.doc["residuals"][i.name];
      if (rec.contains("max") && rec["max"].is_number())
        roundtrip = std::max(roundtrip, std::abs(rec["max"].get<double>() - i.max));
      if (rec.contains("l2") && rec["l2"].is_number())
        roundtrip = std::max(roundtrip, std::abs(rec["l2"].get<double>() - i.l2));
    }
    items[i.name] = e;
  }

  ordered_json j;
  j["tool"] = tool_json();
  j["command"] = "verify";
  j["s0"] = p.s0;
  j["r0"] = p.r0;
  j["perturb_r0"] = perturb_r0;
  j["pde_tol"] = pde_tol;
  j["boundary_tol"] = bc_tol;
  j["pass"] = pass;
  j["roundtrip_max_abs_diff"] = have_recorded ? ordered_json(roundtrip) : ordered_json(nullptr);
  j["residuals"] = items;

  fs::path dir(c.out);
  fs::create_directories(dir);
  write_text((dir / "residual_report.json").string(), canonical_dump(j));
  write_manifest(dir, "verify", path, {{"pde_tol", pde_tol}, {"boundary_tol", bc_tol}, {"perturb_r0", perturb_r0}}, c,
                 started, {"residual_report.json"});
  for (const auto& [name, e] : items.items())
    std::printf("%-22s %-8s max %.3e  threshold %.1e  %s\n", name.c_str(), e["kind"].get<std::string>().c_str(),
                e["max"].get<double>(), e["threshold"].get<double>(), e["pass"].get<bool>() ? "pass" : "FAIL");
  if (have_recorded) std::printf("round-trip max |diff| %.3e\n", roundtrip);
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? kOk : kVerifyFailed;
}

struct GridOverrides {
  std::optional<double> t_lo, t_hi, z_extent;
  std::optional<int> nt, nz;
};

int cmd_export(const std::string& path, const Common& c, const GridOverrides& o) {
  std::string started = utc_now();
  LoadedSolution L = load_solution(path);
  OutputGrid g = L.file.output;
  if (o.t_lo) g.t_lo = *o.t_lo;
  if (o.t_hi) g.t_hi = *o.t_hi;
  if (o.z_extent) g.z_extent = *o.z_extent;
  if (o.nt) g.nt = *o.nt;
  if (o.nz) g.nz = *o.nz;
  if (!(g.t_lo > 0 && g.t_hi >= g.t_lo && g.nt >= 1 && g.nz >= 2 && g.z_extent > 0))
    throw ParseError("export grid needs 0 < t_lo <= t_hi, nt >= 1, nz >= 2, z_extent > 0");
  auto ctx = std::make_shared<KernelContext>(L.problem, L.profiles);
  SolutionFields fields(L.file.scenario, ctx);
  fs::path dir(c.out);
  fs::create_directories(dir);
  write_tables(dir, fields, g);
  write_manifest(dir, "export", path, ordered_json::object(), c, started, {"fields.csv", "fronts.csv"});
  return kOk;
}

struct SweepSpec {
  std::string key;
  double lo = 0, hi = 0;
  int n = 0;
};

SweepSpec parse_vary(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw ParseError("--vary expects key=lo:hi:n, got '" + s + "'", "vary");
  SweepSpec v;
  v.key = s.substr(0, eq);
  std::string rest = s.substr(eq + 1);
  auto c1 = rest.find(':'), c2 = rest.rfind(':');
  if (c1 == std::string::npos || c1 == c2) throw ParseError("--vary expects key=lo:hi:n, got '" + s + "'", "vary");
  try {
    std::size_t used = 0;
    v.lo = std::stod(rest.substr(0, c1));
    v.hi = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    v.n = std::stoi(rest.substr(c2 + 1), &used);
    if (used != rest.size() - c2 - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ParseError("--vary expects key=lo:hi:n, got '" + s + "'", "vary");
  }
  if (v.n < 1) throw ParseError("--vary: n must be >= 1", "vary");
  return v;
}

struct SweepRow {
  double value = 0;
  std::string status = "ok";
  std::string error;
  std::optional<SimilaritySolution> sol;
};

int cmd_sweep(const std::string& path, const std::string& vary, const Common& c) {
  std::string started = utc_now();
  ScenarioFile base = load_scenario(path);
  ordered_json overrides = ordered_json::object();
  apply_overrides(base, c, overrides);
  SweepSpec spec = parse_vary(vary);
  scenario_field(base.scenario, spec.key);  // rejects unknown keys before any solve
  overrides["vary"] = vary;

  std::vector<SweepRow> rows(spec.n);
  for (int i = 0; i < spec.n; ++i)
    rows[i].value = spec.n == 1 ? spec.lo : spec.lo + (spec.hi - spec.lo) * double(i) / double(spec.n - 1);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < spec.n; i = next++) {
      SweepRow& r = rows[i];
      try {
        ScenarioFile f = base;
        scenario_field(f.scenario, spec.key) = r.value;
        validate(f.scenario);
        r.sol = solve_outer_s0(make_problem(f), f.solver);
      } catch (const InnerFailure& e) {
        r.status = e.cause == InnerFailure::Cause::no_sign_change ? "no_sign_change"
                   : e.cause == InnerFailure::Cause::fixed_point  ? "fixed_point_failure"
                                                                  : "inner_failure";
        r.error = e.what();
      } catch (const NoSignChange& e) {
        r.status = "no_sign_change", r.error = e.what();
      } catch (const FixedPointFailure& e) {
        r.status = "fixed_point_failure", r.error = e.what();
      } catch (const std::exception& e) {
        r.status = "error", r.error = e.what();
      }
    }
  };
  int jobs = std::max(1, std::min(c.jobs, spec.n));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CsvWriter w({"index", spec.key, "status", "s0_hat", "r0_star", "eps", "in_Sigma", "residual_Ec1", "residual_Ec2",
               "fixed_point_iterations", "empirical_ratio", "error"});
  int failures = 0;
  for (int i = 0; i < spec.n; ++i) {
    const auto& r = rows[i];
    if (!r.sol) {
      ++failures;
      w.row({std::to_string(i), csv_number(r.value), r.status, "", "", "", "", "", "", "", "", r.error});
      continue;
    }
    const auto& s = *r.sol;
    std::string eps, in_sigma;
    if (s.certificate) {
      eps = csv_number(s.certificate->eps.eps);
      in_sigma = s.certificate->in_Sigma ? "true" : "false";
    }
    w.row({std::to_string(i), csv_number(r.value), r.status, csv_number(s.s0_hat), csv_number(s.r0_star), eps,
           in_sigma, csv_number(s.residual_Ec1), csv_number(s.residual_Ec2), std::to_string(s.fixed_point_iterations),
           csv_number(s.empirical_ratio), ""});
  }
  fs::path dir(c.out);
  fs::create_directories(dir);
  write_text((dir / "sweep.csv").string(), w.str());
  write_manifest(dir, "sweep", path, overrides, c, started, {"sweep.csv"});
  std::printf("%d rows, %d failed\n", spec.n, failures);
  return kOk;
}

int run_guarded(const std::function<int()>& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InnerFailure& e) {
    std::cerr << "inner solve failed at s0 = " << e.s0 << ": " << e.what() << "\n";
    switch (e.cause) {
      case InnerFailure::Cause::no_sign_change: return kNoRoot;
      case InnerFailure::Cause::fixed_point: return kFixedPoint;
      default: return kOther;
    }
  } catch (const NoSignChange& e) {
    std::cerr << "no sign change: " << e.what() << "\n";
    return kNoRoot;
  } catch (const RootNotBracketed& e) {
    std::cerr << "root not bracketed: " << e.what() << "\n";
    return kNoRoot;
  } catch (const FixedPointFailure& e) {
    std::cerr << "fixed-point failure: " << e.what() << " (last update " << e.last_update_norm << ")\n";
    return kFixedPoint;
  } catch (const NonPositiveParameter& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}

void add_common(CLI::App* app, Common& c, bool solver_flags) {
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--jobs", c.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  if (!solver_flags) return;
  app->add_option("--tol", c.tol, "fixed-point tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", c.max_iter, "fixed-point iteration cap")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for the contraction probe");
  app->add_flag("--certify", c.certify, "require and attach the contraction certificate");
  app->add_option("--s0-bracket", c.s0_bracket, "outer bracket LO HI")->expected(2);
  app->add_option("--r0-bracket", c.r0_bracket, "inner bracket LO HI (selects the manual policy)")->expected(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity solutions of the two-phase contact Stefan problem"};
  app.set_version_flag("--version", CONTACT_STEFAN_VERSION);
  app.require_subcommand(1);
  Common c;

  std::string scenario, solution, vary;
  bool no_tables = false;
  double s0 = 0, r0 = 0, pde_tol = 1e-6, bc_tol = 1e-6, perturb_r0 = 0;
  GridOverrides grid;

  auto* solve = app.add_subcommand("solve", "solve a scenario and write solution.json, fields.csv, fronts.csv");
  solve->add_option("scenario", scenario, "scenario YAML file")->required();
  solve->add_flag("--no-tables", no_tables, "skip fields.csv and fronts.csv");
  add_common(solve, c, true);

  auto* cert = app.add_subcommand("certify", "evaluate the contraction certificate at (s0, r0)");
  cert->add_option("scenario", scenario, "scenario YAML file")->required();
  cert->add_option("--s0", s0, "boiling-front coefficient")->required();
  cert->add_option("--r0", r0, "melting-front coefficient")->required();
  add_common(cert, c, false);

  auto* verify = app.add_subcommand("verify", "recompute PDE residuals from a solution.json");
  verify->add_option("solution", solution, "solution.json")->required();
  verify->add_option("--pde-tol", pde_tol, "threshold for interior residuals")->capture_default_str();
  verify->add_option("--boundary-tol", bc_tol, "threshold for boundary and front residuals")->capture_default_str();
  verify->add_option("--perturb-r0", perturb_r0, "relative perturbation applied to r0 before checking");
  add_common(verify, c, false);

  auto* sweep = app.add_subcommand("sweep", "repeat solve over one scalar scenario field");
  sweep->add_option("scenario", scenario, "scenario YAML file")->required();
  sweep->add_option("--vary", vary, "key=lo:hi:n")->required();
  add_common(sweep, c, true);

  auto* exp = app.add_subcommand("export", "write fields.csv and fronts.csv from a solution.json");
  exp->add_option("solution", solution, "solution.json")->required();
  exp->add_option("--t-lo", grid.t_lo, "first sample time");
  exp->add_option("--t-hi", grid.t_hi, "last sample time");
  exp->add_option("--nt", grid.nt, "number of times");
  exp->add_option("--nz", grid.nz, "points per time");
  exp->add_option("--z-extent", grid.z_extent, "z range as a multiple of r(t)");
  add_common(exp, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  if (*solve) return run_guarded([&] { return cmd_solve(scenario, c, !no_tables); });
  if (*cert) return run_guarded([&] { return cmd_certify(scenario, s0, r0, c); });
  if (*verify) return run_guarded([&] { return cmd_verify(solution, c, pde_tol, bc_tol, perturb_r0); });
  if (*sweep) return run_guarded([&] { return cmd_sweep(scenario, vary, c); });
  if (*exp) return run_guarded([&] { return cmd_export(solution, c, grid); });
  return kOther;
}
