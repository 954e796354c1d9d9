#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "certificates.hpp"
#include "errors.hpp"
#include "fixed_point.hpp"
#include "kernels.hpp"

namespace contact_stefan {

enum class R0Policy { certificate, manual };

struct FreeBoundaryConfig {
  std::pair<double, double> s0_bracket{0.1, 1.0};
  R0Policy r0_policy = R0Policy::manual;
  std::pair<double, double> r0_bracket{0.1, 10.0};  // manual policy; low is raised above s0
  double scalar_tol = 1e-12;    // relative bracket width at which bisection stops
  double residual_tol = 1e-8;   // accepted |residual| / scale at the returned point
  int max_bisections = 200;
  int scan_points = 12;         // geometric scan used to find the first sign change
  FixedPointConfig fixed_point;
  std::optional<AssumptionBounds> bounds;  // required by the certificate policy
  RegionSearchConfig region;
};

inline void check_config(const FreeBoundaryConfig& c) {
  auto ordered = [](std::pair<double, double> b) { return b.first > 0 && b.second > b.first; };
  if (!ordered(c.s0_bracket)) throw std::invalid_argument("s0 bracket must satisfy 0 < low < high");
  if (c.r0_policy == R0Policy::manual && !ordered(c.r0_bracket))
    throw std::invalid_argument("r0 bracket must satisfy 0 < low < high");
  if (c.r0_policy == R0Policy::certificate && !c.bounds)
    throw std::invalid_argument("certificate r0 policy needs assumption bounds");
  if (!(c.scalar_tol > 0) || !(c.residual_tol > 0)) throw std::invalid_argument("scalar tolerances must be > 0");
  if (c.max_bisections < 1 || c.scan_points < 2) throw std::invalid_argument("max_bisections >= 1, scan_points >= 2");
  check_config(c.fixed_point);
}

// ---- scalar equations at a fixed point ----

inline double X_of(const KernelContext& c) {
  const auto& k = c.problem().k;
  return k.D1_star * c.G1_r0() / (c.H() * c.H()) - k.B;
}

inline double Y_of(const KernelContext& c) { return -c.flux_coefficient() * c.Phi1_r0(); }

inline double residual_Ec1(const KernelContext& c) { return X_of(c) - Y_of(c); }

inline double W_of(const KernelContext& c) {
  const auto& k = c.problem().k;
  double H2 = c.H() * c.H(), r0 = c.r0();
  double melt = c.E1_r0() * c.flux_coefficient() + k.D1_star / H2 * c.J1_r0();
  double solid = (1.0 - k.D2_star * c.G2_inf() / H2) / c.Phi2_inf();
  return (melt - solid) / std::pow(r0, k.nu + 1.0);
}

inline double residual_Ec2(const KernelContext& c) { return W_of(c) - c.problem().k.M; }

inline double scale_Ec1(const KernelContext& c) { return std::max(c.problem().k.B, std::abs(Y_of(c))); }
inline double scale_Ec2(const KernelContext& c) { return std::max(c.problem().k.M, std::abs(W_of(c))); }

struct Evaluation {
  double s0 = 0, r0 = 0;
  double ec1 = 0, ec2 = 0;
  int iterations = 0;
  std::shared_ptr<const FixedPointResult> fp;
};

struct EvalLogEntry {
  double s0, r0, ec1, ec2;
  int iterations;
};

// Fixed-point solves at (s0, r0) with warm starts from the most recent converged profile.
class Evaluator {
 public:
  Evaluator(SimilarityProblem pb, FixedPointConfig cfg) : pb_(std::move(pb)), cfg_(cfg) {}

  Evaluation operator()(double s0, double r0) {
    ProfilePair start = warm_ ? rescale(*warm_, s0, r0) : initial_guess(pb_, s0, r0);
    FixedPointResult res;
    try {
      res = iterate(start, pb_, cfg_);
    } catch (const FixedPointFailure&) {
      if (!warm_) throw;
      res = iterate(initial_guess(pb_, s0, r0), pb_, cfg_);
    }
    Evaluation e;
    e.s0 = s0, e.r0 = r0;
    e.ec1 = residual_Ec1(*res.context);
    e.ec2 = residual_Ec2(*res.context);
    e.iterations = res.iterations;
    warm_ = res.profiles;
    e.fp = std::make_shared<FixedPointResult>(std::move(res));
    log_.push_back({s0, r0, e.ec1, e.ec2, e.iterations});
    return e;
  }

  const SimilarityProblem& problem() const { return pb_; }
  const FixedPointConfig& fixed_point_config() const { return cfg_; }
  const std::vector<EvalLogEntry>& log() const { return log_; }

 private:
  SimilarityProblem pb_;
  FixedPointConfig cfg_;
  std::optional<ProfilePair> warm_;
  std::vector<EvalLogEntry> log_;
};

inline double residual_Ec1(double s0, double r0, const SimilarityProblem& pb, const FixedPointConfig& cfg = {}) {
  return residual_Ec1(*iterate(initial_guess(pb, s0, r0), pb, cfg).context);
}

inline double residual_Ec2(double s0, double r0, const SimilarityProblem& pb, const FixedPointConfig& cfg = {}) {
  return residual_Ec2(*iterate(initial_guess(pb, s0, r0), pb, cfg).context);
}

// ---- generic scalar root search ----

struct ScalarRoot {
  double x = 0;
  int bisections = 0;
  double lo = 0, hi = 0;
};

// Smallest sign change of g on a geometric scan of [lo, hi], refined by bisection.
// g returns the residual; values at accepted points are kept by the caller.
inline ScalarRoot first_root(const std::function<double(double)>& g, double lo, double hi, int scan_points,
                             double rel_tol, int max_bisections, const std::string& what) {
  if (!(hi > lo) || !(lo > 0)) throw NoSignChange(what + ": empty bracket");
  double xa = lo, ga = g(lo);
  if (ga == 0) return {lo, 0, lo, lo};
  double xb = 0, gb = 0;
  bool found = false;
  for (int i = 1; i < scan_points; ++i) {
    double x = i == scan_points - 1 ? hi : lo * std::pow(hi / lo, double(i) / (scan_points - 1));
    double gx = g(x);
    if (gx == 0) return {x, 0, x, x};
    if ((gx < 0) != (ga < 0)) {
      xb = x, gb = gx, found = true;
      break;
    }
    xa = x, ga = gx;
  }
  if (!found)
    throw NoSignChange(what + ": residual keeps one sign on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  ScalarRoot r;
  while (xb - xa > rel_tol * xb && r.bisections < max_bisections) {
    double m = 0.5 * (xa + xb), gm = g(m);
    ++r.bisections;
    if (gm == 0) { xa = xb = m; break; }
    if ((gm < 0) == (ga < 0)) xa = m, ga = gm; else xb = m, gb = gm;
  }
  (void)gb;
  r.lo = xa, r.hi = xb, r.x = 0.5 * (xa + xb);
  return r;
}

// ---- inner and outer problems ----

struct InnerResult {
  double r0_star = 0;
  double bracket_lo = 0, bracket_hi = 0;
  int bisections = 0;
  Evaluation at_root;
  std::optional<ExistenceRegion> region;
  std::optional<double> ec1_at_r0_bar;
};

inline std::pair<double, double> inner_bracket(double s0, const FreeBoundaryConfig& cfg, const SimilarityProblem& pb,
                                               std::optional<ExistenceRegion>& region) {
  if (cfg.r0_policy == R0Policy::manual)
    return {std::max(cfg.r0_bracket.first, s0 * (1 + 1e-6)), cfg.r0_bracket.second};
  region = existence_region(s0, *cfg.bounds, pb.k, cfg.region);
  if (!region->r0_bar) throw NoSignChange("certificate bracket: r0_bar unavailable at s0 = " + std::to_string(s0));
  if (!region->r_B.root) throw NoSignChange("certificate bracket: r_B unavailable (" + region->r_B.status + ")");
  return {*region->r0_bar, *region->r_B.root};
}

inline InnerResult solve_inner_r0(double s0, Evaluator& ev, const FreeBoundaryConfig& cfg) {
  InnerResult out;
  auto [lo, hi] = inner_bracket(s0, cfg, ev.problem(), out.region);
  out.bracket_lo = lo, out.bracket_hi = hi;
  if (!(hi > lo))
    throw NoSignChange("inner bracket empty at s0 = " + std::to_string(s0));
  bool first = true;
  ScalarRoot root = first_root(
      [&](double r0) {
        double v = ev(s0, r0).ec1;
        if (first && cfg.r0_policy == R0Policy::certificate) out.ec1_at_r0_bar = v;
        first = false;
        return v;
      },
      lo, hi, cfg.scan_points, cfg.scalar_tol, cfg.max_bisections, "inner equation at s0 = " + std::to_string(s0));
  out.r0_star = root.x;
  out.bisections = root.bisections;
  out.at_root = ev(s0, root.x);
  const auto& c = *out.at_root.fp->context;
  if (!(std::abs(out.at_root.ec1) <= cfg.residual_tol * scale_Ec1(c)))
    throw ToleranceNotMet("inner equation: residual " + std::to_string(out.at_root.ec1) +
                          " not within tolerance at the converged bracket (jump in the residual?)");
  return out;
}

inline InnerResult solve_inner_r0(double s0, const SimilarityProblem& pb, const FreeBoundaryConfig& cfg) {
  check_config(cfg);
  Evaluator ev(pb, cfg.fixed_point);
  return solve_inner_r0(s0, ev, cfg);
}

struct SimilaritySolution {
  double s0_hat = 0, r0_star = 0;
  ProfilePair profiles;
  double residual_Ec1 = 0, residual_Ec2 = 0;
  double scale_Ec1 = 0, scale_Ec2 = 0;
  double W = 0, X = 0, Y = 0;
  int fixed_point_iterations = 0;
  double final_update_norm = 0;
  double empirical_ratio = std::numeric_limits<double>::quiet_NaN();
  std::string sign_configuration;  // "decreasing" (W-M > 0 at low s0) or "increasing"
  int outer_bisections = 0, inner_bisections = 0;
  std::vector<EvalLogEntry> log;
  std::optional<Certificate> certificate;
  std::shared_ptr<const KernelContext> context;
};

inline SimilaritySolution solve_outer_s0(const SimilarityProblem& pb, const FreeBoundaryConfig& cfg) {
  check_config(cfg);
  Evaluator ev(pb, cfg.fixed_point);
  std::optional<InnerResult> last;
  std::vector<std::pair<double, InnerResult>> ends;
  auto g = [&](double s0) {
    try {
      last = solve_inner_r0(s0, ev, cfg);
    } catch (const NoSignChange& e) {
      throw InnerFailure(e.what(), s0, InnerFailure::Cause::no_sign_change);
    } catch (const FixedPointFailure& e) {
      throw InnerFailure(e.what(), s0, InnerFailure::Cause::fixed_point);
    } catch (const solver_error& e) {
      throw InnerFailure(e.what(), s0, InnerFailure::Cause::other);
    }
    if (s0 == cfg.s0_bracket.first || s0 == cfg.s0_bracket.second) ends.emplace_back(s0, *last);
    return last->at_root.ec2;
  };
  auto [lo, hi] = cfg.s0_bracket;
  double g_lo_sign = 0;
  ScalarRoot root;
  {
    double first_val = std::numeric_limits<double>::quiet_NaN();
    bool first = true;
    root = first_root(
        [&](double s0) {
          double v = g(s0);
          if (first) first_val = v, first = false;
          return v;
        },
        lo, hi, cfg.scan_points, cfg.scalar_tol, cfg.max_bisections, "outer equation");
    g_lo_sign = first_val;
  }
  InnerResult fin = [&] {
    g(root.x);
    return *last;
  }();
  SimilaritySolution sol;
  const auto& fp = *fin.at_root.fp;
  const auto& c = *fp.context;
  sol.s0_hat = root.x;
  sol.r0_star = fin.r0_star;
  sol.profiles = fp.profiles;
  sol.residual_Ec1 = fin.at_root.ec1;
  sol.residual_Ec2 = fin.at_root.ec2;
  sol.scale_Ec1 = scale_Ec1(c);
  sol.scale_Ec2 = scale_Ec2(c);
  sol.W = W_of(c), sol.X = X_of(c), sol.Y = Y_of(c);
  sol.fixed_point_iterations = fp.iterations;
  sol.final_update_norm = fp.final_update_norm;
  sol.sign_configuration = g_lo_sign > 0 ? "decreasing" : "increasing";
  sol.outer_bisections = root.bisections;
  sol.inner_bisections = fin.bisections;
  sol.context = fp.context;
  if (!(std::abs(sol.residual_Ec2) <= cfg.residual_tol * sol.scale_Ec2))
    throw ToleranceNotMet("outer equation: residual " + std::to_string(sol.residual_Ec2) +
                          " not within tolerance at the converged bracket (jump in the residual?)");
  if (!(sol.s0_hat < sol.r0_star)) throw DomainError("solution violates s0 < r0");

  auto sampler = random_profile_sampler(pb, sol.s0_hat, sol.r0_star, 0.0, std::max(pb.k.B, 1e-3));
  if (cfg.fixed_point.ratio_probe_pairs > 0)
    sol.empirical_ratio = empirical_contraction_ratio(pb, cfg.fixed_point, sampler);

  if (cfg.bounds) {
    Certificate cert = certify(sol.s0_hat, sol.r0_star, *cfg.bounds, pb.k, cfg.region);
    const auto& reg = cert.region;
    if (reg.r0_bar && reg.r_B.root)
      cert.W = compute_W_bounds(sol.s0_hat, sol.r0_star, *reg.r0_bar, *reg.r_B.root, *cfg.bounds, pb.k);
    // hypothesis on W bounds at the outer bracket ends, which stand in for s2 and +infinity
    std::optional<WBounds> w_lo, w_hi;
    if (std::none_of(ends.begin(), ends.end(), [&](const auto& e) { return e.first == hi; })) {
      try {
        g(hi);
      } catch (const InnerFailure&) {
      }
    }
    for (const auto& [s, inner] : ends) {
      ExistenceRegion r = inner.region ? *inner.region : existence_region(s, *cfg.bounds, pb.k, cfg.region);
      if (!r.r0_bar || !r.r_B.root) continue;
      WBounds w = compute_W_bounds(s, inner.r0_star, *r.r0_bar, *r.r_B.root, *cfg.bounds, pb.k);
      (s == lo ? w_lo : w_hi) = w;
    }
    if (w_lo && w_hi) {
      double M = pb.k.M;
      cert.hyp_ec44_ok = (w_lo->W_inf > M && w_hi->W_sup < M) || (w_lo->W_sup < M && w_hi->W_inf > M);
    }
    if (fin.ec1_at_r0_bar) cert.hyp_X_lt_Y_ok = *fin.ec1_at_r0_bar < 0;
    sol.certificate = cert;
  }
  sol.log = ev.log();
  return sol;
}

}  // namespace contact_stefan
