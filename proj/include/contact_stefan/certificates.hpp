#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "scenario.hpp"

namespace contact_stefan {

// Power-law envelope and Lipschitz constants of the dimensionless coefficients:
//   Lim eta^mu <= L <= LiM eta^mu,  Nim eta^-mu <= N <= NiM eta^-mu,  Kim eta^-mu <= K <= KiM eta^-mu
//   |dL| <= Lit |df|,  |dN| <= Nit |df|,  |dK| <= Kit eta^-mu |df|
struct AssumptionBounds {
  double mu = 3;
  double L1m = 1, L1M = 1, N1m = 1, N1M = 1, K1m = 1, K1M = 1;
  double L2m = 1, L2M = 1, N2m = 1, N2M = 1, K2m = 1, K2M = 1;
  double L1t = 0, N1t = 0, K1t = 0, L2t = 0, N2t = 0, K2t = 0;
};

inline void validate(const AssumptionBounds& b) {
  const double v[] = {b.L1m, b.L1M, b.N1m, b.N1M, b.K1m, b.K1M, b.L2m, b.L2M, b.N2m, b.N2M, b.K2m, b.K2M};
  for (double x : v)
    if (!(x > 0) || !std::isfinite(x)) throw NonPositiveParameter("assumption bounds must be positive");
  const double t[] = {b.L1t, b.N1t, b.K1t, b.L2t, b.N2t, b.K2t};
  for (double x : t)
    if (!(x >= 0) || !std::isfinite(x))
      throw NonPositiveParameter("Lipschitz constants must be non-negative");
  if (b.L1m > b.L1M || b.N1m > b.N1M || b.K1m > b.K1M || b.L2m > b.L2M || b.N2m > b.N2M || b.K2m > b.K2M)
    throw NonPositiveParameter("assumption bounds: lower bound exceeds upper bound");
  if (!(b.mu > 2)) throw NonPositiveParameter("assumption bounds: mu must exceed 2");
}

namespace detail {
// x^-p with the limit 0 at x = +inf.
inline double ipow(double x, double p) { return std::isinf(x) ? 0.0 : std::pow(x, -p); }
}  // namespace detail

struct HBounds {
  double H_inf = 0, H_sup = 0, H_tilde = 0;
};

inline HBounds compute_H_bounds(double s0, double r0, const AssumptionBounds& b, double nu) {
  using detail::ipow;
  double k = b.mu + nu - 1;
  HBounds h;
  h.H_inf = b.K1m / k * (ipow(s0, k) - ipow(r0, k));
  h.H_sup = (b.K1M * ipow(s0, k) + b.K2M * ipow(r0, k)) / k;
  h.H_tilde = (b.K1t * ipow(s0, k) + b.K2t * ipow(r0, k)) / k;
  return h;
}

struct Phase1Bounds {
  double E1_inf = 0, E1_tilde = 0, Phi1_tilde = 0;
  double H1_sup = 0, H1_tilde = 0, G1_sup = 0, G1_tilde = 0;
  // eta-dependent lower bounds
  double s0 = 0, kappa = 0, K1m = 0, L1M = 0;
  double H1_inf(double eta) const { return K1m / kappa * (std::pow(s0, -kappa) - detail::ipow(eta, kappa)); }
  double G1_inf(double eta) const {
    double w = std::pow(s0, -kappa) - detail::ipow(eta, kappa);
    return K1m * E1_inf / (2 * L1M * kappa * kappa) * w * w;
  }
};

inline Phase1Bounds compute_phase1_bounds(double s0, double r0, const AssumptionBounds& b,
                                          const DimensionlessConstants& c) {
  const double mu = b.mu, nu = c.nu, k = mu + nu - 1, q = 2 * mu + nu - 1, a = c.a;
  HBounds h = compute_H_bounds(s0, r0, b, nu);
  Phase1Bounds p;
  p.s0 = s0, p.kappa = k, p.K1m = b.K1m, p.L1M = b.L1M;
  p.E1_inf = std::exp(-(a * b.N1M / (b.L1m * (mu - 1)) * std::pow(s0, -(2 * mu - 2)) +
                        c.D1 * b.K1M / (h.H_inf * b.L1m * q) * std::pow(s0, -q)));
  p.E1_tilde = 2 * a *
                   (b.N1t / (b.L1m * (mu - 2)) * std::pow(s0, -(mu - 2)) +
                    b.N1M * b.L1t / (b.L1m * b.L1m * (3 * mu - 2)) * std::pow(s0, -(3 * mu - 2))) +
               c.D1 * (b.K1t / (h.H_inf * b.L1m * q) * std::pow(s0, -q) +
                       b.K1M / (h.H_inf * b.L1m) *
                           (h.H_tilde / (h.H_inf * q) * std::pow(s0, -q) +
                            b.L1t / (b.L1m * (3 * mu + nu - 1)) * std::pow(s0, -(3 * mu + nu - 1))));
  p.Phi1_tilde = p.E1_tilde / (b.L1m * k) * std::pow(s0, -k) +
                 b.L1t / (b.L1m * b.L1m * q) * std::pow(s0, -q);
  p.H1_sup = b.K1M / p.E1_inf / k * std::pow(s0, -k);
  p.H1_tilde = (b.K1t + b.K1M * p.E1_tilde / p.E1_inf) / (p.E1_inf * k) * std::pow(s0, -k);
  p.G1_sup = p.H1_sup / b.L1m / k * std::pow(s0, -k);
  p.G1_tilde = p.H1_sup * p.Phi1_tilde + p.H1_tilde / b.L1m / k * std::pow(s0, -k);
  return p;
}

struct Phase2Bounds {
  double E2_inf = 0, E2_tilde = 0, Phi2_sup = 0, Phi2_tilde = 0;
  double H2_sup = 0, H2_tilde = 0, G2_sup = 0, G2_tilde = 0;
  double r0 = 0, kappa = 0, K2m = 0, L2M = 0;
  double Phi2_inf(double eta) const {
    return E2_inf / L2M / kappa * (std::pow(r0, -kappa) - detail::ipow(eta, kappa));
  }
  double H2_inf(double eta) const { return K2m / kappa * (std::pow(r0, -kappa) - detail::ipow(eta, kappa)); }
  double G2_inf(double eta) const {
    double w = std::pow(r0, -kappa) - detail::ipow(eta, kappa);
    return K2m * E2_inf / (2 * L2M * kappa * kappa) * w * w;
  }
};

inline Phase2Bounds compute_phase2_bounds(double s0, double r0, const AssumptionBounds& b,
                                          const DimensionlessConstants& c) {
  const double mu = b.mu, nu = c.nu, k = mu + nu - 1, q = 2 * mu + nu - 1, a = c.a;
  HBounds h = compute_H_bounds(s0, r0, b, nu);
  Phase2Bounds p;
  p.r0 = r0, p.kappa = k, p.K2m = b.K2m, p.L2M = b.L2M;
  p.E2_inf = std::exp(-(a * b.N2M / (b.L2m * (mu - 1)) * std::pow(r0, -(2 * mu - 2)) +
                        c.D2 * b.K2M / (h.H_inf * b.L2m * q) * std::pow(r0, -q)));
  p.E2_tilde = 2 * a *
                   (b.N2t / (b.L2m * (mu - 2)) * std::pow(r0, -(mu - 2)) +
                    b.N2M * b.L2t / (b.L2m * b.L2m * (3 * mu - 2)) * std::pow(r0, -(3 * mu - 2))) +
               c.D2 * (b.K2t / (h.H_inf * b.L2m * q) * std::pow(r0, -q) +
                       b.K2M / (h.H_inf * b.L2m) *
                           (h.H_tilde / (h.H_inf * q) * std::pow(r0, -q) +
                            b.L2t / (b.L2m * (3 * mu + nu - 1)) * std::pow(r0, -(3 * mu + nu - 1))));
  p.Phi2_sup = 1.0 / b.L2m / k * std::pow(r0, -k);
  p.Phi2_tilde = p.E2_tilde / b.L2m / k * std::pow(r0, -k) +
                 b.L2t / (b.L2m * b.L2m) / q * std::pow(r0, -q);
  p.H2_sup = b.K2M / p.E2_inf / k * std::pow(r0, -k);
  p.H2_tilde = (b.K2t + b.K2M * p.E2_tilde / p.E2_inf) / (p.E2_inf * k) * std::pow(r0, -k);
  p.G2_sup = p.H2_sup / b.L2m / k * std::pow(r0, -k);
  p.G2_tilde = p.H2_sup * p.Phi2_tilde + p.H2_tilde / b.L2m / k * std::pow(r0, -k);
  return p;
}

struct Epsilons {
  double eps1 = 0, eps21 = 0, eps22 = 0, eps23 = 0, eps2 = 0, eps = 0;
};

inline double compute_eps1(double s0, double r0, const AssumptionBounds& b, const DimensionlessConstants& c) {
  HBounds h = compute_H_bounds(s0, r0, b, c.nu);
  Phase1Bounds p = compute_phase1_bounds(s0, r0, b, c);
  double H2 = h.H_inf * h.H_inf;
  return 2 * std::pow(s0, c.nu) * c.Q * std::exp(-s0 * s0) * p.Phi1_tilde +
         2 * c.D1_star * (p.G1_sup * 2 * h.H_sup * h.H_tilde / (H2 * H2) + p.G1_tilde / H2);
}

inline Epsilons compute_epsilons(double s0, double r0, const AssumptionBounds& b,
                                 const DimensionlessConstants& c) {
  Epsilons e;
  e.eps1 = compute_eps1(s0, r0, b, c);
  HBounds h = compute_H_bounds(s0, r0, b, c.nu);
  Phase2Bounds p = compute_phase2_bounds(s0, r0, b, c);
  double H2 = h.H_inf * h.H_inf, Phi_inf = p.Phi2_inf(kInf);
  e.eps21 = 2 * p.Phi2_tilde / Phi_inf;
  e.eps22 = p.G2_tilde / H2 + 2 * p.G2_sup * h.H_sup * h.H_tilde / (H2 * H2);
  e.eps23 = p.Phi2_sup / Phi_inf * e.eps22 + p.G2_sup / H2 * e.eps21;
  e.eps2 = e.eps21 + e.eps22 + e.eps23;
  e.eps = std::max(e.eps1, e.eps2);
  return e;
}

// Limit of eps1 as r0 -> infinity.
inline double j1(double s0, const AssumptionBounds& b, const DimensionlessConstants& c) {
  return compute_eps1(s0, kInf, b, c);
}

inline double Z_inf(double r0, double s0, const AssumptionBounds& b, const DimensionlessConstants& c) {
  double k = b.mu + c.nu - 1;
  Phase1Bounds p = compute_phase1_bounds(s0, r0, b, c);
  double w;
  if (std::isinf(r0)) {
    w = 1.0 / b.K1M;
  } else {
    double rk = std::pow(r0, k), sk = std::pow(s0, k);
    w = (rk - sk) / (b.K1M * rk + b.K2M * sk);
  }
  return c.D1_star * p.E1_inf * b.K1m / (2 * b.L1M) * w * w;
}

// Limit of Z_inf as r0 -> infinity.
inline double j2(double s0, const AssumptionBounds& b, const DimensionlessConstants& c) {
  return Z_inf(kInf, s0, b, c);
}

inline double hyp_eps1_lhs_printed(const AssumptionBounds& b, const DimensionlessConstants& c) {
  return 2 * c.D1_star * b.K1t / (b.L1m * b.K1m * b.K1m) * (2 * b.K1M / (b.K1m * b.K1m) + 1);
}

// Exact large-s0 limit of j1.
inline double hyp_eps1_lhs_limit(const AssumptionBounds& b, const DimensionlessConstants& c) {
  return 2 * c.D1_star * b.K1t / (b.L1m * b.K1m * b.K1m) * (2 * b.K1M * b.K1M / (b.K1m * b.K1m) + 1);
}

inline double hyp_Zinfty_lhs(const AssumptionBounds& b, const DimensionlessConstants& c) {
  return c.D1_star * b.K1m / (2 * b.L1M * b.K1M * b.K1M);
}

struct RootSearch {
  std::optional<double> root;
  bool monotone = true;
  std::string status = "ok";
};

// Crossing of g(x) = target for x on [lo, hi] using a log grid and bisection.
// `decreasing` states the expected direction, checked on the grid.
inline RootSearch log_grid_root(const std::function<double(double)>& g, double target, double lo,
                                double hi, bool decreasing, int points = 256, double rel_tol = 1e-10) {
  RootSearch out;
  std::vector<double> xs(points), gs(points);
  for (int i = 0; i < points; ++i) {
    xs[i] = lo * std::pow(hi / lo, double(i) / (points - 1));
    gs[i] = g(xs[i]);
  }
  for (int i = 1; i < points; ++i) {
    if (std::isnan(gs[i]) || std::isnan(gs[i - 1])) continue;
    if (decreasing ? gs[i] > gs[i - 1] * (1 + 1e-12) + 1e-300 : gs[i] < gs[i - 1] * (1 - 1e-12) - 1e-300)
      out.monotone = false;
  }
  int found = -1;
  for (int i = 1; i < points; ++i) {
    double a = gs[i - 1] - target, bb = gs[i] - target;
    if (a == 0) { out.root = xs[i - 1]; return out; }
    if ((a < 0) != (bb < 0) && !std::isnan(a) && !std::isnan(bb)) { found = i; break; }
  }
  if (found < 0) {
    if (std::abs(gs.back() - target) == 0) { out.root = xs.back(); return out; }
    out.status = "root not bracketed on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    return out;
  }
  double a = xs[found - 1], bnd = xs[found], ga = gs[found - 1] - target;
  while (bnd - a > rel_tol * bnd) {
    double m = 0.5 * (a + bnd), gm = g(m) - target;
    if ((gm < 0) == (ga < 0)) a = m, ga = gm; else bnd = m;
  }
  out.root = 0.5 * (a + bnd);
  return out;
}

struct ExistenceRegion {
  RootSearch s1, r1, r2, s2, r_B;
  std::optional<double> r0_bar;
  double j1 = 0, j2 = 0;
  double hyp_eps1_printed = 0, hyp_eps1_limit = 0, hyp_Zinfty = 0;
  bool hyp_eps1_ok = false, hyp_eps1_limit_ok = false, hyp_Zinfty_ok = false;
  bool eps_monotone = true;
  bool B_degenerate = false;
};

struct RegionSearchConfig {
  double s_lo = 1e-6, s_hi = 1e3;   // search range for s1, s2
  double r_factor_hi = 1e6;         // r searches on [s0 (1 + 1e-6), r_factor_hi * s0]
  int grid_points = 256;
  double rel_tol = 1e-10;
};

inline RootSearch find_s1(const AssumptionBounds& b, const DimensionlessConstants& c,
                          const RegionSearchConfig& rc = {}) {
  return log_grid_root([&](double s) { return j1(s, b, c); }, 1.0, rc.s_lo, rc.s_hi, true,
                       rc.grid_points, rc.rel_tol);
}

inline ExistenceRegion existence_region(double s0, const AssumptionBounds& b, const DimensionlessConstants& c,
                                        const RegionSearchConfig& rc = {}) {
  validate(b);
  ExistenceRegion out;
  out.j1 = j1(s0, b, c);
  out.j2 = j2(s0, b, c);
  out.hyp_eps1_printed = hyp_eps1_lhs_printed(b, c);
  out.hyp_eps1_limit = hyp_eps1_lhs_limit(b, c);
  out.hyp_Zinfty = hyp_Zinfty_lhs(b, c);
  out.hyp_eps1_ok = out.hyp_eps1_printed < 1;
  out.hyp_eps1_limit_ok = out.hyp_eps1_limit < 1;
  out.hyp_Zinfty_ok = out.hyp_Zinfty > c.B;
  out.B_degenerate = c.B == 0;

  out.s1 = find_s1(b, c, rc);
  if (out.s1.root) {
    double s1 = *out.s1.root;
    if (j2(s1, b, c) >= c.B) {
      out.s2.root = s1;
    } else {
      out.s2 = log_grid_root([&](double s) { return j2(s, b, c); }, c.B, s1, std::max(rc.s_hi, 10 * s1),
                             false, rc.grid_points, rc.rel_tol);
    }
  } else {
    out.s2.status = "s1 unavailable";
  }

  double lo = s0 * (1 + 1e-6), hi = rc.r_factor_hi * s0;
  out.r1 = log_grid_root([&](double r) { return compute_eps1(s0, r, b, c); }, 1.0, lo, hi, true,
                         rc.grid_points, rc.rel_tol);
  out.r2 = log_grid_root([&](double r) { return compute_epsilons(s0, r, b, c).eps2; }, 1.0, lo, hi, true,
                         rc.grid_points, rc.rel_tol);
  out.eps_monotone = out.r1.monotone && out.r2.monotone;
  if (out.r1.root && out.r2.root) {
    out.r0_bar = std::max(*out.r1.root, *out.r2.root);
    if (out.B_degenerate) {
      out.r_B.root = *out.r0_bar;
      out.r_B.status = "degenerate: B = 0";
    } else {
      out.r_B = log_grid_root([&](double r) { return Z_inf(r, s0, b, c); }, c.B, *out.r0_bar, hi, false,
                              rc.grid_points, rc.rel_tol);
    }
  } else {
    out.r_B.status = "r0_bar unavailable";
  }
  return out;
}

inline bool sigma_membership(double s0, double r0, const AssumptionBounds& b, const DimensionlessConstants& c,
                             const RegionSearchConfig& rc = {}) {
  RootSearch s1 = find_s1(b, c, rc);
  if (!s1.root || !(s0 > *s1.root)) return false;
  ExistenceRegion reg = existence_region(s0, b, c, rc);
  if (!reg.r0_bar || !(r0 > *reg.r0_bar)) return false;
  if (!(compute_epsilons(s0, r0, b, c).eps < 1))
    throw std::logic_error("sigma_membership: point in Sigma with eps >= 1");
  return true;
}

struct WBounds {
  double W_inf = 0, W_sup = 0;
};

// Lower and upper bounds of W at s0 given the inner root r0*, r0_bar(s0) and r_B(s0).
inline WBounds compute_W_bounds(double s0, double r0_star, double r0_bar, double r_B, const AssumptionBounds& b,
                                const DimensionlessConstants& c) {
  double nu = c.nu;
  HBounds h = compute_H_bounds(s0, r0_star, b, nu);
  Phase1Bounds p1 = compute_phase1_bounds(s0, r0_star, b, c);
  Phase2Bounds p2 = compute_phase2_bounds(s0, r0_star, b, c);
  double flux = c.Q * std::exp(-s0 * s0) * std::pow(s0, nu);
  double rB = std::pow(r_B, nu + 1), rbar = std::pow(r0_bar, nu + 1);
  double Phi2inf = p2.Phi2_inf(kInf);
  WBounds w;
  w.W_inf = p1.E1_inf / rB * (flux + c.D1_star / (h.H_sup * h.H_sup) * p1.H1_inf(r0_star)) -
            1.0 / (rbar * Phi2inf) +
            1.0 / (rB * p2.Phi2_sup) * c.D2_star / (h.H_sup * h.H_sup) * p2.G2_inf(kInf);
  w.W_sup = 1.0 / rbar *
            (flux + c.D1_star / (h.H_inf * h.H_inf) * p1.H1_sup +
             1.0 / Phi2inf * c.D2_star / (h.H_inf * h.H_inf) * p2.G2_sup);
  return w;
}

struct Certificate {
  double s0 = 0, r0 = 0;
  HBounds H;
  Phase1Bounds phase1;
  Phase2Bounds phase2;
  Epsilons eps;
  ExistenceRegion region;
  std::optional<WBounds> W;
  bool in_Sigma = false;
  std::string sigma_reason;
  std::optional<bool> hyp_ec44_ok;
  std::optional<bool> hyp_X_lt_Y_ok;  // residual of the first scalar equation negative at r0_bar
  bool D2_star_le_1 = true;
};

inline Certificate certify(double s0, double r0, const AssumptionBounds& b, const DimensionlessConstants& c,
                           const RegionSearchConfig& rc = {}) {
  validate(b);
  if (!(s0 > 0) || !(r0 > s0)) throw DomainError("certificate requires 0 < s0 < r0");
  Certificate cert;
  cert.s0 = s0, cert.r0 = r0;
  cert.H = compute_H_bounds(s0, r0, b, c.nu);
  cert.phase1 = compute_phase1_bounds(s0, r0, b, c);
  cert.phase2 = compute_phase2_bounds(s0, r0, b, c);
  cert.eps = compute_epsilons(s0, r0, b, c);
  cert.region = existence_region(s0, b, c, rc);
  cert.D2_star_le_1 = c.D2_star <= 1;
  const auto& reg = cert.region;
  if (!reg.s1.root) {
    cert.sigma_reason = "s1 not found";
  } else if (!(s0 > *reg.s1.root)) {
    cert.sigma_reason = "s0<=s1";
  } else if (!reg.r0_bar) {
    cert.sigma_reason = "r0_bar not found";
  } else if (!(r0 > *reg.r0_bar)) {
    cert.sigma_reason = "r0<=r0_bar";
  } else {
    cert.in_Sigma = true;
    cert.sigma_reason = "ok";
  }
  return cert;
}

// ---- empirical check of the envelope and Lipschitz assumptions ----

struct AssumptionCheck {
  std::string name;
  bool pass = true;
  double worst_eta = 0;
  double margin = std::numeric_limits<double>::infinity();  // min slack relative to the bound
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
};

struct AssumptionProbe {
  std::vector<ProfilePair> profiles;  // all on the same (s0, r0)
  int f_grid = 41;                    // pointwise Lipschitz scan resolution
  double u_min = 1e-6;                // phase-2 samples stop at eta = r0 / u_min
};

inline AssumptionReport verify_assumptions(const DimensionlessCoefficients& fn, const AssumptionBounds& b,
                                           const AssumptionProbe& probe) {
  AssumptionReport rep;
  if (probe.profiles.empty()) return rep;
  const double mu = b.mu, s0 = probe.profiles[0].s0, r0 = probe.profiles[0].r0;
  struct Env {
    const char* name;
    int phase;
    const CoefficientFunction* f;
    double sign, lo, hi, lip;
    bool weighted;
  };
  const Env envs[] = {
      {"L1", 1, &fn.phase1.L, 1, b.L1m, b.L1M, b.L1t, false},
      {"N1", 1, &fn.phase1.N, -1, b.N1m, b.N1M, b.N1t, false},
      {"K1", 1, &fn.phase1.K, -1, b.K1m, b.K1M, b.K1t, true},
      {"L2", 2, &fn.phase2.L, 1, b.L2m, b.L2M, b.L2t, false},
      {"N2", 2, &fn.phase2.N, -1, b.N2m, b.N2M, b.N2t, false},
      {"K2", 2, &fn.phase2.K, -1, b.K2m, b.K2M, b.K2t, true},
  };
  // sample points: phase nodes plus panel midpoints
  std::vector<double> eta1, u2;
  {
    auto x = phase1_nodes(s0, r0, probe.profiles[0].f1.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      eta1.push_back(x[i]);
      if (i + 1 < x.size()) eta1.push_back(0.5 * (x[i] + x[i + 1]));
    }
    auto u = phase2_nodes(probe.profiles[0].f2.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] >= probe.u_min) u2.push_back(u[i]);
      if (i + 1 < u.size() && 0.5 * (u[i] + u[i + 1]) >= probe.u_min) u2.push_back(0.5 * (u[i] + u[i + 1]));
    }
    u2.push_back(probe.u_min);
  }
  std::vector<ChebyshevInterpolant> g1, g2;
  double f1lo = kInf, f1hi = -kInf, f2lo = kInf, f2hi = -kInf;
  for (const auto& p : probe.profiles) {
    g1.emplace_back(phase1_nodes(s0, r0, p.f1.size()), p.f1);
    g2.emplace_back(phase2_nodes(p.f2.size()), p.f2);
    for (double v : p.f1) f1lo = std::min(f1lo, v), f1hi = std::max(f1hi, v);
    for (double v : p.f2) f2lo = std::min(f2lo, v), f2hi = std::max(f2hi, v);
  }
  for (const Env& e : envs) {
    AssumptionCheck env{std::string(e.name) + " envelope"}, lip{std::string(e.name) + " Lipschitz"};
    const auto& etas = e.phase == 1 ? eta1 : u2;
    double flo = e.phase == 1 ? f1lo : f2lo, fhi = e.phase == 1 ? f1hi : f2hi;
    for (double x : etas) {
      double eta = e.phase == 1 ? x : r0 / x;
      double w = std::pow(eta, e.sign * mu);
      for (std::size_t k = 0; k < probe.profiles.size(); ++k) {
        // midpoint interpolation can overshoot the nodal range
        double f = std::clamp(e.phase == 1 ? g1[k](x) : g2[k](x), flo, fhi);
        double v = (*e.f)(f, eta) / w;
        double slack = std::min(v - e.lo, e.hi - v) / e.hi;
        if (slack < env.margin) env.margin = slack, env.worst_eta = eta;
      }
      // pointwise difference quotients over the sampled value range
      double kw = e.weighted ? std::pow(eta, mu) : 1.0;
      double qmax = 0;
      for (int i = 0; i + 1 < probe.f_grid; ++i) {
        double fa = flo + (fhi - flo) * i / (probe.f_grid - 1);
        double fb = flo + (fhi - flo) * (i + 1) / (probe.f_grid - 1);
        if (fb == fa) continue;
        qmax = std::max(qmax, std::abs((*e.f)(fb, eta) - (*e.f)(fa, eta)) * kw / (fb - fa));
      }
      if (fhi > flo)
        qmax = std::max(qmax, std::abs((*e.f)(fhi, eta) - (*e.f)(flo, eta)) * kw / (fhi - flo));
      double lslack = e.lip > 0 ? (e.lip - qmax) / e.lip : (qmax == 0 ? 0.0 : -kInf);
      if (lslack < lip.margin) lip.margin = lslack, lip.worst_eta = eta;
    }
    env.pass = env.margin >= -1e-12;
    lip.pass = lip.margin >= -1e-9;
    rep.checks.push_back(env);
    rep.checks.push_back(lip);
  }
  return rep;
}

}  // namespace contact_stefan
