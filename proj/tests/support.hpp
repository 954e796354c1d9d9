#pragma once

#include <cmath>
#include <string>

#include "contact_stefan/io.hpp"

namespace cs_test {

using namespace contact_stefan;

inline std::string scenario_path(const std::string& name) {
  return std::string(CONTACT_STEFAN_SCENARIO_DIR) + "/" + name;
}

// Frozen output of tests/oracles/classical.py (mpmath, 30 digits).
inline constexpr double kClassicalS0 = 0.32942086978956775813;
inline constexpr double kClassicalR0 = 0.45639037526318352122;

// Coefficients independent of f with nu = 1/2:
//   L = l eta^(3/2), N = n eta^(-3/2), K = k eta^(-3/2), D = 0.
// The exponent integrand is c / eta^2 with c = 2 a n / l, so every kernel has
// an elementary antiderivative.
struct ClosedFormFamily {
  double a = 1.0, nu = 0.5, Q = 2.0, U_c = 0.8, D1_star = 0.3, D2_star = 0.2;
  double n1 = 0.6, l1 = 1.2, k1 = 1.3;  // c1 = 1
  double n2 = 1.0, l2 = 0.5, k2 = 0.7;  // c2 = 4
  double s0 = 0.8, r0 = 1.7;

  double c1() const { return 2 * a * n1 / l1; }
  double c2() const { return 2 * a * n2 / l2; }

  SimilarityProblem problem(std::size_t n1_nodes = 64, std::size_t n2_nodes = 96) const {
    SimilarityProblem pb;
    pb.k.a = a;
    pb.k.nu = nu;
    pb.k.Q = Q;
    pb.k.B = 0.5;
    pb.k.M = 1.0;
    pb.k.U_c = U_c;
    pb.k.D1_star = D1_star;
    pb.k.D2_star = D2_star;
    auto set = [](PhaseFunctions& p, double n, double l, double k) {
      p.N = [n](double, double e) { return n * std::pow(e, -1.5); };
      p.L = [l](double, double e) { return l * std::pow(e, 1.5); };
      p.K = [k](double, double e) { return k * std::pow(e, -1.5); };
    };
    set(pb.phase1, n1, l1, k1);
    set(pb.phase2, n2, l2, k2);
    pb.cfg.n1 = n1_nodes;
    pb.cfg.n2 = n2_nodes;
    return pb;
  }

  // The coefficients ignore f, so any profile gives the same kernels.
  ProfilePair profiles(const SimilarityProblem& pb) const {
    return ProfilePair::sample(
        s0, r0, pb.cfg.n1, pb.cfg.n2, [&](double e) { return 0.3 * (r0 - e) / (r0 - s0); },
        [&](double e) { return std::isinf(e) ? -1.0 : -(1.0 - r0 / e); });
  }

  static double inv(double e) { return std::isinf(e) ? 0.0 : 1.0 / e; }

  // phase 1, eta in [s0, r0]
  double F1(double e) const { return k1 * (1 / s0 - inv(e)); }
  double E1(double e) const { return std::exp(-c1() * (1 / s0 - inv(e))); }
  double Phi1(double e) const { return (1 - E1(e)) / (l1 * c1()); }
  double H1(double e) const { return k1 / c1() * (1 / E1(e) - 1); }
  double G1(double e) const { return k1 / (c1() * l1) * ((1 / s0 - inv(e)) - (1 - E1(e)) / c1()); }

  // phase 2, eta in [r0, inf]
  double F2(double e) const { return k2 * (1 / r0 - inv(e)); }
  double E2(double e) const { return std::exp(-c2() * (1 / r0 - inv(e))); }
  double Phi2(double e) const { return (1 - E2(e)) / (l2 * c2()); }
  double H2(double e) const { return k2 / c2() * (1 / E2(e) - 1); }
  double G2(double e) const { return k2 / (c2() * l2) * ((1 / r0 - inv(e)) - (1 - E2(e)) / c2()); }

  double H() const { return F1(r0) + F2(INFINITY); }
  double flux() const { return std::pow(s0, nu) * Q * std::exp(-s0 * s0); }
  double V1(double e) const {
    return flux() * (Phi1(r0) - Phi1(e)) + D1_star / (H() * H()) * (G1(r0) - G1(e));
  }
  double V2(double e) const {
    if (std::isinf(e)) return -1.0;
    double d = D2_star / (H() * H());
    return (d * G2(INFINITY) - 1) * Phi2(e) / Phi2(INFINITY) - d * G2(e);
  }
  double potential(double e) const {
    if (e <= r0) return U_c * F1(e) / (2 * H());
    return U_c * (F1(r0) + F2(e)) / (2 * H());
  }
};

// Bounds for power_law_in_eta models with
//   c = c_scale eta^-mu (1 + bc f), gamma = 1, lambda = l_scale eta^mu, rho = r_scale eta^-mu (1 + br f)
// valid for eta >= 1 and f in [-1, fmax], with reference values c0 gamma0 and lambda0.
struct PowerLawPhase {
  double c_scale, bc, l_scale, r_scale, br;
};

inline AssumptionBounds power_law_bounds(const PowerLawPhase& p1, const PowerLawPhase& p2, double mu, double c0g0,
                                         double lambda0, double fmax) {
  auto lo = [&](double s, double b) { return s * std::min(1 - b, 1 + b * fmax); };
  auto hi = [&](double s, double b) { return s * std::max(1 - b, 1 + b * fmax); };
  AssumptionBounds b;
  b.mu = mu;
  b.L1m = b.L1M = p1.l_scale / lambda0;
  b.L2m = b.L2M = p2.l_scale / lambda0;
  b.N1m = lo(p1.c_scale / c0g0, p1.bc), b.N1M = hi(p1.c_scale / c0g0, p1.bc);
  b.N2m = lo(p2.c_scale / c0g0, p2.bc), b.N2M = hi(p2.c_scale / c0g0, p2.bc);
  b.K1m = lo(p1.r_scale, p1.br), b.K1M = hi(p1.r_scale, p1.br);
  b.K2m = lo(p2.r_scale, p2.br), b.K2M = hi(p2.r_scale, p2.br);
  b.L1t = b.L2t = 0;
  b.N1t = p1.c_scale / c0g0 * std::abs(p1.bc), b.N2t = p2.c_scale / c0g0 * std::abs(p2.bc);
  b.K1t = p1.r_scale * std::abs(p1.br), b.K2t = p2.r_scale * std::abs(p2.br);
  return b;
}

inline CoefficientModel power_law_model(const PowerLawPhase& p, double mu) {
  CoefficientModel m;
  m.c = {Family::power_law_in_eta, {p.c_scale, mu, p.bc}};
  m.gamma = {Family::constant, {1.0}};
  m.lambda = {Family::power_law_in_eta, {p.l_scale, mu}};
  m.rho = {Family::power_law_in_eta, {p.r_scale, mu, p.br}};
  return m;
}

// Power-law scenario with a stronger temperature dependence than the shipped one.
inline ScenarioFile strong_power_law() {
  ScenarioFile f = load_scenario(scenario_path("powerlaw.yaml"));
  PowerLawPhase p1{2.5e-4, 0.2, 5e-4, 1.0, 0.3}, p2{2.5e-4, 0.2, 2.5e-5, 1.0, 0.3};
  f.scenario.coeff_model_1 = power_law_model(p1, 3);
  f.scenario.coeff_model_2 = power_law_model(p2, 3);
  f.bounds = power_law_bounds(p1, p2, 3, f.scenario.c0 * f.scenario.gamma0, f.scenario.lambda0, 0.7);
  f.solver.bounds = f.bounds;
  return f;
}

// Scenario whose scalar equations have a root at exactly (s0, r0): B and M
// are set from the fixed point there, then mapped back to T_b and l_m.
struct Planted {
  ScenarioFile file;
  double s0, r0;
};

inline Planted plant(double s0, double r0) {
  ScenarioFile f = load_scenario(scenario_path("powerlaw.yaml"));
  SimilarityProblem pb = make_problem(f);
  FixedPointConfig fc;
  fc.tol = 1e-14;
  fc.max_iter = 500;
  FixedPointResult fp = iterate(initial_guess(pb, s0, r0), pb, fc);
  const KernelContext& c = *fp.context;
  double B = c.flux_coefficient() * c.Phi1_r0() + pb.k.D1_star / (c.H() * c.H()) * c.G1_r0();
  double M = W_of(c);
  auto& s = f.scenario;
  s.T_b = s.T_m * (1 + B);
  s.l_m = M * s.lambda0 * s.T_m / (2 * s.gamma_m * pb.k.a * pb.k.a);
  f.bounds.reset();
  f.solver.bounds.reset();
  f.solver.r0_policy = R0Policy::manual;
  f.solver.fixed_point.tol = 1e-13;
  f.solver.scalar_tol = 1e-13;
  return {f, s0, r0};
}

}  // namespace cs_test
