#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace contact_stefan {

enum class Family { constant, linear_in_f, power_law_in_eta };
enum class Role { c, gamma, lambda, rho };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::constant: return "constant";
    case Family::linear_in_f: return "linear_in_f";
    case Family::power_law_in_eta: return "power_law_in_eta";
  }
  return "?";
}

inline const char* role_name(Role r) {
  switch (r) {
    case Role::c: return "c";
    case Role::gamma: return "gamma";
    case Role::lambda: return "lambda";
    case Role::rho: return "rho";
  }
  return "?";
}

// Parameter layouts:
//   constant          [value]
//   linear_in_f       [value_at_T_m, beta]              value*(1 + beta*f)
//   power_law_in_eta  [scale, mu] or [scale, mu, beta]  scale*eta^(+-mu)*(1 + beta*f)
// with f = T/T_m - 1. The eta exponent is +mu for lambda and -mu for c, gamma, rho.
struct RoleModel {
  Family family = Family::constant;
  std::vector<double> parameters{1.0};
};

struct CoefficientModel {
  RoleModel c, gamma, lambda, rho;

  const RoleModel& operator[](Role r) const {
    switch (r) {
      case Role::c: return c;
      case Role::gamma: return gamma;
      case Role::lambda: return lambda;
      case Role::rho: return rho;
    }
    return c;
  }
  RoleModel& operator[](Role r) {
    return const_cast<RoleModel&>(static_cast<const CoefficientModel&>(*this)[r]);
  }
};

struct PhysicalScenario {
  double T_ion = 0, T_b = 0, T_m = 0;
  double Q0 = 0;
  double U_c = 0;
  double l_m = 0, gamma_m = 0;
  double lambda0 = 0, rho0 = 0, c0 = 0, gamma0 = 0;
  double nu = 0;
  double sigma1 = 0, sigma2 = 0;
  CoefficientModel coeff_model_1, coeff_model_2;
};

struct DimensionlessConstants {
  double a = 1;
  double B = 0, Q = 0, M = 0;
  double D1 = 0, D2 = 0, D1_star = 0, D2_star = 0;
  double nu = 0.5;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double U_c = 0;
};

constexpr Role kRoles[] = {Role::c, Role::gamma, Role::lambda, Role::rho};

inline double eta_sign(Role r) { return r == Role::lambda ? 1.0 : -1.0; }

inline double model_factor_in_f(const RoleModel& m, double f) {
  switch (m.family) {
    case Family::constant: return m.parameters[0];
    case Family::linear_in_f: return m.parameters[0] * (1.0 + m.parameters[1] * f);
    case Family::power_law_in_eta: {
      double beta = m.parameters.size() > 2 ? m.parameters[2] : 0.0;
      return m.parameters[0] * (1.0 + beta * f);
    }
  }
  return 0;
}

inline double model_value(const RoleModel& m, Role r, double f, double eta) {
  double v = model_factor_in_f(m, f);
  if (m.family == Family::power_law_in_eta) v *= std::pow(eta, eta_sign(r) * m.parameters[1]);
  return v;
}

inline void validate_role_model(const RoleModel& m, Role r, int phase, double f_lo, double f_hi) {
  std::string where = "coeff_model_" + std::to_string(phase) + "." + role_name(r);
  std::size_t want_min = 1, want_max = 1;
  if (m.family == Family::linear_in_f) want_min = want_max = 2;
  if (m.family == Family::power_law_in_eta) want_min = 2, want_max = 3;
  if (m.parameters.size() < want_min || m.parameters.size() > want_max)
    throw NonPositiveParameter(where + ": family " + family_name(m.family) + " expects " +
                               std::to_string(want_min) +
                               (want_max != want_min ? "-" + std::to_string(want_max) : "") +
                               " parameters");
  for (double p : m.parameters)
    if (!std::isfinite(p)) throw NonPositiveParameter(where + ": non-finite parameter");
  if (m.parameters[0] <= 0) throw NonPositiveParameter(where + ": leading coefficient must be > 0");
  if (m.family == Family::power_law_in_eta && !(m.parameters[1] > 2.0))
    throw NonPositiveParameter(where + ": power_law_in_eta exponent mu must exceed 2");
  // factor is affine in f, so positivity at both ends covers the whole range
  if (model_factor_in_f(m, f_lo) <= 0 || model_factor_in_f(m, f_hi) <= 0)
    throw NonPositiveParameter(where + ": not positive on [0, T_ion]");
}

inline void validate(const PhysicalScenario& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw NonPositiveParameter(std::string(name) + " must be > 0");
  };
  positive(s.T_m, "T_m");
  positive(s.Q0, "Q0");
  positive(s.lambda0, "lambda0");
  positive(s.rho0, "rho0");
  positive(s.c0, "c0");
  positive(s.gamma0, "gamma0");
  positive(s.l_m, "l_m");
  positive(s.gamma_m, "gamma_m");
  if (!(s.T_b > s.T_m)) throw NonPositiveParameter("T_b must exceed T_m");
  if (!(s.T_ion > s.T_b)) throw NonPositiveParameter("T_ion must exceed T_b");
  if (!(s.nu > 0 && s.nu < 1)) throw NonPositiveParameter("nu must lie in (0, 1)");
  if (!std::isfinite(s.U_c) || !std::isfinite(s.sigma1) || !std::isfinite(s.sigma2))
    throw NonPositiveParameter("U_c, sigma1, sigma2 must be finite");
  double f_lo = -1.0, f_hi = s.T_ion / s.T_m - 1.0;
  for (Role r : kRoles) {
    validate_role_model(s.coeff_model_1[r], r, 1, f_lo, f_hi);
    validate_role_model(s.coeff_model_2[r], r, 2, f_lo, f_hi);
  }
}

inline DimensionlessConstants derive_constants(const PhysicalScenario& s) {
  validate(s);
  DimensionlessConstants k;
  k.a = std::sqrt(s.lambda0 / (s.rho0 * s.c0));
  k.B = (s.T_b - s.T_m) / s.T_m;
  k.Q = s.Q0 / (s.lambda0 * s.T_m * std::sqrt(std::numbers::pi));
  k.M = 2.0 * s.l_m * s.gamma_m * k.a * k.a / (s.lambda0 * s.T_m);
  k.D1 = s.sigma1 * s.U_c / (2.0 * s.c0 * s.gamma0 * k.a);
  k.D2 = s.sigma2 * s.U_c / (2.0 * s.c0 * s.gamma0 * k.a);
  k.D1_star = s.U_c * k.D1 / 2.0;
  k.D2_star = s.U_c * k.D2 / 2.0;
  k.nu = s.nu;
  k.U_c = s.U_c;
  for (const CoefficientModel* m : {&s.coeff_model_1, &s.coeff_model_2})
    for (Role r : kRoles)
      if ((*m)[r].family == Family::power_law_in_eta) {
        double mu = (*m)[r].parameters[1];
        if (std::isnan(k.mu) || mu > k.mu) k.mu = mu;
      }
  return k;
}

// The reduced equations match the field equations only when lambda0 = a c0 gamma0
// and, with current flowing, sigma_i T_m = 1 (the reduced Joule source scales
// with sigma_i). Each entry is a relative mismatch; 0 means consistent.
struct ReductionConsistency {
  double conduction = 0;     // lambda0 / (a c0 gamma0) - 1
  double joule_phase1 = 0;   // sigma1 T_m - 1, or 0 when U_c = 0
  double joule_phase2 = 0;
  bool ok(double tol = 1e-9) const {
    return std::abs(conduction) <= tol && std::abs(joule_phase1) <= tol && std::abs(joule_phase2) <= tol;
  }
};

inline ReductionConsistency reduction_consistency(const PhysicalScenario& s) {
  ReductionConsistency r;
  double a = std::sqrt(s.lambda0 / (s.rho0 * s.c0));
  r.conduction = s.lambda0 / (a * s.c0 * s.gamma0) - 1.0;
  if (s.U_c != 0) {
    r.joule_phase1 = s.sigma1 * s.T_m - 1.0;
    r.joule_phase2 = s.sigma2 * s.T_m - 1.0;
  }
  return r;
}

// Function of (f, eta) for one dimensionless coefficient of one phase.
using CoefficientFunction = std::function<double(double f, double eta)>;

struct PhaseFunctions {
  CoefficientFunction N, L, K;
};

struct DimensionlessCoefficients {
  PhaseFunctions phase1, phase2;
  double sigma_f1 = 0, sigma_f2 = 0;
};

// Maps f to temperature and rejects values outside [0, T_ion]. Interpolation
// round-off just outside the range is clamped.
inline double checked_temperature(double f, double T_m, double T_ion) {
  double T = T_m * (1.0 + f);
  double slack = 1e-6 * T_m;
  if (!(T >= -slack && T <= T_ion + slack))
    throw DomainError("temperature " + std::to_string(T) + " K outside model range [0, " +
                      std::to_string(T_ion) + "]");
  return std::clamp(T, 0.0, T_ion);
}

inline PhaseFunctions phase_functions(const CoefficientModel& m, const PhysicalScenario& s) {
  const double T_m = s.T_m, T_ion = s.T_ion;
  const double c0g0 = s.c0 * s.gamma0, lambda0 = s.lambda0;
  PhaseFunctions p;
  p.N = [m, T_m, T_ion, c0g0](double f, double eta) {
    checked_temperature(f, T_m, T_ion);
    return model_value(m.c, Role::c, f, eta) * model_value(m.gamma, Role::gamma, f, eta) / c0g0;
  };
  p.L = [m, T_m, T_ion, lambda0](double f, double eta) {
    checked_temperature(f, T_m, T_ion);
    return model_value(m.lambda, Role::lambda, f, eta) / lambda0;
  };
  p.K = [m, T_m, T_ion](double f, double eta) {
    checked_temperature(f, T_m, T_ion);
    return model_value(m.rho, Role::rho, f, eta);
  };
  return p;
}

inline DimensionlessCoefficients build_dimensionless_coefficients(const PhysicalScenario& s) {
  validate(s);
  DimensionlessCoefficients d;
  d.phase1 = phase_functions(s.coeff_model_1, s);
  d.phase2 = phase_functions(s.coeff_model_2, s);
  d.sigma_f1 = s.sigma1;
  d.sigma_f2 = s.sigma2;
  return d;
}

// Physical coefficient value for a role at temperature T and similarity coordinate eta.
inline double physical_coefficient(const CoefficientModel& m, Role r, double T, double eta,
                                   const PhysicalScenario& s) {
  double f = checked_temperature(T / s.T_m - 1.0, s.T_m, s.T_ion) / s.T_m - 1.0;
  return model_value(m[r], r, f, eta);
}

}  // namespace contact_stefan
