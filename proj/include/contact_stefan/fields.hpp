#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "scenario.hpp"

namespace contact_stefan {

enum class Zone { vapor, liquid, solid };

inline const char* zone_name(Zone z) {
  switch (z) {
    case Zone::vapor: return "vapor";
    case Zone::liquid: return "liquid";
    case Zone::solid: return "solid";
  }
  return "?";
}

struct FieldSample {
  Zone zone = Zone::vapor;
  double T = 0;
  std::optional<double> phi;  // no potential is modelled in the vapor zone
};

// Physical temperature and potential fields of a similarity solution.
class SolutionFields {
 public:
  SolutionFields(PhysicalScenario scenario, std::shared_ptr<const KernelContext> ctx)
      : sc_(std::move(scenario)), ctx_(std::move(ctx)), a_(ctx_->problem().k.a) {}

  double s0() const { return ctx_->s0(); }
  double r0() const { return ctx_->r0(); }
  double s_front(double t) const { return 2 * a_ * s0() * std::sqrt(t); }
  double r_front(double t) const { return 2 * a_ * r0() * std::sqrt(t); }
  double eta(double z, double t) const { return z / (2 * a_ * std::sqrt(t)); }
  const PhysicalScenario& scenario() const { return sc_; }
  const KernelContext& context() const { return *ctx_; }

  double vapor_temperature(double z, double t) const {
    check_time(t);
    double s = s_front(t);
    if (!(z >= 0 && z <= s)) throw DomainError("vapor temperature requested outside 0 <= z <= s(t)");
    return sc_.T_ion + (sc_.T_b - sc_.T_ion) * z / s;
  }

  Zone zone(double z, double t) const {
    double e = eta(z, t);
    if (e < s0()) return Zone::vapor;
    if (e <= r0()) return Zone::liquid;
    return Zone::solid;
  }

  // Dimensionless profile f at eta in the condensed phases.
  double f_at(double e) const {
    if (e < s0() || std::isnan(e)) throw DomainError("similarity coordinate below the boiling front");
    return e <= r0() ? ctx_->V1(e) : ctx_->V2(e);
  }

  FieldSample reconstruct(double z, double t) const {
    check_time(t);
    if (!(z >= 0)) throw DomainError("z must be non-negative");
    FieldSample out;
    out.zone = zone(z, t);
    if (out.zone == Zone::vapor) {
      out.T = vapor_temperature(std::min(z, s_front(t)), t);
      return out;
    }
    double e = eta(z, t);
    out.T = sc_.T_m * (1.0 + f_at(e));
    out.phi = ctx_->potential(e);
    return out;
  }

  double temperature(double z, double t) const { return reconstruct(z, t).T; }

  // Phase-specific fields; eta is clamped onto the phase so one-sided
  // stencils can start exactly on a front.
  double T_liquid(double z, double t) const {
    return sc_.T_m * (1.0 + ctx_->V1(std::clamp(eta(z, t), s0(), r0())));
  }
  double T_solid(double z, double t) const { return sc_.T_m * (1.0 + ctx_->V2(std::max(eta(z, t), r0()))); }
  double phi_liquid(double z, double t) const { return ctx_->potential(std::clamp(eta(z, t), s0(), r0())); }
  double phi_solid(double z, double t) const { return ctx_->potential(std::max(eta(z, t), r0())); }

  // Physical coefficients at (z, t) in a condensed phase.
  double lambda(int phase, double T, double e) const { return value(phase, Role::lambda, T, e); }
  double c_gamma(int phase, double T, double e) const {
    return value(phase, Role::c, T, e) * value(phase, Role::gamma, T, e);
  }
  double rho(int phase, double T, double e) const { return value(phase, Role::rho, T, e); }
  double sigma(int phase) const { return phase == 1 ? sc_.sigma1 : sc_.sigma2; }

 private:
  static void check_time(double t) {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
  }
  double value(int phase, Role r, double T, double e) const {
    const CoefficientModel& m = phase == 1 ? sc_.coeff_model_1 : sc_.coeff_model_2;
    double f = checked_temperature(T / sc_.T_m - 1.0, sc_.T_m, sc_.T_ion) / sc_.T_m - 1.0;
    return model_value(m[r], r, f, e);
  }

  PhysicalScenario sc_;
  std::shared_ptr<const KernelContext> ctx_;
  double a_;
};

// ---- finite-difference residuals of the physical system ----

struct ResidualGrid {
  double t_lo = 1e-4, t_hi = 1.0;
  int nt = 64, nz = 64;
  double solid_extent = 3.0;   // solid samples cover eta in (r0, r0 + solid_extent]
  double z_step = 1e-3;        // FD step as a fraction of the zone width
  double t_step = 1e-4;        // forward FD step as a fraction of t
  int margin_cells = 3;        // stencil cells kept away from the fronts (>= 2)
};

struct ResidualStat {
  std::string name;
  double max = 0, l2 = 0;
  int count = 0;
  double scale = 0;  // normalisation applied to the raw residuals
};

struct ResidualReport {
  std::vector<ResidualStat> items;

  const ResidualStat* find(const std::string& name) const {
    for (const auto& i : items)
      if (i.name == name) return &i;
    return nullptr;
  }
  double max_of(std::initializer_list<const char*> names) const {
    double m = 0;
    for (const char* n : names)
      if (const auto* s = find(n)) m = std::max(m, s->max);
    return m;
  }
  double interior_max() const {
    return max_of({"heat_liquid", "heat_solid", "current_liquid", "current_solid"});
  }
};

namespace detail {

struct Accum {
  std::vector<double> raw;
  double scale = 0;
  void add(double r, std::initializer_list<double> terms) {
    raw.push_back(r);
    for (double t : terms) scale = std::max(scale, std::abs(t));
  }
  ResidualStat stat(const std::string& name) const {
    ResidualStat s{name};
    s.count = int(raw.size());
    s.scale = scale;
    if (raw.empty() || scale == 0) return s;
    double sq = 0;
    for (double r : raw) {
      double v = std::abs(r) / scale;
      s.max = std::max(s.max, v);
      sq += v * v;
    }
    s.l2 = std::sqrt(sq / raw.size());
    return s;
  }
};

// One-sided first derivative of order 4 from points x0, x0 + dir*h, ..., x0 + 4 dir*h.
template <class F>
double one_sided_derivative(const F& f, double x0, double h, double dir) {
  double f0 = f(x0), f1 = f(x0 + dir * h), f2 = f(x0 + 2 * dir * h), f3 = f(x0 + 3 * dir * h),
         f4 = f(x0 + 4 * dir * h);
  return dir * (-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12 * h);
}

}  // namespace detail

inline ResidualReport pde_residual(const SolutionFields& sol, const ResidualGrid& g = {}) {
  const auto& sc = sol.scenario();
  const double nu = sc.nu, a = sol.context().problem().k.a;
  const double s0 = sol.s0(), r0 = sol.r0();
  detail::Accum heat[2], current[2], flux_s, temp_s, phi_s, temp_r, phi_r, stefan, cont;

  for (int it = 0; it < g.nt; ++it) {
    double t = g.nt == 1 ? g.t_lo : g.t_lo * std::pow(g.t_hi / g.t_lo, double(it) / (g.nt - 1));
    double sq = std::sqrt(t);
    double s = sol.s_front(t), r = sol.r_front(t);
    for (int phase = 1; phase <= 2; ++phase) {
      double zlo = phase == 1 ? s : r;
      double zhi = phase == 1 ? r : 2 * a * (r0 + g.solid_extent) * sq;
      double h = g.z_step * (zhi - zlo), dt = g.t_step * t;
      double lo = zlo + g.margin_cells * h, hi = zhi - g.margin_cells * h;
      auto T = [&](double z, double tt) { return sol.temperature(z, tt); };
      auto phi = [&](double z) { return *sol.reconstruct(z, t).phi; };
      for (int iz = 0; iz < g.nz; ++iz) {
        double z = lo + (hi - lo) * (iz + 0.5) / g.nz;
        // fourth-order central stencils
        double Tv[5], pv[5], lv[5], iv[5];
        for (int k = 0; k < 5; ++k) {
          double zk = z + (k - 2) * h, ek = sol.eta(zk, t);
          Tv[k] = T(zk, t);
          pv[k] = phi(zk);
          lv[k] = sol.lambda(phase, Tv[k], ek);
          iv[k] = 1 / sol.rho(phase, Tv[k], ek);
        }
        auto d1 = [&](const double* v) { return (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h); };
        auto d2 = [&](const double* v) { return (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h); };
        double Tc = Tv[2], Tz = d1(Tv), Tzz = d2(Tv);
        double Tt = (-3 * Tc + 4 * T(z, t + dt) - T(z, t + 2 * dt)) / (2 * dt);
        double e = sol.eta(z, t);
        double lam = lv[2], lam_z = d1(lv);
        double cg = sol.c_gamma(phase, Tc, e);
        double pz = d1(pv), pzz = d2(pv);
        double rh = 1 / iv[2], inv_rho_z = d1(iv);
        double t_store = cg * Tt, t_diff = lam * Tzz, t_grad = lam_z * Tz, t_geom = nu * lam * Tz / z;
        double t_thom = sol.sigma(phase) * Tz * pz, t_joule = pz * pz / rh;
        heat[phase - 1].add(t_store - (t_diff + t_grad + t_geom + t_thom + t_joule),
                            {t_store, t_diff, t_grad, t_geom, t_thom, t_joule});
        double c_a = pzz / rh, c_b = nu * pz / (z * rh), c_c = inv_rho_z * pz;
        current[phase - 1].add(c_a + c_b + c_c, {c_a, c_b, c_c});
      }
    }
    // boundary and interface conditions
    double hl = g.z_step * (r - s), hs = g.z_step * 2 * a * g.solid_extent * sq;
    auto T1 = [&](double z) { return sol.T_liquid(z, t); };
    auto T2 = [&](double z) { return sol.T_solid(z, t); };
    double T1s = T1(s), T1r = T1(r), T2r = T2(r);
    double T1z_s = detail::one_sided_derivative(T1, s, hl, +1);
    double T1z_r = detail::one_sided_derivative(T1, r, hl, -1);
    double T2z_r = detail::one_sided_derivative(T2, r, hs, +1);
    double lam1_s = sol.lambda(1, T1s, s0), lam1_r = sol.lambda(1, T1r, r0), lam2_r = sol.lambda(2, T2r, r0);
    double q_in = sc.Q0 * std::exp(-s0 * s0) / (2 * a * std::sqrt(std::numbers::pi * t));
    flux_s.add(-lam1_s * T1z_s - q_in, {lam1_s * T1z_s, q_in});
    temp_s.add(T1s - sc.T_b, {sc.T_b});
    temp_r.add(std::max(std::abs(T1r - sc.T_m), std::abs(T2r - sc.T_m)), {sc.T_m});
    double drdt = a * r0 / sq;
    double st_1 = -lam1_r * T1z_r, st_2 = lam2_r * T2z_r, st_m = sc.l_m * sc.gamma_m * drdt;
    stefan.add(st_1 + st_2 - st_m, {st_1, st_2, st_m});
    auto P1 = [&](double z) { return sol.phi_liquid(z, t); };
    auto P2 = [&](double z) { return sol.phi_solid(z, t); };
    double p1s = P1(s), p1r = P1(r), p2r = P2(r);
    phi_s.add(p1s, {std::abs(sc.U_c) / 2});
    phi_r.add(p1r - p2r, {p1r, p2r});
    double j1 = detail::one_sided_derivative(P1, r, hl, -1) / sol.rho(1, T1r, r0);
    double j2 = detail::one_sided_derivative(P2, r, hs, +1) / sol.rho(2, T2r, r0);
    cont.add(j1 - j2, {j1, j2});
  }
  ResidualReport rep;
  rep.items.push_back(heat[0].stat("heat_liquid"));
  rep.items.push_back(heat[1].stat("heat_solid"));
  rep.items.push_back(current[0].stat("current_liquid"));
  rep.items.push_back(current[1].stat("current_solid"));
  rep.items.push_back(flux_s.stat("flux_boiling"));
  rep.items.push_back(temp_s.stat("temperature_boiling"));
  rep.items.push_back(phi_s.stat("potential_boiling"));
  rep.items.push_back(temp_r.stat("temperature_melting"));
  rep.items.push_back(phi_r.stat("potential_continuity"));
  rep.items.push_back(stefan.stat("stefan"));
  rep.items.push_back(cont.stat("current_continuity"));
  return rep;
}

// ---- plot-ready tables ----

struct FieldRow {
  double z, t;
  Zone zone;
  double T;
  std::optional<double> phi;
};

struct FrontRow {
  double t, s, r;
};

// Samples on a (z, t) grid: nz points on [0, z_extent * r(t)] for each of nt times.
inline std::vector<FieldRow> sample_fields(const SolutionFields& sol, double t_lo, double t_hi, int nt, int nz,
                                           double z_extent = 3.0) {
  std::vector<FieldRow> rows;
  for (int it = 0; it < nt; ++it) {
    double t = nt == 1 ? t_lo : t_lo * std::pow(t_hi / t_lo, double(it) / (nt - 1));
    double zmax = z_extent * sol.r_front(t);
    for (int iz = 0; iz < nz; ++iz) {
      double z = nz == 1 ? 0.0 : zmax * iz / (nz - 1);
      FieldSample f = sol.reconstruct(z, t);
      rows.push_back({z, t, f.zone, f.T, f.phi});
    }
  }
  return rows;
}

inline std::vector<FrontRow> sample_fronts(const SolutionFields& sol, double t_lo, double t_hi, int nt) {
  std::vector<FrontRow> rows;
  for (int it = 0; it < nt; ++it) {
    double t = nt == 1 ? t_lo : t_lo * std::pow(t_hi / t_lo, double(it) / (nt - 1));
    rows.push_back({t, sol.s_front(t), sol.r_front(t)});
  }
  return rows;
}

}  // namespace contact_stefan
