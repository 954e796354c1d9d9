#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "collocation.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"

namespace contact_stefan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct KernelConfig {
  std::size_t n1 = 64;  // nodes over [s0, r0]
  std::size_t n2 = 96;  // nodes over u = r0/eta in [0, 1]
  int stages = 8;       // Radau IIA stages per panel
  double u_floor = 1e-10;
  QuadratureConfig quad;
};

// Phase-1 nodes in eta, ascending from s0 to r0.
inline std::vector<double> phase1_nodes(double s0, double r0, std::size_t n) {
  return chebyshev_nodes(s0, r0, n);
}

// Phase-2 nodes in u = r0/eta, ordered by increasing eta: u runs from 1 down to 0.
inline std::vector<double> phase2_nodes(std::size_t n) {
  std::vector<double> u = chebyshev_nodes(0.0, 1.0, n);
  std::reverse(u.begin(), u.end());
  return u;
}

inline double u_to_eta(double r0, double u) { return u <= 0 ? kInf : r0 / u; }
inline double eta_to_u(double r0, double eta) { return std::isinf(eta) ? 0.0 : r0 / eta; }

struct ProfilePair {
  double s0 = 0, r0 = 0;
  std::vector<double> f1;  // values at phase1_nodes(s0, r0, f1.size())
  std::vector<double> f2;  // values at phase2_nodes(f2.size()); f2.back() is the limit at infinity

  std::vector<double> eta1() const { return phase1_nodes(s0, r0, f1.size()); }
  std::vector<double> u2() const { return phase2_nodes(f2.size()); }

  template <class F1, class F2>
  static ProfilePair sample(double s0, double r0, std::size_t n1, std::size_t n2, F1&& f1,
                            F2&& f2) {
    ProfilePair p{s0, r0, {}, {}};
    for (double eta : phase1_nodes(s0, r0, n1)) p.f1.push_back(f1(eta));
    for (double u : phase2_nodes(n2)) p.f2.push_back(f2(u_to_eta(r0, u)));
    return p;
  }
};

inline double sup_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Product sup norm max(|f1|, |f2|) over the nodes.
inline double sup_norm(const ProfilePair& p) { return std::max(sup_norm(p.f1), sup_norm(p.f2)); }

inline double distance(const ProfilePair& p, const ProfilePair& q) {
  double d = 0;
  for (std::size_t i = 0; i < p.f1.size(); ++i) d = std::max(d, std::abs(p.f1[i] - q.f1[i]));
  for (std::size_t i = 0; i < p.f2.size(); ++i) d = std::max(d, std::abs(p.f2[i] - q.f2[i]));
  return d;
}

inline bool in_M(const ProfilePair& p) { return p.f2.front() == 0.0 && p.f2.back() == -1.0; }

// Throws DomainError when a profile leaves [-1, B + margin] (phase 1) or
// [-1 - margin, margin] (phase 2).
inline void check_range(const ProfilePair& p, double B, double margin) {
  for (double v : p.f1)
    if (!(v >= -1.0 - 1e-12 && v <= B + margin))
      throw DomainError("phase-1 profile value " + std::to_string(v) + " outside admissible range");
  for (double v : p.f2)
    if (!(v >= -1.0 - margin && v <= margin))
      throw DomainError("phase-2 profile value " + std::to_string(v) + " outside admissible range");
}

// Everything that defines the operator except the profile it acts on.
struct SimilarityProblem {
  DimensionlessConstants k;
  PhaseFunctions phase1, phase2;
  KernelConfig cfg;
};

inline const RadauIIA& radau_rule(int stages) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<RadauIIA>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[stages];
  if (!slot) slot = std::make_unique<RadauIIA>(stages);
  return *slot;
}

// Values of every kernel at one point of one phase. H_i = J / E.
struct KernelPoint {
  double eta = 0;
  double F = 0, P = 0, E = 1, J = 0, Hi = 0, Phi = 0, G = 0;
};

// Kernel tables for one profile pair. Node tables are built once on
// construction; point evaluations integrate locally from the nearest node on
// the left. The weighted integral J = E*H_i is advanced by Radau IIA
// collocation of J' = k - p*J, which stays bounded where E underflows.
class KernelContext {
 public:
  KernelContext(const SimilarityProblem& problem, ProfilePair profile)
      : pb_(problem), prof_(std::move(profile)), rk_(radau_rule(problem.cfg.stages)) {
    if (rk_.m > 16) throw std::invalid_argument("kernel context: at most 16 Radau stages");
    if (!(prof_.s0 > 0) || !(prof_.r0 > prof_.s0))
      throw DomainError("kernel context requires 0 < s0 < r0");
    if (prof_.f1.size() < 2 || prof_.f2.size() < 2)
      throw std::invalid_argument("kernel context: profile grids need at least 2 nodes");
    ph_[0].x = phase1_nodes(prof_.s0, prof_.r0, prof_.f1.size());
    ph_[1].x = phase2_nodes(prof_.f2.size());
    ph_[0].interp = ChebyshevInterpolant(ph_[0].x, prof_.f1);
    ph_[1].interp = ChebyshevInterpolant(ph_[1].x, prof_.f2);
    ph_[0].fn = &pb_.phase1;
    ph_[1].fn = &pb_.phase2;
    ph_[0].D = pb_.k.D1;
    ph_[1].D = pb_.k.D2;
    ph_[1].check_decay = true;
    build_pass1(ph_[0]);
    build_pass1(ph_[1]);
    H_ = ph_[0].F.back() + ph_[1].F.back();
    if (!(H_ > 0) || !std::isfinite(H_)) throw DecayViolation("H is not a positive finite number");
    build_pass2(ph_[0]);
    build_pass2(ph_[1]);
    check_tail();
  }

  const SimilarityProblem& problem() const { return pb_; }
  const ProfilePair& profile() const { return prof_; }
  double s0() const { return prof_.s0; }
  double r0() const { return prof_.r0; }
  double H() const { return H_; }

  KernelPoint phase1(double eta) const { return point(0, eta, eta); }
  KernelPoint phase2(double eta) const { return point(1, eta_to_u(prof_.r0, eta), eta); }

  double F1(double eta) const { return phase1(eta).F; }
  double F2(double eta) const { return phase2(eta).F; }
  double E1(double eta) const { return phase1(eta).E; }
  double E2(double eta) const { return phase2(eta).E; }
  double H1(double eta) const { return phase1(eta).Hi; }
  double H2(double eta) const { return phase2(eta).Hi; }
  double Phi1(double eta) const { return phase1(eta).Phi; }
  double Phi2(double eta) const { return phase2(eta).Phi; }
  double G1(double eta) const { return phase1(eta).G; }
  double G2(double eta) const { return phase2(eta).G; }
  double J1(double eta) const { return phase1(eta).J; }
  double J2(double eta) const { return phase2(eta).J; }

  // Scalars at the phase ends.
  double F1_r0() const { return ph_[0].F.back(); }
  double Phi1_r0() const { return ph_[0].Phi.back(); }
  double G1_r0() const { return ph_[0].G.back(); }
  double E1_r0() const { return std::exp(-ph_[0].P.back()); }
  double J1_r0() const { return ph_[0].J.back(); }
  double F2_inf() const { return ph_[1].F.back(); }
  double Phi2_inf() const { return ph_[1].Phi.back(); }
  double G2_inf() const { return ph_[1].G.back(); }
  double H2_inf() const {
    double E = std::exp(-ph_[1].P.back());
    return E > 0 ? ph_[1].J.back() / E : kInf;
  }

  // Electric potential, phase chosen by eta (eta = r0 belongs to phase 1).
  double potential(double eta) const {
    double Uc = pb_.k.U_c;
    if (eta <= prof_.r0) return Uc * F1(eta) / (2.0 * H_);
    if (std::isinf(eta)) return Uc / 2.0;
    return Uc * (F1_r0() + F2(eta)) / (2.0 * H_);
  }

  double flux_coefficient() const {
    return std::pow(prof_.s0, pb_.k.nu) * pb_.k.Q * std::exp(-prof_.s0 * prof_.s0);
  }

  double V1(double eta) const {
    KernelPoint p = phase1(eta);
    return flux_coefficient() * (Phi1_r0() - p.Phi) + pb_.k.D1_star / (H_ * H_) * (G1_r0() - p.G);
  }

  double V2(double eta) const {
    if (std::isinf(eta)) return -1.0;
    KernelPoint p = phase2(eta);
    return v2_from(p.Phi, p.G);
  }

  std::vector<double> V1_nodes() const {
    const auto& t = ph_[0];
    std::vector<double> v(t.x.size());
    double c = flux_coefficient(), d = pb_.k.D1_star / (H_ * H_);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = c * (t.Phi.back() - t.Phi[i]) + d * (t.G.back() - t.G[i]);
    v.back() = 0.0;
    return v;
  }

  std::vector<double> V2_nodes() const {
    const auto& t = ph_[1];
    std::vector<double> v(t.x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = v2_from(t.Phi[i], t.G[i]);
    v.front() = 0.0;
    v.back() = -1.0;
    return v;
  }

  ProfilePair psi() const { return ProfilePair{prof_.s0, prof_.r0, V1_nodes(), V2_nodes()}; }

  // Node tables, ordered by increasing eta in each phase.
  struct Tables {
    std::vector<double> eta, F, E, J, Phi, G;
  };
  Tables tables(int phase) const {
    const auto& t = ph_[phase];
    Tables out;
    out.eta = t.x;
    if (phase == 1)
      for (double& x : out.eta) x = u_to_eta(prof_.r0, x);
    out.F = t.F;
    out.J = t.J;
    out.Phi = t.Phi;
    out.G = t.G;
    for (double P : t.P) out.E.push_back(std::exp(-P));
    return out;
  }

  // f at eta evaluated from the interpolant of the profile that defines this context.
  double profile1(double eta) const { return ph_[0].interp(eta); }
  double profile2(double eta) const { return ph_[1].interp(eta_to_u(prof_.r0, eta)); }

 private:
  struct Phase {
    std::vector<double> x;
    ChebyshevInterpolant interp;
    const PhaseFunctions* fn = nullptr;
    double D = 0;
    bool check_decay = false;
    // per-stage data for all panels
    std::vector<double> s_eta, s_N, s_L, s_K, s_jac;
    std::vector<double> F, P, J, Phi, G;
  };

  double v2_from(double Phi, double G) const {
    double Phi_inf = Phi2_inf();
    if (!(Phi_inf > 1e-300) || !std::isfinite(Phi_inf))
      throw DegenerateDenominator("Phi2 at infinity underflows or is not finite");
    double d = pb_.k.D2_star / (H_ * H_);
    return (d * G2_inf() - 1.0) * Phi / Phi_inf - d * G;
  }

  bool is_tail(const Phase& ph) const { return &ph == &ph_[1]; }

  // eta and d(eta)/dx at coordinate x.
  void map(const Phase& ph, double x, double& eta, double& deta) const {
    if (!is_tail(ph)) {
      eta = x, deta = 1.0;
      return;
    }
    double u = std::max(x, pb_.cfg.u_floor);
    eta = prof_.r0 / u;
    deta = -prof_.r0 / (u * u);
  }

  struct Stage {
    double eta, N, L, K, jac;
  };

  Stage stage(const Phase& ph, double x, double h) const {
    Stage s;
    double deta;
    map(ph, x, s.eta, deta);
    s.jac = deta * h;
    double f = std::max(ph.interp(x), -1.0);  // interpolation undershoot below 0 K
    s.N = ph.fn->N(f, s.eta);
    s.L = ph.fn->L(f, s.eta);
    s.K = ph.fn->K(f, s.eta);
    return s;
  }

  double k_of(const Stage& s) const { return s.K * std::pow(s.eta, -pb_.k.nu) * s.jac; }
  double l_of(const Stage& s) const { return s.jac / (s.L * std::pow(s.eta, pb_.k.nu)); }
  double p_of(const Phase& ph, const Stage& s) const {
    return (2.0 * pb_.k.a * s.eta * s.N / s.L + ph.D / H_ * s.K / (s.L * std::pow(s.eta, pb_.k.nu))) *
           s.jac;
  }

  void build_pass1(Phase& ph) {
    const int m = rk_.m;
    const std::size_t n = ph.x.size();
    ph.s_eta.resize((n - 1) * m);
    ph.s_N.resize((n - 1) * m);
    ph.s_L.resize((n - 1) * m);
    ph.s_K.resize((n - 1) * m);
    ph.s_jac.resize((n - 1) * m);
    ph.F.assign(n, 0.0);
    if (ph.check_decay) {
      const Phase* p = &ph;
      check_tail_decay(
          [&](double eta) {
            double f = std::max(p->interp(eta_to_u(prof_.r0, eta)), -1.0);
            return p->fn->K(f, eta) * std::pow(eta, -pb_.k.nu);
          },
          prof_.r0, "F2");
    }
    for (std::size_t i = 1; i < n; ++i) {
      double h = ph.x[i] - ph.x[i - 1], acc = 0;
      for (int q = 0; q < m; ++q) {
        Stage s = stage(ph, ph.x[i - 1] + rk_.c[q] * h, h);
        std::size_t idx = (i - 1) * m + q;
        ph.s_eta[idx] = s.eta, ph.s_N[idx] = s.N, ph.s_L[idx] = s.L, ph.s_K[idx] = s.K,
        ph.s_jac[idx] = s.jac;
        acc += rk_.b(q) * k_of(s);
      }
      ph.F[i] = ph.F[i - 1] + acc;
    }
  }

  struct PanelResult {
    double F, P, J, Phi, G;
  };

  // Integrates one panel from left-node values given its stage data.
  PanelResult advance(const Phase& ph, const std::vector<Stage>& st, double F0, double P0, double J0,
                      double Phi0, double G0) const {
    const int m = rk_.m;
    double kq[16], pq[16], lq[16];
    std::vector<double> Mat(m * m), rhs(m), Est(m);
    for (int q = 0; q < m; ++q) kq[q] = k_of(st[q]), pq[q] = p_of(ph, st[q]), lq[q] = l_of(st[q]);
    PanelResult r{F0, P0, J0, Phi0, G0};
    const double E0 = std::exp(-P0);
    for (int i = 0; i < m; ++i) {
      double ak = 0;
      for (int j = 0; j < m; ++j) {
        ak += rk_.a(i, j) * kq[j];
        Mat[i * m + j] = (i == j ? 1.0 : 0.0) + rk_.a(i, j) * pq[j];
      }
      rhs[i] = J0 + ak;
      Est[i] = E0;
      r.F += rk_.b(i) * kq[i];
      r.P += rk_.b(i) * pq[i];
    }
    // stage values of E from E' = -p E on the same implicit system; exp of the
    // interpolated P is unusable when p is stiff
    std::vector<double> Mat2 = Mat;
    solve_dense(Mat, rhs, m);
    solve_dense(Mat2, Est, m);
    for (int i = 0; i < m; ++i) {
      r.G += rk_.b(i) * rhs[i] * lq[i];
      r.Phi += rk_.b(i) * Est[i] * lq[i];
    }
    r.J = rhs[m - 1];
    return r;
  }

  void build_pass2(Phase& ph) {
    const int m = rk_.m;
    const std::size_t n = ph.x.size();
    ph.P.assign(n, 0.0);
    ph.J.assign(n, 0.0);
    ph.Phi.assign(n, 0.0);
    ph.G.assign(n, 0.0);
    std::vector<Stage> st(m);
    for (std::size_t i = 1; i < n; ++i) {
      for (int q = 0; q < m; ++q) {
        std::size_t idx = (i - 1) * m + q;
        st[q] = {ph.s_eta[idx], ph.s_N[idx], ph.s_L[idx], ph.s_K[idx], ph.s_jac[idx]};
      }
      PanelResult r = advance(ph, st, ph.F[i - 1], ph.P[i - 1], ph.J[i - 1], ph.Phi[i - 1], ph.G[i - 1]);
      ph.P[i] = r.P, ph.J[i] = r.J, ph.Phi[i] = r.Phi, ph.G[i] = r.G;
    }
  }

  void check_tail() const {
    const Phase& t = ph_[1];
    if (!std::isfinite(t.Phi.back()) || !std::isfinite(t.G.back()) || !std::isfinite(t.F.back()))
      throw DecayViolation("tail kernels are not finite at infinity");
    const double probes[] = {1e-3, 1e-5, 1e-7};
    double qPhi[3], qG[3];
    for (int i = 0; i < 3; ++i) {
      double u = probes[i];
      KernelPoint p = point(1, u, prof_.r0 / u);
      double f = std::max(t.interp(u), -1.0), eta = prof_.r0 / u;
      double l = prof_.r0 / (u * u) / (t.fn->L(f, eta) * std::pow(eta, pb_.k.nu)) * u;
      qPhi[i] = p.E * l;
      qG[i] = p.J * l;
    }
    auto decays = [](const double* q) { return !(q[2] > 0) || (q[2] < q[1] && q[1] < q[0]); };
    if (!decays(qPhi)) throw DecayViolation("Phi2 integrand does not decay at infinity");
    if (!decays(qG)) throw DecayViolation("G2 integrand does not decay at infinity");
  }

  // Evaluates phase `which` at coordinate x (eta for phase 1, u for phase 2).
  KernelPoint point(int which, double x, double eta) const {
    const Phase& ph = ph_[which];
    const auto& xs = ph.x;
    double lo = std::min(xs.front(), xs.back()), hi = std::max(xs.front(), xs.back());
    double slack = 1e-12 * std::max(1.0, std::abs(hi));
    if (!(x >= lo - slack && x <= hi + slack) || std::isnan(x))
      throw DomainError("eta = " + std::to_string(eta) + " outside phase " +
                        std::to_string(which + 1) + " interval");
    x = std::clamp(x, lo, hi);
    bool ascending = xs.back() > xs.front();
    // first node at or beyond x in the ordering direction
    std::size_t i = ascending
                        ? std::size_t(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin())
                        : std::size_t(std::lower_bound(xs.begin(), xs.end(), x, std::greater<double>()) -
                                      xs.begin());
    KernelPoint out;
    out.eta = which == 0 ? x : u_to_eta(prof_.r0, x);
    if (i < xs.size() && xs[i] == x) {
      out.F = ph.F[i], out.P = ph.P[i], out.J = ph.J[i], out.Phi = ph.Phi[i], out.G = ph.G[i];
    } else {
      std::size_t L = i - 1;
      double h = x - xs[L];
      std::vector<Stage> st(rk_.m);
      for (int q = 0; q < rk_.m; ++q) st[q] = stage(ph, xs[L] + rk_.c[q] * h, h);
      PanelResult r = advance(ph, st, ph.F[L], ph.P[L], ph.J[L], ph.Phi[L], ph.G[L]);
      out.F = r.F, out.P = r.P, out.J = r.J, out.Phi = r.Phi, out.G = r.G;
    }
    out.E = std::exp(-out.P);
    out.Hi = out.E > 0 ? out.J / out.E : kInf;
    return out;
  }

  SimilarityProblem pb_;
  ProfilePair prof_;
  const RadauIIA& rk_;
  Phase ph_[2];
  double H_ = 0;
};

// Kernels evaluated straight from their integral definitions by nested
// adaptive quadrature, without node tables. Slow; used to cross-check the
// tables.
class DirectKernels {
 public:
  DirectKernels(const SimilarityProblem& problem, const ProfilePair& profile)
      : pb_(problem),
        s0_(profile.s0),
        r0_(profile.r0),
        f1_(phase1_nodes(profile.s0, profile.r0, profile.f1.size()), profile.f1),
        f2_(phase2_nodes(profile.f2.size()), profile.f2) {
    H_ = F1(r0_) + F2(kInf);
  }

  double H() const { return H_; }

  double F1(double eta) const { return integrate_finite([&](double v) { return k(0, v); }, s0_, eta, q()); }
  double F2(double eta) const { return tail([&](double v) { return k(1, v); }, eta); }

  double E1(double eta) const { return std::exp(-P(0, eta)); }
  double E2(double eta) const { return std::exp(-P(1, eta)); }

  double Phi1(double eta) const {
    return integrate_finite([&](double v) { return E1(v) * l(0, v); }, s0_, eta, q());
  }
  double Phi2(double eta) const { return tail([&](double v) { return E2(v) * l(1, v); }, eta); }

  double H1(double eta) const {
    return integrate_finite([&](double v) { return k(0, v) / E1(v); }, s0_, eta, q());
  }
  double H2(double eta) const { return tail([&](double v) { return k(1, v) / E2(v); }, eta); }

  double G1(double eta) const {
    return integrate_finite([&](double v) { return E1(v) * H1(v) * l(0, v); }, s0_, eta, q());
  }
  double G2(double eta) const {
    return tail([&](double v) { return E2(v) * H2(v) * l(1, v); }, eta);
  }

  double V1(double eta) const {
    double c = std::pow(s0_, pb_.k.nu) * pb_.k.Q * std::exp(-s0_ * s0_);
    return c * (Phi1(r0_) - Phi1(eta)) + pb_.k.D1_star / (H_ * H_) * (G1(r0_) - G1(eta));
  }
  double V2(double eta) const {
    double d = pb_.k.D2_star / (H_ * H_);
    double Phi_inf = Phi2(kInf);
    return (d * G2(kInf) - 1.0) * Phi2(eta) / Phi_inf - d * G2(eta);
  }

 private:
  QuadratureConfig q() const { return pb_.cfg.quad; }

  double f(int which, double v) const { return std::max(which == 0 ? f1_(v) : f2_(r0_ / v), -1.0); }
  const PhaseFunctions& fn(int which) const { return which == 0 ? pb_.phase1 : pb_.phase2; }

  double k(int which, double v) const { return fn(which).K(f(which, v), v) * std::pow(v, -pb_.k.nu); }
  double l(int which, double v) const {
    return 1.0 / (fn(which).L(f(which, v), v) * std::pow(v, pb_.k.nu));
  }
  double p(int which, double v) const {
    double fv = f(which, v);
    const auto& F = fn(which);
    double D = which == 0 ? pb_.k.D1 : pb_.k.D2;
    double L = F.L(fv, v);
    return 2.0 * pb_.k.a * v * F.N(fv, v) / L + D / H_ * F.K(fv, v) / (L * std::pow(v, pb_.k.nu));
  }
  double P(int which, double eta) const {
    if (which == 0) return integrate_finite([&](double v) { return p(0, v); }, s0_, eta, q());
    return tail([&](double v) { return p(1, v); }, eta);
  }

  // Integral over [r0, eta] in the compactified coordinate; eta may be infinite.
  template <class G>
  double tail(const G& g, double eta) const {
    if (std::isinf(eta)) return integrate_semi_infinite(g, r0_, q());
    double u = r0_ / eta;
    return integrate_finite([&](double w) { return tail_integrand(g, r0_, w); }, u, 1.0, q());
  }

  SimilarityProblem pb_;
  double s0_, r0_;
  ChebyshevInterpolant f1_, f2_;
  double H_ = 0;
};

}  // namespace contact_stefan
