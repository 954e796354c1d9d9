#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"

namespace contact_stefan {

struct FixedPointConfig {
  double tol = 1e-9;
  int max_iter = 200;
  double damping = 1.0;
  int ratio_probe_pairs = 8;
  std::uint64_t seed = 20240611;
};

inline void check_config(const FixedPointConfig& c) {
  if (!(c.tol > 0) || c.max_iter < 1 || !(c.damping > 0 && c.damping <= 1) || c.ratio_probe_pairs < 0)
    throw std::invalid_argument("FixedPointConfig: tol > 0, max_iter >= 1, damping in (0, 1]");
}

struct FixedPointResult {
  ProfilePair profiles;
  int iterations = 0;
  double final_update_norm = 0;
  double empirical_ratio = std::numeric_limits<double>::quiet_NaN();
  double damping_used = 1.0;
  std::vector<double> update_history;
  std::shared_ptr<const KernelContext> context;  // kernels of `profiles`
};

inline std::vector<double> apply_V1(const ProfilePair& p, const SimilarityProblem& pb) {
  return KernelContext(pb, p).V1_nodes();
}

inline std::vector<double> apply_V2(const ProfilePair& p, const SimilarityProblem& pb) {
  return KernelContext(pb, p).V2_nodes();
}

inline ProfilePair apply_psi(const ProfilePair& p, const SimilarityProblem& pb) {
  return KernelContext(pb, p).psi();
}

inline void impose_endpoints(ProfilePair& p) {
  p.f2.front() = 0.0;
  p.f2.back() = -1.0;
}

// Tail exponent of the default phase-2 guess; falls back to 2 when no power law is present.
inline double guess_exponent(const DimensionlessConstants& k) {
  double mu = std::isnan(k.mu) ? 3.0 : k.mu;
  return mu + k.nu - 1.0;
}

inline ProfilePair initial_guess(const SimilarityProblem& pb, double s0, double r0) {
  double B = pb.k.B, kappa = guess_exponent(pb.k);
  return ProfilePair::sample(
      s0, r0, pb.cfg.n1, pb.cfg.n2, [&](double eta) { return B * (r0 - eta) / (r0 - s0); },
      [&](double eta) { return std::isinf(eta) ? -1.0 : -(1.0 - std::pow(r0 / eta, kappa)); });
}

// Moves node values onto the grid of (s0, r0); node values are kept as-is since
// both grids are fixed in normalized coordinates.
inline ProfilePair rescale(const ProfilePair& p, double s0, double r0) {
  ProfilePair q = p;
  q.s0 = s0;
  q.r0 = r0;
  return q;
}

inline FixedPointResult iterate(const ProfilePair& initial, const SimilarityProblem& pb,
                                const FixedPointConfig& cfg = {}) {
  check_config(cfg);
  FixedPointResult res;
  ProfilePair p = initial;
  impose_endpoints(p);
  double omega = cfg.damping, prev = std::numeric_limits<double>::infinity();
  int growing = 0;
  bool lowered = false;
  for (int it = 0;; ++it) {
    std::shared_ptr<const KernelContext> ctx;
    try {
      ctx = std::make_shared<KernelContext>(pb, p);
    } catch (const DomainError& e) {
      if (it == 0) throw;
      throw DivergenceDetected(std::string("iterate left the admissible range: ") + e.what(), prev);
    }
    ProfilePair q = ctx->psi();
    double upd = distance(q, p);
    res.update_history.push_back(upd);
    if (!std::isfinite(upd)) throw DivergenceDetected("non-finite update", upd);
    if (upd <= cfg.tol * (1.0 + sup_norm(p))) {
      res.profiles = std::move(p);
      res.iterations = it;
      res.final_update_norm = upd;
      res.damping_used = omega;
      res.context = std::move(ctx);
      return res;
    }
    if (it >= cfg.max_iter) throw MaxIterExceeded("fixed point: max_iter reached", upd);
    growing = upd > prev ? growing + 1 : 0;
    if (growing >= 5) {
      if (lowered || omega <= 0.5) throw DivergenceDetected("fixed point: update norm keeps growing", upd);
      omega = 0.5;
      lowered = true;
      growing = 0;
    }
    prev = upd;
    for (std::size_t i = 0; i < p.f1.size(); ++i) p.f1[i] = (1 - omega) * p.f1[i] + omega * q.f1[i];
    for (std::size_t i = 0; i < p.f2.size(); ++i) p.f2[i] = (1 - omega) * p.f2[i] + omega * q.f2[i];
    impose_endpoints(p);
  }
}

using ProfileSampler = std::function<ProfilePair(std::mt19937_64&)>;

// Random smooth elements of K on the grid of (s0, r0): phase 1 in [f1_lo, f1_hi],
// phase 2 in [-1, 0] with the M endpoint values.
inline ProfileSampler random_profile_sampler(const SimilarityProblem& pb, double s0, double r0,
                                             double f1_lo, double f1_hi) {
  std::size_t n1 = pb.cfg.n1, n2 = pb.cfg.n2;
  double kappa = guess_exponent(pb.k);
  return [=](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double c1[4], ph1[4], c2[4];
    for (int k = 0; k < 4; ++k) c1[k] = U(rng) * 2 - 1, ph1[k] = U(rng) * 2 * std::numbers::pi;
    for (int k = 0; k < 4; ++k) c2[k] = (U(rng) * 2 - 1) * 0.5;
    double level = f1_lo + (f1_hi - f1_lo) * U(rng), amp = (f1_hi - f1_lo) * 0.5 * U(rng);
    double kap = kappa * (0.5 + U(rng));
    auto g1 = [&](double eta) {
      double x = (eta - s0) / (r0 - s0), v = level;
      for (int k = 0; k < 4; ++k) v += amp * c1[k] * std::sin((k + 1) * std::numbers::pi * x + ph1[k]) / (k + 1);
      return std::clamp(v, f1_lo, f1_hi);
    };
    auto g2 = [&](double eta) {
      if (std::isinf(eta)) return -1.0;
      double u = r0 / eta, v = -(1.0 - std::pow(u, kap));
      for (int k = 0; k < 4; ++k) v += c2[k] * std::sin((k + 1) * std::numbers::pi * u) / (k + 1);
      return std::clamp(v, -1.0, 0.0);
    };
    ProfilePair p = ProfilePair::sample(s0, r0, n1, n2, g1, g2);
    impose_endpoints(p);
    return p;
  };
}

struct ContractionProbe {
  double ratio = 0;   // max ||Psi f - Psi g|| / ||f - g||
  double ratio1 = 0;  // phase-1 component only
  double ratio2 = 0;  // phase-2 component only
};

inline ContractionProbe contraction_probe(const SimilarityProblem& pb, const FixedPointConfig& cfg,
                                          const ProfileSampler& sampler) {
  std::mt19937_64 rng(cfg.seed);
  ContractionProbe out;
  for (int i = 0; i < cfg.ratio_probe_pairs; ++i) {
    ProfilePair f = sampler(rng), g = sampler(rng);
    double d = distance(f, g);
    if (d == 0) continue;
    ProfilePair Pf = apply_psi(f, pb), Pg = apply_psi(g, pb);
    double d1 = 0, d2 = 0;
    for (std::size_t j = 0; j < Pf.f1.size(); ++j) d1 = std::max(d1, std::abs(Pf.f1[j] - Pg.f1[j]));
    for (std::size_t j = 0; j < Pf.f2.size(); ++j) d2 = std::max(d2, std::abs(Pf.f2[j] - Pg.f2[j]));
    out.ratio1 = std::max(out.ratio1, d1 / d);
    out.ratio2 = std::max(out.ratio2, d2 / d);
    out.ratio = std::max(out.ratio, std::max(d1, d2) / d);
  }
  return out;
}

inline double empirical_contraction_ratio(const SimilarityProblem& pb, const FixedPointConfig& cfg,
                                          const ProfileSampler& sampler) {
  return contraction_probe(pb, cfg, sampler).ratio;
}

}  // namespace contact_stefan
