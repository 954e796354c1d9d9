#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace cs_test;

namespace {

SimilarityProblem powerlaw_problem() { return make_problem(load_scenario(scenario_path("powerlaw.yaml"))); }

}  // namespace

TEST(Iterate, ConvergesToFixedPoint) {
  SimilarityProblem pb = powerlaw_problem();
  FixedPointConfig cfg;
  cfg.tol = 1e-12;
  FixedPointResult r = iterate(initial_guess(pb, 2.5, 6.0), pb, cfg);
  EXPECT_LE(r.final_update_norm, cfg.tol * (1 + sup_norm(r.profiles)));
  EXPECT_EQ(r.update_history.size(), std::size_t(r.iterations + 1));
  ASSERT_TRUE(r.context);
  EXPECT_LE(distance(r.context->psi(), r.profiles), 1e-11);
  EXPECT_TRUE(in_M(r.profiles));
  EXPECT_NEAR(r.profiles.f1.front(), pb.k.B, 0.2);
}

TEST(Iterate, UpdatesShrinkGeometrically) {
  SimilarityProblem pb = powerlaw_problem();
  FixedPointConfig cfg;
  cfg.tol = 1e-13;
  FixedPointResult r = iterate(initial_guess(pb, 2.5, 6.0), pb, cfg);
  ASSERT_GE(r.update_history.size(), 3u);
  for (std::size_t i = 1; i < r.update_history.size(); ++i)
    if (r.update_history[i - 1] > 1e-12) EXPECT_LT(r.update_history[i], 0.5 * r.update_history[i - 1]);
}

TEST(Iterate, StartIndependent) {
  SimilarityProblem pb = make_problem(strong_power_law());
  FixedPointConfig cfg;
  cfg.tol = 1e-12;
  auto sampler = random_profile_sampler(pb, 2.0, 5.0, -0.5, 0.7);
  std::mt19937_64 rng(9);
  FixedPointResult a = iterate(sampler(rng), pb, cfg), b = iterate(sampler(rng), pb, cfg);
  EXPECT_LE(distance(a.profiles, b.profiles), 10 * cfg.tol);
}

TEST(Iterate, ClosedFormIsAOneStepFixedPoint) {
  // with f-independent coefficients Psi is constant, so one update lands on the fixed point
  ClosedFormFamily fam;
  SimilarityProblem pb = fam.problem();
  FixedPointConfig cfg;
  cfg.tol = 1e-13;
  FixedPointResult r = iterate(fam.profiles(pb), pb, cfg);
  EXPECT_EQ(r.iterations, 1);
  auto eta = r.profiles.eta1();
  for (std::size_t i = 0; i < eta.size(); ++i) EXPECT_NEAR(r.profiles.f1[i], fam.V1(eta[i]), 1e-12);
}

TEST(Iterate, MaxIterAndConfigErrors) {
  SimilarityProblem pb = powerlaw_problem();
  FixedPointConfig cfg;
  cfg.tol = 1e-15;
  cfg.max_iter = 2;
  EXPECT_THROW(iterate(initial_guess(pb, 2.5, 6.0), pb, cfg), MaxIterExceeded);
  try {
    iterate(initial_guess(pb, 2.5, 6.0), pb, cfg);
  } catch (const FixedPointFailure& e) {
    EXPECT_GT(e.last_update_norm, 0.0);
  }
  cfg = {};
  cfg.damping = 0;
  EXPECT_THROW(iterate(initial_guess(pb, 2.5, 6.0), pb, cfg), std::invalid_argument);
  cfg = {};
  cfg.tol = -1;
  EXPECT_THROW(iterate(initial_guess(pb, 2.5, 6.0), pb, cfg), std::invalid_argument);
}

TEST(Iterate, DampingReachesTheSameFixedPoint) {
  SimilarityProblem pb = powerlaw_problem();
  FixedPointConfig cfg;
  cfg.tol = 1e-12;
  FixedPointResult full = iterate(initial_guess(pb, 2.5, 6.0), pb, cfg);
  cfg.damping = 0.6;
  FixedPointResult damped = iterate(initial_guess(pb, 2.5, 6.0), pb, cfg);
  EXPECT_GT(damped.iterations, full.iterations);
  EXPECT_LE(distance(full.profiles, damped.profiles), 1e-10);
}

TEST(Contraction, ProbeIsBelowOneAndSeeded) {
  SimilarityProblem pb = powerlaw_problem();
  FixedPointConfig cfg;
  auto sampler = random_profile_sampler(pb, 2.5, 6.0, 0.0, pb.k.B);
  ContractionProbe a = contraction_probe(pb, cfg, sampler), b = contraction_probe(pb, cfg, sampler);
  EXPECT_LT(a.ratio, 1.0);
  EXPECT_GT(a.ratio, 0.0);
  EXPECT_EQ(a.ratio, b.ratio);
  EXPECT_EQ(a.ratio, std::max(a.ratio1, a.ratio2));
}

TEST(Sampler, ProfilesStayInRange) {
  SimilarityProblem pb = powerlaw_problem();
  auto sampler = random_profile_sampler(pb, 1.5, 3.0, -0.2, 0.4);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    ProfilePair p = sampler(rng);
    EXPECT_TRUE(in_M(p));
    for (double v : p.f1) EXPECT_TRUE(v >= -0.2 && v <= 0.4);
    for (double v : p.f2) EXPECT_TRUE(v >= -1.0 && v <= 0.0);
  }
}

TEST(Helpers, RescaleAndEndpoints) {
  SimilarityProblem pb = powerlaw_problem();
  ProfilePair p = initial_guess(pb, 2.0, 4.0);
  EXPECT_EQ(p.f1.front(), pb.k.B);
  EXPECT_EQ(p.f1.back(), 0.0);
  ProfilePair q = rescale(p, 3.0, 7.0);
  EXPECT_EQ(q.s0, 3.0);
  EXPECT_EQ(q.r0, 7.0);
  EXPECT_EQ(q.f1, p.f1);
  q.f2.front() = 0.3;
  impose_endpoints(q);
  EXPECT_TRUE(in_M(q));
  EXPECT_EQ(apply_V1(p, pb), KernelContext(pb, p).V1_nodes());
  EXPECT_EQ(apply_V2(p, pb), KernelContext(pb, p).V2_nodes());
}
