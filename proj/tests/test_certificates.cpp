#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace cs_test;

namespace {

ScenarioFile powerlaw() { return load_scenario(scenario_path("powerlaw.yaml")); }

}  // namespace

TEST(Bounds, Validation) {
  AssumptionBounds b;
  EXPECT_NO_THROW(validate(b));
  b.L1m = 2;
  EXPECT_THROW(validate(b), NonPositiveParameter);
  b = {};
  b.mu = 2;
  EXPECT_THROW(validate(b), NonPositiveParameter);
  b = {};
  b.K2t = -1;
  EXPECT_THROW(validate(b), NonPositiveParameter);
  b = {};
  b.N2m = 0;
  EXPECT_THROW(validate(b), NonPositiveParameter);
}

TEST(HBounds, ClosedForm) {
  AssumptionBounds b;
  b.K1m = 0.5, b.K1M = 2, b.K2M = 3, b.K1t = 0.1, b.K2t = 0.2;
  HBounds h = compute_H_bounds(2.0, 4.0, b, 0.5);  // kappa = 2.5
  double a = std::pow(2.0, -2.5), c = std::pow(4.0, -2.5);
  EXPECT_NEAR(h.H_inf, 0.5 / 2.5 * (a - c), 1e-15);
  EXPECT_NEAR(h.H_sup, (2 * a + 3 * c) / 2.5, 1e-15);
  EXPECT_NEAR(h.H_tilde, (0.1 * a + 0.2 * c) / 2.5, 1e-15);
  HBounds inf = compute_H_bounds(2.0, kInf, b, 0.5);
  EXPECT_NEAR(inf.H_inf, 0.5 / 2.5 * a, 1e-15);
}

TEST(PhaseBounds, SandwichTheKernels) {
  ScenarioFile f = powerlaw();
  SimilarityProblem pb = make_problem(f);
  const AssumptionBounds& b = *f.bounds;
  std::mt19937_64 rng(17);
  for (auto [s0, r0] : {std::pair{2.63, 6.29}, std::pair{1.5, 3.0}, std::pair{2.0, 12.0}}) {
    Phase1Bounds p1 = compute_phase1_bounds(s0, r0, b, pb.k);
    Phase2Bounds p2 = compute_phase2_bounds(s0, r0, b, pb.k);
    auto sampler = random_profile_sampler(pb, s0, r0, 0.0, pb.k.B);
    for (int i = 0; i < 4; ++i) {
      KernelContext c(pb, sampler(rng));
      double tol = 1 + 1e-12;
      EXPECT_GE(c.E1_r0() * tol, p1.E1_inf);
      EXPECT_LE(c.H1(r0), p1.H1_sup * tol);
      EXPECT_GE(c.H1(r0) * tol, p1.H1_inf(r0));
      EXPECT_LE(c.G1_r0(), p1.G1_sup * tol);
      EXPECT_GE(c.G1_r0() * tol, p1.G1_inf(r0));
      EXPECT_GE(c.E2(kInf) * tol, p2.E2_inf);
      EXPECT_LE(c.Phi2_inf(), p2.Phi2_sup * tol);
      EXPECT_GE(c.Phi2_inf() * tol, p2.Phi2_inf(kInf));
      EXPECT_LE(c.G2_inf(), p2.G2_sup * tol);
      EXPECT_GE(c.G2_inf() * tol, p2.G2_inf(kInf));
    }
  }
}

TEST(Epsilons, DecreaseInR0AndHaveLimits) {
  ScenarioFile f = powerlaw();
  DimensionlessConstants k = derive_constants(f.scenario);
  const AssumptionBounds& b = *f.bounds;
  double s0 = 2.0;
  Epsilons prev = compute_epsilons(s0, 1.05 * s0, b, k);
  for (double r0 = 1.1 * s0; r0 < 1e3 * s0; r0 *= 1.3) {
    Epsilons e = compute_epsilons(s0, r0, b, k);
    EXPECT_LT(e.eps1, prev.eps1) << r0;
    EXPECT_LT(e.eps2, prev.eps2) << r0;
    EXPECT_EQ(e.eps, std::max(e.eps1, e.eps2));
    prev = e;
  }
  EXPECT_NEAR(compute_eps1(s0, 1e4 * s0, b, k) / j1(s0, b, k), 1.0, 1e-3);
  EXPECT_LT(compute_epsilons(s0, 1e8 * s0, b, k).eps2, 1e-6);
}

TEST(LogGridRoot, FindsCrossing) {
  RootSearch r = log_grid_root([](double x) { return 1 / x; }, 0.25, 0.1, 100, true);
  ASSERT_TRUE(r.root);
  EXPECT_NEAR(*r.root, 4.0, 1e-8);
  EXPECT_TRUE(r.monotone);
  RootSearch none = log_grid_root([](double x) { return 1 / x; }, 100.0, 0.1, 100, true);
  EXPECT_FALSE(none.root);
  EXPECT_NE(none.status, "ok");
  RootSearch bumpy = log_grid_root([](double x) { return std::sin(x); }, 0.0, 1.0, 10, true);
  EXPECT_FALSE(bumpy.monotone);
}

TEST(Region, PowerLawSolutionIsInSigma) {
  ScenarioFile f = powerlaw();
  DimensionlessConstants k = derive_constants(f.scenario);
  const AssumptionBounds& b = *f.bounds;
  Certificate c = certify(2.6328438855453351, 6.2946304495591159, b, k);
  EXPECT_TRUE(c.in_Sigma) << c.sigma_reason;
  EXPECT_LT(c.eps.eps, 1.0);
  ASSERT_TRUE(c.region.s1.root);
  ASSERT_TRUE(c.region.r0_bar);
  EXPECT_GT(2.6328438855453351, *c.region.s1.root);
  EXPECT_NEAR(j1(*c.region.s1.root, b, k), 1.0, 1e-8);
  // at r0_bar the larger epsilon equals one
  Epsilons e = compute_epsilons(2.6328438855453351, *c.region.r0_bar, b, k);
  EXPECT_NEAR(std::max(e.eps1, e.eps2), 1.0, 1e-6);
  EXPECT_TRUE(sigma_membership(2.6328438855453351, 6.2946304495591159, b, k));
}

TEST(Region, ReasonsOutsideSigma) {
  ScenarioFile f = powerlaw();
  DimensionlessConstants k = derive_constants(f.scenario);
  const AssumptionBounds& b = *f.bounds;
  Certificate small = certify(0.5, 3.0, b, k);
  EXPECT_FALSE(small.in_Sigma);
  EXPECT_EQ(small.sigma_reason, "s0<=s1");
  Certificate close = certify(2.6, 2.61, b, k);
  EXPECT_FALSE(close.in_Sigma);
  EXPECT_EQ(close.sigma_reason, "r0<=r0_bar");
  EXPECT_FALSE(sigma_membership(2.6, 2.61, b, k));
  EXPECT_THROW(certify(2.0, 1.0, b, k), DomainError);
}

TEST(Assumptions, ShippedBoundsHoldAndViolationsAreCaught) {
  ScenarioFile f = powerlaw();
  SimilarityProblem pb = make_problem(f);
  DimensionlessCoefficients fn = build_dimensionless_coefficients(f.scenario);
  std::mt19937_64 rng(8);
  auto sampler = random_profile_sampler(pb, 2.0, 5.0, 0.0, pb.k.B);
  AssumptionProbe probe;
  for (int i = 0; i < 4; ++i) probe.profiles.push_back(sampler(rng));
  AssumptionReport ok = verify_assumptions(fn, *f.bounds, probe);
  EXPECT_TRUE(ok.all_pass());
  EXPECT_EQ(ok.checks.size(), 12u);

  AssumptionBounds tight = *f.bounds;
  tight.K1M = 0.9;
  tight.N2t = 0;
  AssumptionReport bad = verify_assumptions(fn, tight, probe);
  EXPECT_FALSE(bad.all_pass());
  int failed = 0;
  for (const auto& c : bad.checks)
    if (!c.pass) {
      ++failed;
      EXPECT_TRUE(c.name == "K1 envelope" || c.name == "N2 Lipschitz") << c.name;
    }
  EXPECT_EQ(failed, 2);
}
