#include <gtest/gtest.h>

#include "support.hpp"

using namespace cs_test;

TEST(FirstRoot, FindsSmallestCrossing) {
  // sin has roots at pi and 2 pi in [1, 7]; the scan must stop at the first
  ScalarRoot r = first_root([](double x) { return std::sin(x); }, 1.0, 7.0, 16, 1e-14, 200, "sin");
  EXPECT_NEAR(r.x, std::numbers::pi, 1e-13);
  EXPECT_GT(r.bisections, 0);
  EXPECT_THROW(first_root([](double x) { return x * x + 1; }, 1.0, 7.0, 16, 1e-14, 200, "pos"), NoSignChange);
  EXPECT_THROW(first_root([](double x) { return x; }, 2.0, 1.0, 16, 1e-14, 200, "empty"), NoSignChange);
}

TEST(Config, BracketsAreValidated) {
  FreeBoundaryConfig c;
  c.s0_bracket = {1.0, 0.5};
  EXPECT_THROW(check_config(c), std::invalid_argument);
  c = {};
  c.r0_policy = R0Policy::certificate;
  EXPECT_THROW(check_config(c), std::invalid_argument);
}

TEST(Inner, ClassicalRootAtOracleS0) {
  ScenarioFile f = load_scenario(scenario_path("classical.yaml"));
  InnerResult r = solve_inner_r0(kClassicalS0, make_problem(f), f.solver);
  EXPECT_NEAR(r.r0_star, kClassicalR0, 1e-10);
  EXPECT_LE(std::abs(r.at_root.ec1), 1e-8);
}

TEST(Outer, ClassicalMatchesOracle) {
  ScenarioFile f = load_scenario(scenario_path("classical.yaml"));
  SimilaritySolution sol = solve_outer_s0(make_problem(f), f.solver);
  EXPECT_NEAR(sol.s0_hat, kClassicalS0, 1e-10);
  EXPECT_NEAR(sol.r0_star, kClassicalR0, 1e-10);
  EXPECT_LE(std::abs(sol.residual_Ec1), f.solver.residual_tol * sol.scale_Ec1);
  EXPECT_LE(std::abs(sol.residual_Ec2), f.solver.residual_tol * sol.scale_Ec2);
  EXPECT_NEAR(sol.W, 10.0, 1e-6);
  EXPECT_FALSE(sol.log.empty());
  EXPECT_FALSE(sol.certificate.has_value());
  EXPECT_LT(sol.empirical_ratio, 1.0);
}

TEST(Outer, PlantedRootIsRecovered) {
  Planted p = plant(2.0, 3.0);
  ScenarioFile f = p.file;
  f.solver.s0_bracket = {1.68, 2.4};
  f.solver.r0_bracket = {1.6802, 4.8};
  SimilaritySolution sol = solve_outer_s0(make_problem(f), f.solver);
  EXPECT_NEAR(sol.s0_hat, 2.0, 1e-9);
  EXPECT_NEAR(sol.r0_star, 3.0, 1e-9);
}

TEST(Outer, PowerLawCertificatePolicy) {
  ScenarioFile f = load_scenario(scenario_path("powerlaw.yaml"));
  SimilaritySolution sol = solve_outer_s0(make_problem(f), f.solver);
  EXPECT_NEAR(sol.s0_hat, 2.6328438855453351, 1e-9);
  EXPECT_NEAR(sol.r0_star, 6.2946304495591159, 1e-9);
  ASSERT_TRUE(sol.certificate.has_value());
  EXPECT_TRUE(sol.certificate->in_Sigma);
  EXPECT_LT(sol.certificate->eps.eps, 1.0);
  EXPECT_LT(sol.s0_hat, sol.r0_star);
}

TEST(Outer, NoSignChangeIsReported) {
  ScenarioFile f = load_scenario(scenario_path("classical.yaml"));
  f.solver.s0_bracket = {0.5, 0.9};
  EXPECT_THROW(solve_outer_s0(make_problem(f), f.solver), NoSignChange);
  // inner bracket below the melting front
  f.solver.s0_bracket = {0.2, 0.5};
  f.solver.r0_bracket = {0.1, 0.21};
  try {
    solve_outer_s0(make_problem(f), f.solver);
    ADD_FAILURE() << "expected InnerFailure";
  } catch (const InnerFailure& e) {
    EXPECT_EQ(e.cause, InnerFailure::Cause::no_sign_change);
    EXPECT_EQ(e.s0, 0.2);
  }
}

TEST(Residuals, SignsAroundTheRoot) {
  // the first scalar equation changes sign across r0* at fixed s0
  ScenarioFile f = load_scenario(scenario_path("classical.yaml"));
  SimilarityProblem pb = make_problem(f);
  FixedPointConfig cfg = f.solver.fixed_point;
  double lo = residual_Ec1(kClassicalS0, kClassicalR0 * 0.98, pb, cfg);
  double hi = residual_Ec1(kClassicalS0, kClassicalR0 * 1.02, pb, cfg);
  EXPECT_LT(lo * hi, 0.0);
  EXPECT_NEAR(residual_Ec2(kClassicalS0, kClassicalR0, pb, cfg), 0.0, 1e-7);
}
