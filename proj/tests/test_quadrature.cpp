#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "contact_stefan/collocation.hpp"
#include "contact_stefan/quadrature.hpp"

using namespace contact_stefan;

TEST(IntegrateFinite, PolynomialsAndTranscendentals) {
  EXPECT_NEAR(integrate_finite([](double x) { return x * x * x; }, 0.0, 2.0), 4.0, 1e-14);
  EXPECT_NEAR(integrate_finite([](double x) { return std::exp(x); }, -1.0, 3.0), std::exp(3.0) - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(integrate_finite([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-13);
  EXPECT_EQ(integrate_finite([](double x) { return x; }, 1.5, 1.5), 0.0);
}

TEST(IntegrateFinite, IntegrableEndpointSingularity) {
  double v = integrate_finite([](double x) { return 1 / std::sqrt(x); }, 0.0, 1.0, {1e-10, 1e-12, 5000});
  EXPECT_NEAR(v, 2.0, 1e-8);
}

TEST(IntegrateFinite, ErrorsAreReported) {
  EXPECT_THROW(integrate_finite([](double x) { return x; }, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate_finite([](double x) { return 1 / x; }, 0.0, 1.0, {1e-12, 1e-14, 20}), ToleranceNotMet);
  EXPECT_THROW(integrate_finite([](double) { return NAN; }, 0.0, 1.0), ToleranceNotMet);
  EXPECT_THROW(integrate_finite([](double x) { return x; }, 0.0, 1.0, {-1, 1e-12, 10}), std::invalid_argument);
}

TEST(IntegrateSemiInfinite, GaussianTail) {
  for (double r0 : {0.1, 1.0, 2.5}) {
    double v = integrate_semi_infinite([](double x) { return std::exp(-x * x); }, r0);
    EXPECT_NEAR(v, std::sqrt(std::numbers::pi) / 2 * std::erfc(r0), 1e-12) << r0;
  }
}

TEST(IntegrateSemiInfinite, PowerTail) {
  // int_r0^inf x^-3 dx = 1 / (2 r0^2)
  double v = integrate_semi_infinite([](double x) { return std::pow(x, -3.0); }, 2.0);
  EXPECT_NEAR(v, 0.125, 1e-12);
}

TEST(IntegrateSemiInfinite, SlowDecayIsRejected) {
  EXPECT_THROW(integrate_semi_infinite([](double x) { return 1 / x; }, 1.0), DecayViolation);
  EXPECT_THROW(integrate_semi_infinite([](double) { return 1.0; }, 1.0), DecayViolation);
  EXPECT_THROW(integrate_semi_infinite([](double x) { return std::exp(-x); }, 0.0), std::invalid_argument);
}

TEST(CumulativeIntegral, MatchesAntiderivative) {
  std::vector<double> grid = {0.0, 0.3, 0.7, 1.2, 2.0};
  auto out = cumulative_integral([](double x) { return std::cos(x); }, grid);
  ASSERT_EQ(out.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(out[i], std::sin(grid[i]), 1e-13);
  EXPECT_THROW(cumulative_integral([](double x) { return x; }, std::vector<double>{0.0, 1.0, 1.0}),
               std::invalid_argument);
}

TEST(Chebyshev, NodesAndInterpolation) {
  auto x = chebyshev_nodes(-2.0, 3.0, 9);
  EXPECT_EQ(x.front(), -2.0);
  EXPECT_EQ(x.back(), 3.0);
  for (std::size_t i = 1; i < x.size(); ++i) EXPECT_LT(x[i - 1], x[i]);
  std::vector<double> y;
  for (double v : x) y.push_back(v * v * v - 2 * v + 1);
  ChebyshevInterpolant p(x, y);
  for (double t : {-1.7, 0.0, 0.42, 2.9}) EXPECT_NEAR(p(t), t * t * t - 2 * t + 1, 1e-12);
  EXPECT_EQ(p(x[3]), y[3]);
  EXPECT_THROW(chebyshev_nodes(0, 1, 1), std::invalid_argument);
  EXPECT_THROW(ChebyshevInterpolant(x, {1.0}), std::invalid_argument);
}

TEST(Chebyshev, SpectralConvergenceOnSmoothFunction) {
  auto err = [](std::size_t n) {
    auto x = chebyshev_nodes(0.0, 1.0, n);
    std::vector<double> y;
    for (double v : x) y.push_back(std::exp(-3 * v) * std::sin(5 * v));
    ChebyshevInterpolant p(x, y);
    double e = 0;
    for (int i = 0; i <= 200; ++i) {
      double t = i / 200.0;
      e = std::max(e, std::abs(p(t) - std::exp(-3 * t) * std::sin(5 * t)));
    }
    return e;
  };
  EXPECT_LT(err(24), 1e-12);
  EXPECT_LT(err(24), 1e-6 * err(8));
}

TEST(GaussLegendre, ExactForDegree2nMinus1) {
  GaussLegendre g(5);
  double s = 0, w = 0;
  for (int i = 0; i < 5; ++i) s += g.w[i] * std::pow(g.x[i], 9), w += g.w[i];
  EXPECT_NEAR(w, 1.0, 1e-15);
  EXPECT_NEAR(s, 0.1, 1e-15);
}

TEST(RadauIIA, TableauProperties) {
  for (int m : {1, 2, 3, 8}) {
    RadauIIA r(m);
    EXPECT_DOUBLE_EQ(r.c.back(), 1.0);
    double sb = 0;
    for (int j = 0; j < m; ++j) sb += r.b(j);
    EXPECT_NEAR(sb, 1.0, 1e-14) << m;
    // row sums reproduce c (collocation of a constant)
    for (int i = 0; i < m; ++i) {
      double s = 0;
      for (int j = 0; j < m; ++j) s += r.a(i, j);
      EXPECT_NEAR(s, r.c[i], 1e-13) << m;
    }
    // weights integrate polynomials of degree 2m - 2 exactly
    double q = 0;
    for (int j = 0; j < m; ++j) q += r.b(j) * std::pow(r.c[j], 2 * m - 2);
    EXPECT_NEAR(q, 1.0 / (2 * m - 1), 1e-13) << m;
  }
  RadauIIA two(2);
  EXPECT_NEAR(two.c[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(two.a(0, 0), 5.0 / 12.0, 1e-14);
  EXPECT_NEAR(two.a(0, 1), -1.0 / 12.0, 1e-14);
  EXPECT_NEAR(two.b(0), 0.75, 1e-14);
}
