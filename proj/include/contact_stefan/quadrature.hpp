#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace contact_stefan {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
};

inline void check_config(const QuadratureConfig& cfg) {
  if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || cfg.max_subdivisions < 8)
    throw std::invalid_argument("QuadratureConfig: tolerances must be > 0, max_subdivisions >= 8");
}

namespace detail {

// 7-point Gauss / 15-point Kronrod pair.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class G>
Segment gk15(const G& g, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = g(c);
  double resk = fc * kWgk[7], resg = fc * kWg[3], resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 3; ++j) {
    int k = 2 * j + 1;
    double x = h * kXgk[k];
    double f1 = g(c - x), f2 = g(c + x);
    fv1[k] = f1, fv2[k] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[k] * (f1 + f2);
    resabs += kWgk[k] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    int k = 2 * j;
    double x = h * kXgk[k];
    double f1 = g(c - x), f2 = g(c + x);
    fv1[k] = f1, fv2[k] = f2;
    resk += kWgk[k] * (f1 + f2);
    resabs += kWgk[k] * (std::abs(f1) + std::abs(f2));
  }
  double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int k = 0; k < 7; ++k) resasc += kWgk[k] * (std::abs(fv1[k] - mean) + std::abs(fv2[k] - mean));
  resk *= h;
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = std::abs((resk - resg * h));
  if (resasc != 0 && err != 0) err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
  double round = 50 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50 * std::numeric_limits<double>::epsilon()))
    err = std::max(round, err);
  return {a, b, resk, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of g over [a, b].
template <class G>
double integrate_finite(const G& g, double a, double b, const QuadratureConfig& cfg = {}) {
  check_config(cfg);
  if (!(a <= b)) throw std::invalid_argument("integrate_finite: requires a <= b");
  if (a == b) return 0.0;
  std::priority_queue<detail::Segment> heap;
  detail::Segment first = detail::gk15(g, a, b);
  heap.push(first);
  double total = first.value, err = first.error;
  for (int n = 1;; ++n) {
    if (!std::isfinite(total)) throw ToleranceNotMet("integrate_finite: non-finite integrand");
    if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) return total;
    if (n >= cfg.max_subdivisions)
      throw ToleranceNotMet("integrate_finite: subdivision budget exhausted on [" +
                            std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(err));
    detail::Segment worst = heap.top();
    heap.pop();
    double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b))
      throw ToleranceNotMet("integrate_finite: interval cannot be subdivided further");
    detail::Segment l = detail::gk15(g, worst.a, m), r = detail::gk15(g, m, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
}

// Compactified integrand of the tail integral: u = r0/eta maps [r0, inf) onto (0, 1].
template <class G>
double tail_integrand(const G& g, double r0, double u) {
  return g(r0 / u) * r0 / (u * u);
}

// Probe of the compactified integrand near u = 0; u*|h(u)| must shrink for integrability.
template <class G>
void check_tail_decay(const G& g, double r0, const char* what) {
  const double probes[] = {1e-3, 1e-5, 1e-7};
  double q[3];
  for (int i = 0; i < 3; ++i) {
    q[i] = std::abs(tail_integrand(g, r0, probes[i])) * probes[i];
    if (!std::isfinite(q[i]))
      throw DecayViolation(std::string(what) + ": tail integrand not finite near infinity");
  }
  if (q[2] > 0 && !(q[2] < q[1] && q[1] < q[0]))
    throw DecayViolation(std::string(what) + ": tail integrand does not decay fast enough");
}

template <class G>
double integrate_semi_infinite(const G& g, double r0, const QuadratureConfig& cfg = {}) {
  if (!(r0 > 0)) throw std::invalid_argument("integrate_semi_infinite: requires r0 > 0");
  check_tail_decay(g, r0, "integrate_semi_infinite");
  return integrate_finite([&](double u) { return tail_integrand(g, r0, u); }, 0.0, 1.0, cfg);
}

// Partial integrals of g from grid[0] to each grid node.
template <class G>
std::vector<double> cumulative_integral(const G& g, const std::vector<double>& grid,
                                        const QuadratureConfig& cfg = {}) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("cumulative_integral: grid must be strictly ascending");
    out[i] = out[i - 1] + integrate_finite(g, grid[i - 1], grid[i], cfg);
  }
  return out;
}

}  // namespace contact_stefan
