#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace contact_stefan {

// Chebyshev points of the second kind mapped onto [lo, hi], ascending.
inline std::vector<double> chebyshev_nodes(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("chebyshev_nodes: need at least 2 nodes");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c = std::cos(std::numbers::pi * double(i) / double(n - 1));
    x[i] = lo + (hi - lo) * 0.5 * (1.0 - c);
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

// Barycentric interpolation on Chebyshev points of the second kind, in any
// node order that follows the cosine ordering (ascending or descending).
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;
  ChebyshevInterpolant(std::vector<double> nodes, std::vector<double> values)
      : x_(std::move(nodes)), y_(std::move(values)), w_(x_.size()) {
    if (x_.size() != y_.size() || x_.size() < 2)
      throw std::invalid_argument("ChebyshevInterpolant: size mismatch");
    for (std::size_t j = 0; j < w_.size(); ++j) w_[j] = (j % 2 == 0) ? 1.0 : -1.0;
    w_.front() *= 0.5;
    w_.back() *= 0.5;
  }

  double operator()(double x) const {
    double num = 0, den = 0;
    for (std::size_t j = 0; j < x_.size(); ++j) {
      double d = x - x_[j];
      if (d == 0) return y_[j];
      double t = w_[j] / d;
      num += t * y_[j];
      den += t;
    }
    return num / den;
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, w_;
};

inline double legendre(int n, double x) {
  double p0 = 1, p1 = x;
  if (n == 0) return p0;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Gauss-Legendre rule on [0, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p = legendre(n, t), pm = legendre(n - 1, t);
        double dp = n * (t * p - pm) / (t * t - 1);
        double dt = p / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      double p = legendre(n, t), pm = legendre(n - 1, t);
      double dp = n * (t * p - pm) / (t * t - 1);
      x[n - 1 - i] = 0.5 * (1 + t);
      w[n - 1 - i] = 1.0 / ((1 - t * t) * dp * dp);
    }
  }
};

// Radau IIA collocation tableau with m stages on [0, 1]; c[m-1] = 1 and the
// last row of A equals the quadrature weights.
struct RadauIIA {
  int m;
  std::vector<double> c;
  std::vector<double> A;  // row-major m x m

  explicit RadauIIA(int stages) : m(stages), c(stages), A(stages * stages) {
    if (m < 1) throw std::invalid_argument("RadauIIA: stages >= 1");
    // interior nodes are roots of P_m - P_{m-1} on (-1, 1), excluding x = 1
    auto r = [&](double x) { return legendre(m, x) - legendre(m - 1, x); };
    std::vector<double> roots;
    const int scan = 20000;
    double xa = -1.0, ra = r(xa);
    for (int i = 1; i <= scan && int(roots.size()) < m - 1; ++i) {
      double xb = -1.0 + 2.0 * i / scan, rb = r(xb);
      if (xb >= 1.0) break;
      if (ra == 0) {
        roots.push_back(xa);
      } else if (ra * rb < 0) {
        double lo = xa, hi = xb, flo = ra;
        for (int k = 0; k < 200; ++k) {
          double mid = 0.5 * (lo + hi), fm = r(mid);
          if (flo * fm <= 0) hi = mid; else lo = mid, flo = fm;
        }
        roots.push_back(0.5 * (lo + hi));
      }
      xa = xb, ra = rb;
    }
    if (int(roots.size()) != m - 1) throw std::logic_error("RadauIIA: node search failed");
    for (int i = 0; i < m - 1; ++i) c[i] = 0.5 * (roots[i] + 1.0);
    c[m - 1] = 1.0;
    GaussLegendre gl(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int q = 0; q < m; ++q) s += gl.w[q] * lagrange(j, c[i] * gl.x[q]);
        A[i * m + j] = c[i] * s;
      }
  }

  double a(int i, int j) const { return A[i * m + j]; }
  double b(int j) const { return A[(m - 1) * m + j]; }

  // Lagrange basis polynomial j on the stage nodes, evaluated at s.
  double lagrange(int j, double s) const {
    double v = 1;
    for (int k = 0; k < m; ++k)
      if (k != j) v *= (s - c[k]) / (c[j] - c[k]);
    return v;
  }
};

// Solves a small dense system in place by Gaussian elimination with partial pivoting.
inline void solve_dense(std::vector<double>& Mat, std::vector<double>& rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(Mat[r * n + col]) > std::abs(Mat[piv * n + col])) piv = r;
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(Mat[col * n + k], Mat[piv * n + k]);
      std::swap(rhs[col], rhs[piv]);
    }
    double d = Mat[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      double f = Mat[r * n + col] / d;
      if (f == 0) continue;
      for (int k = col; k < n; ++k) Mat[r * n + k] -= f * Mat[col * n + k];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < n; ++k) s -= Mat[r * n + k] * rhs[k];
    rhs[r] = s / Mat[r * n + r];
  }
}

}  // namespace contact_stefan
