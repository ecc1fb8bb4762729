#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// Lowest eigenvalues of -g'' + beta g = w alpha^2 g, g(+-1) = 0, from the
/// symmetric tridiagonal B^{-1/2} (-D2 + beta) B^{-1/2} on n intervals.
inline std::vector<double> dirichlet_values_fd(const std::function<double(double)>& alpha,
                                               const std::function<double(double)>& beta, int n,
                                               std::size_t count) {
  const double h = 2.0 / n;
  const int m = n - 1;
  Eigen::VectorXd diag(m), off(m - 1), a(m);
  for (int i = 0; i < m; ++i) {
    const double x = -1.0 + (i + 1) * h;
    a(i) = std::abs(alpha(x));
    diag(i) = (2.0 / (h * h) + beta(x)) / (a(i) * a(i));
  }
  for (int i = 0; i + 1 < m; ++i) off(i) = -1.0 / (h * h * a(i) * a(i + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (std::size_t k = 0; k < count && k < static_cast<std::size_t>(m); ++k) out.push_back(es.eigenvalues()(k));
  return out;
}

/// Richardson-extrapolated second-order values: (4 l(2n) - l(n)) / 3.
inline std::vector<double> dirichlet_values(const std::function<double(double)>& alpha,
                                            const std::function<double(double)>& beta, std::size_t count,
                                            int n = 1024) {
  const auto coarse = dirichlet_values_fd(alpha, beta, n, count);
  const auto fine = dirichlet_values_fd(alpha, beta, 2 * n, count);
  std::vector<double> out(coarse.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
  return out;
}

/// Complex Gamma by the Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula for Re z < 1/2.
inline std::complex<double> gamma(std::complex<double> z) {
  using C = std::complex<double>;
  constexpr double pi = std::numbers::pi;
  static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma(1.0 - z));
  z -= 1.0;
  C x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
  const C t = z + 7.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double r = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = r;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * r * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (r * p1 - p0) / (r * r - 1);
      const double dr = p1 / dp;
      r -= dr;
      if (std::abs(dr) < 1e-16) break;
    }
    x[i] = r;
    w[i] = 2.0 / ((1 - r * r) * dp * dp);
  }
  return {x, w};
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64,
                        int order = 16) {
  const auto [x, w] = gauss_legendre(order);
  const double h = (b - a) / panels;
  double acc = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) acc += w[i] * f(mid + 0.5 * h * x[i]);
  }
  return 0.5 * h * acc;
}

}  // namespace oracle
