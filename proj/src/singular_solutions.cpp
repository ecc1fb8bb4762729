#include "degenlab/singular_solutions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace degenlab {

namespace {

constexpr double kPi = std::numbers::pi;

// sixth-order central stencils
constexpr double kD1[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
constexpr double kD2[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};

double smoothstep7(double r) {
  if (r <= 0) return 0;
  if (r >= 1) return 1;
  return r * r * r * r * (35 - 84 * r + 70 * r * r - 20 * r * r * r);
}

void check_cutoff(const CutoffParams& c) {
  if (!(c.t1 > 0) || !(c.t1 < c.t2) || !std::isfinite(c.t2))
    fail(ErrorKind::parameter, "cutoff needs 0 < t1 < t2 < inf");
}

/// j-th Dirichlet value, widening the scan until it is found.
double dirichlet_value(const CoefficientProfile& profile, std::size_t j) {
  double w_max = (std::abs(profile.max_beta()) + 3.0 * (j + 1.0) * (j + 1.0)) / profile.min_alpha_sq();
  for (int attempt = 0; attempt < 40; ++attempt, w_max *= 2) {
    const Sigma0Scan scan = find_sigma0(profile, w_max, 0);
    if (scan.roots.size() > j) return scan.roots[j];
  }
  fail(ErrorKind::parameter, "index j = " + std::to_string(j) + " not reached by the Dirichlet scan");
}

}  // namespace

double cutoff_eta(double t, const CutoffParams& c) { return 1.0 - smoothstep7((t - c.t1) / (c.t2 - c.t1)); }

double SingularSolution::t_profile(double t) const {
  if (!(t > 0) || t >= cutoff.t2) return 0.0;
  const double eta = cutoff_eta(t, cutoff);
  if (m == 1) return std::pow(t, gamma - 0.5) * eta;
  return std::exp(-lambda * std::pow(t, 1.0 - m)) * eta;
}

double SingularSolution::value(double x, double t) const {
  if (std::abs(x) >= 1.0) return 0.0;
  return g.value_at(x) * t_profile(t);
}

SingularSolution build_singular(const CoefficientProfile& profile, std::size_t j, const CutoffParams& cutoff) {
  check_cutoff(cutoff);
  SingularSolution sol;
  sol.j = j;
  sol.cutoff = cutoff;
  sol.w = dirichlet_value(profile, j);
  if (sol.w <= -0.25)
    fail(ErrorKind::parameter, "w_j <= -1/4 gives a complex exponent; only real exponents are constructed");
  sol.gamma = std::sqrt(sol.w + 0.25);
  sol.g = eigenfunction(profile, sol.w);
  return sol;
}

SingularSolution higher_order_singular(const CoefficientProfile& profile, int m, std::size_t j,
                                       const CutoffParams& cutoff) {
  if (m < 2) fail(ErrorKind::parameter, "exponential-type solutions need m >= 2");
  check_cutoff(cutoff);
  SingularSolution sol;
  sol.j = j;
  sol.m = m;
  sol.cutoff = cutoff;
  sol.w = dirichlet_value(profile, j);
  if (sol.w <= 0)
    fail(ErrorKind::parameter, "w_j <= 0: no admissible lambda with positive real part");
  sol.lambda = std::sqrt(sol.w) / (m - 1);
  sol.g = eigenfunction(profile, sol.w);
  return sol;
}

StripField sample_singular(const SingularSolution& sol, const StripGrid& grid) {
  StripField f(grid);
  std::vector<double> gx(grid.nx);
  for (int i = 1; i + 1 < grid.nx; ++i) gx[i] = sol.g.value_at(grid.x(i));
  for (int n = 0; n < grid.ntau; ++n) {
    const double h = sol.t_profile(grid.t(n));
    for (int i = 0; i < grid.nx; ++i) f.at(Half::positive, i, n) = gx[i] * h;
  }
  return f;
}

// --- residual ----------------------------------------------------------------

SingularResidualReport residual_check(const CoefficientProfile& profile, const SingularSolution& sol,
                                      const StripGrid& grid) {
  grid.validate();
  SingularResidualReport rep;
  const int nx = grid.nx;
  const double hx = grid.hx();
  std::vector<double> gx(nx), a2(nx), beta(nx);
  for (int i = 0; i < nx; ++i) {
    const double x = grid.x(i);
    gx[i] = sol.g.value_at(x);
    a2[i] = profile.alpha(x) * profile.alpha(x);
    beta[i] = profile.beta(x);
  }

  // Coordinate y: u = log t (m = 1) or v = t^{1-m} (m >= 2), with the
  // t-part of the operator  D_u^2 + D_u  or  (1-m)^2 D_v^2.
  const bool power = sol.m == 1;
  double y_lo, y_hi, dy;
  if (power) {
    dy = grid.du();
    y_lo = grid.u_min;
    y_hi = std::log(sol.cutoff.t2) + 8 * dy;
  } else {
    const double span = 20.0 / sol.lambda;
    dy = span / 2000;
    y_lo = 0.9 * std::pow(sol.cutoff.t2, 1.0 - sol.m);
    y_hi = std::pow(sol.cutoff.t1, 1.0 - sol.m) + span;
  }
  const int ny = static_cast<int>(std::floor((y_hi - y_lo) / dy)) + 1;
  auto t_of = [&](double y) { return power ? std::exp(y) : std::pow(y, 1.0 / (1.0 - sol.m)); };
  std::vector<double> hy(ny), ty(ny);
  for (int n = 0; n < ny; ++n) {
    ty[n] = t_of(y_lo + n * dy);
    hy[n] = sol.t_profile(ty[n]);
  }

  if (power) {
    const double p = sol.gamma - 0.5;
    double d1 = 0, d2 = 0;
    for (int k = 0; k < 7; ++k) {
      d1 += kD1[k] * std::exp(p * (k - 3) * dy);
      d2 += kD2[k] * std::exp(p * (k - 3) * dy);
    }
    rep.identity_error = std::abs(d2 / (dy * dy) + d1 / dy - (sol.gamma * sol.gamma - 0.25));
  }

  const double tcoef = power ? 1.0 : (1.0 - sol.m) * (1.0 - sol.m);
  for (int n = 3; n + 3 < ny; ++n) {
    bool core = true, touched = false;
    for (int k = -3; k <= 3; ++k) {
      const double t = ty[n + k];
      if (t > sol.cutoff.t1) core = false;
      if (t > sol.cutoff.t1 && t < sol.cutoff.t2) touched = true;
    }
    if (!core && !touched) continue;
    double ht = 0;
    for (int k = 0; k < 7; ++k) ht += kD2[k] * hy[n + k - 3];
    ht /= dy * dy;
    if (power) {
      double h1 = 0;
      for (int k = 0; k < 7; ++k) h1 += kD1[k] * hy[n + k - 3];
      ht += h1 / dy;
    }
    ht *= tcoef;

    double res = 0, sx = 0, st = 0, sb = 0, umax = 0;
    for (int i = 3; i + 3 < nx; ++i) {
      double gxx = 0;
      for (int k = 0; k < 7; ++k) gxx += kD2[k] * gx[i + k - 3];
      gxx /= hx * hx;
      const double tx = -gxx * hy[n];
      const double tt = -a2[i] * gx[i] * ht;
      const double tb = beta[i] * gx[i] * hy[n];
      res = std::max(res, std::abs(tx + tt + tb));
      sx = std::max(sx, std::abs(tx));
      st = std::max(st, std::abs(tt));
      sb = std::max(sb, std::abs(tb));
      umax = std::max(umax, std::abs(gx[i] * hy[n]));
    }
    const double scale = sx + st + sb;
    if (core) {
      if (scale > 0) rep.core_residual = std::max(rep.core_residual, res / scale);
      ++rep.core_columns;
    } else {
      rep.transition_residual = std::max(rep.transition_residual, res);
      rep.transition_bound = std::max(rep.transition_bound, scale);
    }
  }
  return rep;
}

std::vector<double> derivative_ladder(const SingularSolution& sol, double h, int max_order, int x_nodes) {
  if (!(h > 0) || max_order < 1 || x_nodes < 2) fail(ErrorKind::parameter, "invalid derivative ladder request");
  double gmax = 0;
  for (int i = 0; i < x_nodes; ++i) gmax = std::max(gmax, std::abs(sol.g.value_at(-1.0 + 2.0 * i / (x_nodes - 1))));
  std::vector<double> out;
  for (int k = 1; k <= max_order; ++k) {
    double acc = 0, binom = 1;
    for (int i = 0; i <= k; ++i) {
      acc += ((k - i) % 2 == 0 ? 1.0 : -1.0) * binom * sol.t_profile(i * h);
      binom = binom * (k - i) / (i + 1);
    }
    out.push_back(gmax * std::abs(acc) / std::pow(h, k));
  }
  return out;
}

// --- Fourier transform of the power profile ----------------------------------

namespace {
constexpr double kRemainderWindow = 64.0;
constexpr int kRemainderPoints = 1 << 16;
}  // namespace

PowerCutoffTransform::PowerCutoffTransform(double a, const CutoffParams& cutoff, int terms) : a_(a), terms_(terms) {
  check_cutoff(cutoff);
  if (!(a > -1)) fail(ErrorKind::parameter, "t^a needs a > -1 to be locally integrable");
  if (cutoff.t2 > 0.5 * kRemainderWindow) fail(ErrorKind::parameter, "cutoff support too long for the transform window");
  double fact = 1;
  for (int k = 0; k <= terms; ++k) {
    if (k > 0) fact *= k;
    coef_.push_back(std::tgamma(a + k + 1) / fact);
  }
  const int n = kRemainderPoints;
  const double dt = kRemainderWindow / n;
  dxi_ = 2 * kPi / kRemainderWindow;
  xi_max_ = dxi_ * (n / 2 - 1);

  // r(t) = t^a (eta(t) - e^{-t} E_K(t)), E_K the degree-K Taylor polynomial of e^t
  std::vector<Complex> r(n);
  for (int i = 1; i < n; ++i) {
    const double t = i * dt;
    double diff;
    if (t <= cutoff.t1) {
      // 1 - e^{-t} E_K(t) = e^{-t} sum_{k > K} t^k / k!
      double term = 1, sum = 0;
      for (int k = 1; k <= terms; ++k) term *= t / k;
      for (int k = terms + 1; k < terms + 200; ++k) {
        term *= t / k;
        sum += term;
        if (term < 1e-18 * sum) break;
      }
      diff = std::exp(-t) * sum;
    } else {
      double ek = 0, term = 1;
      for (int k = 0; k <= terms; ++k) {
        if (k > 0) term *= t / k;
        ek += term;
      }
      diff = cutoff_eta(t, cutoff) - std::exp(-t) * ek;
    }
    r[i] = std::pow(t, a) * diff;
  }
  remainder_.resize(n);
  detail::fft(n, detail::FftDirection::forward, r.data(), remainder_.data());
  for (auto& v : remainder_) v *= dt;
}

Complex PowerCutoffTransform::leading(double xi) const {
  const Complex base = std::log(Complex(1.0, xi));
  Complex acc = 0;
  for (int k = 0; k <= terms_; ++k) acc += coef_[k] * std::exp(-(a_ + k + 1) * base);
  return acc;
}

Complex PowerCutoffTransform::operator()(double xi) const {
  if (xi < 0) return std::conj((*this)(-xi));
  Complex rem = 0;
  const double pos = xi / dxi_;
  if (xi <= xi_max_) {
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    rem = frac < 1e-9 ? remainder_[k] : (1 - frac) * remainder_[k] + frac * remainder_[k + 1];
  }
  return leading(xi) + rem;
}

std::vector<double> default_cutoffs() {
  std::vector<double> c;
  for (int k = 0; k <= 14; ++k) c.push_back(10.0 * std::ldexp(1.0, k));
  return c;
}

SobolevScan sobolev_scan(double a, double g_norm_sq, const CutoffParams& cutoff, const std::vector<double>& r_values,
                         const std::vector<double>& cutoffs) {
  if (cutoffs.empty()) fail(ErrorKind::parameter, "cutoff list is empty");
  for (std::size_t c = 0; c < cutoffs.size(); ++c)
    if (!(cutoffs[c] > 0) || (c > 0 && !(cutoffs[c] > cutoffs[c - 1])))
      fail(ErrorKind::parameter, "cutoff list must be positive and strictly increasing");
  const double gamma = a + 0.5;
  for (double r : r_values)
    if (!(r >= 0 && r <= gamma + 1)) fail(ErrorKind::parameter, "r must lie in [0, gamma + 1]");

  const PowerCutoffTransform tr(a, cutoff);
  const double dxi = tr.dxi();
  const auto kmax = static_cast<std::size_t>(std::floor(cutoffs.back() / dxi));
  std::vector<double> mass(kmax + 1);
  parallel_for(kmax + 1, [&](std::size_t k) {
    // symmetric in xi; trapezoid on the full line is exact for band-limited |h^|^2
    const double w = (k == 0 ? 1.0 : 2.0) * dxi / (2 * kPi);
    mass[k] = w * g_norm_sq * std::norm(tr(k * dxi));
  });

  SobolevScan scan;
  scan.r_values = r_values;
  scan.cutoffs = cutoffs;
  for (double r : r_values) {
    std::vector<double> shells(cutoffs.size(), 0.0);
    std::size_t c = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
      const double xi = k * dxi;
      while (xi > cutoffs[c]) ++c;
      shells[c] += std::pow(1 + xi * xi, r) * mass[k];
    }
    std::vector<double> norms(cutoffs.size());
    double acc = 0;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) norms[i] = acc += shells[i];
    scan.norms.push_back(norms);

    // growth exponent from the top shells: mass ~ cutoff^{2(r - gamma)}
    std::vector<double> lx, ly;
    for (std::size_t i = cutoffs.size() >= 5 ? cutoffs.size() - 4 : 1; i < cutoffs.size(); ++i)
      if (shells[i] > 0) {
        lx.push_back(std::log(cutoffs[i]));
        ly.push_back(std::log(shells[i] / std::log(cutoffs[i] / cutoffs[i - 1])));
      }
    scan.growth_exponent.push_back(lx.size() >= 2 ? fit_slope(lx, ly) : 0.0);
  }

  if (r_values.size() >= 2) {
    const double slope = fit_slope(r_values, scan.growth_exponent);
    double mr = 0, mg = 0;
    for (std::size_t i = 0; i < r_values.size(); ++i) {
      mr += r_values[i];
      mg += scan.growth_exponent[i];
    }
    mr /= r_values.size();
    mg /= r_values.size();
    scan.threshold_slope = slope;
    scan.threshold = mr - mg / slope;
  } else {
    scan.warnings.push_back("threshold needs at least two r values");
  }

  // tail exponent of ||u^(., xi)|| over [100, 10^4] or the available range
  const double lo = std::min(100.0, cutoffs.back() / 100), hi = std::min(1e4, cutoffs.back());
  std::vector<double> lx, ly;
  for (int i = 0; i < 41; ++i) {
    const double xi = lo * std::pow(hi / lo, i / 40.0);
    const double on_grid = std::round(xi / dxi) * dxi;
    lx.push_back(std::log(on_grid));
    ly.push_back(0.5 * std::log(g_norm_sq * std::norm(tr(on_grid))));
  }
  scan.tail_exponent = fit_slope(lx, ly);
  return scan;
}

SobolevScan sobolev_scan(const SingularSolution& sol, const std::vector<double>& r_values,
                         const std::vector<double>& cutoffs) {
  if (sol.exponential_type()) fail(ErrorKind::parameter, "sobolev_scan needs a power-type solution");
  return sobolev_scan(sol.gamma - 0.5, 1.0, sol.cutoff, r_values, cutoffs);
}

// --- Gevrey probe -------------------------------------------------------------

namespace {

/// log |integral_0^inf exp(-lambda t^{1-m} - (1 + i xi) t) dt| along the ray
/// t = rho e^{-i pi / (2m)}, which passes through the large-xi saddle.
double log_abs_transform(double lambda, int m, double xi) {
  const double theta = kPi / (2 * m);
  const Complex ray = std::polar(1.0, -theta);
  const Complex ray0 = std::polar(1.0, theta * (m - 1));  // ray^{1-m}
  const double s_star = std::log(lambda * (m - 1) / xi) / m;
  const int n = 40000;
  const double s_lo = s_star - 20, s_hi = s_star + 20, ds = (s_hi - s_lo) / n;
  std::vector<Complex> e(n + 1);
  double emax = -INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double s = s_lo + i * ds;
    const double rho = std::exp(s);
    e[i] = -lambda * std::exp((1.0 - m) * s) * ray0 - Complex(1.0, xi) * rho * ray + s;
    emax = std::max(emax, e[i].real());
  }
  Complex acc = 0;
  for (int i = 0; i <= n; ++i) acc += (i == 0 || i == n ? 0.5 : 1.0) * std::exp(e[i] - emax);
  return emax + std::log(std::abs(acc * ds));
}

struct PowerFit {
  double kappa, c, b, d, sse;
};

PowerFit fit_at(double kappa, const std::vector<double>& xi, const std::vector<double>& y) {
  Eigen::MatrixXd A(xi.size(), 3);
  Eigen::VectorXd rhs(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    A(i, 0) = std::pow(xi[i], kappa);
    A(i, 1) = std::log(xi[i]);
    A(i, 2) = 1.0;
    rhs(i) = y[i];
  }
  const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(rhs);
  return {kappa, sol(0), sol(1), sol(2), (A * sol - rhs).squaredNorm()};
}

}  // namespace

GevreyScan gevrey_scan(const SingularSolution& sol, double xi_min, double xi_max, int points) {
  GevreyScan g;
  g.m = sol.m;
  if (!sol.exponential_type()) {
    g.note = "not Gevrey-type; algebraic decay";
    return g;
  }
  if (!(xi_min > 0 && xi_min < xi_max) || points < 8) fail(ErrorKind::parameter, "invalid Gevrey window");
  g.gevrey_type = true;
  g.predicted_r = static_cast<double>(sol.m) / (sol.m - 1);
  g.xi.resize(points);
  g.log_abs.resize(points);
  parallel_for(static_cast<std::size_t>(points), [&](std::size_t i) {
    g.xi[i] = xi_min * std::pow(xi_max / xi_min, static_cast<double>(i) / (points - 1));
    g.log_abs[i] = log_abs_transform(sol.lambda, sol.m, g.xi[i]);
  });
  std::vector<double> y(points);
  for (int i = 0; i < points; ++i) y[i] = -g.log_abs[i];

  // profile least squares over kappa: coarse grid then golden section
  PowerFit best = fit_at(0.05, g.xi, y);
  for (double k = 0.05; k <= 1.5; k += 0.01) {
    const PowerFit f = fit_at(k, g.xi, y);
    if (f.sse < best.sse) best = f;
  }
  double lo = best.kappa - 0.01, hi = best.kappa + 0.01;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 60; ++it) {
    const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if (fit_at(m1, g.xi, y).sse < fit_at(m2, g.xi, y).sse)
      hi = m2;
    else
      lo = m1;
  }
  best = fit_at(0.5 * (lo + hi), g.xi, y);
  g.kappa = best.kappa;
  g.c = best.c;
  g.b = best.b;
  g.d = best.d;
  g.r_hat = 1.0 / best.kappa;
  g.note = "conjectural probe: fitted r = " + format_double(g.r_hat) + ", predicted m/(m-1) = " +
           format_double(g.predicted_r);
  return g;
}

}  // namespace degenlab
