#include "degenlab/sturm_shooting.hpp"

#include <algorithm>
#include <cmath>

namespace degenlab {

namespace {

constexpr double kEndTolerance = 1e-10;
constexpr double kWidthTolerance = 1e-12;

template <typename Scalar>
struct Rk4Result {
  Scalar g, dg;
};

/// Integrates g'' = q g with q = beta - w alpha^2 from -1 to 1.
template <typename Scalar, typename Visit>
Rk4Result<Scalar> integrate(const std::vector<double>& alpha_sq, const std::vector<double>& beta,
                            double h, std::size_t steps, Scalar w, Visit&& visit) {
  Scalar g = 0, dg = 1;
  visit(std::size_t{0}, g, dg);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t j = 2 * k;
    const Scalar q0 = beta[j] - w * alpha_sq[j];
    const Scalar qm = beta[j + 1] - w * alpha_sq[j + 1];
    const Scalar q1 = beta[j + 2] - w * alpha_sq[j + 2];
    const Scalar k1g = dg, k1d = q0 * g;
    const Scalar k2g = dg + 0.5 * h * k1d, k2d = qm * (g + 0.5 * h * k1g);
    const Scalar k3g = dg + 0.5 * h * k2d, k3d = qm * (g + 0.5 * h * k2g);
    const Scalar k4g = dg + h * k3d, k4d = q1 * (g + h * k3g);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    dg += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    visit(k + 1, g, dg);
  }
  using std::isfinite;
  const bool finite = std::isfinite(std::abs(g)) && std::isfinite(std::abs(dg));
  if (!finite)
    fail(ErrorKind::overflow,
         "shooting produced non-finite values (pathological profile or |w| too large)");
  return {g, dg};
}

}  // namespace

ShootingKernel::ShootingKernel(const CoefficientProfile& profile, double step)
    : profile_(profile), step_(step) {
  if (!(step > 0) || step > kMaxShootingStep)
    fail(ErrorKind::parameter, "shooting step must lie in (0, 2^-7]");
  const double n = 2.0 / step;
  steps_ = static_cast<std::size_t>(std::llround(n));
  if (std::abs(n - static_cast<double>(steps_)) > 1e-9)
    fail(ErrorKind::parameter, "shooting step must divide the interval [-1, 1] evenly");
  alpha_sq_.resize(2 * steps_ + 1);
  beta_.resize(2 * steps_ + 1);
  for (std::size_t j = 0; j <= 2 * steps_; ++j) {
    const double x = -1.0 + 0.5 * step_ * static_cast<double>(j);
    const double a = profile.alpha(x);
    alpha_sq_[j] = a * a;
    beta_[j] = profile.beta(x);
  }
}

Complex ShootingKernel::end_value(Complex w) const {
  if (w.imag() == 0) return end_value_real(w.real());
  return integrate<Complex>(alpha_sq_, beta_, step_, steps_, w, [](auto, auto, auto) {}).g;
}

double ShootingKernel::end_value_real(double w) const {
  return integrate<double>(alpha_sq_, beta_, step_, steps_, w, [](auto, auto, auto) {}).g;
}

ShootingSolution ShootingKernel::solve(Complex w) const {
  ShootingSolution sol;
  sol.w = w;
  sol.step = step_;
  sol.values.resize(steps_ + 1);
  sol.derivatives.resize(steps_ + 1);
  auto record = [&](std::size_t k, auto g, auto dg) {
    sol.values[k] = g;
    sol.derivatives[k] = dg;
  };
  if (w.imag() == 0) {
    const auto r = integrate<double>(alpha_sq_, beta_, step_, steps_, w.real(), record);
    sol.end_value = r.g;
    sol.end_derivative = r.dg;
  } else {
    const auto r = integrate<Complex>(alpha_sq_, beta_, step_, steps_, w, record);
    sol.end_value = r.g;
    sol.end_derivative = r.dg;
  }
  return sol;
}

ShootingSolution shoot(const CoefficientProfile& profile, Complex w, double step) {
  return ShootingKernel(profile, step).solve(w);
}

double sigma0_lower_bound(const CoefficientProfile& profile) {
  return -(1.0 + std::max(0.0, -profile.min_beta())) / profile.min_alpha_sq();
}

Sigma0Scan find_sigma0(const CoefficientProfile& profile, double w_max, std::size_t max_count,
                       double step) {
  if (!std::isfinite(w_max)) fail(ErrorKind::parameter, "w_max must be finite");
  const ShootingKernel kernel(profile, step);
  Sigma0Scan scan;
  scan.w_min = sigma0_lower_bound(profile);
  scan.w_max = w_max;
  if (w_max <= scan.w_min) return scan;

  auto refine = [&](double a, double fa, double b) {
    for (;;) {
      const double mid = 0.5 * (a + b);
      const double fm = kernel.end_value_real(mid);
      if (std::abs(fm) <= kEndTolerance || b - a <= kWidthTolerance) return mid;
      if ((fm < 0) == (fa < 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
  };

  double w = scan.w_min;
  double f = kernel.end_value_real(w);
  while (w < w_max) {
    const double next = std::min(w_max, w + 0.05 * (1.0 + std::abs(w)));
    const double fn = kernel.end_value_real(next);
    if (max_count > 0 && scan.roots.size() >= max_count) {
      scan.partial = true;
      break;
    }
    if (fn == 0.0) {
      scan.roots.push_back(next);
    } else if (f != 0.0 && (fn < 0) != (f < 0)) {
      scan.roots.push_back(refine(w, f, next));
    }
    w = next;
    f = fn;
  }
  if (max_count > 0 && scan.roots.size() > max_count) scan.roots.resize(max_count);
  if (scan.partial) {
    scan.warnings.push_back("partial result: max_count = " + std::to_string(max_count) +
                            " reached before w_max = " + format_double(w_max));
    warn(scan.warnings.back());
  }
  return scan;
}

int count_interior_zeros(const std::vector<double>& samples) {
  int zeros = 0;
  double last = 0;
  // skip the endpoints, which vanish by construction
  for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
    const double v = samples[k];
    if (v == 0) continue;
    if (last != 0 && (v < 0) != (last < 0)) ++zeros;
    last = v;
  }
  return zeros;
}

namespace {

double hermite(const std::vector<double>& f, const std::vector<double>& df, double step, double x,
               bool derivative) {
  const double n = static_cast<double>(f.size() - 1);
  double pos = (std::clamp(x, -1.0, 1.0) + 1.0) / step;
  std::size_t k = static_cast<std::size_t>(std::min(std::floor(pos), n - 1));
  const double s = pos - static_cast<double>(k);
  const double f0 = f[k], f1 = f[k + 1], d0 = df[k] * step, d1 = df[k + 1] * step;
  if (!derivative) {
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
  }
  const double g00 = 6 * s * s - 6 * s, g10 = 3 * s * s - 4 * s + 1;
  const double g01 = -6 * s * s + 6 * s, g11 = 3 * s * s - 2 * s;
  return (g00 * f0 + g10 * d0 + g01 * f1 + g11 * d1) / step;
}

}  // namespace

double Eigenfunction::value_at(double x) const { return hermite(values, derivatives, step, x, false); }
double Eigenfunction::derivative_at(double x) const {
  return hermite(values, derivatives, step, x, true);
}

Eigenfunction eigenfunction(const CoefficientProfile& profile, double w, double step) {
  const ShootingKernel kernel(profile, step);
  const ShootingSolution sol = kernel.solve(w);
  const std::size_t n = sol.values.size();

  std::vector<double> g(n), dg(n);
  double gmax = 0;
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = sol.values[k].real();
    dg[k] = sol.derivatives[k].real();
    gmax = std::max(gmax, std::abs(g[k]));
  }
  if (std::abs(sol.end_value.real()) > 1e-7 * gmax)
    fail(ErrorKind::not_eigenvalue, "w = " + format_double(w) +
                                        " is not an eigenvalue: |g_w(1)| / max|g_w| = " +
                                        format_double(std::abs(sol.end_value.real()) / gmax));

  // Simpson weights on the even number of RK4 intervals
  double norm_sq = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wgt = (k == 0 || k + 1 == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    norm_sq += wgt * g[k] * g[k];
  }
  norm_sq *= step / 3.0;
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] *= inv;
    dg[k] *= inv;
  }

  Eigenfunction ef;
  ef.w = w;
  ef.step = step;
  ef.boundary_defect = std::max(std::abs(g.front()), std::abs(g.back()));
  double resid = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double x = sol.x(k);
    const double a = profile.alpha(x);
    const double q = profile.beta(x) - w * a * a;
    const double d2 = (g[k + 1] - 2 * g[k] + g[k - 1]) / (step * step);
    resid = std::max(resid, std::abs(d2 - q * g[k]));
  }
  ef.difference_residual = resid;
  ef.interior_zeros = count_interior_zeros(g);
  ef.values = std::move(g);
  ef.derivatives = std::move(dg);
  return ef;
}

}  // namespace degenlab
