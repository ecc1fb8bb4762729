#include "degenlab/coefficient_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace degenlab {

const char* to_string(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::polynomial: return "polynomial";
    case ProfileKind::tabulated: return "tabulated";
  }
  return "?";
}

const char* to_string(TorusVariant v) noexcept {
  return v == TorusVariant::invertible ? "invertible" : "diffusion";
}

struct CoefficientProfile::Interpolant {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;

  explicit Interpolant(const std::vector<double>& values)
      : spline(values.begin(), values.end(), -1.0, spacing(values), end_slope(values, false),
               end_slope(values, true)) {}

  static double spacing(const std::vector<double>& v) { return 2.0 / static_cast<double>(v.size() - 1); }

  /// Fourth-order one-sided difference at either end of the table.
  static double end_slope(const std::vector<double>& v, bool right) {
    const std::size_t n = v.size();
    auto f = [&](std::size_t k) { return right ? v[n - 1 - k] : v[k]; };
    const double d = (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / (12 * spacing(v));
    return right ? -d : d;
  }

  double operator()(double x) const {
    if (x < -1.0) return spline(-1.0) + (x + 1.0) * spline.prime(-1.0);
    if (x > 1.0) return spline(1.0) + (x - 1.0) * spline.prime(1.0);
    return spline(x);
  }
};

namespace {

double horner(const std::vector<double>& c, double x) {
  double acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

double CoefficientProfile::alpha(double x) const { return alpha_extended(std::clamp(x, -1.0, 1.0)); }

double CoefficientProfile::alpha_extended(double x) const {
  switch (kind_) {
    case ProfileKind::constant: return params_.alpha[0];
    case ProfileKind::polynomial: return horner(params_.alpha, x);
    case ProfileKind::tabulated: return (*alpha_spline_)(x);
  }
  return 0;
}

double CoefficientProfile::beta(double x) const {
  x = std::clamp(x, -1.0, 1.0);
  switch (kind_) {
    case ProfileKind::constant: return params_.beta[0];
    case ProfileKind::polynomial: return horner(params_.beta, x);
    case ProfileKind::tabulated: return (*beta_spline_)(x);
  }
  return 0;
}

std::string CoefficientProfile::describe() const {
  std::ostringstream os;
  os << "kind=" << to_string(kind_) << ";m=" << m_ << ";alpha=";
  for (double v : params_.alpha) os << format_double(v) << ',';
  os << ";beta=";
  for (double v : params_.beta) os << format_double(v) << ',';
  return os.str();
}

std::string CoefficientProfile::fingerprint() const { return hex64(fnv1a(describe())); }

CoefficientProfile make_profile(ProfileKind kind, const ProfileParams& params) {
  if (params.m < 1) fail(ErrorKind::parameter, "vanishing order m must be >= 1 (got " + std::to_string(params.m) + ")");
  if (params.alpha.empty() || params.beta.empty())
    fail(ErrorKind::parameter, "profile needs at least one alpha and one beta coefficient");
  for (const auto* vec : {&params.alpha, &params.beta})
    for (double v : *vec)
      if (!std::isfinite(v)) fail(ErrorKind::parameter, "profile coefficients must be finite");

  CoefficientProfile p;
  p.kind_ = kind;
  p.params_ = params;
  p.m_ = params.m;

  switch (kind) {
    case ProfileKind::constant:
      if (params.alpha.size() != 1 || params.beta.size() != 1)
        fail(ErrorKind::parameter, "constant profile takes exactly one alpha and one beta value");
      break;
    case ProfileKind::polynomial: break;
    case ProfileKind::tabulated:
      if (params.alpha.size() < kMinTabulatedNodes || params.beta.size() < kMinTabulatedNodes)
        fail(ErrorKind::parameter, "tabulated profile needs >= " + std::to_string(kMinTabulatedNodes) +
                                       " uniform nodes for alpha and beta");
      p.alpha_spline_ = std::make_shared<const CoefficientProfile::Interpolant>(params.alpha);
      p.beta_spline_ = std::make_shared<const CoefficientProfile::Interpolant>(params.beta);
      break;
  }

  double amin = INFINITY, amax = 0, bmin = INFINITY, bmax = -INFINITY;
  double first_sign = 0;
  for (int i = 0; i < kProfileSampleCount; ++i) {
    const double x = -1.0 + 2.0 * i / (kProfileSampleCount - 1);
    const double a = p.alpha(x);
    const double b = p.beta(x);
    if (!std::isfinite(a) || !std::isfinite(b))
      fail(ErrorKind::parameter, "profile evaluates to a non-finite value at x = " + format_double(x));
    const double sign = a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
    if (std::abs(a) < 1e-10 || (first_sign != 0 && sign != first_sign))
      fail(ErrorKind::degenerate_profile,
           "degenerate profile: alpha vanishes near x = " + format_double(x) +
               " (d a/d t must be nonzero everywhere on [-1, 1])");
    if (first_sign == 0) first_sign = sign;
    amin = std::min(amin, a * a);
    amax = std::max(amax, a * a);
    bmin = std::min(bmin, b);
    bmax = std::max(bmax, b);
  }
  p.min_alpha_sq_ = amin;
  p.max_alpha_sq_ = amax;
  p.min_beta_ = bmin;
  p.max_beta_ = bmax;
  return p;
}

// ---------------------------------------------------------------------------

TorusOperatorSpec::TorusOperatorSpec(double period_x, double period_t, TorusGrid grid,
                                     TorusVariant variant, Field afield, Field bfield,
                                     std::string origin)
    : period_x_(period_x),
      period_t_(period_t),
      grid_(grid),
      variant_(variant),
      afield_(std::move(afield)),
      bfield_(std::move(bfield)),
      origin_(std::move(origin)) {
  if (!(period_x > 0) || !(period_t > 0)) fail(ErrorKind::parameter, "torus periods must be positive");
  if (grid.nx < 16 || grid.nt < 16) fail(ErrorKind::parameter, "torus grid needs at least 16 nodes per direction");
  if (grid.nt % 2 != 0) fail(ErrorKind::parameter, "torus grid needs an even t-node count so that t = 0 is a node");
}

TorusOperatorSpec TorusOperatorSpec::with_grid(TorusGrid grid) const {
  TorusOperatorSpec copy = *this;
  if (grid.nx < 16 || grid.nt < 16 || grid.nt % 2 != 0) fail(ErrorKind::parameter, "invalid torus grid");
  copy.grid_ = grid;
  return copy;
}

TorusOperatorSpec TorusOperatorSpec::with_variant(TorusVariant variant) const {
  TorusOperatorSpec copy = *this;
  copy.variant_ = variant;
  const double b = variant == TorusVariant::invertible ? 1.0 : 0.0;
  copy.bfield_ = [b](double, double) { return b; };
  return copy;
}

double smooth_step(double r) {
  if (r <= 0) return 0;
  if (r >= 1) return 1;
  const double e0 = std::exp(-1.0 / r);
  const double e1 = std::exp(-1.0 / (1.0 - r));
  return e0 / (e0 + e1);
}

namespace {

TorusOperatorSpec::Field constant_b(TorusVariant variant) {
  const double b = variant == TorusVariant::invertible ? 1.0 : 0.0;
  return [b](double, double) { return b; };
}

}  // namespace

TorusOperatorSpec extend_to_torus(const CoefficientProfile& profile, double period_x,
                                  double period_t, TorusGrid grid, TorusVariant variant) {
  if (!(period_x >= 1.1))
    fail(ErrorKind::parameter, "period_x must exceed 1 + delta0 (delta0 = 0.1) so the strip around J embeds");
  if (!(period_t > 0)) fail(ErrorKind::parameter, "period_t must be positive");
  const double hx = 2 * period_x / grid.nx;
  const int nodes_on_j = static_cast<int>(std::floor(1.0 / hx + 1e-9)) * 2 + 1;
  if (nodes_on_j < 8)
    fail(ErrorKind::resolution, "grid too coarse to resolve J: " + std::to_string(nodes_on_j) +
                                    " nodes across [-1, 1], need >= 8");

  const double delta = std::min(0.5, (period_x - 1.0) / 2.0);
  const double scale = 2 * period_t / std::numbers::pi;
  auto afield = [profile, delta, period_t, scale](double x, double t) {
    const double ax = std::abs(x);
    const double theta = ax > 1.0 ? smooth_step((ax - 1.0) / delta) : 0.0;
    const double a = profile.alpha_extended(x);
    const double mu_sq = (1.0 - theta) * a * a + theta;
    const double s = std::sin(std::numbers::pi * t / (2 * period_t)) * scale;
    return mu_sq * s * s + theta * theta;
  };
  return TorusOperatorSpec(period_x, period_t, grid, variant, afield, constant_b(variant),
                           "extension of " + profile.describe());
}

TorusOperatorSpec make_elliptic_torus(double period_x, double period_t, TorusGrid grid,
                                      TorusVariant variant, double a_const) {
  if (!(a_const > 0)) fail(ErrorKind::parameter, "elliptic control needs a positive constant A");
  return TorusOperatorSpec(period_x, period_t, grid, variant,
                           [a_const](double, double) { return a_const; }, constant_b(variant),
                           "elliptic A=" + format_double(a_const));
}

}  // namespace degenlab
