#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "degenlab/common.hpp"

namespace degenlab {

enum class ProfileKind { constant, polynomial, tabulated };

const char* to_string(ProfileKind kind) noexcept;

/// Parameters for make_profile. Interpretation of the coefficient vectors
/// depends on the kind:
///  - constant:   alpha[0], beta[0]
///  - polynomial: ascending monomial coefficients on [-1, 1]
///  - tabulated:  values on a uniform grid over [-1, 1] (>= 257 nodes each)
struct ProfileParams {
  std::vector<double> alpha{1.0};
  std::vector<double> beta{0.0};
  int m = 1;
};

/// Coefficient pair (alpha, beta) on [-1, 1] together with the vanishing
/// order m of the degenerate coefficient at t = 0. Immutable once built;
/// alpha never vanishes on [-1, 1].
class CoefficientProfile {
 public:
  double alpha(double x) const;
  double beta(double x) const;

  /// alpha continued past [-1, 1]: the closed form for constant and
  /// polynomial profiles, tangent-line extrapolation for tabulated ones.
  double alpha_extended(double x) const;

  int m() const noexcept { return m_; }
  ProfileKind kind() const noexcept { return kind_; }
  const ProfileParams& params() const noexcept { return params_; }

  double min_alpha_sq() const noexcept { return min_alpha_sq_; }
  double max_alpha_sq() const noexcept { return max_alpha_sq_; }
  double min_beta() const noexcept { return min_beta_; }
  double max_beta() const noexcept { return max_beta_; }

  /// Canonical text form; two profiles with equal descriptions are equal.
  std::string describe() const;
  std::string fingerprint() const;

 private:
  friend CoefficientProfile make_profile(ProfileKind, const ProfileParams&);
  CoefficientProfile() = default;

  struct Interpolant;
  ProfileKind kind_ = ProfileKind::constant;
  ProfileParams params_;
  int m_ = 1;
  std::shared_ptr<const Interpolant> alpha_spline_;
  std::shared_ptr<const Interpolant> beta_spline_;
  double min_alpha_sq_ = 1, max_alpha_sq_ = 1, min_beta_ = 0, max_beta_ = 0;
};

/// Builds and validates a profile. Throws degenerate_profile when alpha
/// vanishes (or changes sign) on the dense validation grid, parameter on
/// m < 1, non-finite values or malformed coefficient lists.
CoefficientProfile make_profile(ProfileKind kind, const ProfileParams& params);

/// Number of points in the dense validation grid over [-1, 1].
inline constexpr int kProfileSampleCount = 4097;
inline constexpr int kMinTabulatedNodes = 257;

// ---------------------------------------------------------------------------

enum class TorusVariant { invertible, diffusion };

const char* to_string(TorusVariant v) noexcept;

struct TorusGrid {
  int nx = 64;
  int nt = 1024;
};

/// Degenerate operator L = -d_x^2 - d_t A d_t + b on the torus
/// [-Px, Px) x [-Pt, Pt), where A plays the role of a^2.
class TorusOperatorSpec {
 public:
  using Field = std::function<double(double, double)>;

  TorusOperatorSpec(double period_x, double period_t, TorusGrid grid, TorusVariant variant,
                    Field afield, Field bfield, std::string origin);

  double period_x() const noexcept { return period_x_; }
  double period_t() const noexcept { return period_t_; }
  const TorusGrid& grid() const noexcept { return grid_; }
  TorusVariant variant() const noexcept { return variant_; }
  const std::string& origin() const noexcept { return origin_; }

  double hx() const noexcept { return 2 * period_x_ / grid_.nx; }
  double ht() const noexcept { return 2 * period_t_ / grid_.nt; }
  double node_x(int i) const noexcept { return -period_x_ + i * hx(); }
  double node_t(int j) const noexcept { return -period_t_ + j * ht(); }
  double area() const noexcept { return 4 * period_x_ * period_t_; }

  double a_field(double x, double t) const { return afield_(x, t); }
  double b_field(double x, double t) const { return bfield_(x, t); }

  /// Same geometry and coefficients on a different node count.
  TorusOperatorSpec with_grid(TorusGrid grid) const;
  /// Same principal part with the other zero-order variant.
  TorusOperatorSpec with_variant(TorusVariant variant) const;

 private:
  double period_x_, period_t_;
  TorusGrid grid_;
  TorusVariant variant_;
  Field afield_, bfield_;
  std::string origin_;
};

/// Smooth 0 -> 1 transition on [0, 1], flat to all orders at both ends.
double smooth_step(double r);

/// Canonical periodic extension of a profile:
///   A(x,t) = mu(x)^2 sin^2(pi t / (2 Pt)) (2 Pt / pi)^2 + psi(x)^2
/// with mu = alpha on [-1, 1] and psi vanishing exactly there.
/// b = 1 (invertible) or b = 0 (diffusion).
TorusOperatorSpec extend_to_torus(const CoefficientProfile& profile, double period_x,
                                  double period_t, TorusGrid grid, TorusVariant variant);

/// Constant-coefficient control operator A = a_const, used for the
/// elliptic-limit checks.
TorusOperatorSpec make_elliptic_torus(double period_x, double period_t, TorusGrid grid,
                                      TorusVariant variant, double a_const = 1.0);

}  // namespace degenlab
