#pragma once

#include <string>
#include <vector>

#include "degenlab/coefficient_models.hpp"

namespace degenlab {

/// Default RK4 step for shooting on [-1, 1].
inline constexpr double kDefaultShootingStep = 1.0 / 4096;
inline constexpr double kMaxShootingStep = 1.0 / 128;

/// Solution of g'' = (beta - w alpha^2) g on [-1, 1] with g(-1) = 0,
/// g'(-1) = 1, sampled on the uniform RK4 grid x_k = -1 + k * step.
struct ShootingSolution {
  Complex w;
  double step = kDefaultShootingStep;
  std::vector<Complex> values;
  std::vector<Complex> derivatives;
  Complex end_value;
  Complex end_derivative;

  double x(std::size_t k) const { return -1.0 + static_cast<double>(k) * step; }
};

/// Coefficient samples at half-steps, reused across many shots with the
/// same profile and step.
class ShootingKernel {
 public:
  ShootingKernel(const CoefficientProfile& profile, double step = kDefaultShootingStep);

  double step() const noexcept { return step_; }
  std::size_t steps() const noexcept { return steps_; }

  /// End value g_w(1) only; no sample storage.
  Complex end_value(Complex w) const;
  double end_value_real(double w) const;

  ShootingSolution solve(Complex w) const;

  const CoefficientProfile& profile() const noexcept { return profile_; }

 private:
  CoefficientProfile profile_;
  double step_;
  std::size_t steps_;
  std::vector<double> alpha_sq_;  // at x = -1 + j * step / 2
  std::vector<double> beta_;
};

/// Fixed-step RK4 shot. Throws overflow on non-finite values and parameter
/// on step > 2^-7.
ShootingSolution shoot(const CoefficientProfile& profile, Complex w,
                       double step = kDefaultShootingStep);

struct Sigma0Scan {
  std::vector<double> roots;  ///< sorted ascending
  double w_min = 0;           ///< lower scan bound (no Dirichlet values below it)
  double w_max = 0;
  bool partial = false;       ///< max_count reached before w_max
  std::vector<std::string> warnings;
};

/// Lower bound below which beta - w alpha^2 > 0 on [-1, 1], so that no
/// nontrivial Dirichlet solution exists.
double sigma0_lower_bound(const CoefficientProfile& profile);

/// Relative scan spacing 0.05 (1 + |w|) from the lower bound up to w_max,
/// bisection refinement to |g_w(1)| <= 1e-10 or width <= 1e-12.
Sigma0Scan find_sigma0(const CoefficientProfile& profile, double w_max, std::size_t max_count,
                       double step = kDefaultShootingStep);

/// L2-normalized Dirichlet eigenfunction with g'(-1) > 0.
struct Eigenfunction {
  double w = 0;
  double step = kDefaultShootingStep;
  std::vector<double> values;
  std::vector<double> derivatives;
  double boundary_defect = 0;      ///< max(|g(-1)|, |g(1)|)
  double difference_residual = 0;  ///< max |D2 g - (beta - w alpha^2) g| on interior nodes
  int interior_zeros = 0;

  double x(std::size_t k) const { return -1.0 + static_cast<double>(k) * step; }
  /// Cubic Hermite interpolation between RK4 nodes.
  double value_at(double x) const;
  double derivative_at(double x) const;
};

/// Throws not_eigenvalue when |g_w(1)| exceeds 1e-7 of max |g_w|.
Eigenfunction eigenfunction(const CoefficientProfile& profile, double w,
                            double step = kDefaultShootingStep);

/// Sign changes of the real part of the samples strictly inside (-1, 1).
int count_interior_zeros(const std::vector<double>& samples);

}  // namespace degenlab
