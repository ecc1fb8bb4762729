#pragma once

#include <string>
#include <vector>

#include "degenlab/mellin_solver.hpp"
#include "degenlab/sturm_shooting.hpp"

namespace degenlab {

/// eta = 1 on (-inf, t1], 0 on [t2, inf), degree-7 smoothstep in between.
struct CutoffParams {
  double t1 = 0.5;
  double t2 = 1.0;
};

double cutoff_eta(double t, const CutoffParams& c);

/// Homogeneous singular solution u = g_j(x) h(t) with
///   m = 1:  h(t) = t^{gamma - 1/2} eta(t),            gamma = sqrt(w_j + 1/4)
///   m >= 2: h(t) = exp(-lambda t^{1-m}) eta(t),       lambda = sqrt(w_j) / (m - 1)
/// and h = 0 for t <= 0.
struct SingularSolution {
  std::size_t j = 0;
  double w = 0;
  int m = 1;
  double gamma = 0;
  double lambda = 0;
  Eigenfunction g;
  CutoffParams cutoff;

  bool exponential_type() const noexcept { return m >= 2; }
  double t_profile(double t) const;
  /// Exactly 0 at x = +-1 (Dirichlet data imposed) and for t <= 0.
  double value(double x, double t) const;
};

/// Power-type solution for the j-th Dirichlet value. Throws parameter on
/// t1 >= t2 or a nonpositive t1, and when the j-th value gives no real
/// exponent (w_j <= -1/4).
SingularSolution build_singular(const CoefficientProfile& profile, std::size_t j, const CutoffParams& cutoff = {});

/// Exponential-type solution for vanishing order m >= 2. Throws parameter
/// when w_j <= 0 (no admissible lambda with positive real part).
SingularSolution higher_order_singular(const CoefficientProfile& profile, int m, std::size_t j,
                                       const CutoffParams& cutoff = {});

/// Samples of u on both half-strips (the negative half is identically 0).
StripField sample_singular(const SingularSolution& sol, const StripGrid& grid);

struct SingularResidualReport {
  double identity_error = 0;       ///< max |D_u (D_u + 1) e^{pu} - (gamma^2 - 1/4) e^{pu}| / e^{pu}
  double core_residual = 0;        ///< max relative residual where eta = 1
  double transition_residual = 0;  ///< max absolute residual where eta' != 0
  double transition_bound = 0;     ///< max |u| (times coefficient scale) over the transition, for comparison
  std::size_t core_columns = 0;
};

/// Applies the degenerate operator with sixth-order central differences in
/// x (interior nodes) and in u = log t (m = 1) or v = t^{1-m} (m >= 2).
/// Relative residuals are taken per t-column against the largest term of
/// the operator on that column.
SingularResidualReport residual_check(const CoefficientProfile& profile, const SingularSolution& sol,
                                      const StripGrid& grid);

/// max over x-nodes of |forward difference of order k at t = 0| for
/// k = 1..max_order with step h.
std::vector<double> derivative_ladder(const SingularSolution& sol, double h = 1e-3, int max_order = 6,
                                      int x_nodes = 65);

/// Fourier transform in t of t^a eta(t) chi(t > 0):
///   H(xi) = integral_0^inf t^a eta(t) e^{-i xi t} dt.
/// Leading behavior is removed analytically; the smooth remainder goes
/// through an FFT.
class PowerCutoffTransform {
 public:
  PowerCutoffTransform(double a, const CutoffParams& cutoff, int terms = 8);
  Complex operator()(double xi) const;
  /// Largest xi resolved by the remainder FFT; beyond it only the leading
  /// terms contribute.
  double xi_fft_max() const noexcept { return xi_max_; }
  double dxi() const noexcept { return dxi_; }

 private:
  Complex leading(double xi) const;
  double a_;
  int terms_;
  std::vector<double> coef_;  ///< Gamma(a + k + 1) / k!
  std::vector<Complex> remainder_;
  double dxi_, xi_max_;
};

struct SobolevScan {
  std::vector<double> r_values;
  std::vector<double> cutoffs;
  /// norms[i][c] = (1/2pi) integral_{|xi| <= cutoffs[c]} <xi>^{2 r_i} ||u^(., xi)||^2 dxi
  std::vector<std::vector<double>> norms;
  /// dyadic-shell growth exponent of the integrand mass for each r
  std::vector<double> growth_exponent;
  double tail_exponent = 0;  ///< fitted slope of log ||u^(., xi)|| against log xi
  double threshold = 0;      ///< estimated s-hat: zero of the growth exponent in r
  double threshold_slope = 0;
  std::vector<std::string> warnings;
};

/// Throws parameter when cutoffs are not strictly increasing or r lies
/// outside [0, gamma + 1]. Requires a power-type solution.
SobolevScan sobolev_scan(const SingularSolution& sol, const std::vector<double>& r_values,
                         const std::vector<double>& cutoffs);
/// Same scan for u = g(x) t^a eta(t) with ||g||^2 = g_norm_sq.
SobolevScan sobolev_scan(double a, double g_norm_sq, const CutoffParams& cutoff, const std::vector<double>& r_values,
                         const std::vector<double>& cutoffs);

/// Default cutoffs 10 * 2^k, k = 0..14.
std::vector<double> default_cutoffs();

struct GevreyScan {
  bool gevrey_type = false;
  std::string note;
  int m = 1;
  std::vector<double> xi;
  std::vector<double> log_abs;  ///< log |h^(xi)| with h = exp(-lambda t^{1-m} - t)
  double kappa = 0;             ///< fitted decay exponent in -log|h^| ~ c xi^kappa
  double r_hat = 0;             ///< 1 / kappa
  double predicted_r = 0;       ///< m / (m - 1)
  double c = 0, b = 0, d = 0;   ///< -log|h^| = c xi^kappa + b log xi + d
};

/// Fourier decay of the exponential-type profile along a rotated ray;
/// the compact cutoff is replaced by the analytic damping e^{-t}.
GevreyScan gevrey_scan(const SingularSolution& sol, double xi_min = 1e2, double xi_max = 1e8, int points = 61);

}  // namespace degenlab
