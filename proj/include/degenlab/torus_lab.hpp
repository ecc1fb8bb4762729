#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "degenlab/coefficient_models.hpp"

namespace degenlab {

/// Nodal values on the torus grid, x-major: value(i, j) = values[i * nt + j]
/// at (node_x(i), node_t(j)).
struct TorusField {
  int nx = 0;
  int nt = 0;
  double period_x = 0;
  double period_t = 0;
  std::vector<double> values;

  static TorusField zeros(const TorusOperatorSpec& spec);
  static TorusField sample(const TorusOperatorSpec& spec, const std::function<double(double, double)>& fn);

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * nt + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * nt + j]; }
  double hx() const noexcept { return 2 * period_x / nx; }
  double ht() const noexcept { return 2 * period_t / nt; }
  double cell_area() const noexcept { return hx() * ht(); }
  double mean() const;
  double l2_norm() const;
  TorusField minus_mean() const;
};

struct SparseTriplet {
  int row;
  int col;
  double value;
};

/// Five-point flux-form discretization of -d_x^2 - d_t A d_t + b with
/// periodic wrap. Couplings are rounded onto a common dyadic grid so that
/// every row sum of the b = 0 part is exactly zero; the matrix is symmetric
/// entrywise by construction.
class DiscreteOperator {
 public:
  const TorusOperatorSpec& spec() const;
  TorusVariant variant() const;
  std::size_t size() const;
  std::size_t nonzeros() const;

  TorusField apply(const TorusField& u) const;
  std::vector<SparseTriplet> triplets() const;

  /// max |L_pq - L_qp| over stored entries.
  double symmetry_defect() const;
  /// max |(L 1)_p - b_p|, i.e. the row-sum defect of the principal part.
  double row_sum_defect() const;
  /// Gershgorin upper bound for the largest eigenvalue.
  double max_eigenvalue_bound() const;

  /// Cell-weighted inner product <u, v> = hx ht sum u v.
  double inner(const TorusField& u, const TorusField& v) const;

  struct EnergyTerms {
    double dx = 0;  ///< ||d_x u||^2 with forward differences
    double dt = 0;  ///< ||a d_t u||^2 with half-node A
    double b = 0;   ///< integral of b u^2
    double total() const noexcept { return dx + dt + b; }
  };
  EnergyTerms energy(const TorusField& u) const;

  struct Impl;
  explicit DiscreteOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Throws parameter when either grid dimension is below 4.
DiscreteOperator assemble(const TorusOperatorSpec& spec);

/// Text export: a header line "# sparse_triplets n=<N> nnz=<K>" followed by
/// one "row col value" line per stored entry in row-major order, 0-based,
/// values with 17 significant digits.
void write_triplets(const DiscreteOperator& op, const std::filesystem::path& path);

/// Fourier multiplier norm ||(1 + xi^2 + tau^2)^{s/2} u^||, frequencies
/// 2 pi k / period. Throws parameter for s outside [-4, 8].
double sobolev_norm(const TorusField& u, double s);
std::vector<double> sobolev_norms(const TorusField& u, const std::vector<double>& s_values);

// ---------------------------------------------------------------------------

struct EllipticSolve {
  TorusField u;
  int iterations = 0;
  double relative_residual = 0;
};

/// Diagonally preconditioned conjugate gradients to the given relative
/// residual. Requires the invertible variant. Throws solver when the
/// iteration budget is exhausted.
EllipticSolve solve_elliptic(const DiscreteOperator& op, const TorusField& f, double tol = 1e-10,
                             int max_iterations = 20000);

/// Minimum-norm solution of L u = f for the diffusion variant: the mean of
/// f is removed first and the result has zero mean. Direct factorization
/// with one grounded node.
TorusField pseudo_inverse(const DiscreteOperator& op, const TorusField& f);

struct SmoothingReport {
  std::vector<double> s_values;
  std::vector<double> ratios;  ///< ||chi L^{-1} f||_{H^{s+2}} / ||f||_{H^s}
};

/// Two-derivative gain of the localized solution. Where chi excludes the
/// degenerate set the ratios converge under refinement; they grow without
/// bound when chi u sees it.
SmoothingReport smoothing_check(const DiscreteOperator& op, const TorusField& f, const TorusField& chi,
                                const std::vector<double>& s_values);

// ---------------------------------------------------------------------------

/// cos^2 bump in x on [-0.8, 0.8] times cos^2 bump in t on [-0.5, 0.5].
double probe_bump(double x, double t);

struct ProbeOptions {
  double support_t = 0.5;  ///< f(x, t) = 0 for |t| > support_t
  int min_nodes = 8;       ///< nodes required across the squeezed t-support
  double tol = 1e-10;
};

struct RegularityProbeReport {
  std::vector<double> s_values;
  std::vector<double> eps_values;   ///< resolved values only, decreasing
  std::vector<double> skipped_eps;
  /// [s index][eps index]
  std::vector<std::vector<double>> input_norms;
  std::vector<std::vector<double>> output_norms;
  std::vector<std::vector<double>> ratios;
  /// least-squares slope of log ||f_eps||_{H^s} against log eps
  std::vector<double> input_exponent;
  std::vector<std::string> warnings;
  int nx = 0, nt = 0;
};

/// Solves L u = f(x, t / eps) for every resolvable eps (concurrently) and
/// records Sobolev norms of input and output. Throws parameter when eps is
/// not strictly decreasing in (0, 1] or the variant is not invertible.
RegularityProbeReport regularity_probe(const DiscreteOperator& op, const std::function<double(double, double)>& f,
                                       const std::vector<double>& s_values, const std::vector<double>& eps_values,
                                       const ProbeOptions& options = {});

// ---------------------------------------------------------------------------

enum class HeatScheme { implicit_euler, crank_nicolson };
const char* to_string(HeatScheme scheme) noexcept;

struct HeatOptions {
  double dt = 0.01;
  double tau_max = 3.0;
  HeatScheme scheme = HeatScheme::implicit_euler;
  std::vector<double> s_values{0.0};
  bool keep_snapshots = false;
};

struct HeatRun {
  HeatScheme scheme = HeatScheme::implicit_euler;
  double dt = 0;
  std::vector<double> tau;
  std::vector<double> mean;
  std::vector<double> l2_mean_zero;
  std::vector<double> s_values;
  std::vector<std::vector<double>> sobolev;  ///< [s index][step]
  std::vector<TorusField> snapshots;
  /// max over steps of ||u_{n+1} - mean|| - ||u_n - mean|| (<= 0 for a contraction)
  double max_l2_increase = 0;
  double mean_drift = 0;
};

/// Evolves (d_tau + L) u = 0 from f. Requires the diffusion variant. Each
/// step is a direct sparse LDL^T solve of (I + c dt L). Crank-Nicolson runs
/// start with two implicit half-steps to damp stiff modes.
HeatRun heat_evolve(const DiscreteOperator& op, const TorusField& f, const HeatOptions& options);

/// Decay rate -(d/dtau) log ||u - mean|| fitted over the trailing fraction
/// of the run.
double decay_rate(const HeatRun& run, double trailing_fraction = 0.2);

struct GrowthWindow {
  double start = 0;
  double end = 0;
  double length() const noexcept { return end - start; }
};

struct GrowthReport {
  double s = 0;
  std::vector<double> slopes;  ///< per-step log-slope of ||u||_{H^s}
  std::vector<GrowthWindow> windows;
  double max_slope = 0;
  double longest_window = 0;
  bool has_positive_window() const noexcept { return !windows.empty(); }
};

/// Windows are maximal runs of steps with slope above `threshold`. Throws
/// parameter when s was not recorded by the run.
GrowthReport growth_scan(const HeatRun& run, double s, double threshold = 1e-12);

// ---------------------------------------------------------------------------

struct SpectralGap {
  double lambda1 = 0;   ///< smallest nonzero eigenvalue (diffusion) or smallest eigenvalue (invertible)
  double constant = 0;  ///< 1 / lambda1
  double residual = 0;  ///< ||L v - lambda1 v|| / lambda1 for the unit Ritz vector
  int iterations = 0;
  TorusField eigenvector;  ///< unit vector in the cell-weighted norm
};

/// Shift-invert Lanczos with full reorthogonalization on the mean-zero
/// complement (diffusion) or on the whole space (invertible). Throws solver
/// on non-convergence and when lambda1 <= 0.
SpectralGap spectral_gap_check(const DiscreteOperator& op, double tol = 1e-12, int max_iterations = 150,
                               std::uint64_t seed = 1);

/// Smallest Ritz value of L itself after `iterations` Lanczos steps.
double min_ritz_value(const DiscreteOperator& op, int iterations = 60, std::uint64_t seed = 1);

struct SemigroupCheck {
  double discrepancy = 0;  ///< ||integral - L^+ f|| / ||L^+ f|| (0 when f = 0)
  double tail_bound = 0;   ///< (1 + dt lambda1)^{-steps}
  double lambda1 = 0;
  double tau_max = 0;
  int steps = 0;
  TorusField integral;
};

/// Right-endpoint sum dt * sum_{n >= 1} u_n of implicit-Euler iterates up to
/// tau_max = tau_factor / lambda1. For that quadrature the infinite sum equals
/// L^+ f exactly, so the discrepancy is the tail alone. Throws parameter when
/// f has nonzero mean.
SemigroupCheck semigroup_inverse_check(const DiscreteOperator& op, const TorusField& f, double tau_factor = 12.0,
                                       double dt = 0.05);

/// Same, with lambda1 supplied by the caller.
SemigroupCheck semigroup_inverse_check(const DiscreteOperator& op, const TorusField& f, double lambda1,
                                       double tau_factor, double dt);

// ---------------------------------------------------------------------------

struct TraceReport {
  double gamma = 0;
  double trace_sq = 0;        ///< sum over x = +-1 of integral |u(x, t)|^2 dt
  double strip_grad_sq = 0;   ///< ||d_x u||^2 over 1 <= |x| <= 1 + gamma
  double full_grad_sq = 0;    ///< ||d_x u||^2 over the whole torus
  double constant = 0;        ///< trace_sq / (gamma * strip_grad_sq), 0 when both vanish
  bool holds = false;         ///< constant <= 1.05
};

/// Discrete trace inequality at x = +-1 for u supported in |x| <= 1 + gamma.
/// Requires nodes at x = +-1 and at +-(1 + gamma). Throws parameter on a
/// support violation or misaligned gamma.
TraceReport trace_inequality_check(const TorusField& u, double gamma);

// ---------------------------------------------------------------------------

/// Columns tau, mean, l2_mean_zero, then one H^s column per recorded s.
void write_heat_csv(const HeatRun& run, std::ostream& os);
void write_heat_csv(const HeatRun& run, const std::filesystem::path& path);
/// Columns s, eps, input_norm, output_norm, ratio.
void write_probe_csv(const RegularityProbeReport& report, std::ostream& os);
void write_probe_csv(const RegularityProbeReport& report, const std::filesystem::path& path);

}  // namespace degenlab
