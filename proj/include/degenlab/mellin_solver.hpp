#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "degenlab/coefficient_models.hpp"
#include "degenlab/irregularity_spectrum.hpp"

namespace degenlab {

/// Uniform x-grid on [-1, 1] (endpoints included) and a uniform grid in
/// u = log|t| on [u_min, u_max) shared by both half-strips.
struct StripGrid {
  int nx = 513;
  int ntau = 4096;
  double u_min = -20.0;
  double u_max = 6.0;

  void validate() const;
  double hx() const noexcept { return 2.0 / (nx - 1); }
  double du() const noexcept { return (u_max - u_min) / ntau; }
  double x(int i) const noexcept { return -1.0 + i * hx(); }
  double u(int n) const noexcept { return u_min + n * du(); }
  double t(int n) const noexcept;  ///< |t| at log node n
  /// Mellin frequency of FFT bin k (FFT ordering: negative frequencies last).
  double tau(int k) const noexcept;
  double dtau() const noexcept;
  /// Trapezoid weights in x.
  double x_weight(int i) const noexcept { return (i == 0 || i == nx - 1) ? 0.5 * hx() : hx(); }
  bool operator==(const StripGrid&) const = default;
};

enum class Half { positive, negative };

/// Samples on S+ (t = e^u) and S- (t = -e^u), row-major by x-node.
class StripField {
 public:
  StripField() = default;
  explicit StripField(const StripGrid& grid);

  /// Samples fn(x, t) on both halves.
  static StripField sample(const StripGrid& grid, const std::function<Complex(double, double)>& fn);

  const StripGrid& grid() const noexcept { return grid_; }
  Complex& at(Half h, int i, int n) { return data(h)[static_cast<std::size_t>(i) * grid_.ntau + n]; }
  Complex at(Half h, int i, int n) const { return data(h)[static_cast<std::size_t>(i) * grid_.ntau + n]; }
  std::vector<Complex>& data(Half h) { return h == Half::positive ? pos_ : neg_; }
  const std::vector<Complex>& data(Half h) const { return h == Half::positive ? pos_ : neg_; }

  /// L2 norm squared over one half-strip, dx dt quadrature (dt = t du).
  double norm_sq(Half h) const;
  double norm_sq() const { return norm_sq(Half::positive) + norm_sq(Half::negative); }
  /// max |u(+-1, t)| over both halves.
  double boundary_trace_max() const;
  /// max over x of |f e^{u/2}| at the two ends of the log window, relative
  /// to the interior maximum (0 for the zero field).
  double endpoint_ratio(Half h) const;

  StripField& operator+=(const StripField& o);
  StripField& operator*=(Complex c);
  friend StripField operator-(const StripField& a, const StripField& b);

 private:
  StripGrid grid_;
  std::vector<Complex> pos_, neg_;
};

/// Partial Mellin transform on the line Im = 1/2, one value per (x-node,
/// tau-bin); tau-bins in FFT order.
class MellinField {
 public:
  MellinField() = default;
  explicit MellinField(const StripGrid& grid);

  const StripGrid& grid() const noexcept { return grid_; }
  Complex& at(int i, int k) { return values_[static_cast<std::size_t>(i) * grid_.ntau + k]; }
  Complex at(int i, int k) const { return values_[static_cast<std::size_t>(i) * grid_.ntau + k]; }
  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

  /// c0 * sum |F|^2 dtau dx with c0 = 1 / (2 pi); equals the L2 norm squared
  /// of the originating half-field.
  double plancherel_norm_sq() const;
  /// x-L2 norm of the tau-column k.
  double column_norm(int k) const;

 private:
  StripGrid grid_;
  std::vector<Complex> values_;
};

inline constexpr double kDecayWarn = 1e-10;
inline constexpr double kDecayFail = 1e-6;

/// F(x, tau + i/2) = integral f(x, e^u) e^{u/2} e^{-i tau u} du, computed as a
/// weighted FFT. Warns when the weighted field does not decay to 1e-10 of
/// its maximum at the window ends; throws truncation beyond 1e-6.
MellinField mellin_forward(const StripField& field, Half half);

/// Inverse of mellin_forward, writing into the given half of `out`.
void mellin_inverse(const MellinField& mf, Half half, StripField& out);
StripField mellin_inverse(const MellinField& mf, Half half);

/// Multiplier of t d_t under the transform: i tau - 1/2.
Complex t_dt_symbol(double tau) noexcept;

/// Options for the per-frequency boundary value problem.
struct HzSolveOptions {
  bool check_resonance = true;
  double resonance_threshold = 1e-8;   ///< homogeneous end value below this -> resonant
  double shooting_step = 1.0 / 512;
};

/// Second-order centered differences for
///   H_z g = -g'' - z(z+1) alpha^2 g + beta g = rhs,  g(+-1) = 0,
/// on the uniform grid implied by rhs.size() (endpoints included).
std::vector<Complex> solve_hz_bvp(const CoefficientProfile& profile, Complex z,
                                  const std::vector<Complex>& rhs, const HzSolveOptions& opts = {});

/// Discrete residual of H_z g - rhs on interior nodes relative to max |rhs|
/// (absolute when rhs = 0).
double hz_residual(const CoefficientProfile& profile, Complex z, const std::vector<Complex>& g,
                   const std::vector<Complex>& rhs);

/// Right-hand side f1 + t d_t f2 + (t d_t)^2 f3; f2 and f3 optional.
struct ModelRhs {
  StripField f1;
  std::optional<StripField> f2;
  std::optional<StripField> f3;
};

struct ModelSolveOptions {
  double resonance_margin = 1e-4;
  std::optional<SpectrumReport> spectrum;  ///< computed on demand when absent
};

/// Solves L_s u = f on the strip with u(+-1, t) = 0 by transforming in t,
/// solving H_{s - 1/2 + i tau} per frequency and transforming back. The
/// negative half is handled by t -> -t.
StripField solve_model_dirichlet(const CoefficientProfile& profile, double s, const ModelRhs& rhs,
                                 const ModelSolveOptions& opts = {});
StripField solve_model_dirichlet(const CoefficientProfile& profile, double s, const StripField& f,
                                 const ModelSolveOptions& opts = {});

/// Applies L_s to u: second differences in x, t d_t spectrally in u = log t.
/// Boundary rows are left at zero.
StripField apply_model_operator(const CoefficientProfile& profile, double s, const StripField& u);

/// ||L_s u - f|| / ||f|| over interior rows of both halves.
double model_residual(const CoefficientProfile& profile, double s, const StripField& u,
                      const StripField& f);

/// Spectrum adequate for deciding whether s is resonant.
SpectrumReport spectrum_for_exponent(const CoefficientProfile& profile, double s);

struct TauDecayRow {
  double tau;
  double ratio;  ///< ||g(., tau)|| / ||f^(., tau)||
};

struct TauDecayReport {
  double s = 0;
  std::vector<TauDecayRow> rows;  ///< sorted by tau
  double tail_slope = 0;          ///< least-squares slope of log ratio vs log <tau>
  double tail_min = 10, tail_max = 100;
  double constant = 0;            ///< max ratio * <tau>^2
};

/// Per-frequency gain of the solution operator on the positive half.
TauDecayReport tau_decay_report(const CoefficientProfile& profile, double s, const StripField& f,
                                double tail_min = 10.0, double tail_max = 100.0,
                                const ModelSolveOptions& opts = {});
/// Same, starting from a prescribed transform.
TauDecayReport tau_decay_report(const CoefficientProfile& profile, double s, const MellinField& fhat,
                                double tail_min = 10.0, double tail_max = 100.0,
                                const ModelSolveOptions& opts = {});

// --- StripField interchange -------------------------------------------------

/// CSV: a "# strip_field nx=.. ntau=.. u_min=.. u_max=.." line, then the
/// header "x,t,Re,Im" and one row per sample (positive half first).
void write_strip_csv(const StripField& field, std::ostream& os);
StripField read_strip_csv(std::istream& is);

/// Binary: magic "DGLSTRP1", uint32 nx, uint32 ntau, float64 u_min,
/// float64 u_max, then positive-half and negative-half samples as
/// row-major (re, im) float64 pairs; little-endian.
void write_strip_binary(const StripField& field, std::ostream& os);
StripField read_strip_binary(std::istream& is);

}  // namespace degenlab
