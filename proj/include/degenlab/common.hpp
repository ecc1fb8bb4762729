#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace degenlab {

using Complex = std::complex<double>;

/// Categories of failure raised by the numerical core. The C API maps each
/// kind onto a distinct status code.
enum class ErrorKind {
  parameter,          ///< argument outside its documented range
  degenerate_profile, ///< alpha vanishes somewhere on [-1, 1]
  resolution,         ///< grid too coarse for the requested geometry
  overflow,           ///< non-finite values during integration
  not_eigenvalue,     ///< w is not within tolerance of a Dirichlet eigenvalue
  resonance,          ///< exponent or frequency sits on the irregularity set
  truncation,         ///< field does not decay at the ends of the log-t window
  solver,             ///< iterative solver or eigensolver failure
  config,             ///< malformed experiment configuration
  io,                 ///< file could not be read or written
  schema,             ///< report file of unknown or wrong schema
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

/// Warnings are non-fatal; they go to the installed sink (stderr by default)
/// and callers usually also record them in the report they return.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

/// Number of worker threads; read once from DEGENLAB_THREADS (default 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once and
/// bodies must write to disjoint slots; results are independent of the
/// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// 64-bit FNV-1a, used for profile fingerprints and manifest checksums.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::string hex64(std::uint64_t value);

/// Round-trippable decimal (17 significant digits).
std::string format_double(double value);

/// Evenly spaced values, endpoints included.
std::vector<double> linspace(double a, double b, std::size_t n);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace degenlab
