#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degenlab/common.hpp"

namespace degenlab {

/// The exceptional Sobolev set derived from the Dirichlet values sigma0.
struct SpectrumReport {
  std::vector<double> sigma0;           ///< sorted real w_k
  std::vector<double> sigma;            ///< s_j = sqrt(w + 1/4), strictly increasing
  std::vector<std::size_t> source;      ///< sigma[j] comes from sigma0[source[j]]
  double s0 = 0;                        ///< least element of sigma (0 if empty)
  std::vector<double> gamma;            ///< singular exponents; real part s_j
  bool zero_membership_flag = false;    ///< some w <= -1/4, i.e. s = 0 would lie in the set
  std::size_t nonreal_pair_count = 0;   ///< w < -1/4: each gives a conjugate pair of nonreal z
  std::vector<int> predicted_codimension;  ///< conjectural 2(j+1) for s_j < s < s_{j+1}
  std::string profile_fingerprint;
  std::vector<std::string> warnings;
};

/// Throws parameter on an empty or unsorted sigma0.
SpectrumReport compute_sigma(const std::vector<double>& sigma0, std::string fingerprint = {});

/// Second counting rule for nonreal z with z(z+1) in sigma0: solves
/// z^2 + z - w = 0 for every w and counts roots with nonzero imaginary part.
std::size_t count_nonreal_z_pairs(const std::vector<double>& sigma0);

struct IntervalLocation {
  enum class Kind { below_s0, between, resonant } kind = Kind::below_s0;
  /// between: s_j < s < s_{j+1} (s_{j+1} = +inf past the last value);
  /// resonant: |s - s_j| < guard.
  std::size_t j = 0;
};

inline constexpr double kResonanceGuard = 1e-6;

IntervalLocation locate_interval(const SpectrumReport& report, double s,
                                 double guard = kResonanceGuard);

/// Distance from s to the nearest element of sigma (+inf if empty).
double distance_to_sigma(const SpectrumReport& report, double s);

/// Polynomial in (s, tau) with complex coefficients; used to check the
/// algebraic reduction z(z+1) = (s + i tau)^2 - 1/4, z = s - 1/2 + i tau,
/// by expansion rather than by hand.
class BivariatePoly {
 public:
  using Monomial = std::pair<int, int>;  // (power of s, power of tau)

  BivariatePoly() = default;
  static BivariatePoly constant(Complex c);
  static BivariatePoly s();
  static BivariatePoly tau();

  BivariatePoly operator+(const BivariatePoly& o) const;
  BivariatePoly operator-(const BivariatePoly& o) const;
  BivariatePoly operator*(const BivariatePoly& o) const;

  /// (s, tau) -> (-s, -tau)
  BivariatePoly reflect() const;
  BivariatePoly real_part() const;
  BivariatePoly imag_part() const;

  bool equals(const BivariatePoly& o, double tol = 0.0) const;
  const std::map<Monomial, Complex>& terms() const noexcept { return terms_; }
  Complex evaluate(double s, double tau) const;

 private:
  void prune();
  std::map<Monomial, Complex> terms_;
};

struct ReductionCheck {
  BivariatePoly expanded;     ///< z(z+1) with z = s - 1/2 + i tau
  BivariatePoly reduced;      ///< (s + i tau)^2 - 1/4
  bool reduction_holds = false;
  bool reflection_invariant = false;  ///< invariant under (s, tau) -> (-s, -tau)
  bool imag_is_2_s_tau = false;       ///< Im = 2 s tau, so tau = 0 whenever s > 0
};

ReductionCheck verify_sigma_reduction();

}  // namespace degenlab
