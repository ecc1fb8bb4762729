#pragma once

#include <complex>
#include <vector>

namespace degenlab::detail {

/// Solves a complex tridiagonal system in place with partial pivoting
/// (LAPACK zgtsv). sub and sup have n - 1 entries; rhs is overwritten with
/// the solution. Returns false on an exactly singular pivot.
bool solve_tridiagonal(std::vector<std::complex<double>> sub, std::vector<std::complex<double>> diag,
                       std::vector<std::complex<double>> sup, std::vector<std::complex<double>>& rhs);

}  // namespace degenlab::detail
