#include "tridiagonal.hpp"

extern "C" void zgtsv_(const int* n, const int* nrhs, std::complex<double>* dl, std::complex<double>* d,
                       std::complex<double>* du, std::complex<double>* b, const int* ldb, int* info);

namespace degenlab::detail {

bool solve_tridiagonal(std::vector<std::complex<double>> sub, std::vector<std::complex<double>> diag,
                       std::vector<std::complex<double>> sup, std::vector<std::complex<double>>& rhs) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return true;
  const int nrhs = 1;
  int info = 0;
  zgtsv_(&n, &nrhs, sub.data(), diag.data(), sup.data(), rhs.data(), &n, &info);
  return info == 0;
}

}  // namespace degenlab::detail
