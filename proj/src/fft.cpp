#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "degenlab/common.hpp"

namespace degenlab::detail {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, FftDirection dir) {
    const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    auto* a = fftw_alloc_complex(n);
    auto* b = fftw_alloc_complex(n);
    // FFTW_UNALIGNED: plans are later executed on std::vector storage
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = rows == 1 ? fftw_plan_dft_1d(cols, a, b, sign, flags)
                            : fftw_plan_dft_2d(rows, cols, a, b, sign, flags);
    fftw_free(a);
    fftw_free(b);
    if (p == nullptr) fail(ErrorKind::solver, "FFTW could not create a plan");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(int rows, int cols, FftDirection dir, const std::complex<double>* in,
         std::complex<double>* out) {
  fftw_plan p = cache().get(rows, cols, dir);
  // plans are out-of-place; an aliased call goes through a copy
  std::vector<std::complex<double>> copy;
  if (in == out) {
    copy.assign(in, in + static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    in = copy.data();
  }
  // fftw never writes to the input of an out-of-place c2c transform
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft(int n, FftDirection dir, const std::complex<double>* in, std::complex<double>* out) {
  run(1, n, dir, in, out);
}

void fft2(int rows, int cols, FftDirection dir, const std::complex<double>* in,
          std::complex<double>* out) {
  run(rows, cols, dir, in, out);
}

}  // namespace degenlab::detail
