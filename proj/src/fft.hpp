#pragma once

// Internal FFTW wrapper. Plans are cached per (length, direction) and
// executed with the new-array interface, which is safe to call concurrently.

#include <complex>

namespace degenlab::detail {

enum class FftDirection { forward, backward };

/// Unnormalized DFT of length n from in to out (in == out allowed).
void fft(int n, FftDirection dir, const std::complex<double>* in, std::complex<double>* out);

/// Unnormalized 2D DFT on a row-major rows x cols array.
void fft2(int rows, int cols, FftDirection dir, const std::complex<double>* in,
          std::complex<double>* out);

}  // namespace degenlab::detail
