#pragma once

// Thin FFTW wrapper. Plans are cached per thread; only plan creation touches
// the (non-reentrant) FFTW planner and is serialized.

#include <complex>
#include <span>

namespace mvs::detail {

/// Unnormalized forward r2c transform of an n x n row-major real array.
/// `out` holds n rows of n/2+1 complex values.
void fft_r2c(int n, std::span<const double> in, std::span<std::complex<double>> out);

/// Unnormalized inverse c2r transform; `in` is clobbered.
void fft_c2r(int n, std::span<std::complex<double>> in, std::span<double> out);

}  // namespace mvs::detail
