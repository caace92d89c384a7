#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace chaoslab {

using cplx = std::complex<double>;

enum class FftDirection { Forward, Backward };

// In-place unnormalized discrete Fourier transform over a row-major array
// with the given shape (one or two axes). Forward uses exp(-2 pi i jk/N),
// Backward exp(+2 pi i jk/N). Plans are cached per (shape, direction);
// execution is safe from concurrent threads on distinct buffers.
void fft_inplace(std::span<cplx> data, std::span<const std::size_t> shape, FftDirection dir);

inline void fft_inplace(std::span<cplx> data, FftDirection dir) {
  const std::size_t n = data.size();
  fft_inplace(data, std::span<const std::size_t>(&n, 1), dir);
}

// Grid shape helper: `dimension` axes of `points_per_axis` each.
std::vector<std::size_t> grid_shape(int dimension, std::size_t points_per_axis);

}  // namespace chaoslab
