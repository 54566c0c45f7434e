#pragma once

#include <complex>
#include <vector>

namespace rigidreg {

using cplx = std::complex<double>;

// In-place unnormalized DFT of arbitrary length: forward kernel e^{-2pi i kn/N},
// inverse kernel e^{+2pi i kn/N} (no 1/N). Radix-2 for powers of two,
// Bluestein chirp-z otherwise.
void fft(std::vector<cplx>& a, bool inverse);

// Transform along one axis of a row-major (x-fastest) multi-d array.
void fft_axis(std::vector<cplx>& data, const std::vector<int>& extents, int axis, bool inverse);

// Full multi-d transform: fft_axis over every axis.
void fft_nd(std::vector<cplx>& data, const std::vector<int>& extents, bool inverse);

}  // namespace rigidreg
