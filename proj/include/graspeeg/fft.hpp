#pragma once

#include <complex>
#include <span>
#include <vector>

namespace graspeeg {

using cplx = std::complex<double>;

// In-place iterative radix-2 FFT; size must be a power of two. The inverse is
// scaled by 1/n.
void fft_inplace(std::vector<cplx>& data, bool inverse = false);

std::size_t next_pow2(std::size_t n);

// Centre-aligned linear convolution of a real signal with an odd-length complex
// kernel, trimmed to the signal length ("same"). Out-of-range samples count as
// zero.
std::vector<cplx> convolve_direct(std::span<const double> x, std::span<const cplx> kernel);
std::vector<cplx> convolve_fft(std::span<const double> x, std::span<const cplx> kernel);

// One output sample of convolve_direct.
cplx convolve_at(std::span<const double> x, std::span<const cplx> kernel, std::size_t t);

}  // namespace graspeeg
