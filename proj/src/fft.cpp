#include "graspeeg/fft.hpp"

#include <cmath>
#include <numbers>

#include "graspeeg/error.hpp"

namespace graspeeg {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw DataError("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Twiddles evaluated directly rather than by recurrence to keep
        // round-off independent of the transform size.
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

cplx convolve_at(std::span<const double> x, std::span<const cplx> kernel, std::size_t t) {
  const long long half = static_cast<long long>(kernel.size() / 2);
  const long long n = static_cast<long long>(x.size());
  cplx acc = 0.0;
  for (long long j = 0; j < static_cast<long long>(kernel.size()); ++j) {
    const long long idx = static_cast<long long>(t) + half - j;
    if (idx < 0 || idx >= n) continue;
    acc += x[static_cast<std::size_t>(idx)] * kernel[static_cast<std::size_t>(j)];
  }
  return acc;
}

std::vector<cplx> convolve_direct(std::span<const double> x, std::span<const cplx> kernel) {
  if (kernel.size() % 2 == 0) throw DataError("convolution kernel length must be odd");
  std::vector<cplx> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = convolve_at(x, kernel, t);
  return out;
}

std::vector<cplx> convolve_fft(std::span<const double> x, std::span<const cplx> kernel) {
  if (kernel.size() % 2 == 0) throw DataError("convolution kernel length must be odd");
  if (x.empty()) return {};
  const std::size_t full = x.size() + kernel.size() - 1;
  const std::size_t len = next_pow2(full);
  std::vector<cplx> a(len), b(len);
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (std::size_t i = 0; i < kernel.size(); ++i) b[i] = kernel[i];
  fft_inplace(a);
  fft_inplace(b);
  for (std::size_t i = 0; i < len; ++i) a[i] *= b[i];
  fft_inplace(a, true);
  const std::size_t half = kernel.size() / 2;
  return {a.begin() + static_cast<std::ptrdiff_t>(half),
          a.begin() + static_cast<std::ptrdiff_t>(half + x.size())};
}

}  // namespace graspeeg
