#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "graspeeg/matrix.hpp"

namespace oracle {

// One-sided periodogram |DFT|^2 by the O(n^2) definition, bins 0..n/2.
inline std::vector<double> periodogram(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) {
    long double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const long double a = 2.0L * std::numbers::pi_v<long double> * k * t / n;
      re += x[t] * std::cos(a);
      im -= x[t] * std::sin(a);
    }
    p[k] = static_cast<double>(re * re + im * im);
  }
  return p;
}

struct Moments {
  long double mean, variance, skewness, kurtosis;
};

// Textbook formulas in extended precision: unbiased variance, biased-moment
// skewness and (non-excess) kurtosis.
inline Moments moments(const std::vector<double>& x) {
  const long double n = static_cast<long double>(x.size());
  long double s = 0;
  for (double v : x) s += v;
  const long double mean = s / n;
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const long double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const long double var = m2 / (n - 1);
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {mean, var, m3 / std::pow(m2, 1.5L), m4 / (m2 * m2)};
}

// Amari index of P = W A, normalised to [0, 1]; 0 for a scaled permutation.
inline double amari_index(const graspeeg::Matrix& p) {
  const std::size_t n = p.rows();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double mx = 0, sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      mx = std::max(mx, std::abs(p(i, j)));
      sum += std::abs(p(i, j));
    }
    total += sum / mx - 1;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double mx = 0, sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx = std::max(mx, std::abs(p(i, j)));
      sum += std::abs(p(i, j));
    }
    total += sum / mx - 1;
  }
  return total / (2.0 * n * (n - 1));
}

// Squared magnitude of a digital Butterworth bandpass obtained by the bilinear
// transform of the analog prototype with prewarped edges.
inline double butterworth_bandpass_mag2(double f, double low, double high, int order, double fs) {
  auto warp = [fs](double hz) { return 2.0 * fs * std::tan(std::numbers::pi * hz / fs); };
  const double w = warp(f), wl = warp(low), wh = warp(high);
  const double x = (w * w - wl * wh) / (w * (wh - wl));
  return 1.0 / (1.0 + std::pow(x * x, order));
}

// Cells of a G x G grid over [-1, 1]^2 whose centres lie inside the unit circle.
inline std::size_t inside_cells(std::size_t g) {
  std::size_t count = 0;
  for (std::size_t r = 0; r < g; ++r)
    for (std::size_t c = 0; c < g; ++c) {
      const double x = -1.0 + (2.0 * c + 1.0) / g;
      const double y = 1.0 - (2.0 * r + 1.0) / g;
      if (x * x + y * y <= 1.0) ++count;
    }
  return count;
}

// Naive full linear convolution, trimmed to "same" length.
inline std::vector<std::complex<double>> convolve_same(const std::vector<double>& x,
                                                      const std::vector<std::complex<double>>& k) {
  const std::size_t n = x.size(), m = k.size(), half = m / 2;
  std::vector<std::complex<long double>> full(n + m - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      full[i + j] += std::complex<long double>(x[i]) * std::complex<long double>(k[j].real(), k[j].imag());
  std::vector<std::complex<double>> out(n);
  for (std::size_t t = 0; t < n; ++t)
    out[t] = {static_cast<double>(full[t + half].real()), static_cast<double>(full[t + half].imag())};
  return out;
}

// Test-side randomness, deliberately separate from the library generator.
inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace oracle
