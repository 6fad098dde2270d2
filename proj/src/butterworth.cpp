#include <algorithm>
#include <cmath>
#include <numbers>

#include "graspeeg/error.hpp"
#include "graspeeg/preprocessing.hpp"

namespace graspeeg {

using cplx = std::complex<double>;

void BandpassSpec::validate(double fs) const {
  if (!(fs > 0.0)) throw ConfigError("bandpass: sampling rate must be positive");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0))
    throw ConfigError("bandpass: need 0 < low < high < fs/2");
  if (order < 2 || order % 2 != 0) throw ConfigError("bandpass: order must be an even integer >= 2");
}

std::vector<Biquad> design_butterworth_bandpass(const BandpassSpec& spec, double fs) {
  spec.validate(fs);
  const int n = spec.order;
  const double fs2 = 2.0 * fs;
  const double w1 = fs2 * std::tan(std::numbers::pi * spec.low_hz / fs);
  const double w2 = fs2 * std::tan(std::numbers::pi * spec.high_hz / fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  // Analog lowpass prototype poles on the left half of the unit circle, then
  // lowpass-to-bandpass: each prototype pole p yields the roots of
  // s^2 - p*bw*s + w0^2.
  std::vector<cplx> analog;
  for (int k = 0; k < n; ++k) {
    const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n));
    const cplx a = p * bw / 2.0;
    const cplx d = std::sqrt(a * a - w0sq);
    analog.push_back(a + d);
    analog.push_back(a - d);
  }

  // Bilinear transform. The n analog zeros at s=0 map to z=1 and the n zeros
  // at infinity map to z=-1.
  cplx gain = std::pow(bw, n) * std::pow(fs2, n);
  std::vector<cplx> upper;
  for (const cplx& s : analog) {
    gain /= (fs2 - s);
    const cplx z = (fs2 + s) / (fs2 - s);
    if (std::abs(z) >= 1.0) throw NumericError("bandpass: unstable filter coefficients");
    if (z.imag() > 0.0) upper.push_back(z);
  }
  if (upper.size() != static_cast<std::size_t>(n))
    throw NumericError("bandpass: unexpected real poles in design");
  std::sort(upper.begin(), upper.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });

  const double section_gain = std::pow(gain.real(), 1.0 / n);
  std::vector<Biquad> sections;
  for (const cplx& z : upper) {
    sections.push_back({section_gain, 0.0, -section_gain, -2.0 * z.real(), std::norm(z)});
  }
  for (const auto& s : sections)
    if (!std::isfinite(s.b0) || !std::isfinite(s.a1) || !std::isfinite(s.a2))
      throw NumericError("bandpass: non-finite filter coefficients");
  return sections;
}

cplx frequency_response(const std::vector<Biquad>& sections, double f_hz, double fs) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
  cplx h = 1.0;
  for (const auto& s : sections)
    h *= (s.b0 + s.b1 * zinv + s.b2 * zinv * zinv) / (1.0 + s.a1 * zinv + s.a2 * zinv * zinv);
  return h;
}

namespace {

struct SectionState {
  double z1 = 0.0, z2 = 0.0;
};

void run_cascade(const std::vector<Biquad>& sections, std::vector<SectionState> state, std::vector<double>& x) {
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const auto& s = sections[k];
    double z1 = state[k].z1, z2 = state[k].z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

// Step-response steady state of each section for a unit input to the cascade.
std::vector<SectionState> steady_state(const std::vector<Biquad>& sections, double input) {
  std::vector<SectionState> st(sections.size());
  double u = input;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const auto& s = sections[k];
    const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y = g * u;
    st[k].z2 = s.b2 * u - s.a2 * y;
    st[k].z1 = s.b1 * u - s.a1 * y + st[k].z2;
    u = y;
  }
  return st;
}

}  // namespace

std::vector<double> sos_filter(const std::vector<Biquad>& sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run_cascade(sections, std::vector<SectionState>(sections.size()), y);
  return y;
}

Matrix bandpass_filter(const Matrix& x, const BandpassSpec& spec, double fs) {
  const auto sections = design_butterworth_bandpass(spec, fs);
  const std::size_t pad = 3 * static_cast<std::size_t>(spec.order);
  const std::size_t n = x.cols();
  if (n <= pad)
    throw DataError("bandpass: signal of " + std::to_string(n) + " samples is too short for " +
                    std::to_string(pad) + " samples of edge padding");

  Matrix out(x.rows(), n);
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r);
    for (std::size_t i = 0; i < pad; ++i) {
      ext[i] = 2.0 * src[0] - src[pad - i];
      ext[n + pad + i] = 2.0 * src[n - 1] - src[n - 2 - i];
    }
    std::copy(src.begin(), src.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

    run_cascade(sections, steady_state(sections, ext.front()), ext);
    std::reverse(ext.begin(), ext.end());
    run_cascade(sections, steady_state(sections, ext.front()), ext);
    std::reverse(ext.begin(), ext.end());

    for (std::size_t i = 0; i < n; ++i) {
      const double v = ext[pad + i];
      if (!std::isfinite(v)) throw NumericError("bandpass: non-finite output");
      out(r, i) = v;
    }
  }
  return out;
}

}  // namespace graspeeg
