#include "graspeeg/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graspeeg/error.hpp"
#include "graspeeg/io.hpp"

namespace graspeeg {

std::vector<double> default_bank_freqs() { return {3.0, 9.0, 16.0, 23.0}; }

std::size_t MorletBank::longest_kernel() const {
  std::size_t m = 0;
  for (const auto& k : kernels) m = std::max(m, k.size());
  return m;
}

std::optional<std::size_t> MorletBank::index_of(double freq_hz) const {
  for (std::size_t i = 0; i < center_freqs_hz.size(); ++i)
    if (std::abs(center_freqs_hz[i] - freq_hz) < 1e-9) return i;
  return std::nullopt;
}

MorletBank build_morlet_bank(const std::vector<double>& freqs_hz, double n_cycles, double fs) {
  if (!(fs > 0.0)) throw ConfigError("morlet: sampling rate must be positive");
  if (!(n_cycles > 0.0)) throw ConfigError("morlet: number of cycles must be positive");
  if (freqs_hz.empty()) throw ConfigError("morlet: no frequencies");
  MorletBank bank;
  bank.center_freqs_hz = freqs_hz;
  bank.n_cycles = n_cycles;
  bank.fs = fs;
  for (double f : freqs_hz) {
    if (!(f > 0.0 && f < fs / 2.0))
      throw ConfigError("morlet: frequency " + format_double(f) + " Hz outside (0, fs/2)");
    const double sigma = n_cycles / (2.0 * std::numbers::pi * f);
    const auto half = static_cast<long long>(std::ceil(4.0 * sigma * fs));
    std::vector<cplx> k;
    k.reserve(static_cast<std::size_t>(2 * half + 1));
    double energy = 0.0;
    for (long long i = -half; i <= half; ++i) {
      const double t = static_cast<double>(i) / fs;
      const cplx v = std::polar(std::exp(-t * t / (2.0 * sigma * sigma)), 2.0 * std::numbers::pi * f * t);
      energy += std::norm(v);
      k.push_back(v);
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& v : k) v *= scale;
    bank.kernels.push_back(std::move(k));
  }
  return bank;
}

std::vector<std::vector<cplx>> cwt_coefficients(std::span<const double> x, const MorletBank& bank,
                                                ConvolutionMethod method) {
  if (x.size() < bank.longest_kernel())
    throw DataError("cwt: signal of " + std::to_string(x.size()) + " samples is shorter than the " +
                    std::to_string(bank.longest_kernel()) + "-sample kernel");
  std::vector<std::vector<cplx>> out;
  out.reserve(bank.size());
  for (const auto& k : bank.kernels)
    out.push_back(method == ConvolutionMethod::Fft ? convolve_fft(x, k) : convolve_direct(x, k));
  return out;
}

std::vector<ChannelPower> cwt_power(const Matrix& x, const MorletBank& bank, ConvolutionMethod method) {
  std::vector<ChannelPower> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto coeffs = cwt_coefficients(x.row(r), bank, method);
    ChannelPower cp{Matrix(bank.size(), x.cols()), {}};
    for (std::size_t f = 0; f < bank.size(); ++f) {
      cp.edge_half_width.push_back(bank.half_width(f));
      for (std::size_t t = 0; t < x.cols(); ++t) cp.power(f, t) = std::norm(coeffs[f][t]);
    }
    out.push_back(std::move(cp));
  }
  return out;
}

namespace {

std::size_t channel_index(const Montage& montage, const std::string& channel) {
  const auto idx = montage.index_of(channel);
  if (!idx) throw DataError("unknown channel " + channel);
  return *idx;
}

struct Crop {
  std::size_t begin, end;  // inclusive end
};

Crop crop_window(const TrialEpoch& epoch, std::pair<double, double> window_s, double fs) {
  if (!(window_s.second > window_s.first)) throw DataError("time-frequency window is empty");
  const auto [b, e] = window_indices(epoch, window_s.first, window_s.second, fs);
  // window_indices is half-open; the map also includes the end sample.
  if (e >= epoch.n_samples()) throw DataError("time-frequency window outside the epoch");
  return {b, e};
}

TimeFrequencyMap make_map(const Matrix& power, const Crop& crop, const std::string& channel,
                          const MorletBank& bank, std::size_t onset, double fs) {
  TimeFrequencyMap map;
  map.channel = channel;
  map.freqs_hz = bank.center_freqs_hz;
  map.power = Matrix(bank.size(), crop.end - crop.begin + 1);
  for (std::size_t t = crop.begin; t <= crop.end; ++t)
    map.times_s.push_back((static_cast<double>(t) - static_cast<double>(onset)) / fs);
  for (std::size_t f = 0; f < bank.size(); ++f)
    for (std::size_t t = crop.begin; t <= crop.end; ++t) map.power(f, t - crop.begin) = power(f, t);
  return map;
}

void apply_baseline(Matrix& cropped_power, const Matrix& full_power, const TrialEpoch& epoch,
                    const TfBaseline& baseline, double fs) {
  if (baseline.mode == BaselineMode::None) return;
  const auto [b, e] = window_indices(epoch, baseline.window_s.first, baseline.window_s.second, fs);
  if (e <= b) throw DataError("baseline window is empty");
  for (std::size_t f = 0; f < cropped_power.rows(); ++f) {
    double ref = 0.0;
    for (std::size_t t = b; t < e; ++t) ref += full_power(f, t);
    ref /= static_cast<double>(e - b);
    if (!(ref > 0.0)) throw NumericError("baseline power is zero; cannot normalise");
    for (double& v : cropped_power.row(f)) {
      v /= ref;
      if (baseline.mode == BaselineMode::Decibel) v = 10.0 * std::log10(v);
    }
  }
}

}  // namespace

TimeFrequencyMap time_frequency_map(const TrialEpoch& epoch, const Montage& montage, double fs,
                                    const std::string& channel, const MorletBank& bank,
                                    std::pair<double, double> window_s, const TfBaseline& baseline) {
  const std::size_t ch = channel_index(montage, channel);
  const Crop crop = crop_window(epoch, window_s, fs);
  Matrix single(1, epoch.n_samples());
  std::copy(epoch.samples.row(ch).begin(), epoch.samples.row(ch).end(), single.row(0).begin());
  const Matrix power = cwt_power(single, bank).front().power;
  TimeFrequencyMap map = make_map(power, crop, channel, bank, epoch.onset_index, fs);
  apply_baseline(map.power, power, epoch, baseline, fs);
  return map;
}

TimeFrequencyMap average_time_frequency_map(const EpochedDataset& dataset, ConditionLabel label,
                                            const std::string& channel, const MorletBank& bank,
                                            std::pair<double, double> window_s, const TfBaseline& baseline) {
  const std::size_t ch = channel_index(dataset.montage, channel);
  Matrix sum;
  const TrialEpoch* first = nullptr;
  std::size_t count = 0;
  for (const auto& e : dataset.epochs) {
    if (e.label != label) continue;
    Matrix single(1, e.n_samples());
    std::copy(e.samples.row(ch).begin(), e.samples.row(ch).end(), single.row(0).begin());
    Matrix p = cwt_power(single, bank).front().power;
    if (!first) {
      first = &e;
      sum = std::move(p);
    } else {
      for (std::size_t i = 0; i < sum.data().size(); ++i) sum.data()[i] += p.data()[i];
    }
    ++count;
  }
  if (!first) throw DataError(std::string("no epochs with label ") + std::string(label_name(label)));
  for (double& v : sum.data()) v /= static_cast<double>(count);
  const Crop crop = crop_window(*first, window_s, dataset.sampling_rate);
  TimeFrequencyMap map = make_map(sum, crop, channel, bank, first->onset_index, dataset.sampling_rate);
  apply_baseline(map.power, sum, *first, baseline, dataset.sampling_rate);
  return map;
}

TopographicSnapshot topographic_snapshot(const EpochedDataset& dataset, ConditionLabel label,
                                         const MorletBank& bank, double t_s, double f_hz) {
  const auto fi = bank.index_of(f_hz);
  if (!fi) throw ConfigError("frequency " + format_double(f_hz) + " Hz is not in the wavelet bank");
  const auto& kernel = bank.kernels[*fi];
  TopographicSnapshot snap;
  snap.time_s = t_s;
  snap.freq_hz = f_hz;
  snap.channels = dataset.montage.channels();
  snap.values.assign(dataset.montage.size(), 0.0);
  std::size_t count = 0;
  for (const auto& e : dataset.epochs) {
    if (e.label != label) continue;
    if (e.n_samples() < bank.longest_kernel()) throw DataError("epoch shorter than the wavelet kernel");
    const long long t = static_cast<long long>(e.onset_index) + std::llround(t_s * dataset.sampling_rate);
    if (t < 0 || t >= static_cast<long long>(e.n_samples()))
      throw DataError("snapshot time " + format_double(t_s) + " s outside the epoch");
    for (std::size_t ch = 0; ch < dataset.montage.size(); ++ch)
      snap.values[ch] += std::norm(convolve_at(e.samples.row(ch), kernel, static_cast<std::size_t>(t)));
    ++count;
  }
  if (count == 0) throw DataError(std::string("no epochs with label ") + std::string(label_name(label)));
  for (double& v : snap.values) v /= static_cast<double>(count);
  return snap;
}

ScalpPosition ScalpGrid::centre(std::size_t row, std::size_t col) const {
  const double g = static_cast<double>(size);
  return {-1.0 + (2.0 * static_cast<double>(col) + 1.0) / g, 1.0 - (2.0 * static_cast<double>(row) + 1.0) / g};
}

double interpolate_at(std::span<const double> values, const Montage& montage, ScalpPosition where) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < montage.size(); ++k) {
    const double dx = where.x - montage.positions()[k].x;
    const double dy = where.y - montage.positions()[k].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < 1e-24) return values[k];
    num += values[k] / d2;
    den += 1.0 / d2;
  }
  return num / den;
}

ScalpGrid scalp_interpolate(const TopographicSnapshot& snapshot, const Montage& montage, std::size_t grid) {
  if (grid < 8) throw ConfigError("scalp grid must be at least 8 cells wide");
  if (snapshot.values.size() != montage.size()) throw DataError("snapshot and montage channel counts differ");
  if (montage.size() == 0) throw DataError("montage has no electrodes");
  for (std::size_t i = 0; i < montage.size(); ++i)
    for (std::size_t j = i + 1; j < montage.size(); ++j) {
      const double dx = montage.positions()[i].x - montage.positions()[j].x;
      const double dy = montage.positions()[i].y - montage.positions()[j].y;
      if (dx * dx + dy * dy < 1e-18)
        throw DataError("duplicate electrode positions: " + montage.channels()[i] + ", " + montage.channels()[j]);
    }
  ScalpGrid g;
  g.size = grid;
  g.values.assign(grid * grid, 0.0);
  g.inside.assign(grid * grid, false);
  for (std::size_t r = 0; r < grid; ++r)
    for (std::size_t c = 0; c < grid; ++c) {
      const ScalpPosition p = g.centre(r, c);
      if (p.x * p.x + p.y * p.y > 1.0) continue;
      g.inside[r * grid + c] = true;
      g.values[r * grid + c] = interpolate_at(snapshot.values, montage, p);
    }
  return g;
}

}  // namespace graspeeg
