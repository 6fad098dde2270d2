#include "graspeeg/synth.hpp"

#include <cmath>
#include <numbers>

#include "graspeeg/error.hpp"
#include "graspeeg/fft.hpp"
#include "graspeeg/rng.hpp"

namespace graspeeg {

SynthConfig SynthConfig::default_config() {
  SynthConfig c;
  auto& power = c.bursts[static_cast<int>(ConditionLabel::Power)];
  power = {{"C3", 9.0, 0.3, 0.6, 24.0}, {"C3", 16.0, 0.3, 0.6, 16.0}};
  auto& precision = c.bursts[static_cast<int>(ConditionLabel::Precision)];
  precision = {{"C3", 9.0, 0.3, 0.6, 15.0}, {"C3", 16.0, 0.3, 0.6, 10.0}, {"C3", 23.0, 0.3, 0.6, 7.0}};
  return c;
}

std::size_t SynthConfig::n_samples() const {
  return static_cast<std::size_t>(std::llround(pre_s * fs) + std::llround(post_s * fs) + 1);
}

std::size_t SynthConfig::onset_index() const { return static_cast<std::size_t>(std::llround(pre_s * fs)); }

void SynthConfig::validate() const {
  if (n_trials_per_class < 1) throw ConfigError("synth: n_trials_per_class must be at least 1");
  if (!(fs > 0.0)) throw ConfigError("synth: sampling rate must be positive");
  if (!(pre_s > 0.0 && post_s > 0.0)) throw ConfigError("synth: epoch must extend both sides of onset");
  if (!(noise >= 0.0)) throw ConfigError("synth: noise must be non-negative");
  if (!(amplitude_jitter >= 0.0 && amplitude_jitter < 1.0)) throw ConfigError("synth: amplitude_jitter must lie in [0, 1)");
  for (const auto& list : bursts)
    for (const auto& b : list) {
      if (!montage.index_of(b.channel)) throw ConfigError("synth: burst on unknown channel " + b.channel);
      if (!(b.amplitude >= 0.0)) throw ConfigError("synth: burst amplitude must be non-negative");
      if (!(b.center_freq_hz > 0.0 && b.center_freq_hz < fs / 2.0))
        throw ConfigError("synth: burst frequency outside (0, fs/2)");
      if (!(b.duration_s > 0.0)) throw ConfigError("synth: burst duration must be positive");
      if (b.onset_s < -pre_s - 1e-12 || b.onset_s + b.duration_s > post_s + 1e-12)
        throw ConfigError("synth: burst window lies outside the epoch");
    }
}

std::vector<double> pink_noise(std::size_t n, double fs, double rms, std::uint64_t seed) {
  const std::size_t len = next_pow2(2 * n);
  Rng rng(seed);
  std::vector<cplx> spec(len);
  double expected_power = 0.0;  // sum of E|X_k|^2 over all bins
  for (std::size_t k = 1; k <= len / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(len);
    const double amp = 1.0 / std::sqrt(f);
    if (k == len / 2) {
      spec[k] = amp * rng.normal();
      expected_power += amp * amp;
    } else {
      const double re = rng.normal(), im = rng.normal();
      spec[k] = amp * cplx(re, im);
      spec[len - k] = std::conj(spec[k]);
      expected_power += 4.0 * amp * amp;
    }
  }
  fft_inplace(spec, true);
  // After the 1/len inverse scaling, E[x^2] = expected_power / len^2.
  const double scale = rms * static_cast<double>(len) / std::sqrt(expected_power);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real() * scale;
  return out;
}

EpochedDataset generate(const SynthConfig& config) {
  config.validate();
  EpochedDataset ds;
  ds.montage = config.montage;
  ds.sampling_rate = config.fs;
  const std::size_t n = config.n_samples();
  const std::size_t onset = config.onset_index();
  const std::size_t total = static_cast<std::size_t>(config.n_trials_per_class) * kConditionCount;
  for (std::size_t t = 0; t < total; ++t) {
    TrialEpoch e;
    e.trial_id = static_cast<int>(t + 1);
    e.label = static_cast<ConditionLabel>(t % kConditionCount);
    e.onset_index = onset;
    e.samples = Matrix(config.montage.size(), n);
    const std::uint64_t trial_seed = derive_seed(config.seed, t);
    for (std::size_t ch = 0; ch < config.montage.size(); ++ch) {
      const auto noise = pink_noise(n, config.fs, config.noise, derive_seed(trial_seed, ch + 1));
      std::copy(noise.begin(), noise.end(), e.samples.row(ch).begin());
    }
    Rng rng(derive_seed(trial_seed, 0));
    for (const auto& b : config.bursts[static_cast<int>(e.label)]) {
      const double gain = 1.0 + config.amplitude_jitter * rng.uniform(-1.0, 1.0);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      auto row = e.samples.row(*config.montage.index_of(b.channel));
      for (std::size_t i = 0; i < n; ++i) {
        const double ts = (static_cast<double>(i) - static_cast<double>(onset)) / config.fs;
        const double u = (ts - b.onset_s) / b.duration_s;
        if (u < 0.0 || u > 1.0) continue;
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u);
        row[i] += b.amplitude * gain * hann * std::sin(2.0 * std::numbers::pi * b.center_freq_hz * (ts - b.onset_s) + phase);
      }
    }
    ds.epochs.push_back(std::move(e));
  }
  return ds;
}

}  // namespace graspeeg
