#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "graspeeg/dataset.hpp"

namespace graspeeg {

// Hann-windowed sinusoid added to one channel, timed relative to onset.
struct Burst {
  std::string channel;
  double center_freq_hz = 0.0;
  double onset_s = 0.0;
  double duration_s = 0.0;
  double amplitude = 0.0;  // peak, microvolts
};

struct SynthConfig {
  int n_trials_per_class = 50;
  double fs = 250.0;
  double pre_s = 1.0;   // epoch starts this long before onset
  double post_s = 1.0;  // and ends this long after (inclusive)
  double noise = 10.0;  // RMS of the 1/f background, microvolts
  double amplitude_jitter = 0.3;  // per-trial burst amplitude factor drawn from 1 +/- jitter
  std::array<std::vector<Burst>, kConditionCount> bursts;  // indexed by ConditionLabel
  Montage montage = Montage::default_montage();
  std::uint64_t seed = 1;

  // Power: strong 9 and 16 Hz at C3 from 0.3 s. Precision: the same sites at
  // lower amplitude plus 23 Hz. NoMovement: background only.
  static SynthConfig default_config();

  void validate() const;
  std::size_t n_samples() const;
  std::size_t onset_index() const;
};

// Trials cycle through NoMovement, Power, Precision; trial ids start at 1.
EpochedDataset generate(const SynthConfig& config);

// Seeded pink (1/f power) noise with the requested expected RMS, by spectral
// shaping of complex Gaussian coefficients.
std::vector<double> pink_noise(std::size_t n, double fs, double rms, std::uint64_t seed);

}  // namespace graspeeg
