#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graspeeg/features.hpp"
#include "graspeeg/models.hpp"
#include "graspeeg/preprocessing.hpp"
#include "graspeeg/rng.hpp"
#include "graspeeg/serialize.hpp"
#include "graspeeg/synth.hpp"
#include "graspeeg/wavelet.hpp"

namespace graspeeg {

// Fully resolved settings for every stage. One seed drives the whole run;
// stage seeds are derived from it.
struct PipelineConfig {
  std::uint64_t seed = 1;
  SynthConfig synth = SynthConfig::default_config();
  PreprocessConfig preprocess;
  std::vector<double> bank_freqs_hz = default_bank_freqs();
  double n_cycles = 4.0;
  ConvolutionMethod convolution = ConvolutionMethod::Fft;
  // Empty channels mean "every channel of the dataset's montage".
  FeatureSpec features;
  ModelKind model = ModelKind::Gbt;
  Hyperparams hyperparams;
  Task task = Task::Multiclass;
  std::size_t k = 5;
  std::size_t importance_repeats = 10;
  std::size_t importance_top_k = 10;
  std::size_t grid = 64;
  std::pair<double, double> tf_window_s = {-1.0, 1.0};
  TfBaseline tf_baseline;

  static PipelineConfig defaults();
  void validate() const;

  std::uint64_t synth_seed() const { return seed; }
  std::uint64_t ica_seed() const { return derive_seed(seed, 1); }
  std::uint64_t cv_seed() const { return derive_seed(seed, 2); }
  std::uint64_t importance_seed() const { return derive_seed(seed, 3); }

  SynthConfig resolved_synth() const;
  PreprocessConfig resolved_preprocess() const;
  MorletBank bank(double fs) const;
  FeatureSpec feature_spec(const Montage& montage) const;
};

json pipeline_config_to_json(const PipelineConfig& config);
// Keys absent from `j` keep the value in `base`; unknown keys raise ConfigError.
PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig base = PipelineConfig::defaults());

}  // namespace graspeeg
