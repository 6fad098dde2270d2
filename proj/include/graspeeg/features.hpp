#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graspeeg/dataset.hpp"
#include "graspeeg/matrix.hpp"
#include "graspeeg/wavelet.hpp"

namespace graspeeg {

// Moments of a series. Variance uses n-1; skewness m3/m2^1.5 and kurtosis
// m4/m2^2 use biased central moments, so kurtosis is non-excess (normal -> 3).
// A series with zero spread reports skewness = kurtosis = 0 and sets
// `degenerate`.
struct StatFeatures {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  bool degenerate = false;
};

StatFeatures stat_features(std::span<const double> series);

inline constexpr std::array<std::string_view, 4> kStatNames = {"mean", "variance", "skewness", "kurtosis"};

struct FeatureBand {
  std::string name;
  double freq_hz = 0.0;
};

struct FeatureSpec {
  std::vector<std::string> channels;
  std::vector<FeatureBand> bands;
  std::pair<double, double> window_s = {0.0, 1.0};

  // Default montage channels; delta 3, alpha 9, beta_low 16, beta_high 23 Hz.
  static FeatureSpec default_spec();

  std::size_t size() const { return channels.size() * bands.size() * kStatNames.size(); }
  // "<channel>_<band>_<stat>", channel-major, then band, then stat.
  std::vector<std::string> feature_names() const;
  std::optional<std::size_t> band_index(std::string_view name) const;
  std::size_t column(std::size_t channel, std::size_t band, std::size_t stat) const {
    return (channel * bands.size() + band) * kStatNames.size() + stat;
  }
};

struct FeatureVector {
  std::vector<double> values;
  // Channel-band pairs (channel * n_bands + band) whose amplitude was constant.
  std::vector<std::size_t> degenerate;
};

// Statistics of |coefficient| over spec.window_s. Coefficients come from
// "same" convolution over the full epoch, so samples near the epoch edges carry
// zero-padding contamination.
FeatureVector extract_features(const TrialEpoch& epoch, const Montage& montage, double fs,
                               const MorletBank& bank, const FeatureSpec& spec);

struct FeatureMatrix {
  std::vector<std::string> names;
  Matrix X;  // trials x features
  std::vector<ConditionLabel> y;

  std::size_t rows() const { return X.rows(); }
  std::size_t cols() const { return X.cols(); }
};

FeatureMatrix build_feature_matrix(const EpochedDataset& dataset, const MorletBank& bank, const FeatureSpec& spec);

// CSV: optional '#'-prefixed comment lines, a header of the feature names plus
// "label", then one row per trial. `comment` lines are written verbatim after
// "# ".
std::string feature_matrix_to_csv(const FeatureMatrix& fm, const std::vector<std::string>& comment = {});
FeatureMatrix feature_matrix_from_csv(std::string_view text);
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

}  // namespace graspeeg
