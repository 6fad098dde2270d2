#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "graspeeg/features.hpp"
#include "graspeeg/models.hpp"
#include "graspeeg/wavelet.hpp"

namespace graspeeg {

struct ImportanceReport {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> scores;  // feature x repeat: baseline - permuted accuracy
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  double baseline_accuracy = 0.0;
  std::vector<std::size_t> ranking;  // feature indices by median score, descending
  std::size_t folds = 0;             // 0 for a single held-out set

  // Mean score per (channel, band) over the four statistics, filled by
  // aggregate_channel_band.
  std::vector<std::string> channels;
  std::vector<std::string> bands;
  Matrix channel_band;

  double median_score(std::size_t feature) const;
  double mean_score(std::size_t feature) const;
};

// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Shuffles one column at a time with an independent stream per
// (feature, repeat); X_val itself is never modified.
ImportanceReport permutation_importance(const TrainedModel& model, const Matrix& X_val, std::span<const int> y_val,
                                        std::size_t repeats, std::uint64_t seed,
                                        const std::vector<std::string>& feature_names = {});

// Fits on each training fold and permutes the held-out fold; per repeat the
// score is the mean over folds.
ImportanceReport cross_validated_importance(ModelKind kind, const Hyperparams& hp, const FeatureMatrix& features,
                                            Task task, std::size_t k, std::size_t repeats, std::uint64_t seed);

// Recomputes `ranking` from the scores.
void rank_features(ImportanceReport& report);

void aggregate_channel_band(ImportanceReport& report, const FeatureSpec& spec);

struct BoxplotEntry {
  std::size_t feature = 0;
  std::string name;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

std::vector<BoxplotEntry> boxplot_stats(const ImportanceReport& report, std::size_t top_k = 10);

// Channel values for one band from the channel-band aggregate, with the
// interpolated grid attached.
TopographicSnapshot importance_topomap(const ImportanceReport& report, const Montage& montage,
                                       const std::string& band, std::size_t grid = 64);

}  // namespace graspeeg
