#include "graspeeg/importance.hpp"

#include <algorithm>
#include <numeric>

#include "graspeeg/error.hpp"
#include "graspeeg/rng.hpp"

namespace graspeeg {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double ImportanceReport::median_score(std::size_t feature) const { return quantile(scores.at(feature), 0.5); }

double ImportanceReport::mean_score(std::size_t feature) const {
  const auto& s = scores.at(feature);
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

void rank_features(ImportanceReport& report) {
  std::vector<double> med(report.scores.size());
  for (std::size_t j = 0; j < med.size(); ++j) med[j] = report.median_score(j);
  report.ranking.resize(med.size());
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return med[a] > med[b]; });
}

ImportanceReport permutation_importance(const TrainedModel& model, const Matrix& X_val, std::span<const int> y_val,
                                        std::size_t repeats, std::uint64_t seed,
                                        const std::vector<std::string>& feature_names) {
  if (X_val.rows() == 0) throw DataError("permutation_importance: empty validation set");
  if (X_val.cols() != model.feature_count)
    throw DataError("permutation_importance: expected " + std::to_string(model.feature_count) + " features, got " +
                    std::to_string(X_val.cols()));
  if (y_val.size() != X_val.rows()) throw DataError("permutation_importance: label count mismatch");
  if (repeats < 1) throw ConfigError("permutation_importance: repeats must be at least 1");

  ImportanceReport rep;
  rep.repeats = repeats;
  rep.seed = seed;
  rep.feature_names = feature_names;
  if (rep.feature_names.empty())
    for (std::size_t j = 0; j < X_val.cols(); ++j) rep.feature_names.push_back("f" + std::to_string(j));
  rep.baseline_accuracy = accuracy(predict(model, X_val), y_val);

  const std::size_t n = X_val.rows();
  Matrix work = X_val;
  std::vector<std::size_t> perm(n);
  rep.scores.assign(X_val.cols(), std::vector<double>(repeats));
  for (std::size_t j = 0; j < X_val.cols(); ++j) {
    for (std::size_t r = 0; r < repeats; ++r) {
      Rng rng(derive_seed(seed, j + 1, r + 1));
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(std::span<std::size_t>(perm));
      for (std::size_t i = 0; i < n; ++i) work(i, j) = X_val(perm[i], j);
      rep.scores[j][r] = rep.baseline_accuracy - accuracy(predict(model, work), y_val);
    }
    for (std::size_t i = 0; i < n; ++i) work(i, j) = X_val(i, j);
  }
  rank_features(rep);
  return rep;
}

ImportanceReport cross_validated_importance(ModelKind kind, const Hyperparams& hp, const FeatureMatrix& features,
                                            Task task, std::size_t k, std::size_t repeats, std::uint64_t seed) {
  const TaskData td = select_task(features, task);
  const auto folds = stratified_kfold(td.y, k, seed);
  ImportanceReport total;
  total.repeats = repeats;
  total.seed = seed;
  total.folds = folds.size();
  total.feature_names = features.names;
  total.scores.assign(features.cols(), std::vector<double>(repeats, 0.0));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    Matrix xtr(folds[f].train.size(), td.X.cols()), xte(folds[f].test.size(), td.X.cols());
    std::vector<int> ytr, yte;
    for (std::size_t i = 0; i < folds[f].train.size(); ++i) {
      const auto r = folds[f].train[i];
      std::copy(td.X.row(r).begin(), td.X.row(r).end(), xtr.row(i).begin());
      ytr.push_back(td.y[r]);
    }
    for (std::size_t i = 0; i < folds[f].test.size(); ++i) {
      const auto r = folds[f].test[i];
      std::copy(td.X.row(r).begin(), td.X.row(r).end(), xte.row(i).begin());
      yte.push_back(td.y[r]);
    }
    Hyperparams fold_hp = hp;
    const auto fold_seed = derive_seed(seed, 0x5eed, f);
    fold_hp.svm.seed = fold_hp.rf.seed = fold_hp.gbt.seed = fold_seed;
    const TrainedModel m = fit_model(kind, fold_hp, xtr, ytr, true);
    const auto rep = permutation_importance(m, xte, yte, repeats, derive_seed(seed, 0x1a4, f), features.names);
    total.baseline_accuracy += rep.baseline_accuracy / static_cast<double>(folds.size());
    for (std::size_t j = 0; j < rep.scores.size(); ++j)
      for (std::size_t r = 0; r < repeats; ++r) total.scores[j][r] += rep.scores[j][r] / static_cast<double>(folds.size());
  }
  rank_features(total);
  return total;
}

void aggregate_channel_band(ImportanceReport& report, const FeatureSpec& spec) {
  if (report.scores.size() != spec.size())
    throw DataError("importance: report has " + std::to_string(report.scores.size()) + " features, spec has " +
                    std::to_string(spec.size()));
  report.channels = spec.channels;
  report.bands.clear();
  for (const auto& b : spec.bands) report.bands.push_back(b.name);
  report.channel_band = Matrix(spec.channels.size(), spec.bands.size());
  for (std::size_t c = 0; c < spec.channels.size(); ++c)
    for (std::size_t b = 0; b < spec.bands.size(); ++b) {
      double s = 0.0;
      for (std::size_t st = 0; st < kStatNames.size(); ++st) s += report.mean_score(spec.column(c, b, st));
      report.channel_band(c, b) = s / static_cast<double>(kStatNames.size());
    }
}

std::vector<BoxplotEntry> boxplot_stats(const ImportanceReport& report, std::size_t top_k) {
  if (top_k > report.scores.size())
    throw ConfigError("boxplot: top_k " + std::to_string(top_k) + " exceeds the feature count " +
                      std::to_string(report.scores.size()));
  std::vector<BoxplotEntry> out;
  for (std::size_t i = 0; i < top_k; ++i) {
    const std::size_t j = report.ranking.at(i);
    const auto& s = report.scores[j];
    out.push_back({j, report.feature_names.at(j), quantile(s, 0.0), quantile(s, 0.25), quantile(s, 0.5),
                   quantile(s, 0.75), quantile(s, 1.0)});
  }
  return out;
}

TopographicSnapshot importance_topomap(const ImportanceReport& report, const Montage& montage,
                                       const std::string& band, std::size_t grid) {
  const auto it = std::find(report.bands.begin(), report.bands.end(), band);
  if (it == report.bands.end()) throw ConfigError("unknown band '" + band + "'");
  const auto b = static_cast<std::size_t>(it - report.bands.begin());
  TopographicSnapshot snap;
  snap.band = band;
  snap.channels = montage.channels();
  for (const auto& ch : montage.channels()) {
    const auto c = std::find(report.channels.begin(), report.channels.end(), ch);
    if (c == report.channels.end()) throw DataError("importance report lacks channel " + ch);
    snap.values.push_back(report.channel_band(static_cast<std::size_t>(c - report.channels.begin()), b));
  }
  snap.grid = scalp_interpolate(snap, montage, grid);
  return snap;
}

}  // namespace graspeeg
