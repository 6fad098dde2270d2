#include "graspeeg/preprocessing.hpp"

#include <cmath>

#include "graspeeg/error.hpp"

namespace graspeeg {

TrialEpoch baseline_correct(const TrialEpoch& epoch, std::pair<double, double> baseline_s, double fs) {
  const auto [b, e] = window_indices(epoch, baseline_s.first, baseline_s.second, fs);
  if (e <= b) throw DataError("baseline window is empty");
  TrialEpoch out = epoch;
  for (std::size_t r = 0; r < out.samples.rows(); ++r) {
    auto row = out.samples.row(r);
    double m = 0.0;
    for (std::size_t i = b; i < e; ++i) m += row[i];
    m /= static_cast<double>(e - b);
    for (double& v : row) v -= m;
  }
  return out;
}

Matrix zscore_normalize(const Matrix& x, const std::vector<std::string>& channels) {
  if (x.cols() < 2) throw DataError("zscore: need at least two samples per channel");
  Matrix out = x;
  const double n = static_cast<double>(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = out.row(r);
    double m = 0.0;
    for (double v : row) m += v;
    m /= n;
    double ss = 0.0;
    for (double v : row) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0) || sd <= 1e-12 * std::abs(m)) {
      const std::string name = r < channels.size() ? channels[r] : "row " + std::to_string(r);
      throw DataError("zscore: zero-variance channel " + name);
    }
    for (double& v : row) v = (v - m) / sd;
  }
  return out;
}

EpochedDataset preprocess_dataset(const EpochedDataset& dataset, const PreprocessConfig& config,
                                  PreprocessReport* report) {
  dataset.validate();
  const double fs = dataset.sampling_rate;
  EpochedDataset out = dataset;
  for (auto& e : out.epochs) e.samples = bandpass_filter(e.samples, config.band, fs);

  auto concatenate = [&] {
    std::vector<Matrix> blocks;
    blocks.reserve(out.epochs.size());
    for (const auto& e : out.epochs) blocks.push_back(e.samples);
    return hconcat(blocks);
  };
  auto scatter = [&](const Matrix& joined) {
    std::size_t offset = 0;
    for (auto& e : out.epochs) {
      e.samples = joined.col_range(offset, offset + e.n_samples());
      offset += e.n_samples();
    }
  };

  if (config.ica) {
    const IcaModel model = fastica_fit(concatenate(), config.ica_options);
    for (auto& e : out.epochs) {
      auto cleaned = ica_clean(e.samples, model, config.reject_kurtosis_threshold);
      if (report) report->rejected_components = cleaned.rejected;
      e.samples = std::move(cleaned.cleaned);
    }
    if (report) {
      report->component_kurtosis = model.component_kurtosis;
      report->component_converged = model.converged;
    }
  }

  for (auto& e : out.epochs) e = baseline_correct(e, config.baseline_s, fs);
  scatter(zscore_normalize(concatenate(), out.montage.channels()));
  return out;
}

}  // namespace graspeeg
