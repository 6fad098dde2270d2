#include "graspeeg/features.hpp"

#include <cmath>
#include <sstream>

#include "graspeeg/error.hpp"
#include "graspeeg/io.hpp"

namespace graspeeg {

StatFeatures stat_features(std::span<const double> a) {
  if (a.size() < 4) throw DataError("stat_features: need at least 4 samples");
  const double n = static_cast<double>(a.size());
  double sum = 0.0;
  for (double v : a) sum += v;
  const double mean = sum / n;
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double v : a) {
    const double d = v - mean;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  StatFeatures out;
  out.mean = mean;
  out.variance = s2 / (n - 1.0);
  const double m2 = s2 / n;
  if (!(m2 > 0.0) || std::sqrt(m2) <= 1e-14 * std::abs(mean)) {
    out.degenerate = true;
    return out;
  }
  out.skewness = (s3 / n) / std::pow(m2, 1.5);
  out.kurtosis = (s4 / n) / (m2 * m2);
  return out;
}

FeatureSpec FeatureSpec::default_spec() {
  FeatureSpec spec;
  spec.channels = Montage::default_montage().channels();
  const auto freqs = default_bank_freqs();
  spec.bands = {{"delta", freqs[0]}, {"alpha", freqs[1]}, {"beta_low", freqs[2]}, {"beta_high", freqs[3]}};
  return spec;
}

std::vector<std::string> FeatureSpec::feature_names() const {
  std::vector<std::string> names;
  names.reserve(size());
  for (const auto& ch : channels)
    for (const auto& b : bands)
      for (auto s : kStatNames) names.push_back(ch + "_" + b.name + "_" + std::string(s));
  return names;
}

std::optional<std::size_t> FeatureSpec::band_index(std::string_view name) const {
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (bands[i].name == name) return i;
  return std::nullopt;
}

FeatureVector extract_features(const TrialEpoch& epoch, const Montage& montage, double fs,
                               const MorletBank& bank, const FeatureSpec& spec) {
  const auto [begin, end] = window_indices(epoch, spec.window_s.first, spec.window_s.second, fs);
  if (end - begin < 4)
    throw DataError("trial " + std::to_string(epoch.trial_id) + ": feature window shorter than 4 samples");

  std::vector<std::size_t> band_kernel;
  for (const auto& b : spec.bands) {
    const auto k = bank.index_of(b.freq_hz);
    if (!k) throw ConfigError("band " + b.name + " (" + format_double(b.freq_hz) + " Hz) is not in the wavelet bank");
    band_kernel.push_back(*k);
  }

  FeatureVector out;
  out.values.assign(spec.size(), 0.0);
  std::vector<double> amp(end - begin);
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const auto row = montage.index_of(spec.channels[c]);
    if (!row) throw DataError("feature channel " + spec.channels[c] + " is not in the montage");
    std::vector<std::vector<cplx>> coeffs;
    try {
      coeffs = cwt_coefficients(epoch.samples.row(*row), bank);
    } catch (const DataError& e) {
      throw DataError("trial " + std::to_string(epoch.trial_id) + ": " + e.what());
    }
    for (std::size_t b = 0; b < spec.bands.size(); ++b) {
      const auto& z = coeffs[band_kernel[b]];
      for (std::size_t t = begin; t < end; ++t) amp[t - begin] = std::abs(z[t]);
      const StatFeatures s = stat_features(amp);
      if (s.degenerate) out.degenerate.push_back(c * spec.bands.size() + b);
      out.values[spec.column(c, b, 0)] = s.mean;
      out.values[spec.column(c, b, 1)] = s.variance;
      out.values[spec.column(c, b, 2)] = s.skewness;
      out.values[spec.column(c, b, 3)] = s.kurtosis;
    }
  }
  return out;
}

FeatureMatrix build_feature_matrix(const EpochedDataset& dataset, const MorletBank& bank, const FeatureSpec& spec) {
  if (dataset.epochs.empty()) throw DataError("dataset has no trials");
  if (std::abs(bank.fs - dataset.sampling_rate) > 1e-9)
    throw ConfigError("wavelet bank sampling rate differs from the dataset's");
  FeatureMatrix fm;
  fm.names = spec.feature_names();
  fm.X = Matrix(dataset.epochs.size(), spec.size());
  for (std::size_t i = 0; i < dataset.epochs.size(); ++i) {
    const auto& e = dataset.epochs[i];
    const FeatureVector v = extract_features(e, dataset.montage, dataset.sampling_rate, bank, spec);
    std::copy(v.values.begin(), v.values.end(), fm.X.row(i).begin());
    fm.y.push_back(e.label);
  }
  return fm;
}

std::string feature_matrix_to_csv(const FeatureMatrix& fm, const std::vector<std::string>& comment) {
  std::string out;
  for (const auto& c : comment) out += "# " + c + "\n";
  for (const auto& n : fm.names) out += n + ",";
  out += "label\n";
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    out += join_doubles(fm.X.row(i));
    out += ",";
    out += label_name(fm.y[i]);
    out += "\n";
  }
  return out;
}

FeatureMatrix feature_matrix_from_csv(std::string_view text) {
  FeatureMatrix fm;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::vector<double> values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = split(t, ',');
    if (!header) {
      if (cols.size() < 2 || trim(cols.back()) != "label")
        throw DataError("feature CSV: header must end with a 'label' column");
      for (std::size_t i = 0; i + 1 < cols.size(); ++i) fm.names.emplace_back(trim(cols[i]));
      header = true;
      continue;
    }
    if (cols.size() != fm.names.size() + 1)
      throw DataError("feature CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(fm.names.size() + 1) + " fields");
    for (std::size_t i = 0; i + 1 < cols.size(); ++i) {
      const double v = parse_double(cols[i], "feature CSV line " + std::to_string(line_no));
      if (!std::isfinite(v)) throw DataError("feature CSV line " + std::to_string(line_no) + ": non-finite value");
      values.push_back(v);
    }
    fm.y.push_back(parse_label(cols.back()));
  }
  if (!header) throw DataError("feature CSV: missing header");
  fm.X = Matrix(fm.y.size(), fm.names.size());
  fm.X.data() = std::move(values);
  return fm;
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
  return feature_matrix_from_csv(read_file(path));
}

}  // namespace graspeeg
