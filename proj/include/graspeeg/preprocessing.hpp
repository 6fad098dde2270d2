#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "graspeeg/dataset.hpp"
#include "graspeeg/matrix.hpp"

namespace graspeeg {

// ---------------------------------------------------------------------------
// Butterworth bandpass

// `order` is the order of the lowpass prototype; the bandpass has 2*order
// poles, realised as `order` second-order sections.
struct BandpassSpec {
  double low_hz = 1.0;
  double high_hz = 30.0;
  int order = 4;

  void validate(double fs) const;
};

// Second-order section, a0 normalised to 1.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

std::vector<Biquad> design_butterworth_bandpass(const BandpassSpec& spec, double fs);

// Complex frequency response of a cascade evaluated at f_hz.
std::complex<double> frequency_response(const std::vector<Biquad>& sections, double f_hz, double fs);

// Single forward pass of the cascade with zero initial state.
std::vector<double> sos_filter(const std::vector<Biquad>& sections, std::span<const double> x);

// Forward-backward filtering of every row. Edges are extended by odd
// reflection of 3*order samples and each pass starts from the step-response
// steady state scaled by the first sample.
Matrix bandpass_filter(const Matrix& x, const BandpassSpec& spec, double fs);

// ---------------------------------------------------------------------------
// FastICA

struct IcaOptions {
  std::size_t n_components = 0;  // 0 means one per channel
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 500;
  // When false, any unconverged component raises NumericError. When true the
  // last iterate is kept and flagged in IcaModel::converged.
  bool allow_unconverged = false;
};

struct IcaModel {
  std::vector<double> mean;                // per channel
  Matrix whitener;                         // components x channels
  Matrix unmixing;                         // components x channels (whitener folded in)
  Matrix mixing;                           // channels x components
  std::vector<double> component_kurtosis;  // excess kurtosis of each source on the fit data
  std::vector<int> iterations;             // fixed-point iterations per component
  std::vector<bool> converged;

  std::size_t n_channels() const { return mixing.rows(); }
  std::size_t n_components() const { return unmixing.rows(); }
};

// Deflationary FastICA with the log-cosh (tanh) contrast; whitening by
// symmetric eigendecomposition of the channel covariance.
IcaModel fastica_fit(const Matrix& x, const IcaOptions& options);

// Component activations of x under a fitted model: unmixing * (x - mean).
Matrix ica_sources(const Matrix& x, const IcaModel& model);

struct IcaCleanResult {
  Matrix cleaned;
  std::vector<std::size_t> rejected;
};

// Zeroes components whose |excess kurtosis| exceeds the threshold and
// reconstructs through the mixing matrix.
IcaCleanResult ica_clean(const Matrix& x, const IcaModel& model, double reject_kurtosis_threshold);

// ---------------------------------------------------------------------------
// Baseline and normalisation

TrialEpoch baseline_correct(const TrialEpoch& epoch, std::pair<double, double> baseline_s, double fs);

// Per row: subtract the mean and divide by the sample (n-1) standard deviation.
// `channels`, when given, names rows in the zero-variance error.
Matrix zscore_normalize(const Matrix& x, const std::vector<std::string>& channels = {});

// ---------------------------------------------------------------------------
// Dataset chain: filter -> ICA -> baseline -> z-score

struct PreprocessConfig {
  BandpassSpec band;
  bool ica = true;
  IcaOptions ica_options;
  double reject_kurtosis_threshold = 5.0;
  std::pair<double, double> baseline_s = {-0.2, 0.0};
};

struct PreprocessReport {
  std::vector<double> component_kurtosis;
  std::vector<bool> component_converged;
  std::vector<std::size_t> rejected_components;
};

// ICA is fitted on the concatenation of all epochs; the z-score uses each
// channel's statistics over that concatenation.
EpochedDataset preprocess_dataset(const EpochedDataset& dataset, const PreprocessConfig& config,
                                  PreprocessReport* report = nullptr);

}  // namespace graspeeg
