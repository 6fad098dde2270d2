#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graspeeg/dataset.hpp"
#include "graspeeg/fft.hpp"
#include "graspeeg/matrix.hpp"

namespace graspeeg {

// Complex Morlet kernels w(t) = A exp(i 2 pi f t) exp(-t^2 / (2 sigma^2)) with
// sigma = n_cycles / (2 pi f), sampled on t = k/fs for |k| <= ceil(4 sigma fs)
// and scaled to unit energy.
struct MorletBank {
  std::vector<double> center_freqs_hz;
  double n_cycles = 4.0;
  double fs = 0.0;
  std::vector<std::vector<cplx>> kernels;

  std::size_t size() const { return center_freqs_hz.size(); }
  std::size_t half_width(std::size_t f) const { return kernels[f].size() / 2; }
  std::size_t longest_kernel() const;
  std::optional<std::size_t> index_of(double freq_hz) const;
};

// Default analysis frequencies. The lowest sits at 3 Hz so that every kernel
// fits inside a canonical two-second epoch at 250 Hz.
std::vector<double> default_bank_freqs();

MorletBank build_morlet_bank(const std::vector<double>& freqs_hz, double n_cycles, double fs);

enum class ConvolutionMethod { Fft, Direct };

// Complex coefficients of one row against every kernel (freq-major).
std::vector<std::vector<cplx>> cwt_coefficients(std::span<const double> x, const MorletBank& bank,
                                                ConvolutionMethod method = ConvolutionMethod::Fft);

// Power |coefficient|^2 of every channel at every bank frequency.
struct ChannelPower {
  Matrix power;  // freq x time
  std::vector<std::size_t> edge_half_width;

  // True for samples within one kernel half-width of either signal edge,
  // where zero padding contaminates the estimate.
  bool is_edge(std::size_t f, std::size_t t) const {
    return t < edge_half_width[f] || t + edge_half_width[f] >= power.cols();
  }
};

std::vector<ChannelPower> cwt_power(const Matrix& x, const MorletBank& bank,
                                    ConvolutionMethod method = ConvolutionMethod::Fft);

enum class BaselineMode { None, Ratio, Decibel };

struct TfBaseline {
  BaselineMode mode = BaselineMode::None;
  std::pair<double, double> window_s = {-0.2, 0.0};
};

struct TimeFrequencyMap {
  std::string channel;
  std::vector<double> times_s;
  std::vector<double> freqs_hz;
  Matrix power;  // freq x time
};

// Map over [window.first, window.second] relative to onset, both ends
// inclusive.
TimeFrequencyMap time_frequency_map(const TrialEpoch& epoch, const Montage& montage, double fs,
                                    const std::string& channel, const MorletBank& bank,
                                    std::pair<double, double> window_s = {-1.0, 1.0},
                                    const TfBaseline& baseline = {});

// Mean raw power map over every epoch with the label; baseline normalisation is
// applied to the average.
TimeFrequencyMap average_time_frequency_map(const EpochedDataset& dataset, ConditionLabel label,
                                            const std::string& channel, const MorletBank& bank,
                                            std::pair<double, double> window_s = {-1.0, 1.0},
                                            const TfBaseline& baseline = {});

struct ScalpGrid {
  std::size_t size = 0;        // G
  std::vector<double> values;  // G*G, row-major, row 0 at the nose side
  std::vector<bool> inside;    // false outside the head circle

  double at(std::size_t row, std::size_t col) const { return values[row * size + col]; }
  bool inside_at(std::size_t row, std::size_t col) const { return inside[row * size + col]; }
  // Cell-centre coordinates of (row, col).
  ScalpPosition centre(std::size_t row, std::size_t col) const;
};

struct TopographicSnapshot {
  double time_s = 0.0;
  double freq_hz = 0.0;
  std::string band;  // set instead of time/freq for importance maps
  std::vector<std::string> channels;
  std::vector<double> values;
  std::optional<ScalpGrid> grid;
};

// Per-channel power at (t_s, f_hz) averaged over every epoch with the label.
// t_s maps to the nearest sample.
TopographicSnapshot topographic_snapshot(const EpochedDataset& dataset, ConditionLabel label,
                                         const MorletBank& bank, double t_s, double f_hz);

// Inverse-distance (power 2) interpolation of per-electrode values.
double interpolate_at(std::span<const double> values, const Montage& montage, ScalpPosition where);

ScalpGrid scalp_interpolate(const TopographicSnapshot& snapshot, const Montage& montage, std::size_t grid);

}  // namespace graspeeg
