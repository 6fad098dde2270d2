#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graspeeg/matrix.hpp"

namespace graspeeg {

// Encoded as 0/1/2 in this order everywhere (feature CSV labels, class indices).
enum class ConditionLabel : int { NoMovement = 0, Power = 1, Precision = 2 };

inline constexpr int kConditionCount = 3;

std::string_view label_name(ConditionLabel label);
// Accepts the canonical names ("no_movement", "power", "precision") and the
// integer codes "0", "1", "2".
ConditionLabel parse_label(std::string_view text);

struct ScalpPosition {
  double x = 0.0;  // right is +x
  double y = 0.0;  // nose is +y

  friend bool operator==(const ScalpPosition&, const ScalpPosition&) = default;
};

// Ordered channel list with 2D positions on a unit-radius head circle.
class Montage {
 public:
  Montage() = default;
  Montage(std::vector<std::string> channels, std::vector<ScalpPosition> positions);

  // Fz, C3, Cz, C4, Pz, PO7, Oz, PO8 on an azimuthal projection of the 10-20
  // system (radius 1 at 90 degrees from Cz).
  static Montage default_montage();

  std::size_t size() const { return channels_.size(); }
  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<ScalpPosition>& positions() const { return positions_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Montage&, const Montage&) = default;

 private:
  std::vector<std::string> channels_;
  std::vector<ScalpPosition> positions_;
};

struct TrialEpoch {
  int trial_id = 0;
  ConditionLabel label = ConditionLabel::NoMovement;
  Matrix samples;  // channels x time, microvolts
  std::size_t onset_index = 0;

  std::size_t n_samples() const { return samples.cols(); }
};

struct EpochedDataset {
  Montage montage;
  double sampling_rate = 0.0;
  std::vector<TrialEpoch> epochs;

  // Checks every structural invariant; `complete` additionally requires all
  // three conditions to be present. Throws DataError naming the trial.
  void validate(bool complete = false) const;

  std::size_t n_samples() const { return epochs.empty() ? 0 : epochs.front().n_samples(); }
};

// Loads a manifest (JSON) and its per-trial CSV files. Relative trial paths are
// resolved against the manifest's directory.
EpochedDataset load_dataset(const std::filesystem::path& manifest_path);

// Writes <dir>/manifest.json and <dir>/trials/trial_<id>.csv. `provenance` is
// embedded verbatim under the manifest's "provenance" key when non-empty (a
// JSON document as text).
void save_dataset(const EpochedDataset& dataset, const std::filesystem::path& dir,
                  const std::string& provenance_json = {});

// Sample indices [begin, end) for a window given in seconds relative to onset.
// Width is round((end_s - start_s) * fs). Throws DataError when out of bounds.
std::pair<std::size_t, std::size_t> window_indices(const TrialEpoch& epoch, double start_s,
                                                   double end_s, double fs);

Matrix epoch_slice(const TrialEpoch& epoch, double start_s, double end_s, double fs);

}  // namespace graspeeg
