#include "graspeeg/dataset.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graspeeg/error.hpp"
#include "graspeeg/io.hpp"

namespace graspeeg {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view label_name(ConditionLabel label) {
  switch (label) {
    case ConditionLabel::NoMovement: return "no_movement";
    case ConditionLabel::Power: return "power";
    case ConditionLabel::Precision: return "precision";
  }
  throw DataError("invalid condition label");
}

ConditionLabel parse_label(std::string_view text) {
  text = trim(text);
  if (text == "no_movement" || text == "0") return ConditionLabel::NoMovement;
  if (text == "power" || text == "1") return ConditionLabel::Power;
  if (text == "precision" || text == "2") return ConditionLabel::Precision;
  throw DataError("unknown condition label '" + std::string(text) + "'");
}

Montage::Montage(std::vector<std::string> channels, std::vector<ScalpPosition> positions)
    : channels_(std::move(channels)), positions_(std::move(positions)) {
  if (channels_.size() != positions_.size())
    throw DataError("montage: channel and position counts differ");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].empty()) throw DataError("montage: empty channel name");
    if (!seen.insert(channels_[i]).second)
      throw DataError("montage: duplicate channel name " + channels_[i]);
    const auto& p = positions_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x * p.x + p.y * p.y > 1.0 + 1e-12)
      throw DataError("montage: position of " + channels_[i] + " lies outside the head circle");
  }
}

Montage Montage::default_montage() {
  // Polar angle from Cz mapped linearly to radius (90 deg -> 1). Midline and
  // central sites sit at 36 deg; the PO7/Oz/PO8 ring sits at 72 deg with PO7/PO8
  // 36 deg of azimuth either side of Oz.
  const double inner = 0.4;
  const double outer = 0.8;
  const double az = 144.0 * std::numbers::pi / 180.0;
  return Montage({"Fz", "C3", "Cz", "C4", "Pz", "PO7", "Oz", "PO8"},
                 {{0.0, inner},
                  {-inner, 0.0},
                  {0.0, 0.0},
                  {inner, 0.0},
                  {0.0, -inner},
                  {-outer * std::sin(az), outer * std::cos(az)},
                  {0.0, -outer},
                  {outer * std::sin(az), outer * std::cos(az)}});
}

std::optional<std::size_t> Montage::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i)
    if (channels_[i] == name) return i;
  return std::nullopt;
}

void EpochedDataset::validate(bool complete) const {
  if (!(sampling_rate > 0.0) || !std::isfinite(sampling_rate))
    throw DataError("sampling rate must be positive");
  if (epochs.empty()) throw DataError("dataset has no trials");
  const std::size_t length = epochs.front().n_samples();
  bool present[kConditionCount] = {false, false, false};
  std::set<int> ids;
  for (const auto& e : epochs) {
    const std::string tag = "trial " + std::to_string(e.trial_id);
    if (!ids.insert(e.trial_id).second) throw DataError(tag + ": duplicate trial id");
    if (e.samples.rows() != montage.size())
      throw DataError(tag + ": has " + std::to_string(e.samples.rows()) + " channel rows, montage has " +
                      std::to_string(montage.size()));
    if (e.n_samples() != length)
      throw DataError(tag + ": epoch length " + std::to_string(e.n_samples()) + " differs from " +
                      std::to_string(length));
    if (e.onset_index == 0 || e.onset_index + 1 >= e.n_samples())
      throw DataError(tag + ": onset index must lie strictly inside the epoch");
    for (double v : e.samples.data())
      if (!std::isfinite(v)) throw DataError(tag + ": non-finite sample");
    present[static_cast<int>(e.label)] = true;
  }
  if (complete)
    for (int c = 0; c < kConditionCount; ++c)
      if (!present[c])
        throw DataError(std::string("dataset lacks condition ") +
                        std::string(label_name(static_cast<ConditionLabel>(c))));
}

namespace {

Matrix read_trial_csv(const fs::path& path, int trial_id) {
  const std::string tag = "trial " + std::to_string(trial_id);
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError&) {
    throw DataError(tag + ": missing file " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (auto tok : split(line, ','))
      row.push_back(parse_double(tok, tag + " line " + std::to_string(line_no)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(tag + ": trial file is empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols())
      throw DataError(tag + ": channel rows have inconsistent sample counts");
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(rows[r][c])) throw DataError(tag + ": non-finite sample");
      m(r, c) = rows[r][c];
    }
  }
  return m;
}

}  // namespace

EpochedDataset load_dataset(const fs::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  const fs::path base = manifest_path.parent_path();
  EpochedDataset ds;
  try {
    ds.sampling_rate = manifest.at("sampling_rate_hz").get<double>();
    std::vector<std::string> names;
    std::vector<ScalpPosition> pos;
    for (const auto& ch : manifest.at("channels")) {
      names.push_back(ch.at("name").get<std::string>());
      pos.push_back({ch.at("x").get<double>(), ch.at("y").get<double>()});
    }
    ds.montage = Montage(std::move(names), std::move(pos));
    for (const auto& t : manifest.at("trials")) {
      TrialEpoch e;
      e.trial_id = t.at("id").get<int>();
      e.label = parse_label(t.at("label").get<std::string>());
      e.onset_index = t.at("onset_index").get<std::size_t>();
      fs::path file = t.at("file").get<std::string>();
      if (file.is_relative()) file = base / file;
      e.samples = read_trial_csv(file, e.trial_id);
      ds.epochs.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  ds.validate();
  return ds;
}

void save_dataset(const EpochedDataset& dataset, const fs::path& dir, const std::string& provenance_json) {
  dataset.validate();
  json manifest;
  manifest["sampling_rate_hz"] = dataset.sampling_rate;
  manifest["channels"] = json::array();
  for (std::size_t i = 0; i < dataset.montage.size(); ++i)
    manifest["channels"].push_back({{"name", dataset.montage.channels()[i]},
                                    {"x", dataset.montage.positions()[i].x},
                                    {"y", dataset.montage.positions()[i].y}});
  manifest["trials"] = json::array();
  for (const auto& e : dataset.epochs) {
    std::ostringstream name;
    name << "trials/trial_" << std::setw(4) << std::setfill('0') << e.trial_id << ".csv";
    std::string csv;
    for (std::size_t r = 0; r < e.samples.rows(); ++r) {
      csv += join_doubles(e.samples.row(r));
      csv += '\n';
    }
    write_file_atomic(dir / name.str(), csv);
    manifest["trials"].push_back({{"id", e.trial_id},
                                  {"label", std::string(label_name(e.label))},
                                  {"onset_index", e.onset_index},
                                  {"file", name.str()}});
  }
  if (!provenance_json.empty()) manifest["provenance"] = json::parse(provenance_json);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::pair<std::size_t, std::size_t> window_indices(const TrialEpoch& epoch, double start_s, double end_s,
                                                   double fs) {
  if (!(end_s >= start_s)) throw DataError("window end precedes its start");
  const auto onset = static_cast<long long>(epoch.onset_index);
  const long long begin = onset + std::llround(start_s * fs);
  const long long end = onset + std::llround(end_s * fs);
  if (begin < 0 || end > static_cast<long long>(epoch.n_samples()))
    throw DataError("trial " + std::to_string(epoch.trial_id) + ": window [" + format_double(start_s) + ", " +
                    format_double(end_s) + ") s lies outside the epoch");
  return {static_cast<std::size_t>(begin), static_cast<std::size_t>(end)};
}

Matrix epoch_slice(const TrialEpoch& epoch, double start_s, double end_s, double fs) {
  const auto [b, e] = window_indices(epoch, start_s, end_s, fs);
  return epoch.samples.col_range(b, e);
}

}  // namespace graspeeg
