#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "graspeeg/dataset.hpp"
#include "graspeeg/error.hpp"
#include "graspeeg/features.hpp"
#include "graspeeg/importance.hpp"
#include "graspeeg/io.hpp"
#include "graspeeg/pipeline.hpp"
#include "graspeeg/render.hpp"
#include "graspeeg/serialize.hpp"

namespace graspeeg {

namespace {

namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

// Flags shared by every subcommand. Explicit flags override the config file.
struct Common {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "\"default\" or a JSON config file")->capture_default_str();
  sub->add_option("--seed", c.seed, "Master seed");
}

PipelineConfig load_config(const Common& c) {
  PipelineConfig cfg = PipelineConfig::defaults();
  if (c.config != "default") {
    const std::string text = read_file(c.config);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse config " + c.config + ": " + e.what());
    }
    cfg = pipeline_config_from_json(j, cfg);
  }
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

json provenance(const std::string& command, const PipelineConfig& cfg, const json& inputs = json::object()) {
  json p = {{"command", command}, {"seed", cfg.seed}, {"config", pipeline_config_to_json(cfg)}};
  if (!inputs.empty()) p["inputs"] = inputs;
  return p;
}

fs::path manifest_path(const std::string& data) {
  const fs::path p(data);
  return fs::is_directory(p) ? p / "manifest.json" : p;
}

std::string display_name(const std::string& path) {
  fs::path p = fs::path(path).lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  if (p.filename() == "manifest.json") p = p.parent_path();
  return p.stem().string();
}

json load_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError("cannot parse " + path + ": " + e.what());
  }
}

json montage_json(const Montage& m) {
  json out = json::array();
  for (std::size_t c = 0; c < m.size(); ++c)
    out.push_back({{"name", m.channels()[c]}, {"x", m.positions()[c].x}, {"y", m.positions()[c].y}});
  return out;
}

Montage montage_from_json(const json& j) {
  std::vector<std::string> names;
  std::vector<ScalpPosition> pos;
  for (const auto& ch : j) {
    names.push_back(ch.at("name").get<std::string>());
    pos.push_back({ch.at("x").get<double>(), ch.at("y").get<double>()});
  }
  return Montage(std::move(names), std::move(pos));
}

std::string number_tag(double v) { return format_double(v); }

// Features come from a CSV written by `features` or are extracted on the fly
// from a dataset.
struct FeatureSource {
  std::optional<std::string> features;
  std::optional<std::string> data;
};

void add_feature_source(CLI::App* sub, FeatureSource& s) {
  auto* f = sub->add_option("--features", s.features, "Feature CSV");
  auto* d = sub->add_option("--data", s.data, "Dataset directory or manifest");
  f->excludes(d);
}

FeatureMatrix resolve_features(const FeatureSource& s, const PipelineConfig& cfg, Montage* montage_out) {
  if (s.data) {
    const EpochedDataset ds = load_dataset(manifest_path(*s.data));
    if (montage_out) *montage_out = ds.montage;
    return build_feature_matrix(ds, cfg.bank(ds.sampling_rate), cfg.feature_spec(ds.montage));
  }
  if (s.features) {
    if (montage_out) *montage_out = Montage::default_montage();
    return load_feature_matrix(*s.features);
  }
  throw UsageError("one of --features or --data is required");
}

std::string source_name(const FeatureSource& s) { return display_name(s.data ? *s.data : *s.features); }

json source_inputs(const FeatureSource& s) {
  return s.data ? json{{"data", *s.data}} : json{{"features", *s.features}};
}

void cmd_synth(const Common& common, const std::string& out, std::optional<int> trials, std::optional<double> noise) {
  PipelineConfig cfg = load_config(common);
  if (trials) cfg.synth.n_trials_per_class = *trials;
  if (noise) cfg.synth.noise = *noise;
  cfg.validate();
  const EpochedDataset ds = generate(cfg.resolved_synth());
  save_dataset(ds, out, provenance("synth", cfg).dump());
}

struct PreprocessFlags {
  std::string data, out;
  std::optional<double> low, high, reject;
  std::optional<int> order;
  bool no_ica = false;
};

void cmd_preprocess(const Common& common, const PreprocessFlags& f) {
  PipelineConfig cfg = load_config(common);
  if (f.low) cfg.preprocess.band.low_hz = *f.low;
  if (f.high) cfg.preprocess.band.high_hz = *f.high;
  if (f.order) cfg.preprocess.band.order = *f.order;
  if (f.reject) cfg.preprocess.reject_kurtosis_threshold = *f.reject;
  if (f.no_ica) cfg.preprocess.ica = false;
  cfg.validate();
  const EpochedDataset ds = load_dataset(manifest_path(f.data));
  PreprocessReport report;
  const EpochedDataset clean = preprocess_dataset(ds, cfg.resolved_preprocess(), &report);
  json prov = provenance("preprocess", cfg, {{"data", f.data}});
  prov["ica"] = {{"component_kurtosis", report.component_kurtosis},
                 {"component_converged", report.component_converged},
                 {"rejected_components", report.rejected_components}};
  save_dataset(clean, f.out, prov.dump());
}

struct TfFlags {
  std::string data, label, channel = "C3", out;
  std::optional<std::string> baseline;
};

void cmd_tfmap(const Common& common, const TfFlags& f) {
  PipelineConfig cfg = load_config(common);
  if (f.baseline) {
    json m = {{"maps", {{"tf_baseline", *f.baseline}}}};
    cfg = pipeline_config_from_json(m, cfg);
  }
  cfg.validate();
  const ConditionLabel label = parse_label(f.label);
  const EpochedDataset ds = load_dataset(manifest_path(f.data));
  const TimeFrequencyMap map = average_time_frequency_map(ds, label, f.channel, cfg.bank(ds.sampling_rate),
                                                          cfg.tf_window_s, cfg.tf_baseline);
  json prov = provenance("tfmap", cfg, {{"data", f.data}, {"label", f.label}, {"channel", f.channel}});
  const std::string stem = "tfmap_" + std::string(label_name(label)) + "_" + f.channel;
  const fs::path dir(f.out);
  write_file_atomic(dir / (stem + ".csv"), tf_map_csv(map, prov));
  write_file_atomic(dir / (stem + ".svg"),
                    tf_map_svg(map, prov, std::string(label_name(label)) + " " + f.channel + " wavelet power"));
}

struct TopoFlags {
  std::string data, label, out;
  double t = 0.3;
  double freq = 9.0;
  std::optional<std::size_t> grid;
};

void cmd_topomap(const Common& common, const TopoFlags& f) {
  PipelineConfig cfg = load_config(common);
  if (f.grid) cfg.grid = *f.grid;
  cfg.validate();
  const ConditionLabel label = parse_label(f.label);
  const EpochedDataset ds = load_dataset(manifest_path(f.data));
  TopographicSnapshot snap = topographic_snapshot(ds, label, cfg.bank(ds.sampling_rate), f.t, f.freq);
  snap.grid = scalp_interpolate(snap, ds.montage, cfg.grid);
  json prov = provenance("topomap", cfg,
                         {{"data", f.data}, {"label", f.label}, {"t_s", f.t}, {"freq_hz", f.freq}});
  const std::string stem =
      "topomap_" + std::string(label_name(label)) + "_" + number_tag(f.freq) + "hz_" + number_tag(f.t) + "s";
  const fs::path dir(f.out);
  write_file_atomic(dir / (stem + ".csv"), snapshot_csv(snap, ds.montage, prov));
  write_file_atomic(dir / (stem + "_grid.csv"), grid_csv(*snap.grid, prov));
  write_file_atomic(dir / (stem + ".svg"),
                    topomap_svg(snap, ds.montage, prov,
                                std::string(label_name(label)) + " " + number_tag(f.freq) + " Hz at " +
                                    number_tag(f.t) + " s"));
}

void cmd_features(const Common& common, const std::string& data, const std::string& out) {
  PipelineConfig cfg = load_config(common);
  cfg.validate();
  const EpochedDataset ds = load_dataset(manifest_path(data));
  const FeatureMatrix fm = build_feature_matrix(ds, cfg.bank(ds.sampling_rate), cfg.feature_spec(ds.montage));
  const json prov = provenance("features", cfg, {{"data", data}});
  write_file_atomic(out, feature_matrix_to_csv(fm, {"provenance: " + prov.dump()}));
}

struct ModelFlags {
  FeatureSource source;
  std::optional<std::string> model, task, name;
  std::optional<std::size_t> k, repeats;
  std::string out;
};

void apply_model_flags(PipelineConfig& cfg, const ModelFlags& f) {
  if (f.model) cfg.model = parse_model_kind(*f.model);
  if (f.task) cfg.task = parse_task(*f.task);
  if (f.k) cfg.k = *f.k;
  if (f.repeats) cfg.importance_repeats = *f.repeats;
  cfg.validate();
}

void cmd_crossval(const Common& common, const ModelFlags& f) {
  PipelineConfig cfg = load_config(common);
  apply_model_flags(cfg, f);
  const FeatureMatrix fm = resolve_features(f.source, cfg, nullptr);
  CvReport rep = cross_validate(cfg.model, cfg.hyperparams, fm, cfg.task, cfg.k, cfg.cv_seed());
  rep.dataset_name = f.name ? *f.name : source_name(f.source);
  json out = cv_report_to_json(rep);
  out["provenance"] = provenance("crossval", cfg, source_inputs(f.source));
  write_file_atomic(f.out, out.dump(2) + "\n");
}

void cmd_importance(const Common& common, const ModelFlags& f) {
  PipelineConfig cfg = load_config(common);
  apply_model_flags(cfg, f);
  Montage montage = Montage::default_montage();
  const FeatureMatrix fm = resolve_features(f.source, cfg, &montage);
  const FeatureSpec spec = cfg.feature_spec(montage);
  if (fm.names != spec.feature_names())
    throw DataError("feature columns do not match the configured feature spec");
  ImportanceReport rep = cross_validated_importance(cfg.model, cfg.hyperparams, fm, cfg.task, cfg.k,
                                                    cfg.importance_repeats, cfg.importance_seed());
  aggregate_channel_band(rep, spec);
  json out = importance_to_json(rep);
  out["model"] = std::string(model_name(cfg.model));
  out["task"] = std::string(task_name(cfg.task));
  out["dataset"] = f.name ? *f.name : source_name(f.source);
  out["montage"] = montage_json(montage);
  out["provenance"] = provenance("importance", cfg, source_inputs(f.source));
  write_file_atomic(f.out, out.dump(2) + "\n");
}

void cmd_report(const Common& common, const std::vector<std::string>& cv_files,
                const std::optional<std::string>& importance_file, const std::string& out) {
  PipelineConfig cfg = load_config(common);
  cfg.validate();
  if (cv_files.empty() && !importance_file) throw UsageError("report needs --cv and/or --importance inputs");
  const fs::path dir(out);
  json inputs = {{"cv", cv_files}};
  if (importance_file) inputs["importance"] = *importance_file;
  const json prov = provenance("report", cfg, inputs);

  std::vector<CvReport> reports;
  for (const auto& file : cv_files) reports.push_back(cv_report_from_json(load_json_file(file)));
  bool any_multi = false, any_binary = false;
  for (const auto& r : reports) (r.task == Task::Multiclass ? any_multi : any_binary) = true;
  if (any_multi) write_file_atomic(dir / "accuracy_multiclass.csv", accuracy_table_csv(reports, false, prov));
  if (any_binary) write_file_atomic(dir / "accuracy_binary.csv", accuracy_table_csv(reports, true, prov));

  if (importance_file) {
    const json j = load_json_file(*importance_file);
    const ImportanceReport rep = importance_from_json(j);
    Montage montage = Montage::default_montage();
    try {
      if (j.contains("montage")) montage = montage_from_json(j["montage"]);
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed montage in importance report: ") + e.what());
    }
    const auto box = boxplot_stats(rep, cfg.importance_top_k);
    write_file_atomic(dir / "importance_boxplot.csv", boxplot_csv(box, prov));
    write_file_atomic(dir / "importance_boxplot.svg",
                      boxplot_svg(box, prov, "Top " + std::to_string(box.size()) + " features by permutation importance"));
    for (const auto& band : rep.bands) {
      const TopographicSnapshot snap = importance_topomap(rep, montage, band, cfg.grid);
      const std::string stem = "importance_topomap_" + band;
      write_file_atomic(dir / (stem + ".csv"), snapshot_csv(snap, montage, prov));
      write_file_atomic(dir / (stem + "_grid.csv"), grid_csv(*snap.grid, prov));
      write_file_atomic(dir / (stem + ".svg"), topomap_svg(snap, montage, prov, band + " band importance"));
    }
  }
}

void print_error(std::string_view kind, int code, std::string_view message) {
  json line = {{"error", kind}, {"exit_code", code}, {"message", message}};
  std::cerr << line.dump() << std::endl;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"EEG grasp decoding pipeline", "graspeeg"};
  app.require_subcommand(1);

  Common common;

  std::string synth_out;
  std::optional<int> synth_trials;
  std::optional<double> synth_noise;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(synth, common);
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--trials-per-class", synth_trials, "Trials per condition");
  synth->add_option("--noise", synth_noise, "Background RMS, microvolts");

  PreprocessFlags pre;
  auto* preprocess = app.add_subcommand("preprocess", "Filter, ICA clean, baseline correct and z-score");
  add_common(preprocess, common);
  preprocess->add_option("--data", pre.data, "Input dataset")->required();
  preprocess->add_option("--out", pre.out, "Output dataset directory")->required();
  preprocess->add_option("--low", pre.low, "Bandpass low edge, Hz");
  preprocess->add_option("--high", pre.high, "Bandpass high edge, Hz");
  preprocess->add_option("--order", pre.order, "Butterworth prototype order");
  preprocess->add_option("--reject-kurtosis", pre.reject, "ICA rejection threshold on |excess kurtosis|");
  preprocess->add_flag("--no-ica", pre.no_ica, "Skip ICA");

  TfFlags tf;
  auto* tfmap = app.add_subcommand("tfmap", "Class-average time-frequency map of one channel");
  add_common(tfmap, common);
  tfmap->add_option("--data", tf.data, "Dataset directory or manifest")->required();
  tfmap->add_option("--label", tf.label, "no_movement, power or precision")->required();
  tfmap->add_option("--channel", tf.channel, "Channel name")->capture_default_str();
  tfmap->add_option("--baseline", tf.baseline, "none, ratio or db");
  tfmap->add_option("--out", tf.out, "Output directory")->required();

  TopoFlags topo;
  auto* topomap = app.add_subcommand("topomap", "Class-average scalp map at one time and frequency");
  add_common(topomap, common);
  topomap->add_option("--data", topo.data, "Dataset directory or manifest")->required();
  topomap->add_option("--label", topo.label, "no_movement, power or precision")->required();
  topomap->add_option("--t", topo.t, "Seconds from onset")->capture_default_str();
  topomap->add_option("--freq", topo.freq, "Bank frequency, Hz")->capture_default_str();
  topomap->add_option("--grid", topo.grid, "Interpolation grid size");
  topomap->add_option("--out", topo.out, "Output directory")->required();

  std::string feat_data, feat_out;
  auto* features = app.add_subcommand("features", "Extract the statistical wavelet features");
  add_common(features, common);
  features->add_option("--data", feat_data, "Dataset directory or manifest")->required();
  features->add_option("--out", feat_out, "Feature CSV")->required();

  ModelFlags cv;
  auto* crossval = app.add_subcommand("crossval", "Stratified k-fold cross-validation");
  add_common(crossval, common);
  add_feature_source(crossval, cv.source);
  crossval->add_option("--model", cv.model, "lda, svm, rf or gbt");
  crossval->add_option("--task", cv.task, "multiclass, nm-vs-power, nm-vs-precision or power-vs-precision");
  crossval->add_option("--k", cv.k, "Number of folds");
  crossval->add_option("--dataset-name", cv.name, "Row name in the accuracy tables");
  crossval->add_option("--out", cv.out, "CvReport JSON")->required();

  ModelFlags imp;
  auto* importance = app.add_subcommand("importance", "Cross-validated permutation importance");
  add_common(importance, common);
  add_feature_source(importance, imp.source);
  importance->add_option("--model", imp.model, "lda, svm, rf or gbt");
  importance->add_option("--task", imp.task, "multiclass, nm-vs-power, nm-vs-precision or power-vs-precision");
  importance->add_option("--k", imp.k, "Number of folds");
  importance->add_option("--repeats", imp.repeats, "Permutations per feature and fold");
  importance->add_option("--dataset-name", imp.name, "Dataset name recorded in the output");
  importance->add_option("--out", imp.out, "Importance JSON")->required();

  std::vector<std::string> report_cv;
  std::optional<std::string> report_importance;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Collate accuracy tables and importance figures");
  add_common(report, common);
  report->add_option("--cv", report_cv, "CvReport JSON files");
  report->add_option("--importance", report_importance, "Importance JSON");
  report->add_option("--out", report_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error("usage", kExitUsage, e.what());
    return kExitUsage;
  }

  try {
    if (*synth) cmd_synth(common, synth_out, synth_trials, synth_noise);
    else if (*preprocess) cmd_preprocess(common, pre);
    else if (*tfmap) cmd_tfmap(common, tf);
    else if (*topomap) cmd_topomap(common, topo);
    else if (*features) cmd_features(common, feat_data, feat_out);
    else if (*crossval) cmd_crossval(common, cv);
    else if (*importance) cmd_importance(common, imp);
    else if (*report) cmd_report(common, report_cv, report_importance, report_out);
  } catch (const UsageError& e) {
    print_error("usage", kExitUsage, e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    print_error("config", kExitConfig, e.what());
    return kExitConfig;
  } catch (const NumericError& e) {
    print_error("numeric", kExitNumeric, e.what());
    return kExitNumeric;
  } catch (const DataError& e) {
    print_error("data", kExitData, e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    print_error("data", kExitData, e.what());
    return kExitData;
  } catch (const std::exception& e) {
    print_error("internal", 1, e.what());
    return 1;
  }
  return kExitOk;
}

}  // namespace graspeeg
