#include "graspeeg/pipeline.hpp"

#include "graspeeg/error.hpp"

namespace graspeeg {

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string_view baseline_name(BaselineMode m) {
  switch (m) {
    case BaselineMode::None: return "none";
    case BaselineMode::Ratio: return "ratio";
    case BaselineMode::Decibel: return "db";
  }
  return "none";
}

BaselineMode parse_baseline(const std::string& s) {
  if (s == "none") return BaselineMode::None;
  if (s == "ratio") return BaselineMode::Ratio;
  if (s == "db") return BaselineMode::Decibel;
  throw ConfigError("unknown baseline mode '" + s + "'");
}

ConvolutionMethod parse_convolution(const std::string& s) {
  if (s == "fft") return ConvolutionMethod::Fft;
  if (s == "direct") return ConvolutionMethod::Direct;
  throw ConfigError("unknown convolution method '" + s + "'");
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  c.features = FeatureSpec::default_spec();
  c.features.channels.clear();
  return c;
}

void PipelineConfig::validate() const {
  resolved_synth().validate();
  preprocess.band.validate(synth.fs);
  if (bank_freqs_hz.empty()) throw ConfigError("bank needs at least one frequency");
  if (!(n_cycles > 0.0)) throw ConfigError("n_cycles must be positive");
  if (features.bands.empty()) throw ConfigError("feature spec needs at least one band");
  for (const auto& b : features.bands) {
    bool found = false;
    for (double f : bank_freqs_hz) found = found || f == b.freq_hz;
    if (!found) throw ConfigError("feature band '" + b.name + "' frequency is not in the bank");
  }
  if (!(features.window_s.second > features.window_s.first)) throw ConfigError("empty feature window");
  if (k < 2) throw ConfigError("k must be at least 2");
  if (importance_repeats == 0) throw ConfigError("importance repeats must be positive");
  if (grid < 8) throw ConfigError("grid must be at least 8");
  if (!(tf_window_s.second > tf_window_s.first)) throw ConfigError("empty time-frequency window");
}

SynthConfig PipelineConfig::resolved_synth() const {
  SynthConfig s = synth;
  s.seed = synth_seed();
  return s;
}

PreprocessConfig PipelineConfig::resolved_preprocess() const {
  PreprocessConfig p = preprocess;
  p.ica_options.seed = ica_seed();
  return p;
}

MorletBank PipelineConfig::bank(double fs) const { return build_morlet_bank(bank_freqs_hz, n_cycles, fs); }

FeatureSpec PipelineConfig::feature_spec(const Montage& montage) const {
  FeatureSpec s = features;
  if (s.channels.empty()) s.channels = montage.channels();
  return s;
}

json pipeline_config_to_json(const PipelineConfig& c) {
  json bands = json::array();
  for (const auto& b : c.features.bands) bands.push_back({{"name", b.name}, {"freq_hz", b.freq_hz}});
  json synth = synth_config_to_json(c.synth);
  synth.erase("seed");
  const auto& p = c.preprocess;
  return {{"seed", c.seed},
          {"synth", synth},
          {"preprocess",
           {{"low_hz", p.band.low_hz},
            {"high_hz", p.band.high_hz},
            {"order", p.band.order},
            {"ica", p.ica},
            {"ica_components", p.ica_options.n_components},
            {"ica_tol", p.ica_options.tol},
            {"ica_max_iter", p.ica_options.max_iter},
            {"ica_allow_unconverged", p.ica_options.allow_unconverged},
            {"reject_kurtosis", p.reject_kurtosis_threshold},
            {"baseline_s", {p.baseline_s.first, p.baseline_s.second}}}},
          {"wavelet",
           {{"freqs_hz", c.bank_freqs_hz},
            {"n_cycles", c.n_cycles},
            {"convolution", c.convolution == ConvolutionMethod::Fft ? "fft" : "direct"}}},
          {"features",
           {{"channels", c.features.channels},
            {"bands", bands},
            {"window_s", {c.features.window_s.first, c.features.window_s.second}}}},
          {"model", {{"kind", std::string(model_name(c.model))}, {"hyperparams", hyperparams_to_json(c.hyperparams)}}},
          {"crossval", {{"task", std::string(task_name(c.task))}, {"k", c.k}}},
          {"importance", {{"repeats", c.importance_repeats}, {"top_k", c.importance_top_k}}},
          {"maps",
           {{"grid", c.grid},
            {"tf_window_s", {c.tf_window_s.first, c.tf_window_s.second}},
            {"tf_baseline", std::string(baseline_name(c.tf_baseline.mode))},
            {"tf_baseline_window_s", {c.tf_baseline.window_s.first, c.tf_baseline.window_s.second}}}}};
}

PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig c) {
  auto read_pair = [](const json& s, const char* key, std::pair<double, double>& out) {
    if (!s.contains(key)) return;
    const auto& v = s.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string(key) + ": expected [start, end]");
    out = {v[0].get<double>(), v[1].get<double>()};
  };
  try {
    reject_unknown(j, {"seed", "synth", "preprocess", "wavelet", "features", "model", "crossval", "importance", "maps"},
                   "config");
    read_into(j, "seed", c.seed);
    if (j.contains("synth")) c.synth = synth_config_from_json(j["synth"], c.synth);
    if (j.contains("preprocess")) {
      const auto& s = j["preprocess"];
      reject_unknown(s,
                     {"low_hz", "high_hz", "order", "ica", "ica_components", "ica_tol", "ica_max_iter",
                      "ica_allow_unconverged", "reject_kurtosis", "baseline_s"},
                     "preprocess");
      auto& p = c.preprocess;
      read_into(s, "low_hz", p.band.low_hz);
      read_into(s, "high_hz", p.band.high_hz);
      read_into(s, "order", p.band.order);
      read_into(s, "ica", p.ica);
      read_into(s, "ica_components", p.ica_options.n_components);
      read_into(s, "ica_tol", p.ica_options.tol);
      read_into(s, "ica_max_iter", p.ica_options.max_iter);
      read_into(s, "ica_allow_unconverged", p.ica_options.allow_unconverged);
      read_into(s, "reject_kurtosis", p.reject_kurtosis_threshold);
      read_pair(s, "baseline_s", p.baseline_s);
    }
    if (j.contains("wavelet")) {
      const auto& s = j["wavelet"];
      reject_unknown(s, {"freqs_hz", "n_cycles", "convolution"}, "wavelet");
      read_into(s, "freqs_hz", c.bank_freqs_hz);
      read_into(s, "n_cycles", c.n_cycles);
      if (s.contains("convolution")) c.convolution = parse_convolution(s["convolution"].get<std::string>());
    }
    if (j.contains("features")) {
      const auto& s = j["features"];
      reject_unknown(s, {"channels", "bands", "window_s"}, "features");
      read_into(s, "channels", c.features.channels);
      if (s.contains("bands")) {
        c.features.bands.clear();
        for (const auto& b : s["bands"]) {
          reject_unknown(b, {"name", "freq_hz"}, "band");
          c.features.bands.push_back({b.at("name").get<std::string>(), b.at("freq_hz").get<double>()});
        }
      }
      read_pair(s, "window_s", c.features.window_s);
    }
    if (j.contains("model")) {
      const auto& s = j["model"];
      reject_unknown(s, {"kind", "hyperparams"}, "model");
      if (s.contains("kind")) c.model = parse_model_kind(s["kind"].get<std::string>());
      if (s.contains("hyperparams")) c.hyperparams = hyperparams_from_json(s["hyperparams"], c.hyperparams);
    }
    if (j.contains("crossval")) {
      const auto& s = j["crossval"];
      reject_unknown(s, {"task", "k"}, "crossval");
      if (s.contains("task")) c.task = parse_task(s["task"].get<std::string>());
      read_into(s, "k", c.k);
    }
    if (j.contains("importance")) {
      const auto& s = j["importance"];
      reject_unknown(s, {"repeats", "top_k"}, "importance");
      read_into(s, "repeats", c.importance_repeats);
      read_into(s, "top_k", c.importance_top_k);
    }
    if (j.contains("maps")) {
      const auto& s = j["maps"];
      reject_unknown(s, {"grid", "tf_window_s", "tf_baseline", "tf_baseline_window_s"}, "maps");
      read_into(s, "grid", c.grid);
      read_pair(s, "tf_window_s", c.tf_window_s);
      if (s.contains("tf_baseline")) c.tf_baseline.mode = parse_baseline(s["tf_baseline"].get<std::string>());
      read_pair(s, "tf_baseline_window_s", c.tf_baseline.window_s);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace graspeeg
