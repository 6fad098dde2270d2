#include "graspeeg/serialize.hpp"

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

json depth_json(std::size_t d) { return d == kUnlimitedDepth ? json(nullptr) : json(d); }

std::size_t depth_from(const json& j) { return j.is_null() ? kUnlimitedDepth : j.get<std::size_t>(); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Matrix matrix_from(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j.at(r).size() != cols) throw DataError("ragged matrix in JSON");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

}  // namespace

json hyperparams_to_json(const Hyperparams& hp) {
  return {{"lda", {{"shrinkage", hp.lda.shrinkage}}},
          {"svm", {{"C", hp.svm.C}, {"gamma", hp.svm.gamma}, {"tol", hp.svm.tol}, {"max_iter", hp.svm.max_iter}}},
          {"rf",
           {{"n_trees", hp.rf.n_trees},
            {"max_depth", depth_json(hp.rf.max_depth)},
            {"max_features", hp.rf.max_features},
            {"bootstrap", hp.rf.bootstrap}}},
          {"gbt",
           {{"n_rounds", hp.gbt.n_rounds},
            {"learning_rate", hp.gbt.learning_rate},
            {"max_depth", hp.gbt.max_depth},
            {"lambda_l2", hp.gbt.lambda_l2},
            {"min_child_weight", hp.gbt.min_child_weight}}}};
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams hp) {
  try {
    reject_unknown(j, {"lda", "svm", "rf", "gbt"}, "hyperparams");
    if (j.contains("lda")) {
      const auto& s = j["lda"];
      reject_unknown(s, {"shrinkage"}, "lda");
      read_into(s, "shrinkage", hp.lda.shrinkage);
    }
    if (j.contains("svm")) {
      const auto& s = j["svm"];
      reject_unknown(s, {"C", "gamma", "tol", "max_iter"}, "svm");
      read_into(s, "C", hp.svm.C);
      read_into(s, "gamma", hp.svm.gamma);
      read_into(s, "tol", hp.svm.tol);
      read_into(s, "max_iter", hp.svm.max_iter);
    }
    if (j.contains("rf")) {
      const auto& s = j["rf"];
      reject_unknown(s, {"n_trees", "max_depth", "max_features", "bootstrap"}, "rf");
      read_into(s, "n_trees", hp.rf.n_trees);
      if (s.contains("max_depth")) hp.rf.max_depth = depth_from(s["max_depth"]);
      read_into(s, "max_features", hp.rf.max_features);
      read_into(s, "bootstrap", hp.rf.bootstrap);
    }
    if (j.contains("gbt")) {
      const auto& s = j["gbt"];
      reject_unknown(s, {"n_rounds", "learning_rate", "max_depth", "lambda_l2", "min_child_weight"}, "gbt");
      read_into(s, "n_rounds", hp.gbt.n_rounds);
      read_into(s, "learning_rate", hp.gbt.learning_rate);
      read_into(s, "max_depth", hp.gbt.max_depth);
      read_into(s, "lambda_l2", hp.gbt.lambda_l2);
      read_into(s, "min_child_weight", hp.gbt.min_child_weight);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("hyperparams: ") + e.what());
  }
  return hp;
}

json cv_report_to_json(const CvReport& rep) {
  json conf = json::array();
  for (const auto& m : rep.confusion) conf.push_back(matrix_json(m));
  json classes = json::array();
  for (int c : rep.classes) classes.push_back(std::string(label_name(static_cast<ConditionLabel>(c))));
  return {{"model", std::string(model_name(rep.kind))},
          {"task", std::string(task_name(rep.task))},
          {"dataset", rep.dataset_name},
          {"seed", rep.seed},
          {"k", rep.k},
          {"hyperparams", hyperparams_to_json(rep.hyperparams)},
          {"classes", classes},
          {"n_samples", rep.n_samples},
          {"fold_accuracies", rep.fold_accuracies},
          {"confusion", conf},
          {"mean", rep.mean},
          {"std", rep.std},
          {"all_converged", rep.all_converged}};
}

CvReport cv_report_from_json(const json& j) {
  try {
    CvReport rep;
    rep.kind = parse_model_kind(j.at("model").get<std::string>());
    rep.task = parse_task(j.at("task").get<std::string>());
    rep.dataset_name = j.value("dataset", std::string());
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.k = j.at("k").get<std::size_t>();
    rep.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    for (const auto& c : j.at("classes")) rep.classes.push_back(static_cast<int>(parse_label(c.get<std::string>())));
    rep.n_samples = j.at("n_samples").get<std::size_t>();
    rep.fold_accuracies = j.at("fold_accuracies").get<std::vector<double>>();
    for (const auto& m : j.at("confusion")) rep.confusion.push_back(matrix_from(m));
    rep.mean = j.at("mean").get<double>();
    rep.std = j.at("std").get<double>();
    rep.all_converged = j.value("all_converged", true);
    return rep;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed CV report: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed CV report: ") + e.what());
  }
}

json importance_to_json(const ImportanceReport& rep) {
  json features = json::array();
  for (std::size_t j = 0; j < rep.scores.size(); ++j)
    features.push_back({{"name", rep.feature_names.at(j)}, {"scores", rep.scores[j]}, {"median", rep.median_score(j)}});
  json out = {{"repeats", rep.repeats},
              {"seed", rep.seed},
              {"folds", rep.folds},
              {"baseline_accuracy", rep.baseline_accuracy},
              {"ranking", rep.ranking},
              {"features", features}};
  if (!rep.channels.empty())
    out["channel_band"] = {{"channels", rep.channels}, {"bands", rep.bands}, {"values", matrix_json(rep.channel_band)}};
  return out;
}

ImportanceReport importance_from_json(const json& j) {
  try {
    ImportanceReport rep;
    rep.repeats = j.at("repeats").get<std::size_t>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.folds = j.value("folds", std::size_t{0});
    rep.baseline_accuracy = j.at("baseline_accuracy").get<double>();
    rep.ranking = j.at("ranking").get<std::vector<std::size_t>>();
    for (const auto& f : j.at("features")) {
      rep.feature_names.push_back(f.at("name").get<std::string>());
      rep.scores.push_back(f.at("scores").get<std::vector<double>>());
    }
    if (j.contains("channel_band")) {
      const auto& cb = j["channel_band"];
      rep.channels = cb.at("channels").get<std::vector<std::string>>();
      rep.bands = cb.at("bands").get<std::vector<std::string>>();
      rep.channel_band = matrix_from(cb.at("values"));
    }
    return rep;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed importance report: ") + e.what());
  }
}

json synth_config_to_json(const SynthConfig& c) {
  json bursts = json::object();
  for (int l = 0; l < kConditionCount; ++l) {
    json list = json::array();
    for (const auto& b : c.bursts[static_cast<std::size_t>(l)])
      list.push_back({{"channel", b.channel},
                      {"center_freq_hz", b.center_freq_hz},
                      {"onset_s", b.onset_s},
                      {"duration_s", b.duration_s},
                      {"amplitude", b.amplitude}});
    bursts[std::string(label_name(static_cast<ConditionLabel>(l)))] = list;
  }
  return {{"n_trials_per_class", c.n_trials_per_class},
          {"fs", c.fs},
          {"pre_s", c.pre_s},
          {"post_s", c.post_s},
          {"noise", c.noise},
          {"amplitude_jitter", c.amplitude_jitter},
          {"seed", c.seed},
          {"bursts", bursts}};
}

SynthConfig synth_config_from_json(const json& j, SynthConfig c) {
  try {
    reject_unknown(j, {"n_trials_per_class", "fs", "pre_s", "post_s", "noise", "amplitude_jitter", "seed", "bursts"},
                   "synth");
    read_into(j, "n_trials_per_class", c.n_trials_per_class);
    read_into(j, "fs", c.fs);
    read_into(j, "pre_s", c.pre_s);
    read_into(j, "post_s", c.post_s);
    read_into(j, "noise", c.noise);
    read_into(j, "amplitude_jitter", c.amplitude_jitter);
    read_into(j, "seed", c.seed);
    if (j.contains("bursts")) {
      const auto& bj = j["bursts"];
      reject_unknown(bj, {"no_movement", "power", "precision"}, "synth.bursts");
      for (const auto& [key, list] : bj.items()) {
        auto& target = c.bursts[static_cast<std::size_t>(parse_label(key))];
        target.clear();
        for (const auto& b : list) {
          reject_unknown(b, {"channel", "center_freq_hz", "onset_s", "duration_s", "amplitude"}, "burst");
          target.push_back({b.at("channel").get<std::string>(), b.at("center_freq_hz").get<double>(),
                            b.at("onset_s").get<double>(), b.at("duration_s").get<double>(),
                            b.at("amplitude").get<double>()});
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace graspeeg
