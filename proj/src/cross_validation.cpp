#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "graspeeg/error.hpp"
#include "graspeeg/models.hpp"
#include "graspeeg/rng.hpp"
#include "models_common.hpp"

namespace graspeeg {

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Lda: return "lda";
    case ModelKind::Svm: return "svm";
    case ModelKind::Rf: return "rf";
    case ModelKind::Gbt: return "gbt";
  }
  throw ConfigError("invalid model kind");
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "lda") return ModelKind::Lda;
  if (text == "svm") return ModelKind::Svm;
  if (text == "rf") return ModelKind::Rf;
  if (text == "gbt" || text == "xgboost") return ModelKind::Gbt;
  throw ConfigError("unknown model '" + std::string(text) + "'");
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::Multiclass: return "multiclass";
    case Task::NmVsPower: return "nm-vs-power";
    case Task::NmVsPrecision: return "nm-vs-precision";
    case Task::PowerVsPrecision: return "power-vs-precision";
  }
  throw ConfigError("invalid task");
}

Task parse_task(std::string_view text) {
  for (Task t : {Task::Multiclass, Task::NmVsPower, Task::NmVsPrecision, Task::PowerVsPrecision})
    if (task_name(t) == text) return t;
  throw ConfigError("unknown task '" + std::string(text) + "'");
}

std::vector<ConditionLabel> task_labels(Task task) {
  using L = ConditionLabel;
  switch (task) {
    case Task::Multiclass: return {L::NoMovement, L::Power, L::Precision};
    case Task::NmVsPower: return {L::NoMovement, L::Power};
    case Task::NmVsPrecision: return {L::NoMovement, L::Precision};
    case Task::PowerVsPrecision: return {L::Power, L::Precision};
  }
  return {};
}

std::vector<int> label_codes(std::span<const ConditionLabel> labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(static_cast<int>(l));
  return out;
}

Standardizer Standardizer::fit(const Matrix& X) {
  Standardizer s;
  const std::size_t n = X.rows(), d = X.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += X(i, j);
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (X(i, j) - m) * (X(i, j) - m);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    s.mean[j] = m;
    s.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
  if (X.cols() != mean.size()) throw DataError("standardizer: feature count mismatch");
  Matrix out = X;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = (r[j] - mean[j]) / scale[j];
  }
  return out;
}

TrainedModel fit_model(ModelKind kind, const Hyperparams& hp, const Matrix& X, std::span<const int> y,
                       bool standardize) {
  std::optional<Standardizer> scaler;
  const Matrix* input = &X;
  Matrix scaled;
  if (standardize) {
    scaler = Standardizer::fit(X);
    scaled = scaler->apply(X);
    input = &scaled;
  }
  TrainedModel m;
  switch (kind) {
    case ModelKind::Lda: m = lda_fit(*input, y, hp.lda); break;
    case ModelKind::Svm: m = svm_fit(*input, y, hp.svm); break;
    case ModelKind::Rf: m = rf_fit(*input, y, hp.rf); break;
    case ModelKind::Gbt: m = gbt_fit(*input, y, hp.gbt); break;
  }
  m.scaler = std::move(scaler);
  return m;
}

std::vector<int> predict(const TrainedModel& model, const Matrix& X) {
  if (X.rows() == 0) return {};
  if (X.cols() != model.feature_count)
    throw DataError("predict: expected " + std::to_string(model.feature_count) + " features, got " +
                    std::to_string(X.cols()));
  if (model.kind == ModelKind::Gbt) {
    const Matrix p = gbt_predict_proba(model, X);
    std::vector<int> out;
    for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(model.classes[detail::argmax(p.row(i))]);
    return out;
  }
  const Matrix Xs = model.scaler ? model.scaler->apply(X) : X;
  const std::size_t k = model.classes.size();
  std::vector<int> out;
  out.reserve(X.rows());
  std::vector<double> score(k);
  for (std::size_t i = 0; i < Xs.rows(); ++i) {
    auto row = Xs.row(i);
    std::fill(score.begin(), score.end(), 0.0);
    if (const auto* lda = std::get_if<LdaModel>(&model.params)) {
      for (std::size_t c = 0; c < k; ++c) {
        double s = lda->intercept[c];
        for (std::size_t j = 0; j < row.size(); ++j) s += lda->coef(c, j) * row[j];
        score[c] = s;
      }
    } else if (const auto* svm = std::get_if<SvmModel>(&model.params)) {
      for (std::size_t p = 0; p < svm->pairs.size(); ++p) {
        const auto& pair = svm->pairs[p];
        score[svm_decision(*svm, p, row) >= 0.0 ? pair.class_a : pair.class_b] += 1.0;
      }
    } else if (const auto* rf = std::get_if<ForestModel>(&model.params)) {
      for (const auto& t : rf->trees) score[detail::argmax(t.leaf_for(row).value)] += 1.0;
    }
    out.push_back(model.classes[detail::argmax(score)]);
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DataError("accuracy: length mismatch");
  if (truth.empty()) throw DataError("accuracy: no samples");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += predicted[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

std::vector<Fold> stratified_kfold(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  for (const auto& [label, rows] : by_class)
    if (rows.size() < k)
      throw DataError("stratified_kfold: class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                      " rows, fewer than k=" + std::to_string(k));

  // Each class is shuffled and dealt round-robin; the dealer position carries
  // over between classes so fold sizes stay within one of each other.
  std::vector<std::vector<std::size_t>> tests(k);
  std::size_t dealer = 0;
  for (auto& [label, rows] : by_class) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(label)) + 1));
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t r : rows) tests[dealer++ % k].push_back(r);
  }
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    std::vector<bool> in_test(y.size(), false);
    for (std::size_t r : tests[f]) in_test[r] = true;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!in_test[i]) folds[f].train.push_back(i);
    folds[f].test = std::move(tests[f]);
  }
  return folds;
}

TaskData select_task(const FeatureMatrix& features, Task task) {
  const auto keep = task_labels(task);
  TaskData td;
  for (std::size_t i = 0; i < features.rows(); ++i)
    if (std::find(keep.begin(), keep.end(), features.y[i]) != keep.end()) td.rows.push_back(i);
  td.X = Matrix(td.rows.size(), features.cols());
  for (std::size_t r = 0; r < td.rows.size(); ++r) {
    std::copy(features.X.row(td.rows[r]).begin(), features.X.row(td.rows[r]).end(), td.X.row(r).begin());
    td.y.push_back(static_cast<int>(features.y[td.rows[r]]));
  }
  return td;
}

namespace {

Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(X.row(rows[r]).begin(), X.row(rows[r]).end(), out.row(r).begin());
  return out;
}

Hyperparams seeded(const Hyperparams& hp, std::uint64_t seed) {
  Hyperparams out = hp;
  out.svm.seed = seed;
  out.rf.seed = seed;
  out.gbt.seed = seed;
  return out;
}

}  // namespace

CvReport cross_validate(ModelKind kind, const Hyperparams& hp, const FeatureMatrix& features, Task task,
                        std::size_t k, std::uint64_t seed) {
  const TaskData td = select_task(features, task);
  if (td.rows.empty()) throw DataError(std::string("no rows for task ") + std::string(task_name(task)));
  CvReport rep;
  rep.kind = kind;
  rep.task = task;
  rep.seed = seed;
  rep.k = k;
  rep.hyperparams = hp;
  rep.classes = detail::encode_labels(td.y).classes;
  if (rep.classes.size() < 2) throw DataError("task needs at least two classes present");
  rep.n_samples = td.rows.size();

  const auto folds = stratified_kfold(td.y, k, seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const Matrix xtr = take_rows(td.X, folds[f].train);
    const Matrix xte = take_rows(td.X, folds[f].test);
    std::vector<int> ytr, yte;
    for (std::size_t r : folds[f].train) ytr.push_back(td.y[r]);
    for (std::size_t r : folds[f].test) yte.push_back(td.y[r]);
    const TrainedModel m = fit_model(kind, seeded(hp, derive_seed(seed, 0x5eed, f)), xtr, ytr, true);
    if (const auto* svm = std::get_if<SvmModel>(&m.params))
      for (const auto& p : svm->pairs) rep.all_converged = rep.all_converged && p.converged;
    const auto pred = predict(m, xte);
    rep.fold_accuracies.push_back(accuracy(pred, yte));
    Matrix conf(rep.classes.size(), rep.classes.size());
    auto idx = [&](int code) {
      return static_cast<std::size_t>(std::lower_bound(rep.classes.begin(), rep.classes.end(), code) -
                                      rep.classes.begin());
    };
    for (std::size_t i = 0; i < yte.size(); ++i) conf(idx(yte[i]), idx(pred[i])) += 1.0;
    rep.confusion.push_back(std::move(conf));
  }
  double sum = 0.0;
  for (double a : rep.fold_accuracies) sum += a;
  rep.mean = sum / static_cast<double>(rep.fold_accuracies.size());
  double ss = 0.0;
  for (double a : rep.fold_accuracies) ss += (a - rep.mean) * (a - rep.mean);
  rep.std = rep.fold_accuracies.size() > 1 ? std::sqrt(ss / static_cast<double>(rep.fold_accuracies.size() - 1)) : 0.0;
  return rep;
}

}  // namespace graspeeg
