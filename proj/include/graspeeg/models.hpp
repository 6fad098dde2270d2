#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "graspeeg/features.hpp"
#include "graspeeg/matrix.hpp"

namespace graspeeg {

enum class ModelKind { Lda, Svm, Rf, Gbt };

std::string_view model_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct LdaParams {
  double shrinkage = 0.1;
};

struct SvmParams {
  double C = 1.0;
  double gamma = 1.0 / 128.0;
  double tol = 1e-3;
  long max_iter = 200000;
  std::uint64_t seed = 0;  // SMO here is deterministic; kept for the report
};

inline constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();

struct RfParams {
  int n_trees = 100;
  std::size_t max_depth = kUnlimitedDepth;
  std::size_t max_features = 12;  // 0 means every feature
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct GbtParams {
  int n_rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 3;
  double lambda_l2 = 1.0;
  double min_child_weight = 1.0;
  std::uint64_t seed = 0;  // exact greedy splits use no randomness
};

struct Hyperparams {
  LdaParams lda;
  SvmParams svm;
  RfParams rf;
  GbtParams gbt;
};

// Feature standardisation fitted on training rows; zero-variance columns are
// only centred.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& X);
  Matrix apply(const Matrix& X) const;
};

struct LdaModel {
  Matrix coef;                  // classes x features, Sigma^-1 mu_k
  std::vector<double> intercept;  // -mu_k' Sigma^-1 mu_k / 2 + log prior_k
  Matrix means;
  std::vector<double> priors;
};

struct SvmPair {
  std::size_t class_a = 0;  // decision > 0 votes for class_a
  std::size_t class_b = 0;
  Matrix support_vectors;
  std::vector<double> coef;  // alpha_i * y_i
  double bias = 0.0;
  bool converged = true;
  long iterations = 0;
  std::vector<double> alpha;  // every training row of the pair, in fit order
};

struct SvmModel {
  double gamma = 0.0;
  double C = 0.0;
  std::vector<SvmPair> pairs;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Leaf payload: class proportions (classification) or a single weight
  // (boosting).
  std::vector<double> value;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t depth = 0;

  const TreeNode& leaf_for(std::span<const double> row) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  double oob_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct GbtModel {
  std::vector<double> base_score;                // per class
  std::vector<std::vector<DecisionTree>> rounds;  // round x class, leaf weights pre-scaled
  std::vector<double> step_scale;                // effective learning-rate multiplier per round
  std::vector<double> train_loss;                // mean softmax loss, entry 0 before any round
};

struct TrainedModel {
  ModelKind kind = ModelKind::Lda;
  std::vector<int> classes;  // label codes, ascending; index = internal class id
  std::size_t feature_count = 0;
  std::optional<Standardizer> scaler;
  std::variant<LdaModel, SvmModel, ForestModel, GbtModel> params;
};

TrainedModel lda_fit(const Matrix& X, std::span<const int> y, const LdaParams& params = {});
TrainedModel svm_fit(const Matrix& X, std::span<const int> y, const SvmParams& params = {});
TrainedModel rf_fit(const Matrix& X, std::span<const int> y, const RfParams& params = {});
TrainedModel gbt_fit(const Matrix& X, std::span<const int> y, const GbtParams& params = {});

// Fits the requested kind, optionally preceded by a Standardizer learned on X.
TrainedModel fit_model(ModelKind kind, const Hyperparams& hp, const Matrix& X, std::span<const int> y,
                       bool standardize = true);

// Label codes. Ties everywhere go to the lowest class index.
std::vector<int> predict(const TrainedModel& model, const Matrix& X);

// Softmax class probabilities of a boosted model (rows x classes).
Matrix gbt_predict_proba(const TrainedModel& model, const Matrix& X);

// Decision value of one class pair of an SVM on a row.
double svm_decision(const SvmModel& svm, std::size_t pair, std::span<const double> row);

// Largest KKT violation of any pair's training points, measured on y*f(x)
// against the box constraints. X/y must be the data given to svm_fit.
double svm_kkt_violation(const TrainedModel& model, const Matrix& X, std::span<const int> y);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Fold> stratified_kfold(std::span<const int> y, std::size_t k, std::uint64_t seed);

enum class Task { Multiclass, NmVsPower, NmVsPrecision, PowerVsPrecision };

std::string_view task_name(Task task);
Task parse_task(std::string_view text);
std::vector<ConditionLabel> task_labels(Task task);

struct CvReport {
  ModelKind kind = ModelKind::Lda;
  Task task = Task::Multiclass;
  std::string dataset_name;
  std::uint64_t seed = 0;
  std::size_t k = 5;
  Hyperparams hyperparams;
  std::vector<int> classes;
  std::size_t n_samples = 0;
  std::vector<double> fold_accuracies;
  std::vector<Matrix> confusion;  // per fold, truth x predicted, class-index order
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) standard deviation over folds
  bool all_converged = true;
};

// Rows restricted to the task's labels; label codes as ints.
struct TaskData {
  Matrix X;
  std::vector<int> y;
  std::vector<std::size_t> rows;  // indices into the source matrix
};
TaskData select_task(const FeatureMatrix& features, Task task);

CvReport cross_validate(ModelKind kind, const Hyperparams& hp, const FeatureMatrix& features, Task task,
                        std::size_t k, std::uint64_t seed);

std::vector<int> label_codes(std::span<const ConditionLabel> labels);

}  // namespace graspeeg
