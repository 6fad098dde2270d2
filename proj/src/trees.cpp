#include <algorithm>
#include <cmath>
#include <numeric>

#include "graspeeg/error.hpp"
#include "graspeeg/models.hpp"
#include "graspeeg/rng.hpp"
#include "models_common.hpp"

namespace graspeeg {

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0)
    at = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[at].feature)] <= nodes[at].threshold
                                      ? nodes[at].left
                                      : nodes[at].right);
  return nodes[at];
}

namespace {

// Candidate split on one feature: rows sorted by value, split after `pos`.
struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // lower is better for Gini, higher for gain
};

double midpoint(double lo, double hi) {
  const double m = lo + (hi - lo) / 2.0;
  return m < hi ? m : lo;
}

// Rows of `idx` sorted by feature value, ties by row index.
void sort_by_feature(const Matrix& X, std::vector<std::size_t>& idx, std::size_t f) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double va = X(a, f), vb = X(b, f);
    return va < vb || (va == vb && a < b);
  });
}

// ------------------------------------------------------------------ CART (Gini)

class GiniTreeBuilder {
 public:
  GiniTreeBuilder(const Matrix& X, const std::vector<std::size_t>& cls, std::size_t n_classes,
                  std::size_t max_depth, std::size_t max_features, Rng& rng)
      : X_(X), cls_(cls), k_(n_classes), max_depth_(max_depth), max_features_(max_features), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    tree_.depth = 0;
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  static double gini(const std::vector<double>& counts, double n) {
    double s = 0.0;
    for (double c : counts) s += c * c;
    return 1.0 - s / (n * n);
  }

  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.depth = std::max(tree_.depth, depth);

    std::vector<double> counts(k_, 0.0);
    for (std::size_t r : rows) counts[cls_[r]] += 1.0;
    const double n = static_cast<double>(rows.size());
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;

    SplitChoice best;
    if (!pure && depth < max_depth_ && rows.size() >= 2) best = find_split(rows, n);
    if (best.feature < 0) {
      for (double& c : counts) c /= n;
      tree_.nodes[static_cast<std::size_t>(id)].value = std::move(counts);
      return id;
    }

    std::vector<std::size_t> left, right;
    const auto f = static_cast<std::size_t>(best.feature);
    for (std::size_t r : rows) (X_(r, f) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int rr = grow(std::move(right), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  // Visits features in a random order, evaluating up to max_features that are
  // non-constant within the node. Among evaluated candidates the lowest
  // weighted Gini wins, ties to the lower feature index then lower threshold.
  SplitChoice find_split(const std::vector<std::size_t>& rows, double n) {
    const std::size_t d = X_.cols();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t want = max_features_ == 0 ? d : std::min(max_features_, d);
    if (want < d) rng_.shuffle(std::span<std::size_t>(order));

    std::vector<std::size_t> chosen;
    for (std::size_t f : order) {
      if (chosen.size() == want) break;
      double lo = X_(rows.front(), f), hi = lo;
      for (std::size_t r : rows) {
        lo = std::min(lo, X_(r, f));
        hi = std::max(hi, X_(r, f));
      }
      if (hi > lo) chosen.push_back(f);
    }
    std::sort(chosen.begin(), chosen.end());

    SplitChoice best;
    best.score = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> sorted = rows;
    std::vector<double> left(k_), right(k_);
    for (std::size_t f : chosen) {
      sort_by_feature(X_, sorted, f);
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (std::size_t r : sorted) right[cls_[r]] += 1.0;
      for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
        const std::size_t r = sorted[pos];
        left[cls_[r]] += 1.0;
        right[cls_[r]] -= 1.0;
        const double v = X_(r, f), next = X_(sorted[pos + 1], f);
        if (!(v < next)) continue;
        const double nl = static_cast<double>(pos + 1), nr = n - nl;
        const double score = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (score < best.score - 1e-15) {
          best.score = score;
          best.feature = static_cast<int>(f);
          best.threshold = midpoint(v, next);
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const std::vector<std::size_t>& cls_;
  std::size_t k_;
  std::size_t max_depth_;
  std::size_t max_features_;
  Rng& rng_;
  DecisionTree tree_;
};

// --------------------------------------------------------- boosting regression

class GradientTreeBuilder {
 public:
  GradientTreeBuilder(const Matrix& X, const std::vector<double>& grad, const std::vector<double>& hess,
                      const GbtParams& params)
      : X_(X), g_(grad), h_(hess), p_(params) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    tree_.depth = 0;
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  double score(double g, double h) const { return g * g / (h + p_.lambda_l2); }

  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.depth = std::max(tree_.depth, depth);
    double G = 0.0, H = 0.0;
    for (std::size_t r : rows) {
      G += g_[r];
      H += h_[r];
    }

    SplitChoice best;
    best.score = 0.0;
    if (depth < p_.max_depth && rows.size() >= 2) {
      std::vector<std::size_t> sorted = rows;
      const double parent = score(G, H);
      for (std::size_t f = 0; f < X_.cols(); ++f) {
        sort_by_feature(X_, sorted, f);
        double gl = 0.0, hl = 0.0;
        for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
          const std::size_t r = sorted[pos];
          gl += g_[r];
          hl += h_[r];
          const double v = X_(r, f), next = X_(sorted[pos + 1], f);
          if (!(v < next)) continue;
          const double hr = H - hl;
          if (hl < p_.min_child_weight || hr < p_.min_child_weight) continue;
          const double gain = 0.5 * (score(gl, hl) + score(G - gl, hr) - parent);
          if (gain > best.score + 1e-15) {
            best.score = gain;
            best.feature = static_cast<int>(f);
            best.threshold = midpoint(v, next);
          }
        }
      }
    }
    if (best.feature < 0) {
      tree_.nodes[static_cast<std::size_t>(id)].value = {-G / (H + p_.lambda_l2)};
      return id;
    }
    std::vector<std::size_t> left, right;
    const auto f = static_cast<std::size_t>(best.feature);
    for (std::size_t r : rows) (X_(r, f) <= best.threshold ? left : right).push_back(r);
    const int l = grow(std::move(left), depth + 1);
    const int rr = grow(std::move(right), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  const Matrix& X_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  const GbtParams& p_;
  DecisionTree tree_;
};

void softmax_inplace(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
}

double softmax_loss(const Matrix& scores, const std::vector<std::size_t>& cls) {
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    auto z = scores.row(i);
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    loss += std::log(s) + m - z[cls[i]];
  }
  return loss / static_cast<double>(scores.rows());
}

}  // namespace

TrainedModel rf_fit(const Matrix& X, std::span<const int> y, const RfParams& params) {
  detail::check_fit_input(X, y, "rf");
  if (params.n_trees < 1) throw ConfigError("rf: n_trees must be at least 1");
  const auto enc = detail::encode_labels(y);
  const std::size_t n = X.rows();
  const std::size_t k = enc.classes.size();

  ForestModel forest;
  Matrix oob_votes(n, k);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    std::vector<bool> in_bag(n, !params.bootstrap);
    if (params.bootstrap) {
      for (auto& r : rows) {
        r = static_cast<std::size_t>(rng.below(n));
        in_bag[r] = true;
      }
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    GiniTreeBuilder builder(X, enc.index, k, params.max_depth, params.max_features, rng);
    forest.trees.push_back(builder.build(std::move(rows)));
    for (std::size_t i = 0; i < n; ++i)
      if (!in_bag[i]) oob_votes(i, detail::argmax(forest.trees.back().leaf_for(X.row(i)).value)) += 1.0;
  }
  std::size_t scored = 0, correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = oob_votes.row(i);
    if (std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; })) continue;
    ++scored;
    correct += detail::argmax(v) == enc.index[i];
  }
  if (scored > 0) forest.oob_accuracy = static_cast<double>(correct) / static_cast<double>(scored);

  TrainedModel model;
  model.kind = ModelKind::Rf;
  model.classes = enc.classes;
  model.feature_count = X.cols();
  model.params = std::move(forest);
  return model;
}

TrainedModel gbt_fit(const Matrix& X, std::span<const int> y, const GbtParams& params) {
  detail::check_fit_input(X, y, "gbt");
  if (params.n_rounds < 1) throw ConfigError("gbt: n_rounds must be at least 1");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
    throw ConfigError("gbt: learning_rate must lie in (0, 1]");
  if (!(params.lambda_l2 >= 0.0)) throw ConfigError("gbt: lambda_l2 must be non-negative");
  if (!(params.min_child_weight >= 0.0)) throw ConfigError("gbt: min_child_weight must be non-negative");
  const auto enc = detail::encode_labels(y);
  const std::size_t n = X.rows();
  const std::size_t k = enc.classes.size();
  if (k < 2) throw DataError("gbt: need at least two classes");

  GbtModel gbt;
  std::vector<double> counts(k, 0.0);
  for (std::size_t c : enc.index) counts[c] += 1.0;
  for (double c : counts) gbt.base_score.push_back(std::log(c / static_cast<double>(n)));

  Matrix scores(n, k);
  for (std::size_t i = 0; i < n; ++i)
    std::copy(gbt.base_score.begin(), gbt.base_score.end(), scores.row(i).begin());
  double loss = softmax_loss(scores, enc.index);
  gbt.train_loss.push_back(loss);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> grad(n), hess(n);
  Matrix prob(n, k);
  Matrix update(n, k);
  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(scores.row(i).begin(), scores.row(i).end(), prob.row(i).begin());
      softmax_inplace(prob.row(i));
    }
    std::vector<DecisionTree> trees;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob(i, c);
        grad[i] = p - (enc.index[i] == c ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      GradientTreeBuilder builder(X, grad, hess, params);
      trees.push_back(builder.build(all));
      for (std::size_t i = 0; i < n; ++i) update(i, c) = trees.back().leaf_for(X.row(i)).value[0];
    }

    // Shrunken Newton step; halved until the training loss does not increase.
    double step = params.learning_rate;
    Matrix trial = scores;
    double trial_loss = loss;
    bool accepted = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      for (std::size_t i = 0; i < trial.data().size(); ++i)
        trial.data()[i] = scores.data()[i] + step * update.data()[i];
      trial_loss = softmax_loss(trial, enc.index);
      if (trial_loss <= loss) {
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) {
      step = 0.0;
      trial = scores;
      trial_loss = loss;
    }
    for (auto& t : trees)
      for (auto& node : t.nodes)
        if (node.feature < 0) node.value[0] *= step;
    scores = std::move(trial);
    loss = trial_loss;
    gbt.train_loss.push_back(loss);
    gbt.step_scale.push_back(step / params.learning_rate);
    gbt.rounds.push_back(std::move(trees));
  }

  TrainedModel model;
  model.kind = ModelKind::Gbt;
  model.classes = enc.classes;
  model.feature_count = X.cols();
  model.params = std::move(gbt);
  return model;
}

Matrix gbt_predict_proba(const TrainedModel& model, const Matrix& X) {
  const auto* gbt = std::get_if<GbtModel>(&model.params);
  if (!gbt) throw DataError("gbt_predict_proba: model is not a boosted ensemble");
  if (X.rows() > 0 && X.cols() != model.feature_count)
    throw DataError("predict: expected " + std::to_string(model.feature_count) + " features, got " +
                    std::to_string(X.cols()));
  const Matrix Xs = model.scaler ? model.scaler->apply(X) : X;
  Matrix out(X.rows(), gbt->base_score.size());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto z = out.row(i);
    std::copy(gbt->base_score.begin(), gbt->base_score.end(), z.begin());
    for (const auto& round : gbt->rounds)
      for (std::size_t c = 0; c < round.size(); ++c) z[c] += round[c].leaf_for(Xs.row(i)).value[0];
    softmax_inplace(z);
  }
  return out;
}

}  // namespace graspeeg
