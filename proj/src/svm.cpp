#include <algorithm>
#include <cmath>
#include <limits>

#include "graspeeg/error.hpp"
#include "graspeeg/models.hpp"
#include "models_common.hpp"

namespace graspeeg {

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;
  bool converged = false;
  long iterations = 0;
};

// Dual SMO with second-order working-set selection on
//   min 1/2 a'Qa - e'a,  0 <= a <= C,  y'a = 0,  Q_ij = y_i y_j K_ij.
// Decision function f(x) = sum a_i y_i K(x_i, x) - rho.
SmoResult solve_smo(const Matrix& kernel, std::span<const double> y, double C, double tol, long max_iter) {
  const std::size_t n = y.size();
  constexpr double tau = 1e-12;
  auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kernel(i, j); };

  SmoResult res;
  res.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& a = res.alpha;
  auto is_up = [&](std::size_t t) { return (y[t] > 0 && a[t] < C) || (y[t] < 0 && a[t] > 0); };
  auto is_low = [&](std::size_t t) { return (y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < C); };

  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (is_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!is_low(t)) continue;
      const double v = y[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      if (i == n) continue;
      const double diff = gmax + v;
      if (diff > 0) {
        double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
        if (quad <= 0) quad = tau;
        const double obj = -(diff * diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax + gmax2 < tol) {
      res.converged = true;
      break;
    }

    const double ai_old = a[i], aj_old = a[j];
    if (y[i] != y[j]) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) { a[j] = 0; a[i] = diff; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
      }
      if (diff > 0) {
        if (a[i] > C) { a[i] = C; a[j] = C - diff; }
      } else {
        if (a[j] > C) { a[j] = C; a[i] = C + diff; }
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) { a[i] = C; a[j] = sum - C; }
      } else {
        if (a[j] < 0) { a[j] = 0; a[i] = sum; }
      }
      if (sum > C) {
        if (a[j] > C) { a[j] = C; a[i] = sum - C; }
      } else {
        if (a[i] < 0) { a[i] = 0; a[j] = sum; }
      }
    }
    const double di = a[i] - ai_old, dj = a[j] - aj_old;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  // rho from free variables, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (a[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (a[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  return res;
}

// Rows of class a followed by rows of class b, each in original order.
std::vector<std::size_t> pair_rows(const detail::EncodedLabels& enc, std::size_t a, std::size_t b) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < enc.index.size(); ++i)
    if (enc.index[i] == a || enc.index[i] == b) rows.push_back(i);
  return rows;
}

}  // namespace

TrainedModel svm_fit(const Matrix& X, std::span<const int> y, const SvmParams& params) {
  detail::check_fit_input(X, y, "svm");
  if (!(params.C > 0.0)) throw ConfigError("svm: C must be positive");
  if (!(params.gamma > 0.0)) throw ConfigError("svm: gamma must be positive");
  if (!(params.tol > 0.0)) throw ConfigError("svm: tol must be positive");
  const auto enc = detail::encode_labels(y);
  if (enc.classes.size() < 2) throw DataError("svm: need at least two classes");

  SvmModel svm;
  svm.gamma = params.gamma;
  svm.C = params.C;
  for (std::size_t ca = 0; ca < enc.classes.size(); ++ca) {
    for (std::size_t cb = ca + 1; cb < enc.classes.size(); ++cb) {
      const auto rows = pair_rows(enc, ca, cb);
      const std::size_t n = rows.size();
      std::vector<double> yy(n);
      Matrix kernel(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        yy[i] = enc.index[rows[i]] == ca ? 1.0 : -1.0;
        for (std::size_t j = 0; j <= i; ++j) kernel(i, j) = kernel(j, i) = rbf(X.row(rows[i]), X.row(rows[j]), params.gamma);
      }
      const SmoResult res = solve_smo(kernel, yy, params.C, params.tol, params.max_iter);

      SvmPair pair;
      pair.class_a = ca;
      pair.class_b = cb;
      pair.bias = -res.rho;
      pair.converged = res.converged;
      pair.iterations = res.iterations;
      pair.alpha = res.alpha;
      std::size_t n_sv = 0;
      for (double al : res.alpha) n_sv += al > 0.0;
      pair.support_vectors = Matrix(n_sv, X.cols());
      std::size_t s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(res.alpha[i] > 0.0)) continue;
        std::copy(X.row(rows[i]).begin(), X.row(rows[i]).end(), pair.support_vectors.row(s).begin());
        pair.coef.push_back(res.alpha[i] * yy[i]);
        ++s;
      }
      svm.pairs.push_back(std::move(pair));
    }
  }

  TrainedModel model;
  model.kind = ModelKind::Svm;
  model.classes = enc.classes;
  model.feature_count = X.cols();
  model.params = std::move(svm);
  return model;
}

double svm_decision(const SvmModel& svm, std::size_t pair, std::span<const double> row) {
  const auto& p = svm.pairs.at(pair);
  double f = p.bias;
  for (std::size_t s = 0; s < p.coef.size(); ++s) f += p.coef[s] * rbf(p.support_vectors.row(s), row, svm.gamma);
  return f;
}

double svm_kkt_violation(const TrainedModel& model, const Matrix& X, std::span<const int> y) {
  const auto* svm = std::get_if<SvmModel>(&model.params);
  if (!svm) throw DataError("svm_kkt_violation: model is not an SVM");
  const Matrix Xs = model.scaler ? model.scaler->apply(X) : X;
  const auto enc = detail::encode_labels(y);
  double worst = 0.0;
  for (std::size_t p = 0; p < svm->pairs.size(); ++p) {
    const auto& pair = svm->pairs[p];
    const auto rows = pair_rows(enc, pair.class_a, pair.class_b);
    if (rows.size() != pair.alpha.size()) throw DataError("svm_kkt_violation: data differs from the fit");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double yi = enc.index[rows[i]] == pair.class_a ? 1.0 : -1.0;
      const double margin = yi * svm_decision(*svm, p, Xs.row(rows[i]));
      const double a = pair.alpha[i];
      double v = 0.0;
      if (a <= 0.0) v = std::max(0.0, 1.0 - margin);
      else if (a >= svm->C) v = std::max(0.0, margin - 1.0);
      else v = std::abs(margin - 1.0);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

}  // namespace graspeeg
