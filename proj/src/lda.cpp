#include <cmath>

#include "graspeeg/error.hpp"
#include "graspeeg/models.hpp"
#include "models_common.hpp"

namespace graspeeg {

TrainedModel lda_fit(const Matrix& X, std::span<const int> y, const LdaParams& params) {
  detail::check_fit_input(X, y, "lda");
  if (!(params.shrinkage >= 0.0 && params.shrinkage <= 1.0)) throw ConfigError("lda: shrinkage must lie in [0, 1]");
  const auto enc = detail::encode_labels(y);
  const std::size_t k = enc.classes.size();
  const std::size_t d = X.cols();
  const std::size_t n = X.rows();
  if (k < 2) throw DataError("lda: need at least two classes");

  LdaModel lda;
  lda.means = Matrix(k, d);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[enc.index[i]];
    auto m = lda.means.row(enc.index[i]);
    auto x = X.row(i);
    for (std::size_t j = 0; j < d; ++j) m[j] += x[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] < 2) throw DataError("lda: every class needs at least two rows");
    for (double& v : lda.means.row(c)) v /= static_cast<double>(counts[c]);
    lda.priors.push_back(static_cast<double>(counts[c]) / static_cast<double>(n));
  }

  // Pooled within-class covariance.
  Matrix cov(d, d);
  std::vector<double> centred(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = X.row(i);
    auto m = lda.means.row(enc.index[i]);
    for (std::size_t j = 0; j < d; ++j) centred[j] = x[j] - m[j];
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = centred[a];
      if (ca == 0.0) continue;
      auto row = cov.row(a);
      for (std::size_t b = 0; b < d; ++b) row[b] += ca * centred[b];
    }
  }
  const double dof = n > k ? static_cast<double>(n - k) : 1.0;
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (double& v : cov.row(a)) v /= dof;
    trace += cov(a, a);
  }
  const double target = trace / static_cast<double>(d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      cov(a, b) = (1.0 - params.shrinkage) * cov(a, b) + (a == b ? params.shrinkage * target : 0.0);

  Matrix chol;
  try {
    chol = cholesky(cov);
  } catch (const NumericError&) {
    throw NumericError("lda: covariance is singular; use shrinkage > 0");
  }

  lda.coef = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    const auto w = cholesky_solve(chol, lda.means.row(c));
    double quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      lda.coef(c, j) = w[j];
      quad += w[j] * lda.means(c, j);
    }
    lda.intercept.push_back(-0.5 * quad + std::log(lda.priors[c]));
  }

  TrainedModel model;
  model.kind = ModelKind::Lda;
  model.classes = enc.classes;
  model.feature_count = d;
  model.params = std::move(lda);
  return model;
}

}  // namespace graspeeg
