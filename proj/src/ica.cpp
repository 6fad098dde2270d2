#include <cmath>
#include <limits>
#include <string>

#include "graspeeg/error.hpp"
#include "graspeeg/preprocessing.hpp"
#include "graspeeg/rng.hpp"

namespace graspeeg {

namespace {

double excess_kurtosis(std::span<const double> s) {
  const double n = static_cast<double>(s.size());
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : s) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
}

}  // namespace

IcaModel fastica_fit(const Matrix& x, const IcaOptions& options) {
  const std::size_t nch = x.rows();
  const std::size_t nt = x.cols();
  if (nch == 0) throw DataError("ica: no channels");
  if (nt < 10 * nch)
    throw DataError("ica: need at least " + std::to_string(10 * nch) + " samples, got " + std::to_string(nt));
  const std::size_t ncomp = options.n_components == 0 ? nch : options.n_components;
  if (ncomp > nch) throw ConfigError("ica: more components than channels");

  IcaModel model;
  model.mean.assign(nch, 0.0);
  Matrix xc = x;
  for (std::size_t r = 0; r < nch; ++r) {
    auto row = xc.row(r);
    double m = 0.0;
    for (double v : row) m += v;
    m /= static_cast<double>(nt);
    model.mean[r] = m;
    for (double& v : row) v -= m;
  }

  Matrix cov(nch, nch);
  for (std::size_t i = 0; i < nch; ++i)
    for (std::size_t j = i; j < nch; ++j) {
      double s = 0.0;
      auto a = xc.row(i), b = xc.row(j);
      for (std::size_t t = 0; t < nt; ++t) s += a[t] * b[t];
      cov(i, j) = cov(j, i) = s / static_cast<double>(nt);
    }

  const SymmetricEigen eig = jacobi_eigen(cov);
  const double top = eig.values.front();
  for (std::size_t k = 0; k < ncomp; ++k)
    if (!(eig.values[k] > 1e-10 * top) || !(top > 0.0))
      throw NumericError("ica: rank-deficient covariance (eigenvalue " + std::to_string(k) + " ~ 0)");

  // Symmetric (ZCA) whitening when keeping every component; otherwise project
  // onto the leading principal directions.
  Matrix whitener(ncomp, nch), dewhitener(nch, ncomp);
  if (ncomp == nch) {
    for (std::size_t i = 0; i < nch; ++i)
      for (std::size_t j = 0; j < nch; ++j) {
        double w = 0.0, d = 0.0;
        for (std::size_t k = 0; k < nch; ++k) {
          const double ev = eig.vectors(i, k) * eig.vectors(j, k);
          w += ev / std::sqrt(eig.values[k]);
          d += ev * std::sqrt(eig.values[k]);
        }
        whitener(i, j) = w;
        dewhitener(i, j) = d;
      }
  } else {
    for (std::size_t k = 0; k < ncomp; ++k)
      for (std::size_t c = 0; c < nch; ++c) {
        whitener(k, c) = eig.vectors(c, k) / std::sqrt(eig.values[k]);
        dewhitener(c, k) = eig.vectors(c, k) * std::sqrt(eig.values[k]);
      }
  }

  const Matrix z = whitener * xc;
  Matrix w_all(ncomp, ncomp);
  model.iterations.assign(ncomp, 0);
  model.converged.assign(ncomp, false);
  std::vector<double> proj(nt);
  std::string failed;

  for (std::size_t p = 0; p < ncomp; ++p) {
    Rng rng(derive_seed(options.seed, p));
    std::vector<double> w(ncomp);
    for (double& v : w) v = rng.normal();

    auto deflate_normalize = [&](std::vector<double>& v) {
      for (std::size_t q = 0; q < p; ++q) {
        double dot = 0.0;
        for (std::size_t k = 0; k < ncomp; ++k) dot += v[k] * w_all(q, k);
        for (std::size_t k = 0; k < ncomp; ++k) v[k] -= dot * w_all(q, k);
      }
      double norm = 0.0;
      for (double e : v) norm += e * e;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) throw NumericError("ica: degenerate direction in component " + std::to_string(p));
      for (double& e : v) e /= norm;
    };
    deflate_normalize(w);

    for (int it = 1; it <= options.max_iter; ++it) {
      std::fill(proj.begin(), proj.end(), 0.0);
      for (std::size_t k = 0; k < ncomp; ++k) {
        auto zr = z.row(k);
        for (std::size_t t = 0; t < nt; ++t) proj[t] += w[k] * zr[t];
      }
      double mean_dg = 0.0;
      for (double& u : proj) {
        const double g = std::tanh(u);
        mean_dg += 1.0 - g * g;
        u = g;
      }
      mean_dg /= static_cast<double>(nt);
      std::vector<double> next(ncomp);
      for (std::size_t k = 0; k < ncomp; ++k) {
        auto zr = z.row(k);
        double s = 0.0;
        for (std::size_t t = 0; t < nt; ++t) s += zr[t] * proj[t];
        next[k] = s / static_cast<double>(nt) - mean_dg * w[k];
      }
      deflate_normalize(next);
      double dot = 0.0;
      for (std::size_t k = 0; k < ncomp; ++k) dot += next[k] * w[k];
      w = std::move(next);
      model.iterations[p] = it;
      if (std::abs(1.0 - std::abs(dot)) < options.tol) {
        model.converged[p] = true;
        break;
      }
    }
    if (!model.converged[p]) failed += (failed.empty() ? "" : ",") + std::to_string(p);
    for (std::size_t k = 0; k < ncomp; ++k) w_all(p, k) = w[k];
  }
  if (!failed.empty() && !options.allow_unconverged)
    throw NumericError("ica: components " + failed + " did not converge within " +
                       std::to_string(options.max_iter) + " iterations");

  model.whitener = whitener;
  model.unmixing = w_all * whitener;
  model.mixing = dewhitener * w_all.transposed();

  const Matrix sources = model.unmixing * xc;
  model.component_kurtosis.resize(ncomp);
  for (std::size_t k = 0; k < ncomp; ++k) model.component_kurtosis[k] = excess_kurtosis(sources.row(k));
  return model;
}

Matrix ica_sources(const Matrix& x, const IcaModel& model) {
  if (x.rows() != model.n_channels())
    throw DataError("ica: data has " + std::to_string(x.rows()) + " channels, model expects " +
                    std::to_string(model.n_channels()));
  Matrix xc = x;
  for (std::size_t r = 0; r < xc.rows(); ++r)
    for (double& v : xc.row(r)) v -= model.mean[r];
  return model.unmixing * xc;
}

IcaCleanResult ica_clean(const Matrix& x, const IcaModel& model, double reject_kurtosis_threshold) {
  Matrix s = ica_sources(x, model);
  IcaCleanResult result;
  for (std::size_t k = 0; k < model.n_components(); ++k) {
    if (std::abs(model.component_kurtosis[k]) > reject_kurtosis_threshold) {
      result.rejected.push_back(k);
      for (double& v : s.row(k)) v = 0.0;
    }
  }
  result.cleaned = model.mixing * s;
  for (std::size_t r = 0; r < result.cleaned.rows(); ++r)
    for (double& v : result.cleaned.row(r)) v += model.mean[r];
  return result;
}

}  // namespace graspeeg
