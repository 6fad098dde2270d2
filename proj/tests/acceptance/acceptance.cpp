// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cli.hpp"
#include "graspeeg/features.hpp"
#include "graspeeg/fft.hpp"
#include "graspeeg/importance.hpp"
#include "graspeeg/io.hpp"
#include "graspeeg/models.hpp"
#include "graspeeg/pipeline.hpp"
#include "graspeeg/preprocessing.hpp"
#include "graspeeg/rng.hpp"
#include "graspeeg/serialize.hpp"
#include "graspeeg/synth.hpp"
#include "graspeeg/wavelet.hpp"
#include "oracles.hpp"

using namespace graspeeg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr double kFs = 250.0;

// Shared by criteria 7 and 8: the default synthetic dataset run through the
// default preprocessing and feature extraction.
FeatureMatrix default_features(double* seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig cfg = PipelineConfig::defaults();
  const EpochedDataset raw = generate(cfg.resolved_synth());
  const EpochedDataset clean = preprocess_dataset(raw, cfg.resolved_preprocess());
  FeatureMatrix fm = build_feature_matrix(clean, cfg.bank(clean.sampling_rate), cfg.feature_spec(clean.montage));
  *seconds = seconds_since(t0);
  return fm;
}

Outcome wavelet_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  const double amp = rng.uniform(0.5, 3.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const std::size_t n = 1000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * 9.0 * i / kFs + phase);

  std::vector<double> freqs;
  for (double f = 3.0; f <= 40.0; f += 1.0) freqs.push_back(f);
  const auto bank = build_morlet_bank(freqs, 4.0, kFs);
  Matrix m(1, n);
  std::copy(x.begin(), x.end(), m.row(0).begin());
  const auto cp = cwt_power(m, bank).front();
  std::size_t best = 0;
  double best_mean = -1;
  for (std::size_t f = 0; f < bank.size(); ++f) {
    double s = 0;
    std::size_t cnt = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (!cp.is_edge(f, t)) {
        s += cp.power(f, t);
        ++cnt;
      }
    if (s / cnt > best_mean) {
      best_mean = s / cnt;
      best = f;
    }
  }
  const auto p = oracle::periodogram(x);
  const std::size_t peak = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  const double peak_hz = peak * kFs / n;

  const std::size_t f9 = *bank.index_of(9.0);
  std::vector<double> interior;
  for (std::size_t t = 0; t < n; ++t)
    if (!cp.is_edge(f9, t)) interior.push_back(cp.power(f9, t));
  const auto mom = oracle::moments(interior);
  const double cov = std::sqrt(static_cast<double>(mom.variance)) / static_cast<double>(mom.mean);
  const double secs = seconds_since(t0);
  return {freqs[best] == peak_hz && cov < 0.05 && secs < 1.0,
          "cwt argmax " + fmt("%g", freqs[best]) + " Hz, periodogram peak " + fmt("%g", peak_hz) +
              " Hz, interior CoV " + fmt("%.4f", cov) + " (< 0.05), " + fmt("%.3f", secs) + " s (< 1)"};
}

Outcome convolution_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<std::size_t> len(430, 3000);
  const auto bank = build_morlet_bank(default_bank_freqs(), 4.0, kFs);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = oracle::random_vector(gen, len(gen), -50.0, 50.0);
    for (const auto& k : bank.kernels) {
      const auto d = convolve_direct(x, k);
      const auto f = convolve_fft(x, k);
      double scale = 0, diff = 0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        scale = std::max(scale, std::abs(d[t]));
        diff = std::max(diff, std::abs(d[t] - f[t]));
      }
      worst = std::max(worst, diff / scale);
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 10.0,
          "max relative difference " + fmt("%.3g", worst) + " (< 1e-6) over 100 signals x 4 kernels, " +
              fmt("%.2f", secs) + " s (< 10)"};
}

Outcome stat_oracle() {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<std::size_t> len(4, 500);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto v = oracle::random_vector(gen, len(gen), -2.0, 5.0);
    if (i % 2) for (auto& x : v) x = std::exp(x);
    const auto want = oracle::moments(v);
    const auto got = stat_features(v);
    const long double pairs[4][2] = {{got.mean, want.mean},
                                     {got.variance, want.variance},
                                     {got.skewness, want.skewness},
                                     {got.kurtosis, want.kurtosis}};
    for (const auto& p : pairs)
      worst = std::max(worst, static_cast<double>(std::fabs(p[0] - p[1]) / std::max(1.0L, std::fabs(p[1]))));
  }
  const auto spec = FeatureSpec::default_spec();
  const auto names = spec.feature_names();
  bool naming = names.size() == 128 && spec.size() == 128;
  std::size_t idx = 0;
  for (const auto& ch : spec.channels)
    for (const auto& b : spec.bands)
      for (auto st : kStatNames) naming = naming && names[idx++] == ch + "_" + b.name + "_" + std::string(st);
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  naming = naming && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  return {worst < 1e-10 && naming, "max relative error " + fmt("%.3g", worst) + " (< 1e-10) on 1000 vectors; " +
                                       std::to_string(names.size()) + " unique channel_band_stat names" +
                                       (naming ? "" : " CONTRACT VIOLATED")};
}

Outcome preprocessing() {
  const std::size_t n = 2500;
  auto rms_ratio_db = [&](double f) {
    Matrix x(1, n);
    for (std::size_t i = 0; i < n; ++i) x(0, i) = std::sin(2.0 * std::numbers::pi * f * i / kFs);
    const Matrix y = bandpass_filter(x, BandpassSpec{}, kFs);
    double a = 0, b = 0;
    for (std::size_t i = 500; i < 2000; ++i) {
      a += x(0, i) * x(0, i);
      b += y(0, i) * y(0, i);
    }
    return 10.0 * std::log10(b / a);
  };
  const double att50 = rms_ratio_db(50.0);
  const double keep10 = std::pow(10.0, rms_ratio_db(10.0) / 20.0);

  SynthConfig sc = SynthConfig::default_config();
  sc.n_trials_per_class = 10;
  const auto ds = generate(sc);
  double worst_base = 0;
  for (const auto& e : ds.epochs) {
    const auto c = baseline_correct(e, {-0.2, 0.0}, kFs);
    const auto [b, en] = window_indices(c, -0.2, 0.0, kFs);
    for (std::size_t r = 0; r < c.samples.rows(); ++r) {
      double m = 0;
      for (std::size_t i = b; i < en; ++i) m += c.samples(r, i);
      worst_base = std::max(worst_base, std::abs(m / (en - b)));
    }
  }
  const Matrix z = zscore_normalize(ds.epochs[4].samples);
  const double idem = max_abs_diff(zscore_normalize(z), z);
  return {att50 <= -40.0 && std::abs(keep10 - 1.0) <= 0.05 && worst_base < 1e-9 && idem < 1e-9,
          "50 Hz " + fmt("%.1f", att50) + " dB (<= -40), 10 Hz gain " + fmt("%.4f", keep10) +
              " (within 5%), baseline |mean| " + fmt("%.2g", worst_base) + " (< 1e-9), z-score idempotence " +
              fmt("%.2g", idem) + " (< 1e-9)"};
}

Outcome ica() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
  std::exponential_distribution<double> ex(std::sqrt(2.0));
  std::bernoulli_distribution coin(0.5);
  const std::size_t n = 5000;
  Matrix s(2, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(0, i) = u(gen);
    s(1, i) = coin(gen) ? ex(gen) : -ex(gen);  // Laplacian
  }
  Matrix a(2, 2);
  a(0, 0) = 0.9; a(0, 1) = 0.5; a(1, 0) = -0.3; a(1, 1) = 1.2;
  const Matrix x = a * s;
  IcaOptions opt;
  opt.seed = 11;
  const IcaModel m = fastica_fit(x, opt);
  const double amari = oracle::amari_index(m.unmixing * a);
  const double rt = max_abs_diff(ica_clean(x, m, std::numeric_limits<double>::infinity()).cleaned, x);
  const double secs = seconds_since(t0);
  return {amari < 0.1 && rt < 1e-6 && secs < 5.0,
          "Amari index " + fmt("%.4f", amari) + " (< 0.1), round-trip error " + fmt("%.2g", rt) + " (< 1e-6), " +
              fmt("%.3f", secs) + " s (< 5)"};
}

Outcome classifier_sanity() {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd(0.0, 0.4);
  // Linearly separable: two shifted clouds.
  Matrix sep(60, 3);
  std::vector<int> ys;
  for (std::size_t i = 0; i < 60; ++i) {
    const int c = static_cast<int>(i % 2);
    ys.push_back(c);
    for (std::size_t j = 0; j < 3; ++j) sep(i, j) = (c ? 2.5 : -2.5) + nd(gen);
  }
  const double lda_acc = accuracy(predict(lda_fit(sep, ys), sep), ys);

  std::uniform_real_distribution<double> u(0.2, 1.2);
  Matrix xr(100, 2);
  std::vector<int> yx;
  for (std::size_t i = 0; i < 100; ++i) {
    const double sx = (i % 2) ? 1 : -1, sy = (i % 4 < 2) ? 1 : -1;
    xr(i, 0) = sx * u(gen);
    xr(i, 1) = sy * u(gen);
    yx.push_back(sx * sy > 0 ? 0 : 1);
  }
  SvmParams sp;
  sp.gamma = 2.0;
  sp.C = 10.0;
  const double svm_acc = accuracy(predict(svm_fit(xr, yx, sp), xr), yx);

  Matrix noisy(90, 4);
  std::vector<int> yg;
  for (std::size_t i = 0; i < 90; ++i) {
    const int c = static_cast<int>(i % 3);
    yg.push_back(c);
    for (std::size_t j = 0; j < 4; ++j) noisy(i, j) = (static_cast<int>(j) == c ? 1.0 : 0.0) + 2.0 * nd(gen);
  }
  const TrainedModel gm = gbt_fit(noisy, yg, {});
  const auto& g = std::get<GbtModel>(gm.params);
  bool monotone = true;
  for (std::size_t i = 1; i < g.train_loss.size(); ++i) monotone = monotone && g.train_loss[i] <= g.train_loss[i - 1];

  std::vector<int> y150(150);
  for (std::size_t i = 0; i < 150; ++i) y150[i] = static_cast<int>(i / 50);
  const auto folds = stratified_kfold(y150, 5, 3);
  bool folds_ok = folds.size() == 5;
  for (const auto& f : folds) {
    int counts[3] = {0, 0, 0};
    for (auto i : f.test) ++counts[y150[i]];
    folds_ok = folds_ok && f.test.size() == 30 && counts[0] == 10 && counts[1] == 10 && counts[2] == 10;
  }
  return {lda_acc == 1.0 && svm_acc == 1.0 && monotone && folds_ok,
          "LDA separable train acc " + fmt("%.3f", lda_acc) + ", SVM XOR train acc " + fmt("%.3f", svm_acc) +
              ", GBT loss " + (monotone ? "monotone" : "NOT monotone") + " over " +
              std::to_string(g.train_loss.size() - 1) + " rounds, folds " +
              (folds_ok ? "5 x 30 with 10 per class" : "WRONG")};
}

Outcome end_to_end(const FeatureMatrix& fm, double feature_seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig cfg = PipelineConfig::defaults();
  auto run = [&](const FeatureMatrix& f, Task task) {
    return cross_validate(ModelKind::Gbt, cfg.hyperparams, f, task, 5, cfg.cv_seed()).mean;
  };
  const double multi = run(fm, Task::Multiclass);
  const double nm_pw = run(fm, Task::NmVsPower);
  const double nm_pr = run(fm, Task::NmVsPrecision);
  const double pw_pr = run(fm, Task::PowerVsPrecision);
  FeatureMatrix shuffled = fm;
  Rng rng(99);
  rng.shuffle(std::span<ConditionLabel>(shuffled.y));
  const double chance = run(shuffled, Task::Multiclass);
  // 99% normal-approximation band for a binomial proportion at p = 1/3.
  const double sd = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / static_cast<double>(shuffled.y.size()));
  const double lo = 1.0 / 3.0 - 2.5758 * sd, hi = 1.0 / 3.0 + 2.5758 * sd;
  const double secs = feature_seconds + seconds_since(t0);
  const bool pass = multi >= 0.80 && nm_pw >= 0.90 && nm_pr >= 0.90 && pw_pr < std::min(nm_pw, nm_pr) &&
                    chance >= lo && chance <= hi && secs < 300.0;
  return {pass, "GBT multiclass " + fmt("%.4f", multi) + " (>= 0.80), nm-vs-power " + fmt("%.4f", nm_pw) +
                    ", nm-vs-precision " + fmt("%.4f", nm_pr) + " (>= 0.90), power-vs-precision " +
                    fmt("%.4f", pw_pr) + " (< both), shuffled labels " + fmt("%.4f", chance) +
                    " (in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]), " + fmt("%.1f", secs) + " s (< 300)"};
}

Outcome importance(const FeatureMatrix& fm_in) {
  const PipelineConfig cfg = PipelineConfig::defaults();
  FeatureMatrix fm = fm_in;
  // Append a constant column the model cannot use.
  Matrix X(fm.X.rows(), fm.X.cols() + 1);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t c = 0; c < fm.X.cols(); ++c) X(r, c) = fm.X(r, c);
    X(r, fm.X.cols()) = 1.0;
  }
  fm.X = X;
  fm.names.push_back("constant");
  const auto rep = cross_validated_importance(ModelKind::Gbt, cfg.hyperparams, fm, Task::Multiclass, 5,
                                              cfg.importance_repeats, cfg.importance_seed());
  std::string top;
  bool c3_top5 = false;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& name = rep.feature_names[rep.ranking[i]];
    top += (i ? "," : "") + name;
    c3_top5 = c3_top5 || name.rfind("C3_alpha_", 0) == 0 || name.rfind("C3_beta", 0) == 0;
  }
  bool constant_zero = true;
  for (double v : rep.scores.back()) constant_zero = constant_zero && v == 0.0;

  // Channel-band aggregation over the 128 real features.
  ImportanceReport real = rep;
  real.feature_names.pop_back();
  real.scores.pop_back();
  rank_features(real);
  const Montage montage = Montage::default_montage();
  aggregate_channel_band(real, cfg.feature_spec(montage));
  const auto topo = importance_topomap(real, montage, "alpha", cfg.grid);
  const auto at = std::max_element(topo.values.begin(), topo.values.end()) - topo.values.begin();
  const bool alpha_c3 = topo.channels[static_cast<std::size_t>(at)] == "C3";
  // The interpolated grid's maximum sits at the C3 electrode as well.
  const ScalpGrid& grid = *topo.grid;
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    if (grid.inside[i] && (!grid.inside[best] || grid.values[i] > grid.values[best])) best = i;
  const ScalpPosition cell = grid.centre(best / grid.size, best % grid.size);
  std::size_t nearest = 0;
  double nd = 1e9;
  for (std::size_t c = 0; c < montage.size(); ++c) {
    const double d = std::hypot(cell.x - montage.positions()[c].x, cell.y - montage.positions()[c].y);
    if (d < nd) {
      nd = d;
      nearest = c;
    }
  }
  const bool grid_c3 = montage.channels()[nearest] == "C3";
  return {c3_top5 && alpha_c3 && grid_c3 && constant_zero,
          "top-5 by median [" + top + "]" + (c3_top5 ? "" : " lacks C3 alpha/beta") + "; alpha map peak at " +
              topo.channels[static_cast<std::size_t>(at)] + " (grid peak nearest " + montage.channels()[nearest] +
              "); constant feature " + (constant_zero ? "exactly 0" : "NON-ZERO") + " over " +
              std::to_string(rep.repeats) + " repeats"};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "graspeeg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

// Runs every stage from relative paths inside `dir`, so provenance headers
// match between runs.
bool run_pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path prev = fs::current_path();
  fs::current_path(dir);
  const std::vector<std::vector<std::string>> steps = {
      {"synth", "--config", "default", "--out", "data"},
      {"preprocess", "--data", "data", "--out", "pre"},
      {"tfmap", "--data", "pre", "--label", "power", "--out", "figs"},
      {"topomap", "--data", "pre", "--label", "power", "--t", "0.3", "--freq", "9", "--out", "figs"},
      {"features", "--data", "pre", "--out", "features.csv"},
      {"crossval", "--features", "features.csv", "--model", "gbt", "--out", "cv_gbt.json"},
      {"crossval", "--features", "features.csv", "--model", "rf", "--task", "power-vs-precision", "--out",
       "cv_rf.json"},
      {"importance", "--features", "features.csv", "--model", "gbt", "--repeats", "3", "--out", "importance.json"},
      {"report", "--cv", "cv_gbt.json", "cv_rf.json", "--importance", "importance.json", "--out", "report"},
  };
  bool ok = true;
  for (const auto& s : steps) ok = ok && cli(s) == kExitOk;
  fs::current_path(prev);
  return ok;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "graspeeg_acceptance_determinism";
  const fs::path a = root / "a", b = root / "b";
  if (!run_pipeline(a) || !run_pipeline(b)) return {false, "a pipeline stage failed"};
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    ++files;
    if (!fs::exists(b / rel) || read_file(entry.path()) != read_file(b / rel)) differing.push_back(rel.string());
  }
  // Re-entry from an intermediate: crossval straight from the dataset must
  // match crossval from the saved feature CSV, provenance aside.
  const fs::path prev = fs::current_path();
  fs::current_path(a);
  const bool reentry_ran = cli({"crossval", "--data", "pre", "--dataset-name", "features", "--model", "gbt", "--out",
                                "cv_from_data.json"}) == kExitOk;
  fs::current_path(prev);
  bool reentry_same = false;
  if (reentry_ran) {
    auto x = json::parse(read_file(a / "cv_gbt.json")), y = json::parse(read_file(a / "cv_from_data.json"));
    x.erase("provenance");
    y.erase("provenance");
    reentry_same = x == y;
  }
  std::size_t files_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(b)) files_b += entry.is_regular_file();
  fs::remove_all(root);
  std::string detail = std::to_string(files) + " artifacts from 9 stage runs compared bytewise";
  if (!differing.empty()) detail += "; differing: " + differing.front();
  detail += reentry_same ? "; crossval from dataset == crossval from feature CSV"
                         : "; crossval from dataset DIFFERS from feature CSV route";
  return {differing.empty() && files == files_b && files > 0 && reentry_same, detail};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d %s: %s | %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  report(1, "wavelet-oracle", wavelet_oracle);
  report(2, "convolution-equivalence", convolution_equivalence);
  report(3, "statistical-features", stat_oracle);
  report(4, "preprocessing", preprocessing);
  report(5, "ica", ica);
  report(6, "classifier-sanity", classifier_sanity);
  double feature_seconds = 0;
  FeatureMatrix fm;
  bool have_features = true;
  std::string feature_error;
  try {
    fm = default_features(&feature_seconds);
  } catch (const std::exception& e) {
    have_features = false;
    feature_error = e.what();
  }
  report(7, "end-to-end-synthetic", [&]() {
    return have_features ? end_to_end(fm, feature_seconds) : Outcome{false, "pipeline failed: " + feature_error};
  });
  report(8, "importance", [&]() {
    return have_features ? importance(fm) : Outcome{false, "pipeline failed: " + feature_error};
  });
  report(9, "determinism", determinism);
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
