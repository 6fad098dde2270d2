#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "graspeeg/error.hpp"
#include "graspeeg/fft.hpp"
#include "graspeeg/synth.hpp"
#include "graspeeg/wavelet.hpp"
#include "oracles.hpp"

using namespace graspeeg;

namespace {

constexpr double kFs = 250.0;

std::vector<double> sine(double f, std::size_t n, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * i / kFs + phase);
  return x;
}

EpochedDataset small_synth(int per_class = 6) {
  SynthConfig c = SynthConfig::default_config();
  c.n_trials_per_class = per_class;
  return generate(c);
}

}  // namespace

TEST_SUITE("wavelet") {
  TEST_CASE("fft matches the direct DFT and inverts") {
    std::mt19937_64 gen(1);
    const auto v = oracle::random_vector(gen, 64);
    std::vector<cplx> data(v.begin(), v.end());
    fft_inplace(data);
    const auto p = oracle::periodogram(v);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::norm(data[k]) == doctest::Approx(p[k]).epsilon(1e-10));
    fft_inplace(data, true);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(data[i] - cplx(v[i])) < 1e-12);
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(513) == 1024);
  }

  TEST_CASE("morlet kernel shape") {
    const auto bank = build_morlet_bank({9.0}, 4.0, kFs);
    // half-width ceil(4 * 4/(2 pi 9) * 250) = 71
    CHECK(bank.kernels[0].size() == 143);
    CHECK(bank.half_width(0) == 71);
    double energy = 0;
    for (auto c : bank.kernels[0]) energy += std::norm(c);
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));
    const std::size_t h = bank.half_width(0);
    for (std::size_t j = 1; j <= h; ++j) CHECK(std::abs(bank.kernels[0][h + j] - std::conj(bank.kernels[0][h - j])) < 1e-15);
  }

  TEST_CASE("default bank fits a two-second epoch") {
    const auto bank = build_morlet_bank(default_bank_freqs(), 4.0, kFs);
    CHECK(bank.size() == 4);
    CHECK(bank.longest_kernel() <= 501);
    CHECK(bank.index_of(16.0) == 2u);
    CHECK_FALSE(bank.index_of(10.0).has_value());
  }

  TEST_CASE("bank validation") {
    CHECK_THROWS_AS(build_morlet_bank({0.0}, 4.0, kFs), ConfigError);
    CHECK_THROWS_AS(build_morlet_bank({125.0}, 4.0, kFs), ConfigError);
    CHECK_THROWS_AS(build_morlet_bank({}, 4.0, kFs), ConfigError);
    CHECK_THROWS_AS(build_morlet_bank({9.0}, 0.0, kFs), ConfigError);
  }

  TEST_CASE("direct and fft convolution agree with the naive oracle") {
    std::mt19937_64 gen(8);
    const auto bank = build_morlet_bank({5.0, 23.0}, 4.0, kFs);
    for (std::size_t n : {301, 500, 777}) {
      const auto x = oracle::random_vector(gen, n);
      for (const auto& k : bank.kernels) {
        const auto ref = oracle::convolve_same(x, k);
        const auto d = convolve_direct(x, k);
        const auto f = convolve_fft(x, k);
        for (std::size_t t = 0; t < n; ++t) {
          CHECK(std::abs(d[t] - ref[t]) <= 1e-12 * (1.0 + std::abs(ref[t])));
          CHECK(std::abs(f[t] - ref[t]) <= 1e-10 * (1.0 + std::abs(ref[t])));
        }
        CHECK(std::abs(convolve_at(x, k, n / 3) - d[n / 3]) < 1e-15);
      }
    }
  }

  TEST_CASE("cwt power peaks at the tone frequency") {
    std::vector<double> freqs;
    for (double f = 3.0; f <= 40.0; f += 1.0) freqs.push_back(f);
    const auto bank = build_morlet_bank(freqs, 4.0, kFs);
    Matrix x(1, 1000);
    const auto s = sine(9.0, 1000, 2.0, 0.4);
    std::copy(s.begin(), s.end(), x.row(0).begin());
    const auto cp = cwt_power(x, bank).front();
    std::size_t best = 0;
    double best_mean = 0;
    for (std::size_t f = 0; f < bank.size(); ++f) {
      double m = 0;
      std::size_t cnt = 0;
      for (std::size_t t = 0; t < 1000; ++t)
        if (!cp.is_edge(f, t)) {
          m += cp.power(f, t);
          ++cnt;
        }
      m /= static_cast<double>(cnt);
      if (m > best_mean) {
        best_mean = m;
        best = f;
      }
    }
    CHECK(freqs[best] == 9.0);
  }

  TEST_CASE("edge flags cover one half-width at each end") {
    const auto bank = build_morlet_bank({9.0}, 4.0, kFs);
    const auto cp = cwt_power(Matrix(1, 400, 1.0), bank).front();
    std::size_t edges = 0;
    for (std::size_t t = 0; t < 400; ++t) edges += cp.is_edge(0, t);
    CHECK(edges == 2 * 71);
    CHECK(cp.is_edge(0, 70));
    CHECK_FALSE(cp.is_edge(0, 71));
    CHECK_FALSE(cp.is_edge(0, 328));
    CHECK(cp.is_edge(0, 329));
  }

  TEST_CASE("fft and direct cwt agree") {
    std::mt19937_64 gen(2);
    const auto bank = build_morlet_bank(default_bank_freqs(), 4.0, kFs);
    const auto x = oracle::random_vector(gen, 501);
    const auto a = cwt_coefficients(x, bank, ConvolutionMethod::Fft);
    const auto b = cwt_coefficients(x, bank, ConvolutionMethod::Direct);
    for (std::size_t f = 0; f < a.size(); ++f)
      for (std::size_t t = 0; t < x.size(); ++t) CHECK(std::abs(a[f][t] - b[f][t]) < 1e-10);
  }

  TEST_CASE("cwt rejects a signal shorter than the longest kernel") {
    const auto bank = build_morlet_bank({3.0}, 4.0, kFs);
    CHECK_THROWS_AS(cwt_coefficients(std::vector<double>(400, 0.0), bank), DataError);
  }

  TEST_CASE("time-frequency map axes and baseline") {
    const auto ds = small_synth(2);
    const auto bank = build_morlet_bank(default_bank_freqs(), 4.0, kFs);
    const auto map = time_frequency_map(ds.epochs[1], ds.montage, kFs, "C3", bank);
    CHECK(map.times_s.size() == 501);
    CHECK(map.times_s.front() == doctest::Approx(-1.0));
    CHECK(map.times_s.back() == doctest::Approx(1.0));
    CHECK(map.power.rows() == 4);

    TfBaseline db{BaselineMode::Decibel, {-0.2, 0.0}};
    const auto m2 = time_frequency_map(ds.epochs[1], ds.montage, kFs, "C3", bank, {-0.5, 0.9}, db);
    CHECK(m2.times_s.size() == 351);
    // dB relative to the mean baseline power: the baseline's linear mean maps to 1.
    for (std::size_t f = 0; f < 4; ++f) {
      double lin = 0;
      for (std::size_t t = 75; t < 125; ++t) lin += std::pow(10.0, m2.power(f, t) / 10.0);
      CHECK(lin / 50.0 == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(time_frequency_map(ds.epochs[1], ds.montage, kFs, "T7", bank), DataError);
    CHECK_THROWS_AS(time_frequency_map(ds.epochs[1], ds.montage, kFs, "C3", bank, {-1.0, 1.5}), DataError);
    CHECK_THROWS_AS(time_frequency_map(ds.epochs[1], ds.montage, kFs, "C3", bank, {0.5, 0.5}), DataError);
  }

  TEST_CASE("class-average map shows the post-onset alpha surge") {
    const auto ds = small_synth();
    const auto bank = build_morlet_bank(default_bank_freqs(), 4.0, kFs);
    const auto map = average_time_frequency_map(ds, ConditionLabel::Power, "C3", bank);
    const std::size_t alpha = *bank.index_of(9.0);
    double pre = 0, post = 0;
    for (std::size_t t = 100; t < 225; ++t) pre += map.power(alpha, t);      // -0.6 .. -0.1 s
    for (std::size_t t = 350; t < 475; ++t) post += map.power(alpha, t);     // 0.4 .. 0.9 s
    CHECK(post > 4.0 * pre);
    CHECK_THROWS_AS(average_time_frequency_map(EpochedDataset{ds.montage, kFs, {ds.epochs[0]}},
                                               ConditionLabel::Power, "C3", bank),
                    DataError);
  }

  TEST_CASE("topographic snapshot peaks at the burst electrode") {
    const auto ds = small_synth();
    const auto bank = build_morlet_bank(default_bank_freqs(), 4.0, kFs);
    const auto snap = topographic_snapshot(ds, ConditionLabel::Power, bank, 0.6, 9.0);
    CHECK(snap.channels.size() == 8);
    const auto c3 = *ds.montage.index_of("C3");
    CHECK(std::max_element(snap.values.begin(), snap.values.end()) - snap.values.begin() == static_cast<long>(c3));
    CHECK_THROWS_AS(topographic_snapshot(ds, ConditionLabel::Power, bank, 0.6, 10.0), ConfigError);
    CHECK_THROWS_AS(topographic_snapshot(ds, ConditionLabel::Power, bank, 1.5, 9.0), DataError);
  }

  TEST_CASE("scalp interpolation") {
    const Montage m = Montage::default_montage();
    TopographicSnapshot snap;
    snap.channels = m.channels();
    snap.values = {1, 8, 2, 3, 4, 5, 6, 7};
    for (std::size_t g : {8, 17, 64}) {
      const ScalpGrid grid = scalp_interpolate(snap, m, g);
      std::size_t inside = 0;
      for (bool b : grid.inside) inside += b;
      CHECK(inside == oracle::inside_cells(g));
      for (std::size_t i = 0; i < grid.values.size(); ++i)
        if (grid.inside[i]) CHECK((grid.values[i] >= 1.0 && grid.values[i] <= 8.0));
    }
    // Exact at an electrode.
    CHECK(interpolate_at(snap.values, m, m.positions()[1]) == 8.0);
    // Constant field stays constant.
    snap.values.assign(8, 2.5);
    const ScalpGrid flat = scalp_interpolate(snap, m, 16);
    for (std::size_t i = 0; i < flat.values.size(); ++i)
      if (flat.inside[i]) CHECK(flat.values[i] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(scalp_interpolate(snap, m, 7), ConfigError);
    const ScalpGrid g8 = scalp_interpolate(snap, m, 8);
    CHECK(g8.centre(0, 0).x == doctest::Approx(-0.875));
    CHECK(g8.centre(0, 0).y == doctest::Approx(0.875));
  }

  TEST_CASE("scalp interpolation rejects coincident electrodes") {
    const Montage m({"A", "B"}, {{0.1, 0.1}, {0.1, 0.1}});
    TopographicSnapshot snap;
    snap.channels = m.channels();
    snap.values = {1, 2};
    CHECK_THROWS_AS(scalp_interpolate(snap, m, 8), DataError);
  }
}
