#include <doctest.h>

#include <cmath>

#include "graspeeg/error.hpp"
#include "graspeeg/fft.hpp"
#include "graspeeg/synth.hpp"
#include "graspeeg/wavelet.hpp"
#include "oracles.hpp"

using namespace graspeeg;

namespace {

// Mean 9 Hz wavelet power of one channel over [b, e) samples, by label.
double mean_power(const EpochedDataset& ds, ConditionLabel label, const std::string& ch, double f, std::size_t b,
                  std::size_t e) {
  const auto bank = build_morlet_bank({f}, 4.0, ds.sampling_rate);
  const std::size_t row = *ds.montage.index_of(ch);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& ep : ds.epochs) {
    if (ep.label != label) continue;
    const auto c = cwt_coefficients(ep.samples.row(row), bank);
    for (std::size_t t = b; t < e; ++t) sum += std::norm(c[0][t]);
    n += e - b;
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("default dataset shape") {
    const auto ds = generate(SynthConfig::default_config());
    CHECK(ds.epochs.size() == 150);
    CHECK(ds.montage.size() == 8);
    CHECK(ds.n_samples() == 501);
    CHECK(ds.sampling_rate == 250.0);
    int counts[3] = {0, 0, 0};
    for (const auto& e : ds.epochs) {
      ++counts[static_cast<int>(e.label)];
      CHECK(e.onset_index == 250);
    }
    CHECK(counts[0] == 50);
    CHECK(counts[1] == 50);
    CHECK(counts[2] == 50);
    CHECK(ds.epochs[0].trial_id == 1);
    CHECK_NOTHROW(ds.validate(true));
  }

  TEST_CASE("generation is deterministic per seed") {
    SynthConfig c = SynthConfig::default_config();
    c.n_trials_per_class = 3;
    const auto a = generate(c);
    const auto b = generate(c);
    for (std::size_t i = 0; i < a.epochs.size(); ++i) CHECK(a.epochs[i].samples == b.epochs[i].samples);
    c.seed = 2;
    CHECK(generate(c).epochs[0].samples != a.epochs[0].samples);
  }

  TEST_CASE("pink noise has the requested rms and a 1/f spectrum") {
    const std::size_t n = 4096;
    double ms = 0;
    std::vector<double> spec(n / 2 + 1, 0.0);
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      const auto x = pink_noise(n, 250.0, 10.0, 100 + r);
      for (double v : x) ms += v * v;
      std::vector<cplx> d(x.begin(), x.end());
      fft_inplace(d);
      for (std::size_t k = 0; k < spec.size(); ++k) spec[k] += std::norm(d[k]);
    }
    CHECK(std::sqrt(ms / (reps * n)) == doctest::Approx(10.0).epsilon(0.05));
    // Power around 4 Hz vs around 32 Hz: ratio near 8 for 1/f.
    auto band = [&](double f) {
      const std::size_t k = static_cast<std::size_t>(f * n / 250.0);
      double s = 0;
      for (std::size_t i = k - 20; i <= k + 20; ++i) s += spec[i];
      return s;
    };
    CHECK(band(4.0) / band(32.0) == doctest::Approx(8.0).epsilon(0.25));
  }

  TEST_CASE("no-movement epochs are stationary") {
    const auto ds = generate(SynthConfig::default_config());
    // (0, 0.3 s) vs (0.3 s, 1 s), relative difference averaged over every
    // bank frequency and channel.
    double total = 0;
    int cells = 0;
    for (double f : default_bank_freqs())
      for (const auto& ch : ds.montage.channels()) {
        const double early = mean_power(ds, ConditionLabel::NoMovement, ch, f, 250, 325);
        const double late = mean_power(ds, ConditionLabel::NoMovement, ch, f, 325, 500);
        total += std::abs(early - late) / late;
        ++cells;
      }
    CHECK(total / cells < 0.2);
  }

  TEST_CASE("power trials carry at least 3 dB more alpha at C3") {
    const auto ds = generate(SynthConfig::default_config());
    const double nm = mean_power(ds, ConditionLabel::NoMovement, "C3", 9.0, 325, 475);
    const double pw = mean_power(ds, ConditionLabel::Power, "C3", 9.0, 325, 475);
    CHECK(10.0 * std::log10(pw / nm) >= 3.0);
    // Other channels see background only.
    const double cz_nm = mean_power(ds, ConditionLabel::NoMovement, "Oz", 9.0, 325, 475);
    const double cz_pw = mean_power(ds, ConditionLabel::Power, "Oz", 9.0, 325, 475);
    CHECK(std::abs(10.0 * std::log10(cz_pw / cz_nm)) < 1.0);
  }

  TEST_CASE("config validation") {
    SynthConfig c = SynthConfig::default_config();
    CHECK(c.n_samples() == 501);
    CHECK(c.onset_index() == 250);
    auto late = c;
    late.bursts[1][0].onset_s = 0.8;
    CHECK_THROWS_AS(generate(late), ConfigError);
    auto neg = c;
    neg.bursts[2][0].amplitude = -1.0;
    CHECK_THROWS_AS(generate(neg), ConfigError);
    auto bad_ch = c;
    bad_ch.bursts[1][0].channel = "T7";
    CHECK_THROWS_AS(generate(bad_ch), ConfigError);
    auto none = c;
    none.n_trials_per_class = 0;
    CHECK_THROWS_AS(generate(none), ConfigError);
  }
}
