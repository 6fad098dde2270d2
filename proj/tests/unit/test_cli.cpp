#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "cli.hpp"
#include "graspeeg/io.hpp"
#include "graspeeg/serialize.hpp"

using namespace graspeeg;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "graspeeg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(run({}) == kExitUsage);
    CHECK(run({"bogus"}) == kExitUsage);
    CHECK(run({"synth"}) == kExitUsage);
    CHECK(run({"synth", "--out", "x", "--no-such-flag"}) == kExitUsage);
    CHECK(run({"crossval", "--out", "x.json"}) == kExitUsage);
    CHECK(run({"--help"}) == kExitOk);
  }

  TEST_CASE("missing input exits 3, bad config exits 5") {
    const auto dir = fresh_dir("graspeeg_cli_errors");
    CHECK(run({"features", "--data", (dir / "none").string(), "--out", (dir / "f.csv").string()}) == kExitData);
    write_file_atomic(dir / "bad.json", "{\"seed\": ");
    CHECK(run({"synth", "--config", (dir / "bad.json").string(), "--out", (dir / "d").string()}) == kExitConfig);
    write_file_atomic(dir / "unknown.json", "{\"colour\": 1}");
    CHECK(run({"synth", "--config", (dir / "unknown.json").string(), "--out", (dir / "d").string()}) == kExitConfig);
    CHECK(run({"crossval", "--features", (dir / "none.csv").string(), "--model", "knn", "--out", "x"}) ==
          kExitConfig);
    fs::remove_all(dir);
  }

  TEST_CASE("small pipeline through every subcommand") {
    const auto dir = fresh_dir("graspeeg_cli_pipeline");
    const std::string d = (dir / "data").string(), p = (dir / "pre").string();
    write_file_atomic(dir / "cfg.json", R"({"synth":{"n_trials_per_class":6},"preprocess":{"ica_allow_unconverged":true},"model":{"hyperparams":{"gbt":{"n_rounds":10}}}})");
    const std::string cfg = (dir / "cfg.json").string();
    REQUIRE(run({"synth", "--config", cfg, "--out", d}) == kExitOk);
    // Strict ICA on so little data fails with a numeric error.
    CHECK(run({"preprocess", "--data", d, "--out", p}) == kExitNumeric);
    REQUIRE(run({"preprocess", "--config", cfg, "--data", d, "--out", p}) == kExitOk);
    REQUIRE(run({"tfmap", "--data", p, "--label", "power", "--out", (dir / "figs").string()}) == kExitOk);
    CHECK(fs::exists(dir / "figs" / "tfmap_power_C3.svg"));
    REQUIRE(run({"topomap", "--t", "0.3", "--freq", "9", "--label", "power", "--data", p, "--out",
                 (dir / "figs").string()}) == kExitOk);
    CHECK(fs::exists(dir / "figs" / "topomap_power_9hz_0.3s.svg"));
    CHECK(run({"topomap", "--freq", "10", "--label", "power", "--data", p, "--out", (dir / "figs").string()}) ==
          kExitConfig);
    REQUIRE(run({"features", "--config", cfg, "--data", p, "--out", (dir / "f.csv").string()}) == kExitOk);
    REQUIRE(run({"crossval", "--config", cfg, "--features", (dir / "f.csv").string(), "--model", "gbt", "--out",
                 (dir / "cv.json").string()}) == kExitOk);
    REQUIRE(run({"crossval", "--config", cfg, "--data", p, "--model", "lda", "--task", "nm-vs-power", "--out",
                 (dir / "cv2.json").string()}) == kExitOk);
    REQUIRE(run({"importance", "--config", cfg, "--features", (dir / "f.csv").string(), "--repeats", "2", "--out",
                 (dir / "imp.json").string()}) == kExitOk);
    REQUIRE(run({"report", "--cv", (dir / "cv.json").string(), (dir / "cv2.json").string(), "--importance",
                 (dir / "imp.json").string(), "--out", (dir / "report").string()}) == kExitOk);
    for (const char* f : {"accuracy_multiclass.csv", "accuracy_binary.csv", "importance_boxplot.csv",
                          "importance_boxplot.svg", "importance_topomap_alpha.svg"})
      CHECK(fs::exists(dir / "report" / f));
    CHECK(run({"report", "--out", (dir / "report").string()}) == kExitUsage);
    const auto cv = json::parse(read_file(dir / "cv.json"));
    CHECK(cv["fold_accuracies"].size() == 5);
    CHECK(cv["provenance"]["config"]["synth"]["n_trials_per_class"] == 6);
    CHECK(cv["dataset"] == "f");
    // Flags override the file.
    REQUIRE(run({"crossval", "--config", cfg, "--features", (dir / "f.csv").string(), "--k", "3", "--seed", "5",
                 "--out", (dir / "cv3.json").string()}) == kExitOk);
    const auto cv3 = json::parse(read_file(dir / "cv3.json"));
    CHECK(cv3["k"] == 3);
    CHECK(cv3["seed"] != cv["seed"]);
    CHECK(cv3["provenance"]["seed"] == 5);
    fs::remove_all(dir);
  }
}
