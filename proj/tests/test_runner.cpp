#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kpzlab/ensemble.hpp"
#include "kpzlab/experiments.hpp"
#include "kpzlab/summary.hpp"

using namespace kpzlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("kpzlab-test-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Config, ParseAndOverride) {
  Config c({{"K", "64"}, {"levels", "1,2,4"}, {"name", "x"}, {"dt", "1e-3"}});
  EXPECT_EQ(c.integer("K"), 64);
  EXPECT_EQ(c.integers("levels"), (std::vector<long>{1, 2, 4}));
  c.set("dt=2.5e-6");
  EXPECT_DOUBLE_EQ(c.real("dt"), 2.5e-6);
  c.set("name", "y");
  EXPECT_EQ(c.str("name"), "y");

  const auto dir = scratch("config");
  std::ofstream(dir / "c.cfg") << "# comment\n\nK = 32\nlevels=8,16\n";
  c.load_file(dir / "c.cfg");
  EXPECT_EQ(c.integer("K"), 32);
  EXPECT_EQ(c.reals("levels"), (std::vector<double>{8, 16}));
}

TEST(Config, Errors) {
  Config c({{"K", "64"}, {"name", "x"}});
  EXPECT_THROW(c.set("bogus=1"), std::invalid_argument);
  EXPECT_THROW(c.set("K=abc"), std::invalid_argument);
  EXPECT_THROW(c.set("no_equals_sign"), std::invalid_argument);
  EXPECT_THROW(c.real("missing"), std::invalid_argument);
  EXPECT_THROW(c.load_file("/nonexistent/kpzlab.cfg"), std::runtime_error);
  EXPECT_THROW(default_config("no-such-experiment"), std::invalid_argument);
}

TEST(Emit, FilesAndDeterministicBytes) {
  EnsembleSummary s;
  s.experiment = "demo";
  s.seed = 3;
  s.config = {{"K", "8"}};
  s.add({"a", 0.1, 0.01, 0.1, 0.05, 0.05, 0.15, true});
  s.tables["empty"] = Table{{"t", "v"}, {}};
  s.tables["main"] = Table{{"t", "v"}, {{0.0, 1.0 / 3}, {0.5, 2.0}}};
  s.main_table = "main";
  const auto dir = scratch("emit");
  const auto files = emit(s, dir);
  EXPECT_TRUE(fs::exists(dir / "demo-3.json"));
  EXPECT_TRUE(fs::exists(dir / "demo-3.csv"));
  EXPECT_TRUE(fs::exists(dir / "demo-3.empty.csv"));
  EXPECT_EQ(slurp(dir / "demo-3.empty.csv"), "t,v\n");
  // round-trip precision
  EXPECT_NE(slurp(dir / "demo-3.csv").find("0.3333333333333333"), std::string::npos);
  const auto first = slurp(dir / "demo-3.json");
  emit(s, dir);
  EXPECT_EQ(slurp(dir / "demo-3.json"), first);
  EXPECT_TRUE(s.passed());
  EXPECT_THROW(s.result("nope"), std::out_of_range);
}

TEST(Emit, MissingMainTableWritesHeaderOnlyCsv) {
  EnsembleSummary s;
  s.experiment = "bare";
  s.seed = 1;
  const auto dir = scratch("bare");
  emit(s, dir);
  EXPECT_TRUE(fs::exists(dir / "bare-1.csv"));
}

TEST(Experiments, KConstantPassesAndUnknownThrows) {
  const auto s = run_experiment("k-constant", default_config("k-constant"), 1);
  EXPECT_TRUE(s.passed());
  EXPECT_NEAR(s.result("k_constant_3dp").value, 1.0 / 12, 5e-4);
  EXPECT_THROW(run_experiment("nope", Config{}, 1), std::invalid_argument);
  EXPECT_FALSE(describe().empty());
  for (const auto& name : experiment_names()) EXPECT_NO_THROW(default_config(name));
}

TEST(Experiments, DriftTableColumnsAndSameSeedSameJson) {
  Config c = default_config("cole-hopf-drift");
  for (const char* kv : {"K=32", "N=8", "L_noise=8", "dt=1e-4", "T=0.01", "n_samples=4", "record_every=10",
                         "sc_K=16", "sc_dt=4e-4", "sc_T=0.004", "sc_n_samples=2"})
    c.set(kv);
  const auto a = run_experiment("cole-hopf-drift", c, 9);
  const auto b = run_experiment("cole-hopf-drift", c, 9);
  EXPECT_EQ(to_json(a), to_json(b));
  const auto& t = a.tables.at("drift");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "mean_gap", "stderr"}));
  EXPECT_EQ(t.rows.size(), 11u);
  EXPECT_EQ(a.main_table, "drift");
  const auto dir = scratch("drift");
  emit(a, dir);
  EXPECT_EQ(slurp(dir / "cole-hopf-drift-9.csv").substr(0, 17), "t,mean_gap,stderr");
}

TEST(Experiments, StationarityAtLambdaZero) {
  Config c = default_config("stationarity");
  for (const char* kv : {"K=16", "N=8", "L_noise=8", "dt=1e-3", "T=0.05", "lambda=0", "n_samples=200"}) c.set(kv);
  const auto s = run_experiment("stationarity", c, 4);
  EXPECT_GE(s.result("sbe_mode_pass_fraction").value, 0.9);
  EXPECT_GE(s.result("fresh_mode_pass_fraction").value, 0.9);
}

TEST(Ensemble, ThreadCountDoesNotChangeResults) {
  auto fn = [](long i) {
    Stream rng(stream_key(42, static_cast<std::uint64_t>(i)));
    return rng.gaussian();
  };
  const auto one = parallel_map<double>(64, fn, 1);
  const auto four = parallel_map<double>(64, fn, 4);
  EXPECT_EQ(one, four);
}

TEST(Ensemble, LowestFailingIndexIsReported) {
  auto fn = [](long i) -> double {
    if (i == 7 || i == 30) throw std::runtime_error("boom");
    return double(i);
  };
  for (int threads : {1, 3}) {
    try {
      parallel_map<double>(40, fn, threads);
      FAIL() << "expected SampleError";
    } catch (const SampleError& e) {
      EXPECT_EQ(e.index, 7);
    }
  }
}
