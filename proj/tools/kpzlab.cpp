#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kpzlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kpzlab: stochastic Burgers / KPZ experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment and write its summary and tables");
  std::string experiment, config_file, out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  run->add_option("--experiment", experiment, "experiment name")->required();
  run->add_option("--config", config_file, "key=value configuration file");
  run->add_option("--set", overrides, "key=value override (repeatable)")->take_all();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "master seed");

  auto* desc = app.add_subcommand("describe", "print every experiment's keys and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (desc->parsed()) {
    std::cout << kpzlab::describe();
    return 0;
  }

  try {
    auto cfg = kpzlab::default_config(experiment);
    if (!config_file.empty()) cfg.load_file(config_file);
    for (auto& kv : overrides) cfg.set(kv);
    const auto summary = kpzlab::run_experiment(experiment, cfg, seed);
    for (auto& p : kpzlab::emit(summary, out_dir)) std::cout << "wrote " << p.string() << "\n";
    for (auto& r : summary.results) {
      std::cout << (r.gating ? (r.pass() ? "PASS " : "FAIL ") : "info ") << r.name << " = " << r.value;
      if (r.stderr_ > 0) std::cout << " +- " << r.stderr_;
      std::cout << "  [" << r.lo << ", " << r.hi << "]\n";
    }
    return summary.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
