#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpzlab/sbe.hpp"
#include "kpzlab/summary.hpp"

namespace kpzlab {

const std::vector<std::string>& experiment_names();

// All keys an experiment accepts, with their defaults. Throws on unknown names.
Config default_config(const std::string& experiment);

// Simulation keys (K, dt, T, lambda, nu, D, N, L_noise, drift, she, cfl_max).
SimConfig sim_config(const Config& c, std::uint64_t seed);

EnsembleSummary run_experiment(const std::string& experiment, const Config& c, std::uint64_t seed);

// Human-readable defaults of every experiment.
std::string describe();

}  // namespace kpzlab
