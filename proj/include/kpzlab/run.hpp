#pragma once

#include <functional>
#include <vector>

#include "kpzlab/ensemble.hpp"
#include "kpzlab/sbe.hpp"

namespace kpzlab {

// What the step just did; both pointers are null at step 0.
template <typename S>
struct StepInfo {
  const CoeffVector<S>* drift = nullptr;
  const NoiseIncrement<S>* noise = nullptr;
};

// Called once after initialization (step 0) and after every step.
template <typename S>
using Observer = std::function<void(long step, CoupledSbe<S>& sim, const StepInfo<S>& info, PathRecord& rec)>;

// Independent coupled simulations; sample i draws from Stream(cfg.seed, i).
template <typename S>
std::vector<PathRecord> run_ensemble(const SimConfig& cfg, long n_samples, const Observer<S>& obs,
                                     bool with_she = true, const Mollifier& m = {}) {
  cfg.validate();
  const long steps = cfg.steps();
  return parallel_map<PathRecord>(n_samples, [&](long i) {
    Stream rng(cfg.seed, static_cast<std::uint64_t>(i));
    CoupledSbe<S> sim(cfg, m, with_she);
    sim.initialize(rng);
    PathRecord rec;
    obs(0, sim, StepInfo<S>{}, rec);
    for (long s = 1; s <= steps; ++s) {
      const auto dW = draw_increment<S>(cfg.K, double(sim.workspace().dt), rng);
      const auto d = sim.step(dW);
      obs(s, sim, StepInfo<S>{&d, &dW}, rec);
    }
    return rec;
  });
}

}  // namespace kpzlab
