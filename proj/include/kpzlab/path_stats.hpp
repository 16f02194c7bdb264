#pragma once

#include <vector>

#include "kpzlab/spectral.hpp"

namespace kpzlab {

struct ScalarPath {
  double step = 1.0;
  std::vector<double> x;

  ScalarPath() = default;
  ScalarPath(double dt, std::vector<double> v);
  std::size_t size() const { return x.size(); }
  double horizon() const { return step * double(x.size() - 1); }
};

struct QvEstimate {
  std::vector<int> lags;          // epsilon in grid steps
  std::vector<double> estimates;  // (1/eps) sum (x_{j+m} - x_j)^2 dt
  double extrapolated = 0;
  bool stable = false;
  int pair_index = 0;             // lags[pair_index], lags[pair_index+1] used
};

// Russo-Vallois estimates, extrapolated linearly to eps = 0 from the two
// smallest consecutive lags whose estimates differ by < 20%.
QvEstimate quadratic_variation(const ScalarPath& path, std::vector<int> lags);

// (sup over partitions of sum |increment|^p)^(1/p), exact DP over grid points
double p_variation(const ScalarPath& path, double p);

struct HolderEstimate {
  double exponent = 0;
  double stderr_ = 0;
  std::vector<double> qs, per_q;
  std::vector<int> lags;
  std::vector<std::vector<double>> moments;  // [q][lag]
};

// slope/q of log E|X_{t+tau} - X_t|^q against log tau, averaged over q;
// standard error by delete-one-group jackknife over paths
HolderEstimate holder_exponent(const std::vector<ScalarPath>& paths, const std::vector<double>& qs, int lag_min,
                               int lag_max, int n_lags = 12);

struct LawTestReport {
  int n_samples = 0;
  std::vector<double> mode_p;  // k = 1..K
  double mode_pass_fraction = 0;
  std::vector<double> pair_p;  // adjacent (k, k+1)
  double pair_pass_fraction = 0;
  std::vector<double> pairing_p;  // five fixed test functions
  double pairing_pass_fraction = 0;
};

// Per-mode chi-square variance test, adjacent-pair covariance test and
// pairing variance test E[u(phi)^2] = ||Pi0 phi||^2, all two-sided at `level`.
LawTestReport white_noise_law_test(const std::vector<SpectralField<double>>& fields, double level = 0.01);

// the five fixed test functions used by white_noise_law_test
std::vector<SpectralField<double>> law_test_functions(int K);

}  // namespace kpzlab
