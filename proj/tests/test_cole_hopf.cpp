#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kpzlab/cole_hopf.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;

namespace {

constexpr double pi = std::numbers::pi;

SimConfig tiny(double lambda = 1.0) {
  SimConfig c;
  c.K = 32;
  c.dt = 1e-4;
  c.T = 0.02;
  c.N = 8;
  c.L_noise = 8;
  c.lambda = lambda;
  c.seed = 17;
  return c;
}

}  // namespace

TEST(ExpHeight, TrivialCases) {
  const Mollifier m;
  Transform<double> tr(TorusGrid::padded(16));
  const SpectralField<double> zero(16);
  EXPECT_LT((exp_height(zero, m, 8, 1.0, tr) - 1.0).abs().maxCoeff(), 1e-15);
  Stream rng(1);
  const auto u = sample_white_noise<double>(16, rng);
  EXPECT_LT((exp_height(u, m, 8, 0.0, tr) - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_GT(exp_height(u, m, 8, 3.0, tr).minCoeff(), 0.0);
  SpectralField<double> big(16);
  big.c(1) = 1e4;
  EXPECT_THROW(exp_height(big, m, 8, 1.0, tr), std::overflow_error);
}

TEST(ExpHeight, QvDensityIsParseval) {
  // 2 ||rho^L - 1||^2 by quadrature of the periodized kernel minus its mean
  const Mollifier m;
  for (double L : {4.0, 16.0}) {
    const int K = int(2 * L);
    SpectralField<double> rho(K, true);
    for (int k = 1; k <= K; ++k) rho.c(k) = m.profile(k / L);
    const int M = 8 * K;
    double s = 0;
    for (int j = 0; j < M; ++j) s += std::pow(rho.at(double(j) / M), 2);
    EXPECT_NEAR(exp_height_qv_density(m, L), 2 * s / M, 1e-10);
  }
}

TEST(QProcess, ZeroPathGrowsLinearly) {
  const Mollifier m;
  const double L = 8;
  const CoeffVector<double> zero = CoeffVector<double>::Zero(33);
  const double d = q_density(zero, m, L);
  EXPECT_NEAR(d, mollified_variance(m, L) + 2, 1e-13);
  const auto q = q_process(std::vector<double>(10, d), 0.1);
  ASSERT_EQ(q.size(), 11u);
  EXPECT_EQ(q[0], 0.0);
  EXPECT_NEAR(q.back(), (mollified_variance(m, L) + 2) * 1.0, 1e-12);
}

TEST(QProcess, MeanOnWhiteNoiseIsTwo) {
  const Mollifier m;
  Stream rng(2);
  std::vector<double> v;
  for (int i = 0; i < 4000; ++i) v.push_back(q_density(sample_white_noise<double>(32, rng).c, m, 8));
  EXPECT_NEAR(mean(v), 2.0, 4 * standard_error(v));
}

TEST(Remainder, ZeroFieldSubtractsOnlyTheConstant) {
  const Mollifier m;
  const double L = 8, lambda = 1.5, dt = 1e-3;
  SpectralField<double> one(32, false);
  one.c(0) = 1.0;
  RemainderProcess<double> R(m, L, lambda, dt, one, 32);
  const CoeffVector<double> zero = CoeffVector<double>::Zero(33);
  for (int s = 0; s < 10; ++s) R.update(zero, zero);
  const double kl = lambda * lambda * k_constant(m, L, 9);
  EXPECT_NEAR(R.k_L(), kl, 1e-15);
  EXPECT_NEAR(R.value(), -10 * dt * kl, 1e-15);
  EXPECT_EQ(R.path().size(), 11u);
  EXPECT_LT(R.grid_points(), TorusGrid::padded(32).M);
  EXPECT_THROW(R.update(zero, CoeffVector<double>::Zero(5)), std::invalid_argument);
  EXPECT_THROW(RemainderProcess<double>(m, L, 0.0, dt, one, 32), std::domain_error);
}

TEST(Remainder, IntegrandAgainstDirectQuadrature) {
  // one update against a hand-built physical-space evaluation
  const Mollifier m;
  const int K = 24;
  const double L = 6, lambda = 0.8, dt = 1e-3;
  Stream rng(3);
  const auto u = sample_white_noise<double>(K, rng);
  const auto drift = sample_white_noise<double>(K, rng);
  SpectralField<double> phi(K, false);
  phi.c(0) = 1.0;
  phi.c(1) = {0.2, 0.1};
  RemainderProcess<double> R(m, L, lambda, dt, phi, K);
  R.update(u.c, drift.c * dt);

  const auto uL = mollify(u, m, L);
  const auto hL = integrate_theta(uL);
  const auto aL = integrate_theta(mollify(SpectralField<double>(drift.c * dt, true), m, L));
  const int M = 256;
  double mean_sq = 0;
  for (int j = 0; j < M; ++j) mean_sq += std::pow(uL.at(double(j) / M), 2);
  mean_sq /= M;
  const double kl = lambda * lambda * k_constant(m, L, 7);
  double s = 0;
  for (int j = 0; j < M; ++j) {
    const double x = double(j) / M;
    const double q = uL.at(x) * uL.at(x) - mean_sq;
    s += phi.at(x) * std::exp(lambda * hL.at(x)) * (aL.at(x) / lambda - (q + kl) * dt);
  }
  EXPECT_NEAR(R.value(), s / M, 1e-9);
}

TEST(DriftSlope, RejectsZeroLambdaAndIsDeterministic) {
  EXPECT_THROW(drift_slope(tiny(0.0), 4), std::domain_error);
  const auto a = drift_slope(tiny(), 4, 20);
  const auto b = drift_slope(tiny(), 4, 20);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(a.mean_gap, b.mean_gap);
  EXPECT_EQ(a.t.size(), 11u);
  EXPECT_NEAR(a.target, 1.0 / 12, 1e-15);
  EXPECT_NEAR(a.mean_gap.front(), 0.0, 1e-4);
  EXPECT_TRUE(std::isfinite(a.slope_stderr));
  EXPECT_EQ(a.nonpositive, 0);
}

TEST(DriftSlope, TargetIsCubicInLambda) {
  EXPECT_NEAR(drift_slope(tiny(-2.0), 2, 50).target, -8.0 / 12, 1e-14);
}

TEST(SelfConvergence, ShapeAndArguments) {
  SimConfig c = tiny();
  c.dt = 4e-4;
  c.T = 0.008;
  const auto sc = self_convergence(c, 3, {1, 2, 4});
  ASSERT_EQ(sc.errors.size(), 3u);
  EXPECT_EQ(sc.orders.size(), 1u);
  EXPECT_DOUBLE_EQ(sc.dts[2], 1e-4);
  for (double e : sc.errors) EXPECT_GT(e, 0.0);
  EXPECT_THROW(self_convergence(c, 3, {1, 2}), std::invalid_argument);
  EXPECT_THROW(self_convergence(c, 3, {1, 3, 4}), std::invalid_argument);
}

TEST(Studies, ArgumentChecks) {
  SimConfig c = tiny();
  SpectralField<double> one(c.K, false);
  one.c(0) = 1;
  EXPECT_THROW(remainder_decay(c, {8}, one, 2), std::invalid_argument);
  EXPECT_THROW(remainder_decay(c, {8, 32}, one, 2), std::invalid_argument);  // N = 64 > K
  EXPECT_THROW(nonlinearity_cauchy_rate(c, {8, 32}, one, 2), std::invalid_argument);
  c.T = 0.002;
  const auto d = remainder_decay(c, {4, 8}, one, 3);
  EXPECT_EQ(d.mean_sup2.size(), 2u);
  EXPECT_GT(d.mean_sup2[0], 0.0);
}
