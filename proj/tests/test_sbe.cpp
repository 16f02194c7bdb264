#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kpzlab/sbe.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

SimConfig small_config(double lambda = 1.0) {
  SimConfig c;
  c.K = 32;
  c.dt = 1e-4;
  c.T = 0.01;
  c.N = 8;
  c.L_noise = 8;
  c.lambda = lambda;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(Config, Validation) {
  SimConfig c = small_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.steps(), 100);
  c.drift = "upwind";
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.dt = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.she = "milstein";
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(StandardForm, Rescaling) {
  const auto s = normalize_parameters(1.0, 2.0, 0.7);
  EXPECT_DOUBLE_EQ(s.lambda, 0.7);
  EXPECT_DOUBLE_EQ(s.time_factor, 1.0);
  EXPECT_DOUBLE_EQ(s.amplitude, 1.0);
  // u_std(s) = a u(s / nu) solves the standard equation with
  // lambda_std = lambda sqrt(D / (2 nu^3))
  const auto g = normalize_parameters(2.0, 3.0, 1.5);
  EXPECT_NEAR(g.lambda, 1.5 * std::sqrt(3.0 / 16.0), 1e-15);
  EXPECT_NEAR(g.amplitude, std::sqrt(4.0 / 3.0), 1e-15);
  EXPECT_NEAR(g.model_time(g.standard_time(0.3)), 0.3, 1e-15);
  EXPECT_THROW(normalize_parameters(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Ou, HalfStepPreservesUnitVarianceExactly) {
  Workspace<double> ws(small_config());
  for (int k = 1; k <= ws.K; ++k) {
    // decay^2 + kick^2 * E|dw|^2 with E|dw|^2 = dt/2
    const double v = ws.decay_half(k) * ws.decay_half(k) + ws.kick(k) * ws.kick(k) * ws.dt / 2;
    EXPECT_NEAR(v, 1.0, 1e-13);
  }
}

TEST(Ou, ExactStepVariance) {
  const int K = 4, n = 20000;
  const double dt = 1e-3;
  Stream rng(3);
  std::vector<double> v(K + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto u = ou_step_exact(SpectralField<double>(K), dt, rng);
    for (int k = 1; k <= K; ++k) v[k] += std::norm(u.c(k));
  }
  for (int k = 1; k <= K; ++k) {
    const double w = 4 * pi * pi * k * k;
    const double expect = 1 - std::exp(-2 * w * dt);
    EXPECT_NEAR(v[k] / n, expect, 4 * expect / std::sqrt(double(n)));
  }
  EXPECT_THROW(ou_step_exact(SpectralField<double>(K), -1.0, rng), std::invalid_argument);
}

TEST(Drift, SymmetricFormConservesEnergy) {
  SimConfig c = small_config();
  c.K = 64;
  c.N = 16;
  Workspace<double> ws(c);
  Stream rng(4);
  const auto u = sample_white_noise<double>(c.K, rng);
  const auto d = drift_increment(u.c, ws);
  double dot = 0, scale = 0;
  for (int k = 1; k <= c.K; ++k) {
    dot += 2 * (std::conj(u.c(k)) * d(k)).real();
    scale += 2 * std::abs(u.c(k)) * std::abs(d(k));
  }
  EXPECT_LT(std::abs(dot), 1e-12 * scale);
  EXPECT_EQ(d(0), cd(0));
  // only modes the mollifier passes are touched
  for (int k = c.N; k <= c.K; ++k) EXPECT_EQ(d(k), cd(0));
}

TEST(Drift, PlainFormIsDerivativeOfWickSquare) {
  SimConfig c = small_config();
  c.drift = "plain";
  Workspace<double> ws(c);
  Stream rng(6);
  const auto u = sample_white_noise<double>(c.K, rng);
  const auto d = drift_increment(u.c, ws);
  // oracle: direct convolution of the mollified field
  const Mollifier m;
  const auto v = mollify(u, m, c.N);
  for (int k = 1; k <= 2 * c.N && k <= c.K; ++k) {
    cd sq = 0;
    for (int j = -c.K; j <= c.K; ++j) sq += v(j) * v(k - j);
    const cd expect = ws.dt * ws.lambda * cd(0, 2 * pi * k) * sq;
    EXPECT_NEAR(std::abs(d(k) - expect), 0.0, 1e-12) << k;
  }
}

TEST(Drift, GuardAborts) {
  SimConfig c = small_config();
  Workspace<double> ws(c);
  CoeffVector<double> big = CoeffVector<double>::Zero(c.K + 1);
  big(1) = 1e4;
  EXPECT_THROW(drift_increment(big, ws), std::runtime_error);
}

TEST(Step, ZeroModeStaysZeroAndLambdaZeroIsPureOu) {
  SimConfig c = small_config(0.0);
  Workspace<double> ws(c);
  Stream rng(7);
  SpectralField<double> u = sample_white_noise<double>(c.K, rng);
  SpectralField<double> ref = u;
  const auto dW = draw_increment<double>(c.K, ws.dt, rng);
  const auto d = sbe_step(u, ws, dW);
  EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
  ou_half_step(ref.c, dW.a, ws);
  ou_half_step(ref.c, dW.b, ws);
  EXPECT_LT((u.c - ref.c).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(u.c(0), cd(0));

  Workspace<double> ws1(small_config(1.0));
  for (int s = 0; s < 20; ++s) {
    sbe_step(u, ws1, draw_increment<double>(c.K, ws1.dt, rng));
    EXPECT_EQ(u.c(0), cd(0));
  }
}

TEST(She, LambdaZeroIsHeatFlow) {
  SimConfig c = small_config(0.0);
  Workspace<double> ws(c);
  Stream rng(8);
  SpectralField<double> Z(c.K, false);
  Z.c(0) = 1.0;
  Z.c(2) = cd(0.1, 0.05);
  const auto before = Z.c;
  she_step(Z, ws, draw_increment<double>(c.K, ws.dt, rng));
  EXPECT_NEAR(std::abs(Z.c(0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(Z.c(2) - before(2) * std::exp(-16 * pi * pi * ws.dt)), 0.0, 1e-14);
}

TEST(She, EulerSchemeCountsNonPositiveValues) {
  SimConfig c = small_config(30.0);
  c.she = "euler";
  Workspace<double> ws(c);
  Stream rng(9);
  SpectralField<double> Z(c.K, false);
  Z.c(0) = 1.0;
  int bad = 0;
  for (int s = 0; s < 50; ++s) bad += she_step(Z, ws, draw_increment<double>(c.K, ws.dt, rng));
  EXPECT_GT(bad, 0);
  c.strict_positivity = true;
  Workspace<double> strict(c);
  SpectralField<double> Z2(c.K, false);
  Z2.c(0) = 1.0;
  EXPECT_THROW(
      for (int s = 0; s < 50; ++s) she_step(Z2, strict, draw_increment<double>(c.K, strict.dt, rng)),
      std::runtime_error);
}

TEST(Coupled, InitialStateIsConsistent) {
  CoupledSbe<double> sim(small_config());
  Stream rng(10);
  sim.initialize(rng);
  // exp(lambda h) is truncated to K modes, so agreement is spectral, not exact
  EXPECT_NEAR(sim.gap(), 0.0, 1e-4);
  const auto d = sim.gradient_discrepancy();
  EXPECT_LT(d.c.head(5).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(d.c.cwiseAbs().maxCoeff(), 5e-2);
  const auto h = sim.height();
  EXPECT_EQ(h.c(0), cd(0));
  EXPECT_LT((derivative(h).c - sim.u().c).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Coupled, Deterministic) {
  auto run = [] {
    CoupledSbe<double> sim(small_config());
    Stream rng(11);
    sim.initialize(rng);
    for (int s = 0; s < 30; ++s) sim.step(rng);
    return std::make_pair(sim.gap(), sim.u().c);
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Coupled, LambdaZeroHeightVarianceIsTwoT) {
  SimConfig c = small_config(0.0);
  c.K = 8;
  c.T = 0.05;
  c.dt = 1e-3;
  std::vector<double> h;
  for (int i = 0; i < 2000; ++i) {
    CoupledSbe<double> sim(c, Mollifier{}, false);
    Stream rng(c.seed, i);
    sim.initialize(rng);
    for (long s = 0; s < c.steps(); ++s) sim.step(rng);
    h.push_back(sim.height_zero_mode());
  }
  double v = 0;
  for (double x : h) v += x * x;
  v /= double(h.size());
  EXPECT_NEAR(v, 2 * c.T, 3 * 2 * c.T * std::sqrt(2.0 / h.size()));
  CoupledSbe<double> sim(c);
  Stream rng(1);
  sim.initialize(rng);
  EXPECT_THROW(sim.gap(), std::domain_error);
}

TEST(Coupled, MeanWickIsSpectralMean) {
  Workspace<double> ws(small_config());
  Stream rng(12);
  const auto u = sample_white_noise<double>(ws.K, rng);
  Transform<double> tr(TorusGrid::padded(ws.K));
  const auto w = wick_square(u, ws.moll, ws.cfg.N, tr);
  EXPECT_NEAR(mean_wick(u.c, ws), w.c(0).real(), 1e-11);
}

TEST(Norms, HMinusOneFieldNorm) {
  SpectralField<double> f(8);
  f.c(2) = cd(0.3, 0.4);
  EXPECT_NEAR(hminus1_field_norm(f, 8), std::sqrt(2 * 0.25 / (16 * pi * pi)), 1e-15);
  EXPECT_EQ(hminus1_field_norm(f, 1), 0.0);
}
