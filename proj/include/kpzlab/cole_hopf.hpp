#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kpzlab/chaos.hpp"
#include "kpzlab/ensemble.hpp"
#include "kpzlab/sbe.hpp"
#include "kpzlab/spectral.hpp"

namespace kpzlab {

// e^{lambda (Theta * rho^L * u)(x)} on the transform's grid
template <typename S>
RealArray<S> exp_height(const SpectralField<S>& u, const Mollifier& m, double L, S lambda, Transform<S>& tr) {
  RealArray<S> h;
  tr.to_physical(integrate_theta(mollify(u, m, L)).c, h);
  const S top = std::abs(lambda) * h.abs().maxCoeff();
  if (top > S(700)) throw std::overflow_error("exp_height: lambda * max|h^L| too large");
  return (lambda * h).exp();
}

// 2 ||d_x Theta_x^L||^2 = 2 ||rho^L - 1||^2 by Parseval
inline double exp_height_qv_density(const Mollifier& m, double L) { return 2.0 * mollified_variance(m, L); }

// Integrand of Q^L: -(<(u^L)^2, 1> - ||rho^L||^2) + 1 with ||rho^L||^2 = 1 + c_L
template <typename S>
S q_density(const CoeffVector<S>& u, const Mollifier& m, double L) {
  S mean_sq = 0;
  for (int k = 1; k < u.size(); ++k) {
    const S r = S(m.profile(k / L));
    mean_sq += S(2) * r * r * std::norm(u(k));
  }
  return -(mean_sq - (S(1) + S(mollified_variance(m, L)))) + S(1);
}

// Left-point quadrature of recorded integrand values; Q_0 = 0.
std::vector<double> q_process(const std::vector<double>& density, double dt);

// R_t^L(phi) = int phi(x) int_0^t phi_s^L(x) { lambda^{-1} dA_s(Theta_x^L)
//              - Pi0((u_s^L(x))^2) ds - K^L ds } dx, K^L = lambda^2 k_constant(L).
// Fed step by step with the left-point state and the step's drift increment.
template <typename S>
class RemainderProcess {
public:
  // The integrand only carries modes below support * L (and those of phi), so
  // it is evaluated on a grid padded for that band rather than for K.
  RemainderProcess(const Mollifier& m, double L, S lambda, S dt, const SpectralField<S>& phi, int K)
      : tr_(TorusGrid::padded(band(m, L, phi, K))), lambda_(lambda), dt_(dt), K_(K) {
    if (lambda == S(0)) throw std::domain_error("RemainderProcess: lambda = 0");
    rho_ = mollifier_weights<S>(K, m, L).template cast<std::complex<S>>();
    theta_rho_ = (theta_multiplier<S>(K).array() * rho_.array()).matrix();
    k_L_ = lambda * lambda * S(k_constant(m, L, int(std::ceil(m.support * L)) + 1));
    SpectralField<S> p(K, false);
    p.c.head(std::min(K, phi.K()) + 1) = phi.c.head(std::min(K, phi.K()) + 1);
    tr_.to_physical(p.c, phi_);
  }

  void update(const CoeffVector<S>& u_left, const CoeffVector<S>& drift) {
    if (drift.size() != K_ + 1) throw std::invalid_argument("RemainderProcess: missing drift record");
    tr_.to_physical((theta_rho_.array() * u_left.array()).matrix(), h_);
    tr_.to_physical((rho_.array() * u_left.array()).matrix(), q_);
    tr_.to_physical((theta_rho_.array() * drift.array()).matrix(), a_);
    q_ = q_.square();
    q_ -= q_.mean();
    const RealArray<S> g = (lambda_ * h_).exp() * (a_ / lambda_ - (q_ + k_L_) * dt_);
    value_ += (phi_ * g).mean();
    path_.push_back(double(value_));
  }

  S value() const { return value_; }
  const std::vector<double>& path() const { return path_; }
  S k_L() const { return k_L_; }
  int grid_points() const { return tr_.M(); }

private:
  static int band(const Mollifier& m, double L, const SpectralField<S>& phi, int K) {
    int top = 0;
    for (int k = 0; k <= phi.K(); ++k)
      if (phi.c(k) != std::complex<S>(0)) top = k;
    return std::min(K, std::max(int(std::ceil(m.support * L)), top));
  }

  Transform<S> tr_;
  S lambda_, dt_;
  int K_;
  CoeffVector<S> rho_, theta_rho_;
  S k_L_ = 0;
  RealArray<S> phi_, h_, q_, a_;
  S value_ = 0;
  std::vector<double> path_{0.0};
};

struct DriftRegression {
  std::vector<double> t, mean_gap, stderr_;
  double slope = 0, slope_stderr = 0;
  double target = 0;
  double residual_rms = 0;
  double gradient_error = 0;  // E||u_T - lambda^{-1} d log Z_T||_{H^-1, |k| <= K/4}
  long nonpositive = 0;
};

// Gap regression over an ensemble of coupled runs, recorded every
// `record_every` steps.
DriftRegression drift_slope(const SimConfig& cfg, long n_samples, long record_every = 250);

struct SelfConvergence {
  std::vector<double> dts, errors;
  std::vector<double> orders;  // from successive differences
  double order = 0;
  bool decreasing = false;
};

// Discrepancy ||u_T - lambda^{-1} d log Z_T|| at dt0/m for m in `refinements`
// (each dividing the last), with nested Brownian increments.
SelfConvergence self_convergence(const SimConfig& cfg, long n_samples, const std::vector<int>& refinements = {1, 2, 4, 8});

struct DecayStudy {
  std::vector<int> levels;
  std::vector<double> mean_sup2, stderr_, mean_final;
  double slope = 0;
  double max_ratio = 0;  // largest E sup|R^{L'}|^2 / E sup|R^L|^2 over consecutive levels
};

// E sup_t |R_t^L(phi)|^2 for each L with N = 2L. Every level reuses the same
// per-sample streams.
DecayStudy remainder_decay(const SimConfig& cfg, const std::vector<int>& levels, const SpectralField<double>& phi,
                           long n_samples);

struct RateStudy {
  std::vector<int> levels;
  std::vector<double> mean_d2, stderr_;
  double slope = 0;
};

// D_N = sup_t |int_0^t <Pi0 d_x(wick(2N) - wick(N)), phi> ds| on one simulated
// path per sample; returns the log-log slope of E[D_N^2] against N.
RateStudy nonlinearity_cauchy_rate(const SimConfig& cfg, const std::vector<int>& levels,
                                   const SpectralField<double>& phi, long n_samples);

}  // namespace kpzlab
