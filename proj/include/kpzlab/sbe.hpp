#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "kpzlab/chaos.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/spectral.hpp"

namespace kpzlab {

struct SimConfig {
  int K = 128;
  double dt = 1e-5;
  double T = 0.25;
  double lambda = 1.0;
  double nu = 1.0;
  double D = 2.0;
  int N = 16;        // drift mollification level
  int L_noise = 16;  // SHE noise mollification level
  std::uint64_t seed = 0;
  std::string drift = "symmetric";  // symmetric | plain
  std::string she = "lognormal";    // lognormal | euler
  double cfl_max = 50.0;
  bool strict_positivity = false;

  long steps() const { return std::lround(T / dt); }
  void validate() const;
};

// Standard form du = Lap u + lambda d(u^2) + sqrt2 d dW. Standard time s
// corresponds to model time s / nu; the field is rescaled by amplitude.
struct StandardForm {
  double lambda = 0;
  double time_factor = 1;  // model time = standard time * time_factor
  double amplitude = 1;    // u_std = amplitude * u_model
  double standard_time(double t) const { return t / time_factor; }
  double model_time(double s) const { return s * time_factor; }
};

StandardForm normalize_parameters(double nu, double D, double lambda);

// One step's Brownian increments: two independent half-step pieces (each
// E|a_k|^2 = dt/2) and a real zero-mode increment of variance dt.
template <typename S>
struct NoiseIncrement {
  CoeffVector<S> a, b;
  S w0 = 0;
  CoeffVector<S> total() const { return a + b; }
};

template <typename S>
NoiseIncrement<S> draw_increment(int K, double dt, Stream& rng) {
  NoiseIncrement<S> n;
  const S s = S(std::sqrt(dt / 2));
  n.a = sample_white_noise<S>(K, rng).c * s;
  n.b = sample_white_noise<S>(K, rng).c * s;
  n.w0 = S(rng.gaussian() * std::sqrt(dt));
  return n;
}

// Precomputed multipliers and FFT plans for one simulation instance.
template <typename S>
struct Workspace {
  SimConfig cfg;
  Mollifier moll;
  StandardForm std_form;
  S lambda, dt;
  int K;
  RealArray<S> w2, decay_half, decay_full, noise_half;
  RealArray<S> kick;  // sqrt2 (2 pi k) noise_half(k)
  RealArray<S> rho_N, rho_L;
  CoeffVector<S> ik, theta;
  S c_N, c_L;
  Transform<S> full;
  Transform<S> drift_tr;
  int drift_support;

  Workspace(const SimConfig& c, const Mollifier& m = {})
      : cfg(c), moll(m), std_form(normalize_parameters(c.nu, c.D, c.lambda)), K(c.K),
        full(TorusGrid::padded(c.K)),
        drift_tr(TorusGrid::padded(std::min(c.K, 2 * c.N))) {
    cfg.validate();
    lambda = S(std_form.lambda);
    dt = S(std_form.standard_time(c.dt));
    w2 = laplacian_symbol<S>(K);
    decay_half = (-w2 * dt / 2).exp();
    decay_full = (-w2 * dt).exp();
    noise_half.resize(K + 1);
    noise_half(0) = 0;
    for (int k = 1; k <= K; ++k) {
      const S x = w2(k) * dt;  // 2 w h with h = dt/2
      noise_half(k) = std::sqrt(-std::expm1(-x) / x);
    }
    kick = std::sqrt(S(2)) * w2.sqrt() * noise_half;
    rho_N = mollifier_weights<S>(K, m, c.N);
    rho_L = mollifier_weights<S>(K, m, c.L_noise);
    ik = derivative_multiplier<S>(K);
    theta = theta_multiplier<S>(K);
    c_N = S(mollified_variance(m, c.N));
    c_L = S(mollified_variance(m, c.L_noise));
    drift_support = cfg.drift == "symmetric" ? std::min(K, c.N) : std::min(K, 2 * c.N);
  }
};

// Exact OU flow for time dt with a fresh Gaussian per mode.
template <typename S>
SpectralField<S> ou_step_exact(const SpectralField<S>& u, double dt, Stream& rng) {
  if (dt < 0) throw std::invalid_argument("ou_step_exact: negative dt");
  SpectralField<S> out = u;
  const auto xi = sample_white_noise<S>(u.K(), rng);
  for (int k = 1; k <= u.K(); ++k) {
    const S w = two_pi<S> * k * two_pi<S> * k;
    out.c(k) = std::exp(-w * S(dt)) * u.c(k) + xi.c(k) * std::sqrt(-std::expm1(-S(2) * w * S(dt)));
  }
  out.c(0) = 0;
  return out;
}

// Half-step OU flow driven by the recorded increment dw (E|dw_k|^2 = dt/2).
template <typename S>
void ou_half_step(CoeffVector<S>& c, const CoeffVector<S>& dw, const Workspace<S>& ws) {
  // i * kick * dw done in real arithmetic
  for (Eigen::Index k = 1; k < c.size(); ++k) {
    const S re = ws.decay_half(k) * c(k).real() - ws.kick(k) * dw(k).imag();
    const S im = ws.decay_half(k) * c(k).imag() + ws.kick(k) * dw(k).real();
    c(k) = std::complex<S>(re, im);
  }
  c(0) = 0;
}

// dt * lambda * B(u), B the mollified Wick-Burgers nonlinearity
template <typename S>
CoeffVector<S> drift_increment(const CoeffVector<S>& u, Workspace<S>& ws) {
  const int Kd = ws.drift_tr.K();
  CoeffVector<S> v = (u.head(Kd + 1).array() * ws.rho_N.head(Kd + 1).template cast<std::complex<S>>()).matrix();
  RealArray<S> x;
  ws.drift_tr.to_physical(v, x);
  x = x.square() - ws.c_N;
  const S guard = ws.dt * std::abs(ws.lambda) * two_pi<S> * ws.drift_support * x.abs().maxCoeff();
  if (!(guard <= ws.cfg.cfl_max))
    throw std::runtime_error("sbe_step: CFL guard tripped (" + std::to_string(double(guard)) + ")");
  CoeffVector<S> f;
  ws.drift_tr.to_spectral(x, f);
  CoeffVector<S> d = CoeffVector<S>::Zero(ws.K + 1);
  const S s = ws.dt * ws.lambda;
  for (int k = 1; k <= ws.drift_support; ++k) {
    const S r = ws.cfg.drift == "symmetric" ? ws.rho_N(k) : S(1);
    d(k) = s * r * ws.ik(k) * f(k);
  }
  return d;
}

// spatial mean of wick_square(u, N), computed spectrally
template <typename S>
S mean_wick(const CoeffVector<S>& u, const Workspace<S>& ws) {
  return S(2) * (ws.rho_N.square() * u.array().abs2()).tail(ws.K).sum() - ws.c_N;
}

// Strang split step: OU half, drift, OU half. Returns the drift increment.
template <typename S>
CoeffVector<S> sbe_step(SpectralField<S>& u, Workspace<S>& ws, const NoiseIncrement<S>& dW) {
  ou_half_step(u.c, dW.a, ws);
  CoeffVector<S> d;
  if (ws.lambda != S(0)) {
    d = drift_increment(u.c, ws);
    u.c += d;
  } else {
    d = CoeffVector<S>::Zero(ws.K + 1);
  }
  ou_half_step(u.c, dW.b, ws);
  u.c(0) = 0;
  return d;
}

// Mild exponential step for dZ = Lap Z dt + sqrt2 lambda Z dW^L (Ito).
// Returns the number of non-positive grid values seen (euler scheme only).
template <typename S>
int she_step(SpectralField<S>& Z, Workspace<S>& ws, const NoiseIncrement<S>& dW) {
  const S r2 = std::sqrt(S(2));
  RealArray<S> z, y;
  ws.full.to_physical(Z.c, z);
  CoeffVector<S> n = (dW.total().array() * ws.rho_L.template cast<std::complex<S>>()).matrix();
  ws.full.to_physical(n, y);
  y = r2 * ws.lambda * (y + dW.w0);
  int bad = 0;
  if (ws.cfg.she == "euler") {
    z *= (S(1) + y);
    bad = int((z <= S(0)).count());
    if (bad > 0 && ws.cfg.strict_positivity) throw std::runtime_error("she_step: non-positive Z");
  } else {
    z *= (y - ws.lambda * ws.lambda * (S(1) + ws.c_L) * ws.dt).exp();
  }
  CoeffVector<S> c;
  ws.full.to_spectral(z, c);
  Z.c = (c.array() * ws.decay_full.template cast<std::complex<S>>()).matrix();
  return bad;
}

// Zero mode of the height; nonzero modes are integrate_theta(u).
// The -1 is the zero-mode accounting constant: ||rho^N||^2 = 1 + c_N.
template <typename S>
S kpz_height_step(S h0, const CoeffVector<S>& u_left, const Workspace<S>& ws, const NoiseIncrement<S>& dW) {
  return h0 + ws.lambda * (mean_wick(u_left, ws) - S(1)) * ws.dt + std::sqrt(S(2)) * dW.w0;
}

inline constexpr double zero_mode_offset = 1.0;

// Coupled SBE + SHE + height driven by one noise realization.
template <typename S>
class CoupledSbe {
public:
  explicit CoupledSbe(const SimConfig& cfg, const Mollifier& m = {}, bool with_she = true)
      : ws_(cfg, m), with_she_(with_she), u_(cfg.K), Z_(cfg.K, false) {}

  void initialize(const SpectralField<S>& u0) {
    u_ = u0;
    u_.c(0) = 0;
    h0_ = 0;
    t_ = 0;
    nonpositive_ = 0;
    if (with_she_) {
      RealArray<S> h;
      ws_.full.to_physical(integrate_theta(u_).c, h);
      Z_ = ws_.full.to_spectral((ws_.lambda * h).exp().eval(), false);
    }
  }
  void initialize(Stream& rng) { initialize(sample_white_noise<S>(ws_.K, rng)); }

  // returns the drift increment of the u step
  CoeffVector<S> step(const NoiseIncrement<S>& dW) {
    const S h_next = kpz_height_step(h0_, u_.c, ws_, dW);
    if (with_she_) nonpositive_ += she_step(Z_, ws_, dW);
    auto d = sbe_step(u_, ws_, dW);
    h0_ = h_next;
    t_ += ws_.dt;
    return d;
  }
  CoeffVector<S> step(Stream& rng) { return step(draw_increment<S>(ws_.K, ws_.dt, rng)); }

  const SpectralField<S>& u() const { return u_; }
  const SpectralField<S>& Z() const { return Z_; }
  S height_zero_mode() const { return h0_; }
  S time() const { return t_; }
  long nonpositive_count() const { return nonpositive_; }
  Workspace<S>& workspace() { return ws_; }

  SpectralField<S> height() const {
    auto h = integrate_theta(u_);
    h.mean_zero = false;
    h.c(0) = h0_;
    return h;
  }

  RealArray<S> log_Z() {
    RealArray<S> z;
    ws_.full.to_physical(Z_.c, z);
    return z.log();
  }

  // mean_x h(x) - lambda^{-1} mean_x log Z(x)
  S gap() {
    if (!with_she_) throw std::logic_error("gap: SHE disabled");
    if (ws_.lambda == S(0)) throw std::domain_error("gap: lambda = 0");
    return h0_ - log_Z().mean() / ws_.lambda;
  }

  // u - lambda^{-1} d_x log Z
  SpectralField<S> gradient_discrepancy() {
    auto lz = ws_.full.to_spectral(log_Z(), false);
    SpectralField<S> d(ws_.K, true);
    d.c = u_.c - (lz.c.array() * ws_.ik.array()).matrix() / ws_.lambda;
    d.c(0) = 0;
    return d;
  }

private:
  Workspace<S> ws_;
  bool with_she_;
  SpectralField<S> u_, Z_;
  S h0_ = 0, t_ = 0;
  long nonpositive_ = 0;
};

// Discrete H^{-1} norm over 1 <= |k| <= k_max
template <typename S>
S hminus1_field_norm(const SpectralField<S>& f, int k_max) {
  S s = 0;
  for (int k = 1; k <= std::min(k_max, f.K()); ++k) s += S(2) * std::norm(f.c(k)) / (two_pi<S> * k * two_pi<S> * k);
  return std::sqrt(s);
}

}  // namespace kpzlab
