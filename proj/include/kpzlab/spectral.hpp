#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "kpzlab/rng.hpp"

namespace kpzlab {

template <typename S>
using CoeffVector = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, 1>;
template <typename S>
using RealArray = Eigen::Array<S, Eigen::Dynamic, 1>;

template <typename S>
inline constexpr S two_pi = S(2) * std::numbers::pi_v<S>;

struct TorusGrid {
  int K = 0;  // max frequency
  int M = 1;  // physical points

  TorusGrid() = default;
  TorusGrid(int K_, int M_) : K(K_), M(M_) {
    if (K < 0) throw std::invalid_argument("TorusGrid: negative K");
    if (M < 2 * K + 1) throw std::invalid_argument("TorusGrid: M < 2K+1 aliases represented modes");
  }

  // smallest 2^a 3^b 5^c >= 3K+1 that is a multiple of 4
  static TorusGrid padded(int K);

  double spacing() const { return 1.0 / M; }
  bool operator==(const TorusGrid&) const = default;
};

inline TorusGrid TorusGrid::padded(int K) {
  auto smooth = [](int n) {
    for (int p : {2, 3, 5})
      while (n % p == 0) n /= p;
    return n == 1;
  };
  int M = std::max(3 * K + 1, 4);
  while (M % 4 != 0 || !smooth(M)) ++M;
  return TorusGrid(K, M);
}

// Real periodic field on the unit torus: u(x) = sum_k c_k e^{2 pi i k x}.
// Only k = 0..K are stored; c_{-k} = conj(c_k) is implied.
template <typename S>
struct SpectralField {
  CoeffVector<S> c;
  bool mean_zero = true;

  SpectralField() = default;
  explicit SpectralField(int K, bool mz = true) : c(CoeffVector<S>::Zero(K + 1)), mean_zero(mz) {}
  SpectralField(CoeffVector<S> coeffs, bool mz) : c(std::move(coeffs)), mean_zero(mz) {
    if (mean_zero) c(0) = 0;
  }

  int K() const { return static_cast<int>(c.size()) - 1; }

  std::complex<S> operator()(int k) const {
    if (k < -K() || k > K()) return {};
    return k >= 0 ? c(k) : std::conj(c(-k));
  }

  // point evaluation, O(K)
  S at(S x) const {
    S v = c(0).real();
    for (int k = 1; k <= K(); ++k) v += S(2) * (c(k) * std::polar(S(1), two_pi<S> * k * x)).real();
    return v;
  }

  // L2(T) inner product with another real field
  S dot(const SpectralField& o) const {
    const int n = std::min(K(), o.K());
    S s = (c(0) * std::conj(o.c(0))).real();
    for (int k = 1; k <= n; ++k) s += S(2) * (c(k) * std::conj(o.c(k))).real();
    return s;
  }
};

struct Mollifier {
  double plateau = 0.5;  // rho_hat = 1 on |xi| <= plateau
  double support = 1.0;  // rho_hat = 0 on |xi| >= support

  // smooth bump transition f(1-t)/(f(1-t)+f(t)), f(s) = exp(-1/s)
  double profile(double xi) const {
    const double a = std::abs(xi);
    if (a <= plateau) return 1.0;
    if (a >= support) return 0.0;
    const double t = (a - plateau) / (support - plateau);
    const double p = std::exp(-1.0 / (1.0 - t));
    const double q = std::exp(-1.0 / t);
    return p / (p + q);
  }

  // rho_hat(k/N) rho_hat(k/L) = rho_hat(k/L) for all k
  bool nested(double L, double N) const { return N * plateau >= L * support; }
};

// ---- multipliers on k = 0..K ----

template <typename S>
RealArray<S> mollifier_weights(int K, const Mollifier& m, double L) {
  RealArray<S> w(K + 1);
  for (int k = 0; k <= K; ++k) w(k) = S(m.profile(k / L));
  return w;
}

template <typename S>
CoeffVector<S> theta_multiplier(int K) {
  CoeffVector<S> t(K + 1);
  t(0) = 0;
  for (int k = 1; k <= K; ++k) t(k) = S(1) / std::complex<S>(0, two_pi<S> * k);
  return t;
}

template <typename S>
CoeffVector<S> derivative_multiplier(int K) {
  CoeffVector<S> d(K + 1);
  for (int k = 0; k <= K; ++k) d(k) = std::complex<S>(0, two_pi<S> * k);
  return d;
}

// (2 pi k)^2
template <typename S>
RealArray<S> laplacian_symbol(int K) {
  RealArray<S> w(K + 1);
  for (int k = 0; k <= K; ++k) w(k) = two_pi<S> * k * two_pi<S> * k;
  return w;
}

// c_L = sum_{k != 0} rho_hat(k/L)^2
inline double mollified_variance(const Mollifier& m, double L) {
  double s = 0.0;
  for (int k = 1; k < m.support * L + 1; ++k) s += 2.0 * m.profile(k / L) * m.profile(k / L);
  return s;
}

// ---- field operations ----

template <typename S>
SpectralField<S> mollify(const SpectralField<S>& u, const Mollifier& m, double L) {
  if (L < 1) throw std::invalid_argument("mollify: level must be >= 1");
  return {(u.c.array() * mollifier_weights<S>(u.K(), m, L).template cast<std::complex<S>>()).matrix(),
          u.mean_zero};
}

template <typename S>
SpectralField<S> integrate_theta(const SpectralField<S>& u) {
  return {u.c.cwiseProduct(theta_multiplier<S>(u.K())), true};
}

template <typename S>
SpectralField<S> derivative(const SpectralField<S>& u) {
  return {u.c.cwiseProduct(derivative_multiplier<S>(u.K())), true};
}

template <typename S>
SpectralField<S> project_mean_zero(const SpectralField<S>& u) {
  return {u.c, true};
}

template <typename S>
SpectralField<S> sample_white_noise(int K, Stream& rng) {
  SpectralField<S> f(K, true);
  const S r = S(1) / std::sqrt(S(2));
  for (int k = 1; k <= K; ++k) {
    const S g1 = S(rng.gaussian());
    const S g2 = S(rng.gaussian());
    f.c(k) = std::complex<S>(g1 * r, g2 * r);
  }
  return f;
}

// Transforms between the K+1 stored modes and M physical samples x_j = j/M.
// Owns FFT plans and scratch buffers: one instance per thread.
template <typename S>
class Transform {
public:
  explicit Transform(TorusGrid g) : grid_(g), half_(g.M / 2 + 1) {
    fft_.SetFlag(Eigen::FFT<S>::HalfSpectrum);
    fft_.SetFlag(Eigen::FFT<S>::Unscaled);
  }

  const TorusGrid& grid() const { return grid_; }
  int M() const { return grid_.M; }
  int K() const { return grid_.K; }

  // u(x_j) = sum_{|k| <= n} c_k e^{2 pi i k j/M}; c may carry fewer modes than K
  template <typename Derived>
  void to_physical(const Eigen::MatrixBase<Derived>& c, RealArray<S>& out) {
    const int n = std::min<int>(static_cast<int>(c.size()) - 1, grid_.K);
    std::fill(half_.begin(), half_.end(), std::complex<S>(0));
    half_[0] = std::complex<S>(c(0).real(), 0);
    for (int k = 1; k <= n; ++k) half_[k] = c(k);
    out.resize(grid_.M);
    fft_.inv(out.data(), half_.data(), grid_.M);
  }

  RealArray<S> to_physical(const SpectralField<S>& f) {
    RealArray<S> out;
    to_physical(f.c, out);
    return out;
  }

  // first n+1 Fourier coefficients (default n = K)
  void to_spectral(const RealArray<S>& f, CoeffVector<S>& out, int n = -1) {
    if (f.size() != grid_.M) throw std::invalid_argument("to_spectral: size mismatch");
    if (n < 0) n = grid_.K;
    fft_.fwd(half_.data(), f.data(), grid_.M);
    out.resize(n + 1);
    const S s = S(1) / grid_.M;
    // kissfft forward uses e^{-i...}, which is our analysis convention
    for (int k = 0; k <= n; ++k) out(k) = half_[k] * s;
    out(0) = std::complex<S>(out(0).real(), 0);
  }

  SpectralField<S> to_spectral(const RealArray<S>& f, bool mean_zero = false) {
    SpectralField<S> r;
    to_spectral(f, r.c);
    r.mean_zero = mean_zero;
    if (mean_zero) r.c(0) = 0;
    return r;
  }

private:
  TorusGrid grid_;
  Eigen::FFT<S> fft_;
  std::vector<std::complex<S>> half_;
};

// Exact truncated product: physical product on a grid with M >= 3K+1, so no
// aliased mode lands on |k| <= K.
template <typename S>
SpectralField<S> pointwise_product(const SpectralField<S>& f, const SpectralField<S>& g, Transform<S>& tr) {
  if (f.K() != g.K() || f.K() != tr.K()) throw std::invalid_argument("pointwise_product: grid mismatch");
  if (tr.M() < 3 * tr.K() + 1) throw std::invalid_argument("pointwise_product: grid not padded");
  RealArray<S> a, b;
  tr.to_physical(f.c, a);
  tr.to_physical(g.c, b);
  return tr.to_spectral((a * b).eval(), false);
}

// max |Im| of the full complex reconstruction relative to max |Re|
template <typename S>
S reconstruction_imag_ratio(const SpectralField<S>& f, int M) {
  std::vector<std::complex<S>> full(M, std::complex<S>(0)), out(M);
  for (int k = -f.K(); k <= f.K(); ++k) full[(k + M) % M] = f(k);
  Eigen::FFT<S> fft;
  fft.SetFlag(Eigen::FFT<S>::Unscaled);
  fft.inv(out.data(), full.data(), M);
  S re = 0, im = 0;
  for (auto& z : out) {
    re = std::max(re, std::abs(z.real()));
    im = std::max(im, std::abs(z.imag()));
  }
  return re > 0 ? im / re : im;
}

}  // namespace kpzlab
