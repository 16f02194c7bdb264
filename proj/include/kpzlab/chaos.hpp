#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kpzlab/rng.hpp"
#include "kpzlab/spectral.hpp"

namespace kpzlab {

// Probabilists' Hermite polynomial, H_{n+1} = x H_n - n H_{n-1}.
template <typename S>
S hermite(int n, S x) {
  if (n < 0) throw std::invalid_argument("hermite: negative order");
  if (n == 0) return S(1);
  S prev = S(1), cur = x;
  for (int j = 1; j < n; ++j) {
    const S next = x * cur - S(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Second-chaos kernel f(y1,y2) = sum F(k1,k2) e^{2 pi i (k1 y1 + k2 y2)} on
// the box |k1|,|k2| <= K. Stored densely with offset K.
template <typename S>
class ChaosKernel2 {
public:
  using Matrix = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, Eigen::Dynamic>;

  ChaosKernel2() = default;
  explicit ChaosKernel2(int K) : K_(K), F_(Matrix::Zero(2 * K + 1, 2 * K + 1)) {}

  int K() const { return K_; }
  std::complex<S>& operator()(int k1, int k2) { return F_(k1 + K_, k2 + K_); }
  std::complex<S> operator()(int k1, int k2) const {
    if (std::abs(k1) > K_ || std::abs(k2) > K_) return {};
    return F_(k1 + K_, k2 + K_);
  }
  Matrix& coeffs() { return F_; }
  const Matrix& coeffs() const { return F_; }

  // f(k1,k2) = f(k2,k1) and f(-k1,-k2) = conj f(k1,k2)
  S symmetry_defect() const {
    S d = 0;
    for (int a = -K_; a <= K_; ++a)
      for (int b = -K_; b <= K_; ++b) {
        d = std::max(d, std::abs((*this)(a, b) - (*this)(b, a)));
        d = std::max(d, std::abs((*this)(-a, -b) - std::conj((*this)(a, b))));
      }
    return d;
  }

  ChaosKernel2& operator+=(const ChaosKernel2& o) { F_ += o.F_; return *this; }
  ChaosKernel2& operator-=(const ChaosKernel2& o) { F_ -= o.F_; return *this; }
  friend ChaosKernel2 operator-(ChaosKernel2 a, const ChaosKernel2& b) { return a -= b; }
  friend ChaosKernel2 operator+(ChaosKernel2 a, const ChaosKernel2& b) { return a += b; }
  friend ChaosKernel2 operator*(S s, ChaosKernel2 a) { a.F_ *= s; return a; }

private:
  int K_ = 0;
  Matrix F_;
};

// symmetrized tensor product phi (x) psi
template <typename S>
ChaosKernel2<S> tensor(const SpectralField<S>& phi, const SpectralField<S>& psi, int K) {
  ChaosKernel2<S> f(K);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) f(a, b) = S(0.5) * (phi(a) * psi(b) + phi(b) * psi(a));
  return f;
}

// Random symmetric real kernel with no mass on the axes k1 = 0 or k2 = 0.
template <typename S>
ChaosKernel2<S> random_kernel(int K, Stream& rng) {
  ChaosKernel2<S> g(K);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) g(a, b) = std::complex<S>(S(rng.gaussian()), S(rng.gaussian()));
  ChaosKernel2<S> f(K);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      if (a == 0 || b == 0) continue;
      const auto h1 = S(0.5) * (g(a, b) + std::conj(g(-a, -b)));
      const auto h2 = S(0.5) * (g(b, a) + std::conj(g(-b, -a)));
      f(a, b) = S(0.5) * (h1 + h2);
    }
  return f;
}

// <f, g> on the box
template <typename S>
S inner(const ChaosKernel2<S>& f, const ChaosKernel2<S>& g) {
  if (f.K() != g.K()) throw std::invalid_argument("inner: box mismatch");
  return (f.coeffs().array() * g.coeffs().array().conjugate()).sum().real();
}

// int int f(y1,y2) a(y1) b(y2) dy1 dy2
template <typename S>
S pair(const ChaosKernel2<S>& f, const SpectralField<S>& a, const SpectralField<S>& b) {
  const int K = f.K();
  std::complex<S> s = 0;
  for (int j1 = -K; j1 <= K; ++j1) {
    const auto aj = a(-j1);
    if (aj == std::complex<S>(0)) continue;
    std::complex<S> row = 0;
    for (int j2 = -K; j2 <= K; ++j2) row += f(j1, j2) * b(-j2);
    s += aj * row;
  }
  return s.real();
}

// Second-chaos evaluation: quadratic form minus its trace.
template <typename S>
S evaluate_W2(const ChaosKernel2<S>& f, const SpectralField<S>& eta) {
  if (f.K() > eta.K()) throw std::invalid_argument("evaluate_W2: kernel box exceeds field box");
  std::complex<S> trace = 0;
  for (int k = 1; k <= f.K(); ++k) trace += f(k, -k) + f(-k, k);
  return pair(f, eta, eta) - trace.real();
}

template <typename S>
ChaosKernel2<S> apply_L0(const ChaosKernel2<S>& f) {
  ChaosKernel2<S> r(f.K());
  const int K = f.K();
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) r(a, b) = -two_pi<S> * two_pi<S> * S(a * a + b * b) * f(a, b);
  return r;
}

// (shift - L0) h = f
template <typename S>
ChaosKernel2<S> solve_resolvent(const ChaosKernel2<S>& f, S shift) {
  if (shift < 0) throw std::invalid_argument("solve_resolvent: negative shift");
  if (shift == 0 && f(0, 0) != std::complex<S>(0))
    throw std::domain_error("solve_resolvent: zero shift with mass at (0,0)");
  ChaosKernel2<S> h(f.K());
  const int K = f.K();
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const S d = shift + two_pi<S> * two_pi<S> * S(a * a + b * b);
      h(a, b) = d == 0 ? std::complex<S>(0) : f(a, b) / d;
    }
  return h;
}

template <typename S>
S h1_norm(const ChaosKernel2<S>& f) {
  const int K = f.K();
  S s = 0;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) s += std::norm(f(a, b)) * two_pi<S> * two_pi<S> * S(a * a + b * b);
  return std::sqrt(S(2) * s);
}

template <typename S>
S hminus1_norm(const ChaosKernel2<S>& f) {
  if (f(0, 0) != std::complex<S>(0)) throw std::domain_error("hminus1_norm: mass at (0,0)");
  const int K = f.K();
  S s = 0;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      if (a == 0 && b == 0) continue;
      s += std::norm(f(a, b)) / (two_pi<S> * two_pi<S> * S(a * a + b * b));
    }
  return std::sqrt(S(2) * s);
}

// (rho^L * u)^2 - c_L, exact on |k| <= K
template <typename S>
SpectralField<S> wick_square(const SpectralField<S>& u, const Mollifier& m, double L, Transform<S>& tr) {
  if (tr.K() != u.K()) throw std::invalid_argument("wick_square: grid mismatch");
  const auto v = mollify(u, m, L);
  RealArray<S> x;
  tr.to_physical(v.c, x);
  x = x.square() - S(mollified_variance(m, L));
  return tr.to_spectral(x, false);
}

// int v(x)^2 phi(x) dx for a real field v and a band-limited test field phi
template <typename S>
S square_pairing(const SpectralField<S>& v, const SpectralField<S>& phi) {
  const int K = v.K();
  std::complex<S> s = 0;
  for (int m = -phi.K(); m <= phi.K(); ++m) {
    const auto pm = phi(-m);
    if (pm == std::complex<S>(0)) continue;
    std::complex<S> conv = 0;
    for (int j = std::max(-K, m - K); j <= std::min(K, m + K); ++j) conv += v(j) * v(m - j);
    s += conv * pm;
  }
  return s.real();
}

// Burgers test kernel rho_hat(k1/N) rho_hat(k2/N) phi_hat(k1+k2)
template <typename S>
ChaosKernel2<S> burgers_kernel(const SpectralField<S>& phi, const Mollifier& m, double N, int K) {
  ChaosKernel2<S> f(K);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) f(a, b) = S(m.profile(a / N) * m.profile(b / N)) * phi(a + b);
  return f;
}

// lambda^{-2} K^L = (1/(2 pi^2)) sum_{k=1}^{k_max} rho_hat(k/L)^2 / k^2
inline double k_constant(const Mollifier& m, double L, int k_max) {
  if (k_max < m.support * L) throw std::invalid_argument("k_constant: k_max below the mollifier support");
  double s = 0.0;
  // small terms first
  for (int k = k_max; k >= 1; --k) {
    const double r = m.profile(k / L);
    s += r * r / (double(k) * k);
  }
  return s / (2.0 * std::numbers::pi * std::numbers::pi);
}

// y -> Theta^L(x - y), with Theta^L = Theta * rho^L
template <typename S>
SpectralField<S> theta_kernel_at(S x, const Mollifier& m, double L, int K) {
  SpectralField<S> t(K, true);
  for (int j = 1; j <= K; ++j)
    t.c(j) = S(m.profile(j / L)) / std::complex<S>(0, -two_pi<S> * j) * std::polar(S(1), -two_pi<S> * j * x);
  return t;
}

// Kernel g_x^{L,N}(y1,y2) =
//   int (rho_x^L(z) - 1) rho_z^N(y1) rho_z^N(y2) dz - (rho_x^L(y1) rho_x^L(y2) - <rho_y1^L rho_y2^L, 1>)
template <typename S>
ChaosKernel2<S> g_kernel(const Mollifier& m, double L, double N, S x, int K) {
  if (!m.nested(L, N)) throw std::invalid_argument("g_kernel: nesting N >= (b/a) L violated");
  ChaosKernel2<S> g(K);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const int s = a + b;
      const auto phase = std::polar(S(1), -two_pi<S> * s * x);
      const S ra = S(m.profile(a / L)), rb = S(m.profile(b / L));
      std::complex<S> v = 0;
      if (s != 0) v += S(m.profile(a / N) * m.profile(b / N) * m.profile(s / L)) * phase;
      v -= ra * rb * phase;
      if (s == 0) v += ra * ra;
      g(a, b) = v;
    }
  return g;
}

// Closed family of cylinder functionals F = Phi(eta(phi_0), eta(phi_1), eta(phi_2)).
template <typename S>
struct Cylinder {
  enum class Kind { one, square, exp, product3 };
  Kind kind = Kind::one;
  std::array<SpectralField<S>, 3> tests{};

  int arity() const {
    switch (kind) {
      case Kind::one: return 0;
      case Kind::square:
      case Kind::exp: return 1;
      case Kind::product3: return 3;
    }
    return 0;
  }
  S value(const std::array<S, 3>& x) const {
    switch (kind) {
      case Kind::one: return S(1);
      case Kind::square: return x[0] * x[0];
      case Kind::exp: return std::exp(x[0]);
      case Kind::product3: return x[0] * x[1] * x[2];
    }
    return S(0);
  }
  std::array<S, 3> gradient(const std::array<S, 3>& x) const {
    switch (kind) {
      case Kind::one: return {0, 0, 0};
      case Kind::square: return {S(2) * x[0], 0, 0};
      case Kind::exp: return {std::exp(x[0]), 0, 0};
      case Kind::product3: return {x[1] * x[2], x[0] * x[2], x[0] * x[1]};
    }
    return {0, 0, 0};
  }
};

template <typename S>
struct IbpResult {
  S lhs = 0, rhs = 0;     // E[W2(f) F], int E[W1(f(y,.)) D_y F] dy
  S residual = 0;         // |lhs - rhs| from shared samples
  S stderr_ = 0;          // standard error of the per-sample difference
};

// Monte Carlo of E[W2(f) F] against int E[W1(f(y,.)) D_y F] dy on shared samples.
template <typename S>
IbpResult<S> mc_ibp_residual(const ChaosKernel2<S>& f, const Cylinder<S>& F, long n_samples, Stream& rng) {
  const int K = f.K();
  const int p = F.arity();
  double sl = 0, sr = 0, sd = 0, sd2 = 0;
  for (long i = 0; i < n_samples; ++i) {
    const auto eta = sample_white_noise<S>(K, rng);
    std::array<S, 3> x{0, 0, 0};
    for (int j = 0; j < p; ++j) x[j] = eta.dot(F.tests[j]);
    const S l = evaluate_W2(f, eta) * F.value(x);
    const auto grad = F.gradient(x);
    S r = 0;
    for (int j = 0; j < p; ++j) r += grad[j] * pair(f, F.tests[j], eta);
    sl += l;
    sr += r;
    sd += l - r;
    sd2 += double(l - r) * double(l - r);
  }
  const double n = double(n_samples);
  IbpResult<S> out;
  out.lhs = S(sl / n);
  out.rhs = S(sr / n);
  const double mean = sd / n;
  out.residual = S(std::abs(mean));
  out.stderr_ = S(std::sqrt(std::max(0.0, sd2 / n - mean * mean) / (n - 1)));
  return out;
}

}  // namespace kpzlab
