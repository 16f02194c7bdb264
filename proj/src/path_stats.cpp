#include "kpzlab/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kpzlab/stats.hpp"

namespace kpzlab {

ScalarPath::ScalarPath(double dt, std::vector<double> v) : step(dt), x(std::move(v)) {
  if (!(dt > 0)) throw std::invalid_argument("ScalarPath: step must be > 0");
  if (x.size() < 3) throw std::invalid_argument("ScalarPath: need at least 3 points");
}

QvEstimate quadratic_variation(const ScalarPath& path, std::vector<int> lags) {
  if (lags.size() < 2) throw std::invalid_argument("quadratic_variation: need >= 2 lags");
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  const long n = static_cast<long>(path.size());
  QvEstimate q;
  for (int m : lags) {
    if (m < 1 || m >= n - 1) throw std::invalid_argument("quadratic_variation: lag not representable on the grid");
    std::vector<double> sq(static_cast<std::size_t>(n - m));
    for (long j = 0; j + m < n; ++j) {
      const double d = path.x[j + m] - path.x[j];
      sq[j] = d * d;
    }
    const double eps = m * path.step;
    q.lags.push_back(m);
    q.estimates.push_back(pairwise_sum(sq.data(), sq.size()) * path.step / eps);
  }
  q.pair_index = 0;
  for (std::size_t i = 0; i + 1 < q.estimates.size(); ++i) {
    const double a = q.estimates[i], b = q.estimates[i + 1];
    if (std::abs(b - a) < 0.2 * std::max(std::abs(a), std::abs(b))) {
      q.pair_index = static_cast<int>(i);
      q.stable = true;
      break;
    }
  }
  const int i = q.pair_index;
  const double e0 = q.lags[i] * path.step, e1 = q.lags[i + 1] * path.step;
  const double q0 = q.estimates[i], q1 = q.estimates[i + 1];
  q.extrapolated = q0 - e0 * (q1 - q0) / (e1 - e0);
  return q;
}

double p_variation(const ScalarPath& path, double p) {
  if (p < 1) throw std::invalid_argument("p_variation: p must be >= 1");
  const auto& x = path.x;
  const std::size_t n = x.size();
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double b = 0;
    for (std::size_t i = 0; i < j; ++i) {
      const double d = std::abs(x[j] - x[i]);
      const double v = best[i] + (p == 1.0 ? d : p == 2.0 ? d * d : std::pow(d, p));
      b = std::max(b, v);
    }
    best[j] = b;
  }
  return std::pow(best[n - 1], 1.0 / p);
}

namespace {

std::vector<int> geometric_lags(int lo, int hi, int count) {
  std::vector<int> lags;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : double(i) / (count - 1);
    lags.push_back(static_cast<int>(std::lround(lo * std::pow(double(hi) / lo, f))));
  }
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  return lags;
}

// sums of |increment|^q over a subset of paths, per lag
std::vector<std::vector<double>> moment_sums(const std::vector<ScalarPath>& paths, std::size_t begin,
                                             std::size_t end, const std::vector<double>& qs,
                                             const std::vector<int>& lags, std::vector<double>& counts) {
  std::vector<std::vector<double>> s(qs.size(), std::vector<double>(lags.size(), 0.0));
  counts.assign(lags.size(), 0.0);
  for (std::size_t p = begin; p < end; ++p) {
    const auto& x = paths[p].x;
    for (std::size_t l = 0; l < lags.size(); ++l) {
      const std::size_t m = static_cast<std::size_t>(lags[l]);
      for (std::size_t j = 0; j + m < x.size(); ++j) {
        const double d = std::abs(x[j + m] - x[j]);
        const double d2 = d * d;
        for (std::size_t qi = 0; qi < qs.size(); ++qi)
          s[qi][l] += qs[qi] == 2.0 ? d2 : qs[qi] == 4.0 ? d2 * d2 : std::pow(d, qs[qi]);
      }
      counts[l] += double(x.size() - m);
    }
  }
  return s;
}

double exponent_from(const std::vector<std::vector<double>>& sums, const std::vector<double>& counts,
                     const std::vector<double>& qs, const std::vector<int>& lags, double step,
                     std::vector<double>* per_q) {
  std::vector<double> lt;
  for (int m : lags) lt.push_back(std::log(m * step));
  double acc = 0;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    std::vector<double> lm;
    for (std::size_t l = 0; l < lags.size(); ++l) lm.push_back(std::log(sums[qi][l] / counts[l]));
    const double h = ols(lt, lm).slope / qs[qi];
    if (per_q) per_q->push_back(h);
    acc += h;
  }
  return acc / double(qs.size());
}

}  // namespace

HolderEstimate holder_exponent(const std::vector<ScalarPath>& paths, const std::vector<double>& qs, int lag_min,
                               int lag_max, int n_lags) {
  if (paths.size() < 50) throw std::invalid_argument("holder_exponent: need >= 50 paths");
  if (qs.empty()) throw std::invalid_argument("holder_exponent: empty q list");
  // integer lags: lag_max may round 10^1.5 lag_min down
  if (lag_min < 1 || lag_max < std::floor(lag_min * std::pow(10.0, 1.5)))
    throw std::invalid_argument("holder_exponent: lags must span >= 1.5 decades");
  const double step = paths.front().step;
  for (auto& p : paths)
    if (p.step != step || p.size() <= static_cast<std::size_t>(lag_max))
      throw std::invalid_argument("holder_exponent: paths must share a grid longer than lag_max");

  HolderEstimate h;
  h.qs = qs;
  h.lags = geometric_lags(lag_min, lag_max, n_lags);
  std::vector<double> counts;
  const auto sums = moment_sums(paths, 0, paths.size(), qs, h.lags, counts);
  h.exponent = exponent_from(sums, counts, qs, h.lags, step, &h.per_q);
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    std::vector<double> m;
    for (std::size_t l = 0; l < h.lags.size(); ++l) m.push_back(sums[qi][l] / counts[l]);
    h.moments.push_back(m);
  }

  // jackknife over G contiguous groups
  const std::size_t G = 10;
  std::vector<double> jk;
  for (std::size_t g = 0; g < G; ++g) {
    const std::size_t b = g * paths.size() / G, e = (g + 1) * paths.size() / G;
    std::vector<double> cg;
    auto sg = moment_sums(paths, b, e, qs, h.lags, cg);
    auto s = sums;
    auto c = counts;
    for (std::size_t qi = 0; qi < qs.size(); ++qi)
      for (std::size_t l = 0; l < h.lags.size(); ++l) s[qi][l] -= sg[qi][l];
    for (std::size_t l = 0; l < h.lags.size(); ++l) c[l] -= cg[l];
    jk.push_back(exponent_from(s, c, qs, h.lags, step, nullptr));
  }
  const double jm = mean(jk);
  double v = 0;
  for (double x : jk) v += (x - jm) * (x - jm);
  h.stderr_ = std::sqrt(v * double(G - 1) / double(G));
  return h;
}

std::vector<SpectralField<double>> law_test_functions(int K) {
  std::vector<SpectralField<double>> fs;
  auto make = [&](auto fill) {
    SpectralField<double> f(K, false);
    fill(f);
    fs.push_back(f);
  };
  const double r2 = std::sqrt(2.0);
  // sqrt2 cos(2 pi x)
  make([&](auto& f) { f.c(1) = r2 / 2; });
  // sqrt2 sin(4 pi x)
  make([&](auto& f) { if (K >= 2) f.c(2) = std::complex<double>(0, -r2 / 2); });
  // cos(2 pi x) + sin(6 pi x)
  make([&](auto& f) {
    f.c(1) = 0.5;
    if (K >= 3) f.c(3) = std::complex<double>(0, -0.5);
  });
  // smooth profile sum_k e^{-k/2} cos(2 pi k x)
  make([&](auto& f) {
    for (int k = 1; k <= std::min(K, 8); ++k) f.c(k) = 0.5 * std::exp(-0.5 * k);
  });
  // 1 + cos(10 pi x): the constant is projected out
  make([&](auto& f) {
    f.c(0) = 1.0;
    if (K >= 5) f.c(5) = 0.5;
  });
  return fs;
}

LawTestReport white_noise_law_test(const std::vector<SpectralField<double>>& fields, double level) {
  if (fields.size() < 100) throw std::invalid_argument("white_noise_law_test: need >= 100 samples");
  const int K = fields.front().K();
  const double n = double(fields.size());
  LawTestReport r;
  r.n_samples = static_cast<int>(fields.size());
  auto two_sided = [](double F) { return 2.0 * std::min(F, 1.0 - F); };

  int pass = 0;
  for (int k = 1; k <= K; ++k) {
    double s = 0;
    for (auto& f : fields) s += 2.0 * std::norm(f.c(k));
    const double p = two_sided(chi2_cdf(s, 2.0 * n));
    r.mode_p.push_back(p);
    pass += p > level;
  }
  r.mode_pass_fraction = double(pass) / K;

  pass = 0;
  for (int k = 1; k < K; ++k) {
    double re = 0, im = 0;
    for (auto& f : fields) {
      const auto z = f.c(k) * std::conj(f.c(k + 1));
      re += z.real();
      im += z.imag();
    }
    // each part has variance 1/2 per sample
    const double chi = (re * re + im * im) / (n / 2.0);
    const double p = 1.0 - chi2_cdf(chi, 2.0);
    r.pair_p.push_back(p);
    pass += p > level;
  }
  r.pair_pass_fraction = K > 1 ? double(pass) / (K - 1) : 1.0;

  pass = 0;
  const auto tests = law_test_functions(K);
  for (auto& phi : tests) {
    const auto pphi = project_mean_zero(phi);
    const double var = pphi.dot(pphi);
    double s = 0;
    for (auto& f : fields) {
      const double v = f.dot(phi);
      s += v * v / var;
    }
    const double p = two_sided(chi2_cdf(s, n));
    r.pairing_p.push_back(p);
    pass += p > level;
  }
  r.pairing_pass_fraction = double(pass) / double(tests.size());
  return r;
}

}  // namespace kpzlab
