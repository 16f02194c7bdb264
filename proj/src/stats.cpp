#include "kpzlab/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpzlab {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty");
  return pairwise_sum(v.data(), v.size()) / double(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need two values");
  const double m = mean(v);
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - m) * (v[i] - m);
  return pairwise_sum(d.data(), d.size()) / double(v.size() - 1);
}

double standard_error(const std::vector<double>& v) { return std::sqrt(variance(v) / double(v.size())); }

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("ols: need matching inputs of size >= 2");
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("ols: degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.residual_rms = std::sqrt(rss / double(n));
  f.slope_stderr = n > 2 ? std::sqrt(rss / double(n - 2) / sxx) : 0.0;
  return f;
}

namespace {

double gamma_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int i = 0; i < 100000; ++i) {
    ap += 1;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// upper Q(a,x) by modified Lentz
double gamma_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-16;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0) throw std::invalid_argument("gamma_p: a <= 0");
  if (x <= 0) return 0.0;
  return x < a + 1 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double chi2_cdf(double x, double dof) { return gamma_p(dof / 2, x / 2); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace kpzlab
