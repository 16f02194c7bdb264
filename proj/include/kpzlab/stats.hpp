#pragma once

#include <vector>

namespace kpzlab {

struct LinearFit {
  double slope = 0, intercept = 0;
  double slope_stderr = 0;
  double residual_rms = 0;
};

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased
double standard_error(const std::vector<double>& v);

// pairwise summation, order fixed by the input
double pairwise_sum(const double* v, std::size_t n);

// regularized lower incomplete gamma P(a, x)
double gamma_p(double a, double x);
double chi2_cdf(double x, double dof);
double normal_cdf(double z);

}  // namespace kpzlab
