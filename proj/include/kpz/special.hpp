#pragma once

#include <cmath>
#include <limits>

// Special functions used by the samplers, the distribution CDFs and the test
// statistics.  Everything here is plain double-in/double-out; no external
// dependency beyond <cmath>.

namespace kpz::special {

// log Gamma(x), x > 0.
inline double log_gamma(double x) { return std::lgamma(x); }

// Digamma psi_0(x), x > 0.  Recurrence shift to x >= 8, then the asymptotic
// series; absolute error <= 1e-10 on [1e-3, 1e3] (internally long double so
// the large 1/x recurrence terms near the left edge keep full precision).
double digamma(double x);

// Trigamma psi_1(x), x > 0, same scheme as digamma.
double trigamma(double x);

// psi(n, x) for n in {0, 1}.
double psi(int n, double x);

// Regularized lower incomplete gamma P(a, x) and upper Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double beta_i(double a, double b, double x);

// Complementary CDF of the Kolmogorov distribution,
//   Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
// with the theta-dual series for small lambda.
double kolmogorov_q(double lambda);

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// log(e^a + e^b), safe against overflow; -inf is the identity element.
inline double logaddexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = a < b ? b : a;
  const double lo = a < b ? a : b;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace kpz::special
