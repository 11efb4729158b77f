#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "kpz/rng.hpp"

namespace kpz {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.001;
  bool pass = false;  // p_value > alpha
  int n = 0;
};

// Chi-square upper tail probability.
double chi_square_p(double statistic, int df);

// Two-sided Kolmogorov-Smirnov test against a cdf, asymptotic p-value
// (argument sqrt(n) * D of the Kolmogorov distribution).  Requires n >= 100
// and finite samples.
TestReport ks_test(const Eigen::ArrayXd& samples, const std::function<double(double)>& cdf,
                   double alpha = 0.001);

// Two-sample Kolmogorov-Smirnov with the effective sample size n1*n2/(n1+n2).
TestReport ks_test_2sample(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                           double alpha = 0.001);

// Paired independence battery: 8x8 quantile-binned chi-square (49 degrees of
// freedom) plus the Pearson correlation with threshold |r| <= 4/sqrt(n).
struct IndependenceReport {
  TestReport chi_square;
  double pearson_r = 0.0;
  double r_threshold = 0.0;
  bool pearson_pass = false;
  bool pass = false;
};

IndependenceReport independence_tests(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                                      double alpha = 0.001);

// Three-way independence probe: samples are median-split into sign patterns
// and the 2x2x2 contingency table is tested against the product of margins
// (4 degrees of freedom).
TestReport three_way_sign_test(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                               const Eigen::ArrayXd& c, double alpha = 0.001);

// Step laws for the random-walk bound checks.  Raw laws are centered; the
// normalized variants are scaled to unit variance.
struct StepLaw {
  enum class Kind { gaussian, log_gamma, log_gamma_diff };

  Kind kind = Kind::gaussian;
  double a = 1.0;  // shape (log_gamma), or the negative-side shape a_plus
  double b = 1.0;  // positive-side shape a_minus (log_gamma_diff)
  bool normalized = false;

  static StepLaw gaussian();
  static StepLaw log_gamma(double shape);
  static StepLaw normalized_log_gamma(double shape);
  // log X - log Y for X ~ InverseGamma(a_plus), Y ~ InverseGamma(a_minus).
  static StepLaw log_gamma_diff(double a_plus, double a_minus);

  double variance() const;
  // Largest lambda (symmetric) for which the centered mgf is finite.
  double lambda_domain() const;
  // log E[exp(lambda * step)], exact via log-gamma functions.
  double log_mgf(double lambda) const;
  double sample(rng::Stream& stream) const;
};

std::string to_string(const StepLaw& law);

// Sub-exponential certificate: log E[exp(lambda * step)] <= K0 * lambda^2 for
// |lambda| <= lambda0.
struct SubExpParams {
  double K0 = 0.0;
  double lambda0 = 0.0;
};

// Fits (K0, lambda0) for a step law: lambda0 is half the mgf domain radius
// (capped at 1 for laws with full-line mgf) and K0 the max of
// log_mgf(lambda)/lambda^2 over a 50-point grid in [-lambda0, lambda0].
SubExpParams fit_subexp_certificate(const StepLaw& law);

// Re-checks the certificate inequality on the grid; throws on violation.
void validate_subexp_certificate(const SubExpParams& params, const StepLaw& law);

// Independent numerical check of the log-gamma mgf: quadrature of
// E[exp(lambda * (log X - psi0(shape)))] for X ~ Gamma(shape).
double log_mgf_log_gamma_quadrature(double shape, double lambda);

// Running-maximum upper bound: empirical P(max_{0<=k<=n} S_k >= t sqrt(n))
// against the two-branch sub-exponential bound
//   exp(-t^2 / (4 K0))          for t <= 2 lambda0 K0 sqrt(n),
//   exp(-lambda0 t sqrt(n) / 2) otherwise.
struct UpperBoundRow {
  double t = 0.0;
  double bound = 0.0;
  double empirical = 0.0;
  double se = 0.0;           // binomial standard error of the estimate
  bool gaussian_branch = true;
  bool pass = false;         // empirical <= bound + 3 se
};

struct UpperBoundReport {
  SubExpParams params;
  int n = 0;
  int trials = 0;
  std::vector<UpperBoundRow> rows;
  bool pass = false;
};

UpperBoundReport check_running_max_upper(const SubExpParams& params, const StepLaw& law,
                                         int n, const std::vector<double>& t_grid,
                                         int trials, const rng::SeedSpec& seed);

// Running-maximum lower-tail scaling: empirical P(max_{1<=k<=N} S_k < l) at
// walk lengths N and 4N.  With zero drift the bound scales like 1/sqrt(N), so
// the ratio of the two probabilities should sit near 0.5; rows with l beyond
// the sqrt(N) regime are flagged instead of asserted.
struct RwConfig {
  StepLaw step;        // must have unit variance
  double mu = 0.0;     // drift added to every step
  double c3 = 0.0;     // third absolute central moment, reported only
  int n = 1000;        // base walk length N
  int trials = 10000;
};

struct LowerBoundRow {
  double l = 0.0;
  double p_small = 0.0;  // at N
  double p_large = 0.0;  // at 4N
  double ratio = 0.0;    // p_large / p_small
  bool out_of_regime = false;
  bool pass = false;
};

struct LowerBoundReport {
  RwConfig config;
  std::vector<LowerBoundRow> rows;
  bool pass = false;
};

LowerBoundReport check_running_max_lower(const RwConfig& config,
                                         const std::vector<double>& l_grid,
                                         const rng::SeedSpec& seed);

}  // namespace kpz
