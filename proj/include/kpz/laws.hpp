#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "kpz/rng.hpp"

namespace kpz {

// Weight laws for lattice fields and step laws.
//
//   Exponential(rate)            density rate * exp(-rate x)
//   Gamma(shape)                 unit scale
//   InverseGamma(shape)          reciprocal of Gamma(shape)
//   LogGammaDiff(a_plus, a_minus)  log X - log Y with X ~ InverseGamma(a_plus),
//                                  Y ~ InverseGamma(a_minus), independent
struct Law {
  enum class Kind { Exponential, Gamma, InverseGamma, LogGammaDiff };

  Kind kind = Kind::Exponential;
  double a = 1.0;  // rate, or shape, or a_plus
  double b = 0.0;  // a_minus for LogGammaDiff

  static Law exponential(double rate);
  static Law gamma(double shape);
  static Law inverse_gamma(double shape);
  static Law log_gamma_diff(double a_plus, double a_minus);

  friend bool operator==(const Law&, const Law&) = default;
};

std::string to_string(const Law& law);

// One draw from `law`, consuming `stream` sequentially.  Gamma uses the
// Marsaglia-Tsang rejection sampler (exact; shape < 1 via the boost
// Ga(a) = Ga(a+1) * U^{1/a}), so any positive shape is supported.
double sample_one(const Law& law, rng::Stream& stream);

// n draws with indexed decorrelation: draw i comes from the substream keyed by
// (stream key of `seed`, i), so the sequence is reproducible and extensible.
Eigen::ArrayXd sample(const Law& law, int n, const rng::SeedSpec& seed);

// CDF of `law` at x (exact, via regularized incomplete gamma/beta).
double law_cdf(const Law& law, double x);

double gamma_draw(double shape, rng::Stream& stream);

// log of a Gamma(shape) draw, computed without forming the (possibly
// underflowing) draw itself; used for log-domain step laws at small shapes.
double log_gamma_draw(double shape, rng::Stream& stream);

}  // namespace kpz
