#include "kpz/laws.hpp"

#include <cmath>
#include <stdexcept>

#include "kpz/special.hpp"

namespace kpz {

Law Law::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("Law: rate must be > 0");
  return {Kind::Exponential, rate, 0.0};
}

Law Law::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("Law: shape must be > 0");
  return {Kind::Gamma, shape, 0.0};
}

Law Law::inverse_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("Law: shape must be > 0");
  return {Kind::InverseGamma, shape, 0.0};
}

Law Law::log_gamma_diff(double a_plus, double a_minus) {
  if (!(a_plus > 0.0) || !(a_minus > 0.0))
    throw std::invalid_argument("Law: LogGammaDiff shapes must be > 0");
  return {Kind::LogGammaDiff, a_plus, a_minus};
}

std::string to_string(const Law& law) {
  switch (law.kind) {
    case Law::Kind::Exponential: return "Exponential(" + std::to_string(law.a) + ")";
    case Law::Kind::Gamma: return "Gamma(" + std::to_string(law.a) + ")";
    case Law::Kind::InverseGamma: return "InverseGamma(" + std::to_string(law.a) + ")";
    case Law::Kind::LogGammaDiff:
      return "LogGammaDiff(" + std::to_string(law.a) + "," + std::to_string(law.b) + ")";
  }
  return "Law(?)";
}

namespace {

// Marsaglia-Tsang core for shape >= 1: returns d*v with the log of v reported
// separately so log-domain callers avoid an extra log().
double gamma_core(double shape, rng::Stream& s, double* log_v_out) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = s.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    const double lv = 3.0 * std::log1p(c * x);
    v = v * v * v;
    const double u = s.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x || std::log(u) < 0.5 * x * x + d * (1.0 - v + lv)) {
      if (log_v_out) *log_v_out = std::log(d) + lv;
      return d * v;
    }
  }
}

}  // namespace

double gamma_draw(double shape, rng::Stream& stream) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma_draw: shape must be > 0");
  if (shape >= 1.0) return gamma_core(shape, stream, nullptr);
  const double g = gamma_core(shape + 1.0, stream, nullptr);
  return g * std::pow(stream.uniform(), 1.0 / shape);
}

double log_gamma_draw(double shape, rng::Stream& stream) {
  if (!(shape > 0.0)) throw std::invalid_argument("log_gamma_draw: shape must be > 0");
  if (shape == 0.5) {
    // Ga(1/2) = Z^2 / 2 for a standard normal Z: one draw, no rejection.
    double z;
    do {
      z = stream.normal();
    } while (z == 0.0);
    return 2.0 * std::log(std::abs(z)) - 0.6931471805599453;
  }
  double lg;
  if (shape >= 1.0) {
    gamma_core(shape, stream, &lg);
    return lg;
  }
  gamma_core(shape + 1.0, stream, &lg);
  return lg + std::log(stream.uniform()) / shape;
}

double sample_one(const Law& law, rng::Stream& stream) {
  switch (law.kind) {
    case Law::Kind::Exponential:
      return -std::log(stream.uniform()) / law.a;
    case Law::Kind::Gamma:
      return gamma_draw(law.a, stream);
    case Law::Kind::InverseGamma:
      return 1.0 / gamma_draw(law.a, stream);
    case Law::Kind::LogGammaDiff:
      // log X - log Y = log Ga(a_minus) - log Ga(a_plus)
      return log_gamma_draw(law.b, stream) - log_gamma_draw(law.a, stream);
  }
  throw std::logic_error("sample_one: bad law kind");
}

Eigen::ArrayXd sample(const Law& law, int n, const rng::SeedSpec& seed) {
  if (n < 0) throw std::invalid_argument("sample: n must be >= 0");
  const std::uint64_t rk = rng::row_key(seed, /*row=*/0);
  Eigen::ArrayXd out(n);
  for (int i = 0; i < n; ++i) {
    rng::Stream cell(rng::cell_key(rk, i));
    out[i] = sample_one(law, cell);
  }
  return out;
}

double law_cdf(const Law& law, double x) {
  switch (law.kind) {
    case Law::Kind::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-law.a * x);
    case Law::Kind::Gamma:
      return x <= 0.0 ? 0.0 : special::gamma_p(law.a, x);
    case Law::Kind::InverseGamma:
      return x <= 0.0 ? 0.0 : special::gamma_q(law.a, 1.0 / x);
    case Law::Kind::LogGammaDiff: {
      // X/Y = Ga(a_minus)/Ga(a_plus); W = Ga-/(Ga- + Ga+) ~ Beta(a_minus, a_plus).
      const double z = 1.0 / (1.0 + std::exp(-x));
      return special::beta_i(law.b, law.a, z);
    }
  }
  throw std::logic_error("law_cdf: bad law kind");
}

}  // namespace kpz
