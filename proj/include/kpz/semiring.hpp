#pragma once

#include <limits>

#include "kpz/special.hpp"

namespace kpz {

// The two exactly solvable models the toolkit covers.
enum class Model { cgm, inverse_gamma };

inline const char* to_string(Model m) { return m == Model::cgm ? "cgm" : "inverse_gamma"; }

// The two path-arithmetic policies.  Zero temperature works on last-passage
// values with (max, +); positive temperature works on log partition functions
// with (logsumexp, +).  Both share the same dynamic programming kernels; the
// policies also agree on the dual-weight formula through
//     dual(i, j) = -combine(-i, -j)
// which is min(i, j) at zero temperature and the log of the harmonic sum
// -log(1/I + 1/J) in the log domain.
struct MaxPlus {
  static constexpr bool log_domain = false;
  // Edge-pin shares are exactly 0 or 1 at zero temperature.
  static constexpr double pin_tol = 0.0;
  static double neutral() { return -std::numeric_limits<double>::infinity(); }
  static double combine(double a, double b) { return a < b ? b : a; }
  // Mass fraction carried by the first operand after combining.  Ties prefer
  // the second operand, matching the geodesic tie rule (step toward e2 wins,
  // i.e. the "from below" candidate).
  static double first_share(double a, double b) { return a > b ? 1.0 : 0.0; }
};

struct LogSumExp {
  static constexpr bool log_domain = true;
  // Quenched mass entering through the edge is contamination above this share.
  static constexpr double pin_tol = 1e-9;
  static double neutral() { return -std::numeric_limits<double>::infinity(); }
  static double combine(double a, double b) { return special::logaddexp(a, b); }
  static double first_share(double a, double b) {
    if (a == neutral()) return 0.0;
    if (b == neutral()) return 1.0;
    return 1.0 / (1.0 + std::exp(b - a));
  }
};

template <class SR>
inline double dual_weight(double i, double j) {
  return -SR::combine(-i, -j);
}

}  // namespace kpz
