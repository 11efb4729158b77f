#pragma once

#include <cmath>

#include "kpz/lattice.hpp"
#include "kpz/semiring.hpp"
#include "kpz/special.hpp"

namespace kpz {

// A direction parameter rho in (0,1) for one of the two models.
struct DirectionParam {
  double rho = 0.5;
  Model model = Model::cgm;
};

// Characteristic direction xi[rho]: ((1-rho)^2, rho^2) for the CGM and
// (psi_1(rho), psi_1(1-rho)) for the inverse-gamma polymer.
inline std::pair<double, double> characteristic_direction(const DirectionParam& d) {
  require(d.rho > 0.0 && d.rho < 1.0, "characteristic_direction: rho must be in (0,1)");
  if (d.model == Model::cgm) return {(1.0 - d.rho) * (1.0 - d.rho), d.rho * d.rho};
  return {special::trigamma(d.rho), special::trigamma(1.0 - d.rho)};
}

// Lattice target v_N along xi[rho]: componentwise rounding of t * xi with
// t = N / |xi|_1, so |v_N|_1 tracks N.
inline LatticePoint target_vertex(const DirectionParam& d, int N) {
  require(N > 0, "target_vertex: N must be positive");
  const auto [x1, x2] = characteristic_direction(d);
  const double t = static_cast<double>(N) / (x1 + x2);
  return {static_cast<int>(std::lround(t * x1)), static_cast<int>(std::lround(t * x2))};
}

}  // namespace kpz
