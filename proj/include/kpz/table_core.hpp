#pragma once

#include <Eigen/Dense>

#include "kpz/semiring.hpp"

// Shared dynamic-programming kernels for last-passage / partition-function
// tables.  Everything works in the "work domain" of the chosen policy: raw
// weights and values at zero temperature, logs of weights and log partition
// functions in the log domain.  Columns of the arrays are lattice levels, so
// col(r) is one horizontal row of the lattice.

namespace kpz::detail {

template <class SR>
struct StackBuild {
  int x0 = 0;              // leftmost lattice column
  int level0 = 0;          // lattice level of row index 0 (the profile row)
  Eigen::ArrayXXd values;  // (W, rows)
  Eigen::ArrayXXd pin;     // mass fraction whose path is pinned to column x0
};

// Row 0 becomes `profile` (the boundary prefix in work domain).  The pin row
// seeds the left-edge column, so pin(j, r) ends up as the share of the optimum
// (or of quenched mass) that enters through the truncation edge.
template <class SR>
StackBuild<SR> stack_begin(int x0, int level0, int rows, const Eigen::ArrayXd& profile) {
  StackBuild<SR> b;
  b.x0 = x0;
  b.level0 = level0;
  const auto w = profile.size();
  b.values.resize(w, rows);
  b.pin.resize(w, rows);
  b.values.col(0) = profile;
  b.pin.col(0).setZero();
  b.pin(0, 0) = 1.0;
  return b;
}

// values.col(r) from col(r-1) and the work weights of the next lattice level.
// The leftmost column has no left neighbour: paths there run straight up.
template <class SR>
void stack_advance(StackBuild<SR>& b, int r, const Eigen::Ref<const Eigen::ArrayXd>& w) {
  const auto n = b.values.rows();
  auto prev = b.values.col(r - 1);
  auto cur = b.values.col(r);
  cur(0) = w(0) + prev(0);
  b.pin(0, r) = b.pin(0, r - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    const double left = cur(j - 1);
    const double below = prev(j);
    cur(j) = w(j) + SR::combine(left, below);
    const double s = SR::first_share(left, below);
    b.pin(j, r) = s * b.pin(j - 1, r) + (1.0 - s) * b.pin(j, r - 1);
  }
}

// Point-to-point table with base at array index (0, 0); w are work weights.
template <class SR>
Eigen::ArrayXXd bulk_build(const Eigen::ArrayXXd& w) {
  const auto cols = w.rows();  // lattice columns
  const auto rows = w.cols();  // lattice levels
  Eigen::ArrayXXd v(cols, rows);
  v(0, 0) = w(0, 0);
  for (Eigen::Index j = 1; j < cols; ++j) v(j, 0) = v(j - 1, 0) + w(j, 0);
  for (Eigen::Index r = 1; r < rows; ++r) {
    v(0, r) = v(0, r - 1) + w(0, r);
    for (Eigen::Index j = 1; j < cols; ++j)
      v(j, r) = w(j, r) + SR::combine(v(j - 1, r), v(j, r - 1));
  }
  return v;
}

// Signed prefix profile of a weight row over [a, b] (work domain), anchored so
// that the profile vanishes at index anchor-1:
//   h_j = sum_{l in (anchor-1, j]} w_l          for j >= anchor,
//   h_j = -sum_{l in (j, anchor-1]} w_l         for j < anchor - 1,
// realized as a cumulative sum re-based by a single subtraction.
inline Eigen::ArrayXd prefix_profile(const Eigen::Ref<const Eigen::ArrayXd>& w, int a,
                                     int anchor) {
  Eigen::ArrayXd c(w.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    acc += w(i);
    c(i) = acc;
  }
  if (anchor > a) c -= c(anchor - 1 - a);
  return c;
}

}  // namespace kpz::detail
