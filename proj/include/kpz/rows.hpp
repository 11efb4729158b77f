#pragma once

#include <Eigen/Dense>

#include "kpz/lattice.hpp"

namespace kpz {

// A finite window of a bi-infinite row: entry j for j in [first, last()].
// The contamination flag travels with rows produced by truncated-window
// operators (queueing module) and stays false everywhere else.
struct RowSequence {
  int first = 0;
  Eigen::ArrayXd entries;
  bool contaminated = false;

  int size() const { return static_cast<int>(entries.size()); }
  int last() const { return first + size() - 1; }
  bool covers(int j) const { return j >= first && j <= last(); }

  double operator[](int j) const { return entries[j - first]; }
  double& operator[](int j) { return entries[j - first]; }

  // Restriction to [lo, last()].
  RowSequence from(int lo) const {
    require(lo >= first && lo <= last() + 1, "RowSequence::from: lo out of range");
    return {lo, entries.tail(size() - (lo - first)), contaminated};
  }
};

}  // namespace kpz
