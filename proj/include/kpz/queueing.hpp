#pragma once

#include <vector>

#include "kpz/rows.hpp"
#include "kpz/semiring.hpp"

namespace kpz {

// Arithmetic-policy switch for the queueing operators: zero temperature works
// on last-passage values with (max, +), positive temperature on log partition
// functions with (logsumexp, +).  Rows are always passed in the raw domain
// (additive weights / multiplicative positive weights); conversion to the work
// domain is internal.
enum class Temperature { zero, positive };

inline const char* to_string(Temperature t) {
  return t == Temperature::zero ? "zero" : "positive";
}

// Identity tolerances.  Both sides of every identity are computed from shared
// inputs, so discrepancies are pure floating-point accumulation.
inline constexpr double kIdentityTolZero = 1e-9;
inline constexpr double kIdentityTolLog = 1e-7;

// Left padding that makes truncation effects on a reported window of the
// given width, under the given number of stacked levels, negligible.
inline int default_margin(int width, int levels) { return 4 * (width + levels); }

// Inter-departure row of the two-row system (arrivals at level 0, services at
// level 1): horizontal increments of the boundary table at level 1.  The
// reported window drops max(margin, 1) left cells (1 is structural: the first
// increment needs a left neighbour); the contamination flag fires when an
// optimum (or more than a 1e-9 mass share) on columns past the margin enters
// through the truncation edge, and is OR-ed with the input rows' flags.
RowSequence depart(const RowSequence& arrivals, const RowSequence& services, int margin = 0,
                   Temperature temp = Temperature::zero);

// Sojourn row: vertical increments between levels 0 and 1 of the same system.
RowSequence sojourn(const RowSequence& arrivals, const RowSequence& services, int margin = 0,
                    Temperature temp = Temperature::zero);

// Dual row with the one-step shift: entry j combines the raw level-0 weight
// at column j with the vertical increment at column j-1 (min at zero
// temperature, harmonic sum at positive temperature).
RowSequence dual(const RowSequence& arrivals, const RowSequence& services, int margin = 0,
                 Temperature temp = Temperature::zero);

// Left fold of depart over rows[0], rows[1], ..., rows.back(); the reported
// window shrinks by max(margin, 1) per application.
RowSequence iterate_depart(const std::vector<RowSequence>& rows, int margin = 0,
                           Temperature temp = Temperature::zero);

struct IdentityReport {
  double max_abs_discrepancy = 0.0;
  int compared_first = 0;  // compared column range, inclusive
  int compared_last = -1;
  bool contaminated = false;
  double tolerance = kIdentityTolZero;
  bool pass = false;
};

// Nested-table identity: increments of the full stacked system at level n
// against increments of the two-row system whose boundary is the stacked
// level-(n-1) increment row.  Both the horizontal and vertical identities are
// evaluated on columns > first + margin.
IdentityReport verify_nested(const std::vector<RowSequence>& rows, int n, int margin,
                             Temperature temp = Temperature::zero);

// Dual-swap identity on rows indexed -k..n (rows[i] holds level i-k): the
// stacked top increment row of (Y[-k..n]) against that of
// (Y[-k..-1], dual(Y[0],Y[1]), I[1], ..., I[n]) with I[m] the level-m
// increment row of the (Y[0..n]) system.
IdentityReport verify_dual_swap(const std::vector<RowSequence>& rows, int k, int n, int margin,
                                Temperature temp = Temperature::zero);

}  // namespace kpz
