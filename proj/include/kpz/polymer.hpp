#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kpz/field.hpp"
#include "kpz/lattice.hpp"
#include "kpz/lpp.hpp"
#include "kpz/rows.hpp"
#include "kpz/semiring.hpp"

namespace kpz {

// Log partition-function table (positive temperature).  Same layout as
// ValueTable, but every entry is log Z and the edge-contamination diagnostic
// is mass-based: left_mass(x, y) is the fraction of quenched path mass at
// (x, y) entering through the left window edge, and mass_touched_edge()
// reports whether that fraction exceeds 1e-9 anywhere on the interior.
class LogZTable {
 public:
  TableMode mode() const { return mode_; }
  LatticePoint base() const { return base_; }
  double shape_mu() const { return shape_mu_; }
  Window window() const {
    return {x0_, x0_ + static_cast<int>(logvalues_.rows()) - 1, y0_,
            y0_ + static_cast<int>(logvalues_.cols()) - 1};
  }
  Window interior() const { return interior_; }

  double logz(int x, int y) const { return logvalues_(x - x0_, y - y0_); }
  double at(LatticePoint p) const { return logz(p.x, p.y); }

  double left_mass(int x, int y) const {
    return mass_.size() == 0 ? 0.0 : mass_(x - x0_, y - y0_);
  }

  bool mass_touched_edge() const { return mass_touched_edge_; }
  const RowSequence& boundary_prefix() const { return boundary_prefix_; }

  LogZTable(TableMode mode, LatticePoint base, int x0, int y0, Eigen::ArrayXXd logvalues,
            Eigen::ArrayXXd mass, Window interior, bool touched, RowSequence prefix,
            double shape_mu)
      : mode_(mode),
        base_(base),
        x0_(x0),
        y0_(y0),
        logvalues_(std::move(logvalues)),
        mass_(std::move(mass)),
        interior_(interior),
        mass_touched_edge_(touched),
        boundary_prefix_(std::move(prefix)),
        shape_mu_(shape_mu) {}

 private:
  TableMode mode_;
  LatticePoint base_;
  int x0_, y0_;
  Eigen::ArrayXXd logvalues_;
  Eigen::ArrayXXd mass_;
  Window interior_;
  bool mass_touched_edge_ = false;
  RowSequence boundary_prefix_;
  double shape_mu_ = 1.0;
};

// Log of the point-to-point path sum over [base, field window max]; the field
// holds the raw (positive) weights and all arithmetic runs in the log domain.
LogZTable logz_table(const WeightField& field, LatticePoint base);

// Boundary version: level 0 carries the signed log-prefix profile of the
// (positive, multiplicative) boundary weights, anchored at base_x; levels
// >= 1 carry boundary log partition values.  Columns left of
// boundary.first + margin are truncation padding.
LogZTable boundary_logz_table(const RowSequence& boundary, const WeightField& bulk,
                              int base_x = 0, int margin = 0);

// Log-ratio increments of a log table (entries are logZ differences; their
// exponentials are the multiplicative increments).  Dual weights use the
// harmonic combination in the log domain.
IncrementSet increments(const LogZTable& table);

// Quenched endpoint distribution of the point-to-line polymer from the
// origin to the antidiagonal x + y = 2N.  Endpoint s sits at (N+s, N-s);
// probabilities are normalized over the full antidiagonal -N <= s <= N even
// when only a sub-window of logweights is stored.
struct EndpointMeasure {
  int N = 0;
  int center_offset = 0;  // offset m the stored window was centered on
  int s_lo = 0, s_hi = 0;
  Eigen::ArrayXd logweights;     // logZ_{0,(N+s,N-s)} for s in [s_lo, s_hi]
  Eigen::ArrayXd probabilities;  // same indexing, normalized over all s
  double log_norm = 0.0;         // logsumexp of logZ over the full line
  bool clipped = false;          // requested window exceeded the line

  bool covers(int s) const { return s >= s_lo && s <= s_hi; }
  double probability_of(int s) const { return probabilities(s - s_lo); }
};

EndpointMeasure endpoint_measure(const WeightField& field, int N);
EndpointMeasure endpoint_measure(const WeightField& field, int N, int s_lo, int s_hi,
                                 int center_offset = 0);

// Same measure without materializing the field: rows are generated on the
// fly (triangle only) and reduced with an O(N)-memory sweep.  Bit-identical
// to the materialized version for the same recipe and seed.
EndpointMeasure endpoint_measure_streamed(const FieldRecipe& recipe,
                                          const rng::SeedSpec& seed, int N);

// Endpoint events of the point-to-line measure.  Real-valued widths are
// floored once, at construction, so set identities between symmetric and
// one-sided forms can be exercised exactly with the integer parameters.
struct EndpointEvent {
  enum class Kind { symmetric, one_sided };
  Kind kind = Kind::symmetric;
  int k = 0;  // window width (half-width for symmetric); negative -> empty
  int m = 0;  // offset of the one-sided form

  // {end <= w}: endpoints with |s| <= floor(w).
  static EndpointEvent symmetric(double w);
  // {end_m^+ <= w}: endpoints (N+m+s, N-m-s) with 0 <= s <= floor(w).
  static EndpointEvent one_sided(int m, double w);
};

// Total quenched probability of the event's endpoint set, clamped to the
// stored window (experiments store the full line, so no clamping occurs
// there).
double quenched_event_probability(const EndpointMeasure& measure, const EndpointEvent& event);

struct QuenchedPath {
  std::vector<LatticePoint> vertices;  // base to endpoint, inclusive
  double log_weight = 0.0;             // log of the weight product along the path
};

// Backward sampling from the quenched measure: from z step to z - e1 with
// probability exp(logZ(z-e1) - logsumexp(logZ(z-e1), logZ(z-e2))).
QuenchedPath sample_quenched_path(const LogZTable& table, const WeightField& field,
                                  LatticePoint endpoint, const rng::SeedSpec& seed);

}  // namespace kpz
