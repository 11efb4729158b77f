#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "kpz/field.hpp"
#include "kpz/lattice.hpp"
#include "kpz/rows.hpp"
#include "kpz/semiring.hpp"

namespace kpz {

enum class TableMode { bulk, horizontal_boundary };

// Last-passage value table (zero temperature).
//
// bulk mode: values G_{base,z} for z in [base, window max], G_{x,x} = w_x.
// horizontal_boundary mode: level-0 row holds the signed boundary prefix h
// (anchored so h vanishes just left of base_x) and levels >= 1 hold the
// boundary last-passage values; the left window edge acts as the truncation
// of the bi-infinite boundary, and argmax_touched_edge reports whether any
// interior optimum was pinned to that edge.
class ValueTable {
 public:
  TableMode mode() const { return mode_; }
  LatticePoint base() const { return base_; }
  Window window() const {
    return {x0_, x0_ + static_cast<int>(values_.rows()) - 1, y0_,
            y0_ + static_cast<int>(values_.cols()) - 1};
  }
  // Columns at and right of this edge are outside the truncation margin.
  Window interior() const { return interior_; }

  double value(int x, int y) const { return values_(x - x0_, y - y0_); }
  double at(LatticePoint p) const { return value(p.x, p.y); }

  // Share of the optimum at (x, y) pinned to the left window edge (0 or 1).
  double left_pin(int x, int y) const {
    return pin_.size() == 0 ? 0.0 : pin_(x - x0_, y - y0_);
  }

  bool argmax_touched_edge() const { return argmax_touched_edge_; }
  const RowSequence& boundary_prefix() const { return boundary_prefix_; }

  // Internal constructor used by the builders.
  ValueTable(TableMode mode, LatticePoint base, int x0, int y0, Eigen::ArrayXXd values,
             Eigen::ArrayXXd pin, Window interior, bool touched, RowSequence prefix)
      : mode_(mode),
        base_(base),
        x0_(x0),
        y0_(y0),
        values_(std::move(values)),
        pin_(std::move(pin)),
        interior_(interior),
        argmax_touched_edge_(touched),
        boundary_prefix_(std::move(prefix)) {}

 private:
  TableMode mode_;
  LatticePoint base_;
  int x0_, y0_;
  Eigen::ArrayXXd values_;
  Eigen::ArrayXXd pin_;
  Window interior_;
  bool argmax_touched_edge_ = false;
  RowSequence boundary_prefix_;
};

// Point-to-point last-passage table over [base, field window max].
ValueTable lpp_table(const WeightField& field, LatticePoint base);

// Last-passage table with a horizontal boundary row at level 0.
//
// `boundary` holds the level-0 weights over some column range [a, b]; `bulk`
// must cover the same columns at levels 1..H.  The prefix profile is anchored
// at base_x (paths notionally start at (base_x, 0)).  Columns left of
// a + margin are treated as truncation padding: the interior window starts at
// a + margin and argmax_touched_edge is evaluated over it.
ValueTable boundary_lpp_table(const RowSequence& boundary, const WeightField& bulk,
                              int base_x = 0, int margin = 0);

// Horizontal/vertical increments and dual weights of a table (zero
// temperature: plain value differences; level-0 horizontal increments of a
// boundary table reproduce the boundary weights by construction).
struct IncrementSet {
  Model model = Model::cgm;
  int x0 = 0, y0 = 0;    // lattice coords of the lower-left table corner
  Eigen::ArrayXXd I;     // I(ix, iy): edge [[(x0+ix, y0+iy), +e1]]
  Eigen::ArrayXXd J;     // J(ix, iy): edge [[(x0+ix, y0+iy), +e2]]
  Eigen::ArrayXXd dual;  // dual weight at (x0+ix, y0+iy)

  double i_at(int x, int y) const { return I(x - x0, y - y0); }
  double j_at(int x, int y) const { return J(x - x0, y - y0); }
  double dual_at(int x, int y) const { return dual(x - x0, y - y0); }

  // I[m]: entry j is the increment across [[(j-1, m), (j, m)]].
  RowSequence i_row(int m) const;
  // Dual row of level m with the one-step index shift: entry j is the dual
  // weight at (j-1, m).
  RowSequence dual_row(int m) const;
};

IncrementSet increments(const ValueTable& table);

struct GeodesicPath {
  std::vector<LatticePoint> vertices;  // from `from` to `to`, inclusive
  double value = 0.0;                  // sum of field weights along the path
  int tie_count = 0;                   // backtracking ties (broken toward e2)
};

// Maximizing path of a bulk table (table base must equal `from`).
GeodesicPath geodesic(const ValueTable& table, const WeightField& field, LatticePoint from,
                      LatticePoint to);

struct CoalescenceResult {
  bool coalesced = false;   // false: geodesics only meet at the target itself
  LatticePoint point;       // first common vertex (the target when !coalesced)
  LatticePoint target;      // v_N used for the finite-N proxy
  int tie_count = 0;
};

// First common vertex of the finite geodesics from x and from y to the
// characteristic target v_N in direction rho (CGM).
CoalescenceResult coalescence_point(const WeightField& field, LatticePoint x, LatticePoint y,
                                    double rho, int N);

}  // namespace kpz
