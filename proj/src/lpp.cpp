#include "kpz/lpp.hpp"

#include <algorithm>
#include <cmath>

#include "kpz/direction.hpp"
#include "kpz/table_core.hpp"

namespace kpz {

ValueTable lpp_table(const WeightField& field, LatticePoint base) {
  const Window& win = field.window();
  require(win.contains(base), "lpp_table: base outside the field window");
  const int bx = base.x - win.x0;
  const int by = base.y - win.y0;
  const int w = win.x1 - base.x + 1;
  const int h = win.y1 - base.y + 1;

  Eigen::ArrayXXd weights = field.values().block(bx, by, w, h);
  Eigen::ArrayXXd values = detail::bulk_build<MaxPlus>(weights);

  const Window full{base.x, win.x1, base.y, win.y1};
  return ValueTable(TableMode::bulk, base, base.x, base.y, std::move(values),
                    Eigen::ArrayXXd(), full, false, RowSequence{});
}

ValueTable boundary_lpp_table(const RowSequence& boundary, const WeightField& bulk,
                              int base_x, int margin) {
  require(boundary.size() >= 1, "boundary_lpp_table: empty boundary row");
  const int a = boundary.first;
  const int b = boundary.last();
  const Window& bw = bulk.window();
  require(bw.x0 == a && bw.x1 == b,
          "boundary_lpp_table: bulk columns must match the boundary row");
  require(bw.y0 == 1, "boundary_lpp_table: bulk rows must start at level 1");
  require(base_x >= a && base_x <= b, "boundary_lpp_table: base_x outside the boundary");
  require(margin >= 0 && a + margin <= b, "boundary_lpp_table: margin leaves no interior");
  require((boundary.entries >= 0.0).all(),
          "boundary_lpp_table: boundary weights must be nonnegative");

  const int levels = bw.y1;  // bulk covers 1..levels
  Eigen::ArrayXd profile = detail::prefix_profile(boundary.entries, a, base_x);
  auto build = detail::stack_begin<MaxPlus>(a, 0, levels + 1, profile);
  for (int r = 1; r <= levels; ++r) detail::stack_advance(build, r, bulk.row(r));

  const Window interior{a + margin, b, 0, levels};
  // The pin share is exactly 0 or 1 at zero temperature; any positive pin on
  // an interior vertex at level >= 1 means the truncation edge was reachable
  // by an optimum there.  (With margin 0 the edge column itself is interior,
  // so the flag is vacuously set.)
  const bool touched =
      (build.pin.block(margin, 1, boundary.size() - margin, levels) > MaxPlus::pin_tol).any();

  return ValueTable(TableMode::horizontal_boundary, {base_x, 0}, a, 0,
                    std::move(build.values), std::move(build.pin), interior, touched,
                    RowSequence{a, std::move(profile)});
}

RowSequence IncrementSet::i_row(int m) const {
  return {x0 + 1, I.col(m - y0)};
}

RowSequence IncrementSet::dual_row(int m) const {
  return {x0 + 1, dual.col(m - y0)};
}

IncrementSet increments(const ValueTable& table) {
  const Window win = table.window();
  const int w = win.width();
  const int h = win.height();
  require(w >= 2 && h >= 2, "increments: table must span at least 2x2 vertices");

  IncrementSet inc;
  inc.model = Model::cgm;
  inc.x0 = win.x0;
  inc.y0 = win.y0;
  inc.I.resize(w - 1, h);
  inc.J.resize(w, h - 1);
  inc.dual.resize(w - 1, h - 1);

  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix + 1 < w; ++ix)
      inc.I(ix, iy) = table.value(win.x0 + ix + 1, win.y0 + iy) -
                      table.value(win.x0 + ix, win.y0 + iy);
  for (int iy = 0; iy + 1 < h; ++iy)
    for (int ix = 0; ix < w; ++ix)
      inc.J(ix, iy) = table.value(win.x0 + ix, win.y0 + iy + 1) -
                      table.value(win.x0 + ix, win.y0 + iy);
  // Dual weight at z: corner-flip of the two increments leaving z.
  for (int iy = 0; iy + 1 < h; ++iy)
    for (int ix = 0; ix + 1 < w; ++ix)
      inc.dual(ix, iy) = dual_weight<MaxPlus>(inc.I(ix, iy), inc.J(ix, iy));
  return inc;
}

namespace {
constexpr double kTieTol = 1e-12;
}

GeodesicPath geodesic(const ValueTable& table, const WeightField& field, LatticePoint from,
                      LatticePoint to) {
  require(table.mode() == TableMode::bulk, "geodesic: needs a point-to-point table");
  require(table.base() == from, "geodesic: table base must equal the start point");
  require(table.window().contains(to), "geodesic: end point outside the table");
  require(from <= to, "geodesic: end point must dominate the start point");

  GeodesicPath path;
  LatticePoint cur = to;
  path.vertices.push_back(cur);
  while (!(cur == from)) {
    const bool has_left = cur.x > from.x;
    const bool has_below = cur.y > from.y;
    LatticePoint next;
    if (has_left && has_below) {
      const double vl = table.value(cur.x - 1, cur.y);
      const double vb = table.value(cur.x, cur.y - 1);
      if (std::abs(vl - vb) <= kTieTol) {
        ++path.tie_count;
        next = {cur.x, cur.y - 1};
      } else {
        next = vl > vb ? LatticePoint{cur.x - 1, cur.y} : LatticePoint{cur.x, cur.y - 1};
      }
    } else if (has_left) {
      next = {cur.x - 1, cur.y};
    } else {
      next = {cur.x, cur.y - 1};
    }
    cur = next;
    path.vertices.push_back(cur);
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  for (const auto& v : path.vertices) path.value += field.at(v);
  return path;
}

CoalescenceResult coalescence_point(const WeightField& field, LatticePoint x, LatticePoint y,
                                    double rho, int N) {
  const LatticePoint v = target_vertex({rho, Model::cgm}, N);
  const Window& win = field.window();
  require(win.contains(x) && win.contains(y), "coalescence_point: start outside the field");
  require(win.contains(v), "coalescence_point: target v_N outside the field window");
  require(x <= v && y <= v, "coalescence_point: target v_N must dominate both starts");

  const ValueTable tx = lpp_table(field, x);
  const ValueTable ty = lpp_table(field, y);
  const GeodesicPath gx = geodesic(tx, field, x, v);
  const GeodesicPath gy = geodesic(ty, field, y, v);

  CoalescenceResult res;
  res.target = v;
  res.tie_count = gx.tie_count + gy.tie_count;
  res.point = v;
  auto i = gx.vertices.rbegin();
  auto j = gy.vertices.rbegin();
  while (i != gx.vertices.rend() && j != gy.vertices.rend() && *i == *j) {
    res.point = *i;
    ++i;
    ++j;
  }
  res.coalesced = !(res.point == v);
  return res;
}

}  // namespace kpz
