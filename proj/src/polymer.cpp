#include "kpz/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "kpz/table_core.hpp"

namespace kpz {

namespace {

constexpr std::uint64_t kPathDomain = 0x71756e636865645fULL;

double mu_of(const FieldRecipe& recipe) {
  return recipe.bulk.kind == Law::Kind::InverseGamma ? recipe.bulk.a : 1.0;
}

}  // namespace

LogZTable logz_table(const WeightField& field, LatticePoint base) {
  const Window& win = field.window();
  require(win.contains(base), "logz_table: base outside the field window");
  const int bx = base.x - win.x0;
  const int by = base.y - win.y0;
  const int w = win.x1 - base.x + 1;
  const int h = win.y1 - base.y + 1;

  Eigen::ArrayXXd logw = field.values().block(bx, by, w, h);
  require((logw > 0.0).all(), "logz_table: weights must be positive");
  // Scalar log, not the vectorized one: the streamed endpoint sweep takes
  // std::log cell by cell and the two must agree bit for bit.
  logw = logw.unaryExpr([](double v) { return std::log(v); });
  Eigen::ArrayXXd logvalues = detail::bulk_build<LogSumExp>(logw);

  const Window full{base.x, win.x1, base.y, win.y1};
  return LogZTable(TableMode::bulk, base, base.x, base.y, std::move(logvalues),
                   Eigen::ArrayXXd(), full, false, RowSequence{}, mu_of(field.recipe()));
}

LogZTable boundary_logz_table(const RowSequence& boundary, const WeightField& bulk,
                              int base_x, int margin) {
  require(boundary.size() >= 1, "boundary_logz_table: empty boundary row");
  const int a = boundary.first;
  const int b = boundary.last();
  const Window& bw = bulk.window();
  require(bw.x0 == a && bw.x1 == b,
          "boundary_logz_table: bulk columns must match the boundary row");
  require(bw.y0 == 1, "boundary_logz_table: bulk rows must start at level 1");
  require(base_x >= a && base_x <= b, "boundary_logz_table: base_x outside the boundary");
  require(margin >= 0 && a + margin <= b, "boundary_logz_table: margin leaves no interior");
  require((boundary.entries > 0.0).all(),
          "boundary_logz_table: boundary weights must be positive");
  require((bulk.values() > 0.0).all(), "boundary_logz_table: bulk weights must be positive");

  const int levels = bw.y1;
  Eigen::ArrayXd profile =
      detail::prefix_profile(boundary.entries.log(), a, base_x);
  auto build = detail::stack_begin<LogSumExp>(a, 0, levels + 1, profile);
  for (int r = 1; r <= levels; ++r) {
    Eigen::ArrayXd logrow = bulk.row(r).log();
    detail::stack_advance(build, r, logrow);
  }

  const Window interior{a + margin, b, 0, levels};
  const bool touched =
      (build.pin.block(margin, 1, boundary.size() - margin, levels) > LogSumExp::pin_tol).any();

  return LogZTable(TableMode::horizontal_boundary, {base_x, 0}, a, 0,
                   std::move(build.values), std::move(build.pin), interior, touched,
                   RowSequence{a, std::move(profile)}, mu_of(bulk.recipe()));
}

IncrementSet increments(const LogZTable& table) {
  const Window win = table.window();
  const int w = win.width();
  const int h = win.height();
  require(w >= 2 && h >= 2, "increments: table must span at least 2x2 vertices");

  IncrementSet inc;
  inc.model = Model::inverse_gamma;
  inc.x0 = win.x0;
  inc.y0 = win.y0;
  inc.I.resize(w - 1, h);
  inc.J.resize(w, h - 1);
  inc.dual.resize(w - 1, h - 1);

  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix + 1 < w; ++ix)
      inc.I(ix, iy) =
          table.logz(win.x0 + ix + 1, win.y0 + iy) - table.logz(win.x0 + ix, win.y0 + iy);
  for (int iy = 0; iy + 1 < h; ++iy)
    for (int ix = 0; ix < w; ++ix)
      inc.J(ix, iy) =
          table.logz(win.x0 + ix, win.y0 + iy + 1) - table.logz(win.x0 + ix, win.y0 + iy);
  for (int iy = 0; iy + 1 < h; ++iy)
    for (int ix = 0; ix + 1 < w; ++ix)
      inc.dual(ix, iy) = dual_weight<LogSumExp>(inc.I(ix, iy), inc.J(ix, iy));
  return inc;
}

namespace {

EndpointMeasure finish_measure(int N, Eigen::ArrayXd full_logz, int s_lo, int s_hi,
                               int center_offset, bool clipped) {
  double norm = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < full_logz.size(); ++i) norm = special::logaddexp(norm, full_logz(i));

  EndpointMeasure m;
  m.N = N;
  m.center_offset = center_offset;
  m.s_lo = s_lo;
  m.s_hi = s_hi;
  m.log_norm = norm;
  m.clipped = clipped;
  const int n = s_hi - s_lo + 1;
  m.logweights = full_logz.segment(s_lo + N, n);
  m.probabilities = (m.logweights - norm).exp();
  return m;
}

}  // namespace

EndpointMeasure endpoint_measure(const WeightField& field, int N) {
  return endpoint_measure(field, N, -N, N, 0);
}

EndpointMeasure endpoint_measure(const WeightField& field, int N, int s_lo, int s_hi,
                                 int center_offset) {
  require(N >= 1, "endpoint_measure: N must be positive");
  const Window& win = field.window();
  require(win.contains(LatticePoint{0, 0}) && win.contains(LatticePoint{2 * N, 0}) &&
              win.contains(LatticePoint{0, 2 * N}),
          "endpoint_measure: field must cover the triangle x+y <= 2N, x,y >= 0");
  bool clipped = false;
  if (s_lo < -N || s_hi > N) {
    clipped = true;
    std::cerr << "endpoint_measure: window of s clipped to the antidiagonal [-" << N << ", "
              << N << "]\n";
    s_lo = std::max(s_lo, -N);
    s_hi = std::min(s_hi, N);
  }
  require(s_lo <= s_hi, "endpoint_measure: empty window of s");

  const LogZTable table = logz_table(field, {0, 0});
  Eigen::ArrayXd full(2 * N + 1);
  for (int s = -N; s <= N; ++s) full(s + N) = table.logz(N + s, N - s);
  return finish_measure(N, std::move(full), s_lo, s_hi, center_offset, clipped);
}

EndpointMeasure endpoint_measure_streamed(const FieldRecipe& recipe,
                                          const rng::SeedSpec& seed, int N) {
  require(N >= 1, "endpoint_measure_streamed: N must be positive");
  Eigen::ArrayXd full(2 * N + 1);
  Eigen::ArrayXd cur(2 * N + 1);  // logZ over x in [0, 2N - y]
  for (int y = 0; y <= 2 * N; ++y) {
    const int xmax = 2 * N - y;
    const Law& law = recipe.row_law(y);
    const std::uint64_t rk = rng::row_key(seed, y);
    for (int x = 0; x <= xmax; ++x) {
      rng::Stream cell(rng::cell_key(rk, x));
      const double w = sample_one(law, cell);
      require(w > 0.0, "endpoint_measure_streamed: weights must be positive");
      const double logw = std::log(w);
      if (y == 0) {
        cur(x) = x == 0 ? logw : cur(x - 1) + logw;
      } else if (x == 0) {
        cur(x) += logw;  // cur(0) still holds logZ(0, y-1)
      } else {
        cur(x) = logw + special::logaddexp(cur(x - 1), cur(x));
      }
    }
    full(2 * N - y) = cur(xmax);  // the antidiagonal cell of this row is s = N - y
  }
  return finish_measure(N, std::move(full), -N, N, 0, false);
}

EndpointEvent EndpointEvent::symmetric(double w) {
  return {Kind::symmetric, static_cast<int>(std::floor(w)), 0};
}

EndpointEvent EndpointEvent::one_sided(int m, double w) {
  return {Kind::one_sided, static_cast<int>(std::floor(w)), m};
}

double quenched_event_probability(const EndpointMeasure& measure, const EndpointEvent& event) {
  if (event.k < 0) return 0.0;
  int lo, hi;
  if (event.kind == EndpointEvent::Kind::symmetric) {
    lo = -event.k;
    hi = event.k;
  } else {
    lo = event.m;
    hi = event.m + event.k;
  }
  lo = std::max(lo, measure.s_lo);
  hi = std::min(hi, measure.s_hi);
  double p = 0.0;
  for (int s = lo; s <= hi; ++s) p += measure.probability_of(s);
  return p;
}

QuenchedPath sample_quenched_path(const LogZTable& table, const WeightField& field,
                                  LatticePoint endpoint, const rng::SeedSpec& seed) {
  require(table.mode() == TableMode::bulk, "sample_quenched_path: needs a bulk table");
  require(table.window().contains(endpoint), "sample_quenched_path: endpoint outside table");
  const LatticePoint base = table.base();
  require(base <= endpoint, "sample_quenched_path: endpoint below the table base");

  rng::Stream stream(rng::absorb(rng::replica_key(seed), kPathDomain));
  QuenchedPath path;
  LatticePoint cur = endpoint;
  path.vertices.push_back(cur);
  while (!(cur == base)) {
    const bool has_left = cur.x > base.x;
    const bool has_below = cur.y > base.y;
    LatticePoint next;
    if (has_left && has_below) {
      const double zl = table.logz(cur.x - 1, cur.y);
      const double zb = table.logz(cur.x, cur.y - 1);
      const double p_left = std::exp(zl - special::logaddexp(zl, zb));
      next = stream.uniform() < p_left ? LatticePoint{cur.x - 1, cur.y}
                                       : LatticePoint{cur.x, cur.y - 1};
    } else if (has_left) {
      next = {cur.x - 1, cur.y};
    } else {
      next = {cur.x, cur.y - 1};
    }
    cur = next;
    path.vertices.push_back(cur);
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  for (const auto& v : path.vertices) path.log_weight += std::log(field.at(v));
  return path;
}

}  // namespace kpz
