#include "kpz/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kpz/queueing.hpp"
#include "kpz/special.hpp"
#include "kpz/table_core.hpp"

namespace kpz {

void validate(const DownRightPath& path) {
  require(path.vertices.size() >= 2, "DownRightPath: need at least one edge");
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const LatticePoint step = path.vertices[i + 1] - path.vertices[i];
    require(step == e1 || step == LatticePoint{0, -1},
            "DownRightPath: steps must be e1 or -e2");
  }
  for (const auto& v : path.vertices)
    require(v.y >= 0, "DownRightPath: vertices must stay in the upper half-plane");
  const int K = path.block_count();
  if (K == 0) {
    require(path.cuts.empty(), "DownRightPath: cuts without directions");
    return;
  }
  for (int k = 0; k + 1 < K; ++k)
    require(path.directions[k] < path.directions[k + 1],
            "DownRightPath: directions must be strictly increasing");
  for (double r : path.directions)
    require(r > 0.0 && r < 1.0, "DownRightPath: directions must lie in (0,1)");
  require(static_cast<int>(path.cuts.size()) == K - 1,
          "DownRightPath: need exactly K-1 cuts");
  int prev = path.edges();
  for (int c : path.cuts) {
    require(c > 0 && c < prev, "DownRightPath: cuts must be strictly decreasing interior");
    prev = c;
  }
}

DownRightPath staircase_path(int stairs) {
  require(stairs >= 1, "staircase_path: need at least one stair");
  DownRightPath p;
  LatticePoint cur{0, stairs};
  p.vertices.push_back(cur);
  for (int s = 0; s < stairs; ++s) {
    cur = cur + e1;
    p.vertices.push_back(cur);
    cur = cur - e2;
    p.vertices.push_back(cur);
  }
  return p;
}

DownRightPath horizontal_path(int steps, int level) {
  require(steps >= 1, "horizontal_path: need at least one step");
  require(level >= 0, "horizontal_path: level must be nonnegative");
  DownRightPath p;
  for (int i = 0; i <= steps; ++i) p.vertices.push_back({i, level});
  return p;
}

DownRightPath vertical_path(int steps, int column) {
  require(steps >= 1, "vertical_path: need at least one step");
  DownRightPath p;
  for (int i = steps; i >= 0; --i) p.vertices.push_back({column, i});
  return p;
}

DownRightPath parse_down_right_path(const std::string& spec) {
  const auto colon = spec.find(':');
  require(colon != std::string::npos, "path spec: expected kind:arg");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "staircase") return staircase_path(std::stoi(arg));
  if (kind == "horizontal") return horizontal_path(std::stoi(arg));
  if (kind == "vertical") return vertical_path(std::stoi(arg));
  require(kind == "explicit", "path spec: unknown kind '" + kind + "'");
  std::vector<LatticePoint> steps;
  int downs = 0;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    require(item == "e1" || item == "-e2", "path spec: steps must be e1 or -e2");
    steps.push_back(item == "e1" ? e1 : LatticePoint{0, -1});
    downs += item == "-e2" ? 1 : 0;
  }
  require(!steps.empty(), "path spec: explicit path needs at least one step");
  DownRightPath p;
  p.vertices.push_back({0, downs});  // start high enough to end on the axis
  for (const auto& s : steps) p.vertices.push_back(p.vertices.back() + s);
  validate(p);
  return p;
}

void assign_directions(DownRightPath& path, const std::vector<double>& rhos) {
  const int K = static_cast<int>(rhos.size());
  require(K >= 1, "assign_directions: need at least one direction");
  require(path.edges() >= K, "assign_directions: more blocks than edges");
  path.directions = rhos;
  path.cuts.clear();
  const int base = path.edges() / K;
  const int rem = path.edges() % K;
  int hi = path.edges();
  for (int k = 1; k < K; ++k) {
    const int size_k = base + (k <= rem ? 1 : 0);
    hi -= size_k;
    path.cuts.push_back(hi);
  }
  validate(path);
}

namespace {

// Margin needed so the mass share entering through the truncation edge stays
// clear of the pin tolerance.  Shifting the entry point one column left costs
// (bulk weight) - (boundary weight) in the work domain, a walk with drift d
// and spread sigma per column; we ask for |d| M - z sigma sqrt(M) >= L with a
// generous exceedance budget L, which is a conservative normal-tail bound on
// the walk ever recovering the pin threshold.
template <class SR>
int required_margin(double rho) {
  double d, var, L;
  if constexpr (SR::log_domain) {
    d = special::digamma(1.0 - rho) - special::digamma(1.0);
    var = special::trigamma(1.0) + special::trigamma(1.0 - rho);
    L = -std::log(SR::pin_tol) + 8.0;
  } else {
    d = 1.0 - 1.0 / (1.0 - rho);
    var = 1.0 + 1.0 / ((1.0 - rho) * (1.0 - rho));
    L = 14.0;
  }
  const double z = 5.0;
  const double s = (z * std::sqrt(var) + std::sqrt(z * z * var + 4.0 * std::abs(d) * L)) /
                   (2.0 * std::abs(d));
  return static_cast<int>(std::ceil(s * s));
}

template <class SR>
IncrementBlocks build_coupled(const DownRightPath& path, const rng::SeedSpec& seed,
                              int margin, Model model) {
  validate(path);
  const int K = path.block_count();
  require(K >= 1, "coupled_blocks: path carries no directions");

  int xmin = path.vertices.front().x, xmax = xmin, ymax = 0;
  for (const auto& v : path.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymax = std::max(ymax, v.y);
  }
  const int b = std::max(0, xmax);
  const int span = b - std::min(0, xmin) + 1;
  if (margin < 0) {
    margin = default_margin(span, ymax + K + 1);
    for (double rho : path.directions)
      margin = std::max(margin, required_margin<SR>(rho));
  }
  const int a = std::min(0, xmin) - margin;

  FieldRecipe recipe;
  recipe.bulk = model == Model::cgm ? Law::exponential(1.0) : Law::inverse_gamma(1.0);
  for (int k = 1; k <= K; ++k) {
    const double rho = path.directions[k - 1];
    recipe.row_overrides[-k] = model == Model::cgm ? Law::exponential(1.0 - rho)
                                                   : Law::inverse_gamma(1.0 - rho);
  }
  const WeightField field = make_field(recipe, {a, b, -K, ymax}, seed);
  const int width = field.window().width();

  const auto work_row = [&](int y) {
    Eigen::ArrayXd w = field.row(y);
    if constexpr (SR::log_domain) w = w.log();
    return w;
  };

  IncrementBlocks out;
  out.model = model;
  out.provenance = IncrementBlocks::Provenance::coupled_construction;
  out.directions = path.directions;
  out.blocks.resize(K);

  for (int k = 1; k <= K; ++k) {
    const int levels = ymax + k;  // strip rows 0..levels, row r is lattice level r-k
    auto build = detail::stack_begin<SR>(a, -k, levels + 1,
                                         detail::prefix_profile(work_row(-k), a, 0));
    for (int r = 1; r <= levels; ++r) detail::stack_advance(build, r, work_row(r - k));
    out.contaminated =
        out.contaminated ||
        (build.pin.block(margin, 1, width - margin, levels) > SR::pin_tol).any();

    const auto value = [&](LatticePoint p) { return build.values(p.x - a, p.y + k); };
    const auto [lo, hi] = path.block_range(k);
    for (int i = lo; i < hi; ++i) {
      const LatticePoint v0 = path.vertices[i];
      const LatticePoint v1 = path.vertices[i + 1];
      if (v1 == v0 + e1) {
        out.blocks[k - 1].push_back({v0, true, value(v1) - value(v0)});
      } else {
        out.blocks[k - 1].push_back({v1, false, value(v0) - value(v1)});
      }
    }
  }
  return out;
}

}  // namespace

IncrementBlocks coupled_blocks(const DownRightPath& path, const rng::SeedSpec& seed,
                               int window_margin) {
  return build_coupled<MaxPlus>(path, seed, window_margin, Model::cgm);
}

IncrementBlocks coupled_blocks_polymer(const DownRightPath& path, const rng::SeedSpec& seed,
                                       int window_margin) {
  return build_coupled<LogSumExp>(path, seed, window_margin, Model::inverse_gamma);
}

BusemannEstimate busemann_limit_estimate(const WeightField& field, LatticePoint x,
                                         LatticePoint y, const DirectionParam& d,
                                         const std::vector<int>& schedule) {
  require(!schedule.empty(), "busemann_limit_estimate: empty schedule");
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
    require(schedule[i] < schedule[i + 1],
            "busemann_limit_estimate: schedule must be strictly increasing");
  const Window& win = field.window();
  require(win.contains(x) && win.contains(y),
          "busemann_limit_estimate: start outside the field");

  BusemannEstimate est;
  est.model = d.model;
  est.x = x;
  est.y = y;
  est.rho = d.rho;
  est.schedule = schedule;

  std::vector<LatticePoint> targets;
  for (int N : schedule) {
    const LatticePoint v = target_vertex(d, N);
    require(win.contains(v), "busemann_limit_estimate: target v_N outside the field");
    require(x <= v && y <= v, "busemann_limit_estimate: v_N must dominate both starts");
    targets.push_back(v);
  }

  if (d.model == Model::cgm) {
    const ValueTable tx = lpp_table(field, x);
    const ValueTable ty = lpp_table(field, y);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const LatticePoint v = targets[i];
      est.values.push_back(tx.at(v) - ty.at(v));
      const GeodesicPath gx = geodesic(tx, field, x, v);
      const GeodesicPath gy = geodesic(ty, field, y, v);
      auto it = gx.vertices.rbegin();
      auto jt = gy.vertices.rbegin();
      LatticePoint meet = v;
      while (it != gx.vertices.rend() && jt != gy.vertices.rend() && *it == *jt) {
        meet = *it;
        ++it;
        ++jt;
      }
      est.coalesced.push_back(!(meet == v));
    }
  } else {
    const LogZTable zx = logz_table(field, x);
    const LogZTable zy = logz_table(field, y);
    for (const LatticePoint& v : targets) est.values.push_back(zx.at(v) - zy.at(v));
  }
  for (std::size_t i = 1; i < est.values.size(); ++i)
    est.gaps.push_back(est.values[i] - est.values[i - 1]);
  return est;
}

CoalescenceForm busemann_coalescence_form(const WeightField& field, LatticePoint x,
                                          LatticePoint y, const DirectionParam& d, int N) {
  require(d.model == Model::cgm,
          "busemann_coalescence_form: geodesic form is zero-temperature only");
  CoalescenceForm out;
  out.geometry = coalescence_point(field, x, y, d.rho, N);
  if (!out.geometry.coalesced) return out;
  const ValueTable tx = lpp_table(field, x);
  const ValueTable ty = lpp_table(field, y);
  out.available = true;
  out.value = tx.at(out.geometry.point) - ty.at(out.geometry.point);
  return out;
}

}  // namespace kpz
