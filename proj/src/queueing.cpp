#include "kpz/queueing.hpp"

#include <algorithm>
#include <cmath>

#include "kpz/table_core.hpp"

namespace kpz {

namespace {

// Input rows restricted to their common window and mapped to the work domain
// (identity at zero temperature, log at positive temperature).
struct WorkRows {
  int a = 0, b = 0;
  std::vector<Eigen::ArrayXd> v;
  bool contaminated = false;

  int width() const { return b - a + 1; }
};

WorkRows to_work(const std::vector<const RowSequence*>& rows, Temperature temp,
                 const char* who) {
  WorkRows wr;
  wr.a = rows.front()->first;
  wr.b = rows.front()->last();
  for (const auto* r : rows) {
    require(r->size() >= 1, std::string(who) + ": empty row");
    wr.a = std::max(wr.a, r->first);
    wr.b = std::min(wr.b, r->last());
    wr.contaminated = wr.contaminated || r->contaminated;
  }
  require(wr.a <= wr.b, std::string(who) + ": windows misaligned (empty overlap)");
  wr.v.reserve(rows.size());
  for (const auto* r : rows) {
    Eigen::ArrayXd seg = r->entries.segment(wr.a - r->first, wr.width());
    if (temp == Temperature::positive) {
      require((seg > 0.0).all(), std::string(who) + ": positive-temperature rows must be > 0");
      seg = seg.log();
    }
    wr.v.push_back(std::move(seg));
  }
  return wr;
}

template <class SR>
struct Strip {
  int a = 0;
  detail::StackBuild<SR> sb;

  int width() const { return static_cast<int>(sb.values.rows()); }
  int top() const { return static_cast<int>(sb.values.cols()) - 1; }

  // Horizontal increments of level m, entry j for j in [a+1, last column].
  Eigen::ArrayXd i_row(int m) const {
    const int w = width();
    return sb.values.col(m).tail(w - 1) - sb.values.col(m).head(w - 1);
  }
  // Vertical increments between levels m-1 and m, entry j for j in [a, last].
  Eigen::ArrayXd j_row(int m) const { return sb.values.col(m) - sb.values.col(m - 1); }

  // Shifted dual row of levels 0..1: entry j (j >= a+1) combines the raw
  // level-0 weight at column j (the level-0 increment of the profile) with
  // the vertical increment at column j-1.
  Eigen::ArrayXd dual0() const {
    const int w = width();
    Eigen::ArrayXd out(w - 1);
    for (int j = 1; j < w; ++j) {
      const double i0 = sb.values(j, 0) - sb.values(j - 1, 0);
      const double j0 = sb.values(j - 1, 1) - sb.values(j - 1, 0);
      out(j - 1) = dual_weight<SR>(i0, j0);
    }
    return out;
  }

  // True when any level >= 1 vertex at a column >= lo_col carries edge pin.
  bool pin_hits(int lo_col) const {
    const int ofs = std::max(lo_col - a, 0);
    const int w = width() - ofs;
    if (w <= 0 || top() < 1) return false;
    return (sb.pin.block(ofs, 1, w, top()) > SR::pin_tol).any();
  }

  // Same check restricted to the top level, whose values are the ones a
  // verifier actually compares; lower-level pins left of the readout do not
  // reach them.
  bool pin_hits_top(int lo_col) const {
    const int ofs = std::max(lo_col - a, 0);
    const int w = width() - ofs;
    if (w <= 0 || top() < 1) return false;
    return (sb.pin.block(ofs, top(), w, 1) > SR::pin_tol).any();
  }
};

template <class SR>
Strip<SR> build_strip(int a, const std::vector<Eigen::ArrayXd>& levels) {
  Strip<SR> s;
  s.a = a;
  s.sb = detail::stack_begin<SR>(a, 0, static_cast<int>(levels.size()),
                                 detail::prefix_profile(levels[0], a, a));
  for (std::size_t r = 1; r < levels.size(); ++r)
    detail::stack_advance(s.sb, static_cast<int>(r), levels[r]);
  return s;
}

RowSequence from_work(int first, Eigen::ArrayXd entries, bool contaminated,
                      Temperature temp) {
  if (temp == Temperature::positive) entries = entries.exp();
  return {first, std::move(entries), contaminated};
}

template <class F>
auto with_policy(Temperature temp, F&& f) {
  return temp == Temperature::zero ? f(MaxPlus{}) : f(LogSumExp{});
}

double max_abs_diff(const Eigen::Ref<const Eigen::ArrayXd>& x,
                    const Eigen::Ref<const Eigen::ArrayXd>& y) {
  return (x - y).abs().maxCoeff();
}

}  // namespace

RowSequence depart(const RowSequence& arrivals, const RowSequence& services, int margin,
                   Temperature temp) {
  require(margin >= 0, "depart: margin must be nonnegative");
  WorkRows wr = to_work({&arrivals, &services}, temp, "depart");
  const int shrink = std::max(margin, 1);
  require(wr.width() > shrink, "depart: window too narrow for the margin");
  return with_policy(temp, [&](auto sr) {
    using SR = decltype(sr);
    Strip<SR> s = build_strip<SR>(wr.a, wr.v);
    const bool flag = wr.contaminated || s.pin_hits(wr.a + margin);
    Eigen::ArrayXd full = s.i_row(1);  // first = a+1
    return from_work(wr.a + shrink, full.tail(full.size() - (shrink - 1)), flag, temp);
  });
}

RowSequence sojourn(const RowSequence& arrivals, const RowSequence& services, int margin,
                    Temperature temp) {
  require(margin >= 0, "sojourn: margin must be nonnegative");
  WorkRows wr = to_work({&arrivals, &services}, temp, "sojourn");
  require(wr.width() > margin, "sojourn: window too narrow for the margin");
  return with_policy(temp, [&](auto sr) {
    using SR = decltype(sr);
    Strip<SR> s = build_strip<SR>(wr.a, wr.v);
    const bool flag = wr.contaminated || s.pin_hits(wr.a + margin);
    Eigen::ArrayXd full = s.j_row(1);  // first = a
    return from_work(wr.a + margin, full.tail(full.size() - margin), flag, temp);
  });
}

RowSequence dual(const RowSequence& arrivals, const RowSequence& services, int margin,
                 Temperature temp) {
  require(margin >= 0, "dual: margin must be nonnegative");
  WorkRows wr = to_work({&arrivals, &services}, temp, "dual");
  const int shrink = std::max(margin, 1);
  require(wr.width() > shrink, "dual: window too narrow for the margin");
  return with_policy(temp, [&](auto sr) {
    using SR = decltype(sr);
    Strip<SR> s = build_strip<SR>(wr.a, wr.v);
    const bool flag = wr.contaminated || s.pin_hits(wr.a + margin);
    Eigen::ArrayXd full = s.dual0();  // first = a+1
    return from_work(wr.a + shrink, full.tail(full.size() - (shrink - 1)), flag, temp);
  });
}

RowSequence iterate_depart(const std::vector<RowSequence>& rows, int margin,
                           Temperature temp) {
  require(rows.size() >= 2, "iterate_depart: need at least two rows");
  RowSequence cur = rows[0];
  for (std::size_t i = 1; i < rows.size(); ++i) cur = depart(cur, rows[i], margin, temp);
  return cur;
}

IdentityReport verify_nested(const std::vector<RowSequence>& rows, int n, int margin,
                             Temperature temp) {
  require(n >= 1, "verify_nested: n must be >= 1");
  require(static_cast<int>(rows.size()) >= n + 1, "verify_nested: need rows 0..n");
  require(margin >= 1, "verify_nested: margin must be >= 1");
  std::vector<const RowSequence*> ptrs;
  for (int i = 0; i <= n; ++i) ptrs.push_back(&rows[i]);
  WorkRows wr = to_work(ptrs, temp, "verify_nested");
  const int a = wr.a, b = wr.b, w = wr.width();
  require(a + margin + 1 <= b, "verify_nested: margin leaves nothing to compare");

  IdentityReport rep;
  rep.tolerance = temp == Temperature::zero ? kIdentityTolZero : kIdentityTolLog;
  rep.compared_first = a + margin + 1;
  rep.compared_last = b;
  const int cnt = w - margin - 1;

  with_policy(temp, [&](auto sr) {
    using SR = decltype(sr);
    Strip<SR> outer = build_strip<SR>(a, wr.v);
    std::vector<Eigen::ArrayXd> nested_rows{outer.i_row(n - 1), wr.v[n].tail(w - 1)};
    Strip<SR> nested = build_strip<SR>(a + 1, nested_rows);

    const Eigen::ArrayXd oi = outer.i_row(n);   // first a+1
    const Eigen::ArrayXd ni = nested.i_row(1);  // first a+2
    const Eigen::ArrayXd oj = outer.j_row(n);   // first a
    const Eigen::ArrayXd nj = nested.j_row(1);  // first a+1
    rep.max_abs_discrepancy =
        std::max(max_abs_diff(oi.segment(margin, cnt), ni.segment(margin - 1, cnt)),
                 max_abs_diff(oj.segment(margin + 1, cnt), nj.segment(margin, cnt)));
    rep.contaminated = wr.contaminated || outer.pin_hits_top(a + margin) ||
                       nested.pin_hits_top(a + margin);
    return 0;
  });
  rep.pass = !rep.contaminated && rep.max_abs_discrepancy <= rep.tolerance;
  return rep;
}

IdentityReport verify_dual_swap(const std::vector<RowSequence>& rows, int k, int n,
                                int margin, Temperature temp) {
  require(k >= 1 && n >= 1, "verify_dual_swap: k and n must be >= 1");
  require(static_cast<int>(rows.size()) == k + n + 1,
          "verify_dual_swap: need exactly k + n + 1 rows");
  require(margin >= 1, "verify_dual_swap: margin must be >= 1");
  std::vector<const RowSequence*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  WorkRows wr = to_work(ptrs, temp, "verify_dual_swap");
  const int a = wr.a, b = wr.b, w = wr.width();
  require(a + margin + 1 <= b, "verify_dual_swap: margin leaves nothing to compare");

  IdentityReport rep;
  rep.tolerance = temp == Temperature::zero ? kIdentityTolZero : kIdentityTolLog;
  rep.compared_first = a + margin + 1;
  rep.compared_last = b;
  const int cnt = w - margin - 1;

  with_policy(temp, [&](auto sr) {
    using SR = decltype(sr);
    Strip<SR> lhs_strip = build_strip<SR>(a, wr.v);

    std::vector<Eigen::ArrayXd> upper(wr.v.begin() + k, wr.v.end());  // Y[0..n]
    Strip<SR> upper_strip = build_strip<SR>(a, upper);

    // Swap (Y[0], Y[1]) for (dual row, departures); levels above stay as-is.
    std::vector<Eigen::ArrayXd> swapped;
    for (int i = 0; i < k; ++i) swapped.push_back(wr.v[i].tail(w - 1));
    swapped.push_back(upper_strip.dual0());
    swapped.push_back(upper_strip.i_row(1));
    for (int m = 2; m <= n; ++m) swapped.push_back(wr.v[k + m].tail(w - 1));
    Strip<SR> rhs_strip = build_strip<SR>(a + 1, swapped);

    const Eigen::ArrayXd lhs = lhs_strip.i_row(k + n);  // first a+1
    const Eigen::ArrayXd rhs = rhs_strip.i_row(k + n);  // first a+2
    rep.max_abs_discrepancy =
        max_abs_diff(lhs.segment(margin, cnt), rhs.segment(margin - 1, cnt));
    // The inner strip's own left edge feeds rhs only at columns the margin
    // absorbs, so it carries no pin check of its own.
    rep.contaminated = wr.contaminated || lhs_strip.pin_hits_top(a + margin) ||
                       rhs_strip.pin_hits_top(a + margin);
    return 0;
  });
  rep.pass = !rep.contaminated && rep.max_abs_discrepancy <= rep.tolerance;
  return rep;
}

}  // namespace kpz
