#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <vector>

#include "kpz/field.hpp"
#include "kpz/lpp.hpp"
#include "kpz/polymer.hpp"
#include "kpz/rng.hpp"
#include "support/enumeration.hpp"

using namespace kpz;
using testsupport::enumerate_logz;
using testsupport::rel_gap;

namespace {

WeightField fixed_field(Window win, std::vector<double> cells) {
  Eigen::ArrayXXd values(win.width(), win.height());
  int i = 0;
  for (int y = 0; y < win.height(); ++y)
    for (int x = 0; x < win.width(); ++x) values(x, y) = cells[i++];
  return WeightField(win, FieldRecipe{}, rng::SeedSpec{}, std::move(values));
}

}  // namespace

TEST_CASE("log partition table matches exhaustive path enumeration") {
  rng::Stream geom(2301);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(geom.next_bits() % 7);
    const int h = 1 + static_cast<int>(geom.next_bits() % 7);
    const int x0 = static_cast<int>(geom.next_bits() % 11) - 5;
    const int y0 = static_cast<int>(geom.next_bits() % 11) - 5;
    const Window win{x0, x0 + w - 1, y0, y0 + h - 1};

    FieldRecipe recipe;
    recipe.bulk = trial % 2 ? Law::inverse_gamma(0.7) : Law::inverse_gamma(1.0);
    const WeightField field =
        make_field(recipe, win, {4500, static_cast<std::uint64_t>(trial)});
    const LogZTable table = logz_table(field, {x0, y0});

    for (int y = y0; y <= win.y1; ++y)
      for (int x = x0; x <= win.x1; ++x) {
        const double want = enumerate_logz(field, {x0, y0}, {x, y});
        worst = std::max(worst, rel_gap(table.logz(x, y), want));
      }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("worked 2x2 instance sums to 48") {
  const WeightField field = fixed_field({0, 1, 0, 1}, {1, 2, 4, 8});
  const LogZTable table = logz_table(field, {0, 0});
  CHECK(table.logz(1, 1) == doctest::Approx(std::log(48.0)).epsilon(1e-12));
  CHECK(table.logz(0, 1) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(table.logz(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("tempered log tables interpolate toward the passage value") {
  // Fix a positive 6x6 field; at temperature T the tempered free energy
  // T * log sum_paths exp(S(path) / T) decreases to max_path S as T drops.
  const Window win{0, 5, 0, 5};
  const WeightField base = make_field(FieldRecipe{}, win, {4600, 0});
  Eigen::ArrayXXd logs = base.values().log();

  const WeightField additive(win, FieldRecipe{}, rng::SeedSpec{}, Eigen::ArrayXXd(logs));
  const double ground = lpp_table(additive, {0, 0}).value(5, 5);

  std::map<double, double> tempered;
  for (double T : {1.0, 0.3, 0.1}) {
    const WeightField scaled(win, FieldRecipe{}, rng::SeedSpec{},
                             Eigen::ArrayXXd((logs / T).exp()));
    tempered[T] = T * logz_table(scaled, {0, 0}).logz(5, 5);
  }
  CHECK(tempered[1.0] >= tempered[0.3] - 1e-6);
  CHECK(tempered[0.3] >= tempered[0.1] - 1e-6);
  CHECK(tempered[0.1] >= ground - 1e-6);
  CHECK(tempered[1.0] >= ground - 1e-9);
}

TEST_CASE("endpoint measure is a probability measure on the full line") {
  const int N = 12;
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(1.0);
  const WeightField field = make_field(recipe, {0, 2 * N, 0, 2 * N}, {4700, 0});
  const EndpointMeasure m = endpoint_measure(field, N);

  CHECK(m.s_lo == -N);
  CHECK(m.s_hi == N);
  CHECK_FALSE(m.clipped);
  CHECK(std::abs(m.probabilities.sum() - 1.0) <= 1e-12);
  CHECK((m.probabilities > 0.0).all());

  // Windowed view agrees with the full measure cell by cell.
  const EndpointMeasure wm = endpoint_measure(field, N, -3, 3);
  for (int s = -3; s <= 3; ++s)
    CHECK(wm.probability_of(s) == m.probability_of(s));
  CHECK(endpoint_measure(field, N, -2 * N, 2 * N).clipped);
}

TEST_CASE("streamed endpoint measure is bit-identical to the materialized one") {
  const int N = 16;
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(1.0);
  const rng::SeedSpec seed{4800, 3};
  const WeightField field = make_field(recipe, {0, 2 * N, 0, 2 * N}, seed);
  const EndpointMeasure a = endpoint_measure(field, N);
  const EndpointMeasure b = endpoint_measure_streamed(recipe, seed, N);

  REQUIRE(a.logweights.size() == b.logweights.size());
  for (int i = 0; i < a.logweights.size(); ++i) {
    CHECK(a.logweights[i] == b.logweights[i]);
    CHECK(a.probabilities[i] == b.probabilities[i]);
  }
  CHECK(a.log_norm == b.log_norm);
}

TEST_CASE("endpoint events floor once and compose exactly") {
  const int N = 10;
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(1.0);
  const WeightField field = make_field(recipe, {0, 2 * N, 0, 2 * N}, {4900, 1});
  const EndpointMeasure m = endpoint_measure(field, N);

  // Width floors once at construction.
  CHECK(quenched_event_probability(m, EndpointEvent::symmetric(2.7)) ==
        quenched_event_probability(m, EndpointEvent::symmetric(2.0)));

  // A symmetric window is the matching one-sided window started at -k.
  for (int k = 0; k <= 4; ++k)
    CHECK(quenched_event_probability(m, EndpointEvent::symmetric(k)) ==
          quenched_event_probability(m, EndpointEvent::one_sided(-k, 2 * k)));

  // Monotone in the width, total mass 1 at full width.
  double prev = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double p = quenched_event_probability(m, EndpointEvent::symmetric(k));
    CHECK(p >= prev);
    prev = p;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));

  // Negative width is the empty event.
  CHECK(quenched_event_probability(m, EndpointEvent::symmetric(-1.0)) == 0.0);
}

TEST_CASE("quenched path sampler tracks endpoint and weights") {
  const Window win{0, 4, 0, 4};
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(1.0);
  const WeightField field = make_field(recipe, win, {5000, 0});
  const LogZTable table = logz_table(field, {0, 0});

  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const QuenchedPath p = sample_quenched_path(table, field, {4, 4}, {5001, rep});
    REQUIRE(p.vertices.size() == 9);
    CHECK(p.vertices.front() == LatticePoint{0, 0});
    CHECK(p.vertices.back() == LatticePoint{4, 4});
    double lw = 0.0;
    for (const auto& v : p.vertices) lw += std::log(field.at(v));
    CHECK(p.log_weight == doctest::Approx(lw).epsilon(1e-12));
  }
}

TEST_CASE("quenched path sampler matches the explicit path measure") {
  // 3x3 window: six monotone paths from (0,0) to (2,2); the sampled path
  // frequencies must match the quenched probabilities.
  const Window win{0, 2, 0, 2};
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(1.0);
  const WeightField field = make_field(recipe, win, {5100, 0});
  const LogZTable table = logz_table(field, {0, 0});

  std::map<std::vector<int>, double> want;  // step pattern -> probability
  testsupport::for_each_path({0, 0}, {2, 2}, [&](const std::vector<int>& steps) {
    double lw = std::log(field.at({0, 0}));
    LatticePoint z{0, 0};
    for (int st : steps) {
      z = st ? z + e1 : z + e2;
      lw += std::log(field.at(z));
    }
    want[steps] = std::exp(lw - table.logz(2, 2));
  });

  const int n = 100000;
  std::map<std::vector<int>, int> got;
  for (int rep = 0; rep < n; ++rep) {
    const QuenchedPath p =
        sample_quenched_path(table, field, {2, 2}, {5101, static_cast<std::uint64_t>(rep)});
    std::vector<int> steps;
    for (std::size_t i = 1; i < p.vertices.size(); ++i)
      steps.push_back(p.vertices[i].x > p.vertices[i - 1].x ? 1 : 0);
    got[steps] += 1;
  }

  double total = 0.0;
  for (const auto& [steps, prob] : want) {
    total += prob;
    const double freq = static_cast<double>(got[steps]) / n;
    const double se = std::sqrt(std::max(prob * (1.0 - prob), 1e-12) / n);
    CHECK(std::abs(freq - prob) <= 5.0 * se + 1e-6);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("log tables are stable under window extension") {
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(0.9);
  const rng::SeedSpec seed{5200, 0};
  const WeightField small = make_field(recipe, {0, 9, 0, 9}, seed);
  const WeightField large = make_field(recipe, {0, 19, 0, 19}, seed);
  const LogZTable ts = logz_table(small, {0, 0});
  const LogZTable tl = logz_table(large, {0, 0});
  for (int y = 0; y <= 9; ++y)
    for (int x = 0; x <= 9; ++x) CHECK(ts.logz(x, y) == tl.logz(x, y));
}

TEST_CASE("boundary log table mirrors the zero-temperature layout") {
  // Two-row instance in the multiplicative domain.
  const RowSequence boundary{0, (Eigen::ArrayXd(3) << 2.0, 1.5, 0.5).finished()};
  Eigen::ArrayXXd bulk_values(3, 1);
  bulk_values << 1.0, 0.25, 2.0;
  const WeightField bulk(Window{0, 2, 1, 1}, FieldRecipe{}, rng::SeedSpec{},
                         std::move(bulk_values));
  const LogZTable table = boundary_logz_table(boundary, bulk, 0, 0);

  // Level 0 carries the log prefix profile.
  CHECK(table.logz(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(table.logz(2, 0) == doctest::Approx(std::log(2.0 * 1.5 * 0.5)).epsilon(1e-12));

  // Level 1 sums products over entry columns: Z(j,1) = sum_i prod(boundary
  // up to i) * prod(services i..j).
  double z0 = 2.0 * 1.0;
  CHECK(table.logz(0, 1) == doctest::Approx(std::log(z0)).epsilon(1e-12));
  double z1 = 2.0 * 1.0 * 0.25 + 2.0 * 1.5 * 0.25;
  CHECK(table.logz(1, 1) == doctest::Approx(std::log(z1)).epsilon(1e-12));
  double z2 = z1 * 2.0 + 2.0 * 1.5 * 0.5 * 2.0;
  CHECK(table.logz(2, 1) == doctest::Approx(std::log(z2)).epsilon(1e-12));
}
