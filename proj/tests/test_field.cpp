#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "kpz/field.hpp"

using namespace kpz;

TEST_CASE("make_field is deterministic") {
  FieldRecipe recipe;
  recipe.bulk = Law::exponential(0.6);
  const Window win{-2, 5, -1, 4};
  const WeightField a = make_field(recipe, win, {21, 0});
  const WeightField b = make_field(recipe, win, {21, 0});
  CHECK(a.values().rows() == win.width());
  CHECK(a.values().cols() == win.height());
  CHECK((a.values() == b.values()).all());
  const WeightField c = make_field(recipe, win, {21, 1});
  CHECK((a.values() != c.values()).any());
}

TEST_CASE("cells are pure functions of coordinates") {
  // Enlarging the window in any direction, including past the origin, leaves
  // every overlapping cell bit-identical.
  FieldRecipe recipe;
  recipe.bulk = Law::inverse_gamma(0.9);
  const rng::SeedSpec seed{22, 3};
  const Window small{0, 6, 0, 6};
  const Window big{-4, 11, -3, 9};
  const WeightField inner = make_field(recipe, small, seed);
  const WeightField outer = make_field(recipe, big, seed);
  for (int y = small.y0; y <= small.y1; ++y)
    for (int x = small.x0; x <= small.x1; ++x) CHECK(inner(x, y) == outer(x, y));
}

TEST_CASE("field_value_at matches the materialized field") {
  FieldRecipe recipe;
  recipe.bulk = Law::gamma(1.4);
  recipe.row_overrides[0] = Law::exponential(0.5);
  const rng::SeedSpec seed{23, 0};
  const Window win{-3, 3, -2, 2};
  const WeightField f = make_field(recipe, win, seed);
  for (int y = win.y0; y <= win.y1; ++y)
    for (int x = win.x0; x <= win.x1; ++x)
      CHECK(f(x, y) == field_value_at(recipe, seed, x, y));
}

TEST_CASE("row overrides change only their row") {
  FieldRecipe plain;
  plain.bulk = Law::exponential(1.0);
  FieldRecipe boundary = plain;
  boundary.row_overrides[0] = Law::exponential(0.4);
  boundary.row_overrides[2] = Law::exponential(2.5);

  const rng::SeedSpec seed{24, 7};
  const Window win{0, 9, 0, 4};
  const WeightField base = make_field(plain, win, seed);
  const WeightField mixed = make_field(boundary, win, seed);
  for (int y = win.y0; y <= win.y1; ++y) {
    const bool overridden = y == 0 || y == 2;
    for (int x = win.x0; x <= win.x1; ++x) {
      if (overridden)
        CHECK(mixed(x, y) != base(x, y));
      else
        CHECK(mixed(x, y) == base(x, y));
    }
  }
  // Overridden exponential rows share the underlying uniform draw, so the
  // rate-0.4 row is the rate-1 row scaled by 1/0.4 exactly.
  for (int x = win.x0; x <= win.x1; ++x) CHECK(mixed(x, 0) == base(x, 0) / 0.4);
}

TEST_CASE("row law dispatch") {
  FieldRecipe recipe;
  recipe.bulk = Law::gamma(2.0);
  recipe.row_overrides[-1] = Law::exponential(0.3);
  CHECK(recipe.row_law(-1) == Law::exponential(0.3));
  CHECK(recipe.row_law(0) == Law::gamma(2.0));
  CHECK(recipe.row_law(57) == Law::gamma(2.0));
}

TEST_CASE("accessors agree") {
  FieldRecipe recipe;
  recipe.bulk = Law::exponential(0.8);
  const Window win{2, 7, 1, 5};
  const WeightField f = make_field(recipe, win, {25, 0});
  CHECK(f.window() == win);
  CHECK((f.seed() == rng::SeedSpec{25, 0}));
  CHECK((f.at({4, 3}) == f(4, 3)));
  const auto r = f.row(3);
  CHECK(r.size() == win.width());
  for (int x = win.x0; x <= win.x1; ++x) CHECK(r(x - win.x0) == f(x, 3));
}
