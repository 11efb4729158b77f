#pragma once

#include <Eigen/Dense>
#include <map>

#include "kpz/lattice.hpp"
#include "kpz/laws.hpp"
#include "kpz/rng.hpp"

namespace kpz {

// Per-row law assignment: a default bulk law plus row overrides (used for
// boundary rows with their own rates/shapes).
struct FieldRecipe {
  Law bulk = Law::exponential(1.0);
  std::map<int, Law> row_overrides;

  const Law& row_law(int row) const {
    auto it = row_overrides.find(row);
    return it == row_overrides.end() ? bulk : it->second;
  }
};

// An i.i.d.-by-cell weight field on a window.  Cell (x, y) is a pure function
// of (seed, y, x), so regeneration is bit-exact and enlarging the window in
// any direction leaves overlapping values unchanged.
class WeightField {
 public:
  WeightField() = default;
  WeightField(Window win, FieldRecipe recipe, rng::SeedSpec seed, Eigen::ArrayXXd values)
      : win_(win), recipe_(std::move(recipe)), seed_(seed), values_(std::move(values)) {}

  const Window& window() const { return win_; }
  const FieldRecipe& recipe() const { return recipe_; }
  const rng::SeedSpec& seed() const { return seed_; }

  double operator()(int x, int y) const { return values_(x - win_.x0, y - win_.y0); }
  double at(LatticePoint p) const { return (*this)(p.x, p.y); }

  // Lattice row y as a contiguous array over x in [win.x0, win.x1].
  auto row(int y) const { return values_.col(y - win_.y0); }

  const Eigen::ArrayXXd& values() const { return values_; }

 private:
  Window win_;
  FieldRecipe recipe_;
  rng::SeedSpec seed_;
  Eigen::ArrayXXd values_;  // (width, height), entry (x - x0, y - y0)
};

WeightField make_field(const FieldRecipe& recipe, const Window& window,
                       const rng::SeedSpec& seed);

// The value make_field would put at (x, y) without materializing a field.
double field_value_at(const FieldRecipe& recipe, const rng::SeedSpec& seed, int x, int y);

}  // namespace kpz
