#include "kpz/field.hpp"

namespace kpz {

WeightField make_field(const FieldRecipe& recipe, const Window& window,
                       const rng::SeedSpec& seed) {
  Eigen::ArrayXXd values(window.width(), window.height());
  for (int y = window.y0; y <= window.y1; ++y) {
    const Law& law = recipe.row_law(y);
    const std::uint64_t rk = rng::row_key(seed, y);
    for (int x = window.x0; x <= window.x1; ++x) {
      rng::Stream cell(rng::cell_key(rk, x));
      values(x - window.x0, y - window.y0) = sample_one(law, cell);
    }
  }
  return WeightField(window, recipe, seed, std::move(values));
}

double field_value_at(const FieldRecipe& recipe, const rng::SeedSpec& seed, int x, int y) {
  rng::Stream cell(rng::cell_key(rng::row_key(seed, y), x));
  return sample_one(recipe.row_law(y), cell);
}

}  // namespace kpz
