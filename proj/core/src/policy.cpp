#include "auxss/policy.hpp"

#include "auxss/errors.hpp"

namespace auxss {

Action UniformRandomPolicy::act(const State&, Rng& rng) {
  std::uniform_real_distribution<double> u(-f_max_, f_max_);
  const double fx = u(rng);
  const double fy = u(rng);
  return Action{{fx, fy}};
}

double grid_value(int i, int grid, double f_max) {
  return -f_max + 2.0 * f_max * static_cast<double>(i) / static_cast<double>(grid - 1);
}

std::vector<Action> action_grid(double f_max, int grid) {
  if (grid < 2) throw ConfigError("action grid needs at least 2 points per axis");
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(grid * grid));
  for (int ix = 0; ix < grid; ++ix) {
    for (int iy = 0; iy < grid; ++iy) {
      out.push_back(Action{{grid_value(ix, grid, f_max), grid_value(iy, grid, f_max)}});
    }
  }
  return out;
}

GridRandomPolicy::GridRandomPolicy(double f_max, int grid) : actions_(action_grid(f_max, grid)) {}

Action GridRandomPolicy::act(const State&, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, actions_.size() - 1);
  return actions_[pick(rng)];
}

GridEnumerationPolicy::GridEnumerationPolicy(double f_max, int grid)
    : actions_(action_grid(f_max, grid)) {}

void GridEnumerationPolicy::begin_episode(std::size_t index) { remaining_ = index; }

Action GridEnumerationPolicy::act(const State&, Rng&) {
  const std::size_t digit = remaining_ % actions_.size();
  remaining_ /= actions_.size();
  return actions_[digit];
}

}  // namespace auxss
