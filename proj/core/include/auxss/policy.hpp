#pragma once

#include <cstddef>
#include <vector>

#include "auxss/env.hpp"
#include "auxss/rng.hpp"

namespace auxss {

// Anything that picks actions during a rollout. begin_episode() is called
// once per rollout before the first act(), with the rollout's index.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode(std::size_t /*index*/) {}
  virtual Action act(const State& state, Rng& rng) = 0;
};

// Independent uniform draws from [-f_max, f_max]^2.
class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(double f_max) : f_max_(f_max) {}
  Action act(const State& state, Rng& rng) override;

 private:
  double f_max_;
};

// i-th of `grid` evenly spaced values on [-f_max, f_max].
double grid_value(int i, int grid, double f_max);

// All grid x grid force vectors, x-major.
std::vector<Action> action_grid(double f_max, int grid);

// Uniform draws from the finite action grid.
class GridRandomPolicy final : public Policy {
 public:
  GridRandomPolicy(double f_max, int grid);
  Action act(const State& state, Rng& rng) override;

 private:
  std::vector<Action> actions_;
};

// Deterministically walks every action sequence on the grid: rollout r,
// step t plays grid action number (r / (grid^2)^t) mod grid^2. Running
// (grid^2)^k rollouts of length k visits each sequence exactly once.
class GridEnumerationPolicy final : public Policy {
 public:
  GridEnumerationPolicy(double f_max, int grid);
  void begin_episode(std::size_t index) override;
  Action act(const State& state, Rng& rng) override;

 private:
  std::vector<Action> actions_;
  std::size_t remaining_ = 0;
};

}  // namespace auxss
