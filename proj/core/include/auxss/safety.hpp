#pragma once

#include <cstdint>
#include <ostream>

#include "auxss/env.hpp"
#include "auxss/policy.hpp"
#include "auxss/rng.hpp"

namespace auxss {

// Fraction of k-step rollouts from a state that never enter lava.
struct SafetyEstimate {
  double value = 1.0;
  int safe_rollouts = 0;
  int n_rollouts = 0;
  int k = 0;
};

struct SafetyOptions {
  // Count goal terminations as failures too (strict reading of the
  // terminal-state indicator). Off by default: only lava is unsafe.
  bool goal_is_unsafe = false;
};

// Monte Carlo safety of `state` under `policy`: n rollouts of at most k
// steps on a private copy of `env`. Rollout r draws its actions from a
// substream keyed on (one draw from rng, r), so estimates for different k
// share action prefixes. Throws ContractViolation if `state` is terminal
// or k, n < 1.
SafetyEstimate estimate_safety(const LavaBridge& env, const State& state, Policy& policy, int k, int n,
                               Rng& rng, SafetyOptions options = {});

// Exact safety of the uniform policy over a grid x grid action lattice,
// by depth-first enumeration of all (grid^2)^k sequences. Throws
// ConfigError when that count exceeds 1e7.
double brute_force_safety(const LavaBridge& env, const State& state, int k, int grid,
                          SafetyOptions options = {});

// CSV `px,py,omega` over a grid x grid lattice of cell centres at rest,
// uniform-random policy. Lava cells are written as 0.
void write_safety_map(std::ostream& out, const LavaBridge& env, int grid, int k, int n_rollouts,
                      std::uint64_t seed, SafetyOptions options = {});

}  // namespace auxss
