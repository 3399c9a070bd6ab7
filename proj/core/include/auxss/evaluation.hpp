#pragma once

#include <cstdint>

#include "auxss/env.hpp"
#include "auxss/policy.hpp"

namespace auxss {

struct EvalResult {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;  // successes / episodes; success means cause Goal
  double mean_return = 0.0;   // mean over episodes of sum_t gamma^t r_t
};

// Rolls `policy` for n episodes from `which` on a private environment.
// Start states and any policy randomness come from `seed` only. Throws
// ConfigError for n < 1.
EvalResult evaluate(Policy& policy, const EnvConfig& env, StartDistribution which, int n_episodes, double gamma,
                    std::uint64_t seed);

}  // namespace auxss
