#pragma once

#include <cstdint>

#include "auxss/env.hpp"
#include "auxss/replay_buffer.hpp"
#include "auxss/rng.hpp"
#include "auxss/sac.hpp"
#include "auxss/samplers.hpp"

namespace auxss {

struct EpisodeResult {
  int length = 0;
  double undiscounted_return = 0.0;
  Cause cause = Cause::None;
};

// Resets `env` to s0 and rolls the stochastic policy until termination or
// the horizon, storing every transition. After each environment step it
// runs cfg.gradient_steps updates, once the buffer holds at least a batch
// of online transitions.
EpisodeResult train_for_one_episode(LavaBridge& env, const State& s0, SacLearner& learner, ReplayBuffer& buffer,
                                    Rng& action_rng, Rng& update_rng);

// Reset-based jump-start schedule: a uniformly chosen demo trajectory,
// entered at fraction h = 1 - t / T_max of its length (late states first,
// receding towards its start). At t >= T_max the start comes from p0.
State jsrl_start_state(const DemoStates& demo, std::int64_t t, std::int64_t t_max, const LavaBridge& env,
                       Rng& rng);

}  // namespace auxss
