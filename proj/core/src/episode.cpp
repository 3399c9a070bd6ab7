#include "auxss/episode.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "auxss/errors.hpp"

namespace auxss {

EpisodeResult train_for_one_episode(LavaBridge& env, const State& s0, SacLearner& learner, ReplayBuffer& buffer,
                                    Rng& action_rng, Rng& update_rng) {
  env.reset_to(s0);
  const auto batch = static_cast<std::size_t>(learner.config().batch_size);
  EpisodeResult result;
  for (;;) {
    const State s = env.state();
    const Action a = learner.act(s, true, action_rng);
    const StepResult step = env.step(a);
    Transition t;
    t.state = s;
    t.action = a;
    t.reward = step.reward;
    t.next_state = step.next_state;
    t.cause = step.cause;
    t.done = step.cause == Cause::Goal || step.cause == Cause::Lava;
    buffer.push(t);

    ++result.length;
    result.undiscounted_return += step.reward;
    if (buffer.online_size() >= batch) {
      for (int g = 0; g < learner.config().gradient_steps; ++g) learner.update(buffer, update_rng);
    }
    if (step.terminated) {
      result.cause = step.cause;
      return result;
    }
  }
}

State jsrl_start_state(const DemoStates& demo, std::int64_t t, std::int64_t t_max, const LavaBridge& env,
                       Rng& rng) {
  if (t_max <= 0 || t >= t_max) return env.sample_start(StartDistribution::P0, rng);
  if (demo.empty()) throw ConfigError("jump-start schedule needs demonstration states");
  if (demo.trajectory.size() != demo.states.size()) {
    throw ConfigError("jump-start schedule needs trajectory ids for every demo state");
  }
  std::map<int, std::vector<std::size_t>> by_trajectory;
  for (std::size_t j = 0; j < demo.size(); ++j) by_trajectory[demo.trajectory[j]].push_back(j);

  std::uniform_int_distribution<std::size_t> pick(0, by_trajectory.size() - 1);
  auto it = by_trajectory.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(pick(rng)));
  const auto& members = it->second;

  const double h = 1.0 - static_cast<double>(std::max<std::int64_t>(t, 0)) / static_cast<double>(t_max);
  const auto last = static_cast<double>(members.size() - 1);
  const auto index = static_cast<std::size_t>(std::floor(h * last));
  return demo.states[members[std::min(index, members.size() - 1)]];
}

}  // namespace auxss
