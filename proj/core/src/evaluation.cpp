#include "auxss/evaluation.hpp"

#include "auxss/errors.hpp"

namespace auxss {

EvalResult evaluate(Policy& policy, const EnvConfig& env_config, StartDistribution which, int n_episodes,
                    double gamma, std::uint64_t seed) {
  if (n_episodes < 1) throw ConfigError("evaluation needs at least one episode");
  LavaBridge env(env_config);
  Rng start_rng(derive_seed(seed, Stream::Env, 0));
  Rng policy_rng(derive_seed(seed, Stream::LearnerNoise, 0));
  EvalResult out;
  out.episodes = n_episodes;
  double return_sum = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    env.reset_to(env.sample_start(which, start_rng));
    policy.begin_episode(static_cast<std::size_t>(e));
    double discount = 1.0;
    double ret = 0.0;
    for (;;) {
      const StepResult r = env.step(policy.act(env.state(), policy_rng));
      ret += discount * r.reward;
      discount *= gamma;
      if (r.terminated) {
        if (r.cause == Cause::Goal) ++out.successes;
        break;
      }
    }
    return_sum += ret;
  }
  out.success_rate = static_cast<double>(out.successes) / n_episodes;
  out.mean_return = return_sum / n_episodes;
  return out;
}

}  // namespace auxss
