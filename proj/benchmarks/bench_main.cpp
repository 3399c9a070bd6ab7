#include <benchmark/benchmark.h>

#include "auxss/demos.hpp"
#include "auxss/env.hpp"
#include "auxss/policy.hpp"
#include "auxss/replay_buffer.hpp"
#include "auxss/sac.hpp"
#include "auxss/safety.hpp"
#include "auxss/samplers.hpp"

namespace {

using namespace auxss;

void BM_EnvStep(benchmark::State& st) {
  LavaBridge env(EnvConfig{});
  Rng rng(1);
  UniformRandomPolicy policy(env.physics().f_max);
  env.reset_to(env.sample_start(StartDistribution::P0, rng));
  for (auto _ : st) {
    const StepResult r = env.step(policy.act(env.state(), rng));
    if (r.terminated) env.reset_to(env.sample_start(StartDistribution::P0, rng));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_EnvStep);

void BM_SacUpdate(benchmark::State& st) {
  EnvConfig env_cfg;
  LavaBridge env(env_cfg);
  Rng rng(2);
  ReplayBuffer buffer(10000);
  UniformRandomPolicy policy(env_cfg.physics.f_max);
  env.reset_to(env.sample_start(StartDistribution::P0, rng));
  for (int i = 0; i < 5000; ++i) {
    const State s = env.state();
    const Action a = policy.act(s, rng);
    const StepResult r = env.step(a);
    buffer.push({s, a, r.reward, r.next_state, r.cause == Cause::Goal || r.cause == Cause::Lava, r.cause});
    if (r.terminated) env.reset_to(env.sample_start(StartDistribution::P0, rng));
  }
  LearnerConfig cfg;
  cfg.batch_size = static_cast<int>(st.range(0));
  SacLearner learner(cfg, env_cfg, rng);
  for (auto _ : st) benchmark::DoNotOptimize(learner.update(buffer, rng));
}
BENCHMARK(BM_SacUpdate)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SacAct(benchmark::State& st) {
  EnvConfig env_cfg;
  Rng rng(3);
  SacLearner learner(LearnerConfig{}, env_cfg, rng);
  const State s{{2.0, 3.0}, {0.1, -0.2}};
  for (auto _ : st) benchmark::DoNotOptimize(learner.act(s, true, rng));
}
BENCHMARK(BM_SacAct);

void BM_SafetyEstimate(benchmark::State& st) {
  LavaBridge env(EnvConfig{});
  UniformRandomPolicy policy(env.physics().f_max);
  Rng rng(4);
  const State s{{5.0, 5.0}, {0.0, 0.0}};
  for (auto _ : st) benchmark::DoNotOptimize(estimate_safety(env, s, policy, 4, 64, rng));
}
BENCHMARK(BM_SafetyEstimate);

void BM_AuxSSUpdate(benchmark::State& st) {
  LavaBridge env(EnvConfig{});
  const DemoArchive archive = generate_demos(env, 500, 5);
  const DemoStates demo = subsample_states(archive, static_cast<std::size_t>(st.range(0)), 6);
  const SamplerConfig cfg;
  SamplerWeights w = init_weights(demo);
  Rng rng(7);
  std::uniform_int_distribution<int> len(1, 500);
  for (auto _ : st) {
    const std::size_t i = sample_index(w, rng);
    w = update_auxss(std::move(w), i, len(rng), 500, demo, cfg);
    benchmark::DoNotOptimize(w.norm);
  }
}
BENCHMARK(BM_AuxSSUpdate)->Arg(150)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
