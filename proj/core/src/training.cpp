#include "auxss/training.hpp"

#include <array>
#include <cmath>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"
#include "auxss/evaluation.hpp"
#include "auxss/metrics.hpp"

namespace auxss {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethodNames{{
    {Method::AuxSS, "auxss"},
    {Method::UniformSS, "uniform_ss"},
    {Method::GoalDistSS, "goaldist_ss"},
    {Method::OmegaSS, "omega_ss"},
    {Method::SacP0, "sac_p0"},
    {Method::HySAC, "hysac"},
    {Method::HySACAuxSS, "hysac_auxss"},
    {Method::JSRL, "jsrl"},
}};

SamplerKind sampler_kind_for(Method m) {
  switch (m) {
    case Method::UniformSS:
      return SamplerKind::Uniform;
    case Method::GoalDistSS:
      return SamplerKind::GoalDist;
    case Method::OmegaSS:
      return SamplerKind::OmegaSS;
    default:
      return SamplerKind::AuxSS;
  }
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  return "?";
}

Method method_from_string(std::string_view text) {
  for (const auto& [method, name] : kMethodNames)
    if (name == text) return method;
  throw ConfigError("unknown method '" + std::string(text) +
                    "' (auxss, uniform_ss, goaldist_ss, omega_ss, sac_p0, hysac, hysac_auxss, jsrl)");
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& entry : kMethodNames) out.push_back(entry.first);
  return out;
}

bool uses_start_sampler(Method m) {
  return m == Method::AuxSS || m == Method::UniformSS || m == Method::GoalDistSS || m == Method::OmegaSS ||
         m == Method::HySACAuxSS;
}

bool uses_demo_prefill(Method m) { return m == Method::HySAC || m == Method::HySACAuxSS; }

bool needs_demos(Method m) { return m != Method::SacP0; }

RunConfig RunConfig::from_config(const KeyValueConfig& kv) {
  RunConfig c;
  c.method = method_from_string(kv.get_string("run.method", std::string(to_string(c.method))));
  c.label = kv.get_string("run.label", "");
  c.t_max = kv.get_int("run.t_max", c.t_max);
  const auto seed = kv.get_int("run.seed", static_cast<std::int64_t>(c.seed));
  if (seed < 0) throw ConfigError("run.seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.eval_interval = static_cast<int>(kv.get_int("run.eval_interval", c.eval_interval));
  c.eval_episodes = static_cast<int>(kv.get_int("run.eval_episodes", c.eval_episodes));
  const auto cap = kv.get_int("run.buffer_capacity", static_cast<std::int64_t>(c.buffer_capacity));
  const auto demo_n = kv.get_int("run.demo_transitions", static_cast<std::int64_t>(c.demo_transitions));
  const auto subset = kv.get_int("run.demo_subset", static_cast<std::int64_t>(c.demo_subset));
  if (cap < 1 || demo_n < 1 || subset < 0) {
    throw ConfigError("run.buffer_capacity and run.demo_transitions must be positive, run.demo_subset >= 0");
  }
  c.buffer_capacity = static_cast<std::size_t>(cap);
  c.demo_transitions = static_cast<std::size_t>(demo_n);
  c.demo_subset = static_cast<std::size_t>(subset);
  c.demo_path = kv.get_string("run.demo_path", "");
  if (kv.has("run.demo_seed")) {
    const auto ds = kv.get_int("run.demo_seed", 0);
    if (ds < 0) throw ConfigError("run.demo_seed must be non-negative");
    c.demo_seed = static_cast<std::uint64_t>(ds);
  }
  c.env = EnvConfig::from_config(kv);
  c.sampler = SamplerConfig::from_config(kv);
  c.learner = LearnerConfig::from_config(kv);
  c.expert = ExpertConfig::from_config(kv);
  kv.require_all_consumed();
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (t_max < 0) throw ConfigError("run.t_max must be >= 0");
  if (eval_interval < 0) throw ConfigError("run.eval_interval must be >= 0");
  if (eval_interval > 0 && eval_episodes < 1) throw ConfigError("run.eval_episodes must be >= 1");
  if (buffer_capacity < 1) throw ConfigError("run.buffer_capacity must be >= 1");
  if (uses_demo_prefill(method) && demo_transitions >= buffer_capacity) {
    throw ConfigError("demo prefill must leave room for online data in the buffer");
  }
  env.validate();
  sampler.validate();
  learner.validate();
}

DemoArchive demos_for(const RunConfig& cfg) {
  LavaBridge env(cfg.env);
  if (!cfg.demo_path.empty()) return load_archive(std::filesystem::path(cfg.demo_path), env);
  const std::uint64_t seed = cfg.demo_seed ? *cfg.demo_seed : derive_seed(cfg.seed, Stream::Demo);
  return generate_demos(env, cfg.demo_transitions, seed, cfg.expert);
}

RunResult run_training(const RunConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  const std::uint64_t master = cfg.seed;
  LavaBridge env(cfg.env);
  Rng start_rng = make_stream(master, Stream::Env);
  Rng sampler_rng = make_stream(master, Stream::Sampler);
  Rng init_rng = make_stream(master, Stream::LearnerInit);
  Rng noise_rng = make_stream(master, Stream::LearnerNoise);
  Rng update_rng = make_stream(master, Stream::LearnerUpdate);

  RunResult out;
  if (needs_demos(cfg.method)) out.demos = demos_for(cfg);

  DemoStates jsrl_states;
  if (uses_start_sampler(cfg.method)) {
    const std::size_t total = out.demos.transition_count();
    const std::size_t m = cfg.demo_subset == 0 ? total : std::min(cfg.demo_subset, total);
    DemoStates subset = subsample_states(out.demos, m, derive_seed(master, Stream::Subset));
    SamplerConfig scfg = cfg.sampler;
    scfg.kind = sampler_kind_for(cfg.method);
    Rng safety_rng = make_stream(master, Stream::Safety);
    out.sampler.emplace(scfg, std::move(subset), env, safety_rng);
  } else if (cfg.method == Method::JSRL) {
    jsrl_states = out.demos.states();
  }

  out.buffer.emplace(cfg.buffer_capacity);
  if (uses_demo_prefill(cfg.method)) {
    const auto demo = out.demos.transitions();
    out.buffer->prefill_demo(demo);
  }
  out.learner.emplace(cfg.learner, cfg.env, init_rng);

  if (hooks.metrics) write_metrics_header(*hooks.metrics);

  int checkpoint = 0;
  auto run_eval = [&](std::int64_t t) {
    GreedyPolicy greedy(*out.learner);
    const auto id = evaluate(greedy, cfg.env, StartDistribution::P0, cfg.eval_episodes, cfg.learner.gamma,
                             derive_seed(master, Stream::Eval, 2 * static_cast<std::uint64_t>(checkpoint)));
    const auto ood = evaluate(greedy, cfg.env, StartDistribution::OOD, cfg.eval_episodes, cfg.learner.gamma,
                              derive_seed(master, Stream::Eval, 2 * static_cast<std::uint64_t>(checkpoint) + 1));
    EvalReport r{checkpoint, t, id.success_rate, ood.success_rate, id.mean_return, ood.mean_return};
    ++checkpoint;
    out.evals.push_back(r);
    if (hooks.on_eval) hooks.on_eval(r);
    return r;
  };
  auto emit = [&](MetricsRow row) {
    if (hooks.metrics) {
      write_metrics_row(*hooks.metrics, row);
      if (row.eval) hooks.metrics->flush();
    }
    out.rows.push_back(std::move(row));
  };

  const bool evaluating = cfg.eval_interval > 0;
  if (evaluating) emit(MetricsRow{0, 0, std::nullopt, run_eval(0)});

  const int horizon = cfg.env.horizon;
  std::int64_t t = 0;
  std::int64_t episode = 0;
  std::int64_t next_eval = cfg.eval_interval;
  while (t < cfg.t_max) {
    std::size_t index = 0;
    State s0;
    if (out.sampler) {
      index = out.sampler->sample(sampler_rng, t, cfg.t_max);
      s0 = out.sampler->state(index);
    } else if (cfg.method == Method::JSRL) {
      s0 = jsrl_start_state(jsrl_states, t, cfg.t_max, env, start_rng);
    } else {
      s0 = env.sample_start(StartDistribution::P0, start_rng);
    }
    const EpisodeResult res = train_for_one_episode(env, s0, *out.learner, *out.buffer, noise_rng, update_rng);
    t += res.length;
    ++episode;
    if (out.sampler) out.sampler->observe(index, res.length, horizon, res.cause);

    MetricsRow row{t, episode, res, std::nullopt};
    if (evaluating && (t >= next_eval || t >= cfg.t_max)) {
      row.eval = run_eval(t);
      while (next_eval <= t) next_eval += cfg.eval_interval;
    }
    emit(std::move(row));
  }
  out.total_steps = t;
  out.episodes = episode;
  if (hooks.metrics) hooks.metrics->flush();
  return out;
}

}  // namespace auxss
