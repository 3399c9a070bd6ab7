#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "auxss/demos.hpp"
#include "auxss/env.hpp"
#include "auxss/episode.hpp"
#include "auxss/replay_buffer.hpp"
#include "auxss/sac.hpp"
#include "auxss/samplers.hpp"

namespace auxss {

class KeyValueConfig;

enum class Method { AuxSS, UniformSS, GoalDistSS, OmegaSS, SacP0, HySAC, HySACAuxSS, JSRL };

std::string_view to_string(Method m);
Method method_from_string(std::string_view text);
std::vector<Method> all_methods();

bool uses_start_sampler(Method m);
bool uses_demo_prefill(Method m);
bool needs_demos(Method m);

struct RunConfig {
  Method method = Method::AuxSS;
  std::string label;  // defaults to the method name
  std::int64_t t_max = 150000;
  std::uint64_t seed = 1;
  int eval_interval = 5000;  // env steps between checkpoints; 0 disables evaluation
  int eval_episodes = 20;    // per start distribution
  std::size_t buffer_capacity = 10000;
  std::string demo_path;     // empty: generate in memory
  std::size_t demo_transitions = 500;
  std::optional<std::uint64_t> demo_seed;  // default derived from `seed`
  std::size_t demo_subset = 150;           // 0: whole archive
  EnvConfig env;
  SamplerConfig sampler;
  LearnerConfig learner;
  ExpertConfig expert;

  // Reads every namespace and rejects unknown keys.
  static RunConfig from_config(const KeyValueConfig& kv);
  void validate() const;
  std::string name() const { return label.empty() ? std::string(to_string(method)) : label; }
};

struct EvalReport {
  int checkpoint = 0;
  std::int64_t step = 0;  // environment steps when evaluated
  double id_success = 0.0;
  double ood_success = 0.0;
  double id_return = 0.0;
  double ood_return = 0.0;
};

// One line of the metrics CSV. Row 0 is the initial evaluation; each
// later row is one training episode, optionally followed by a checkpoint.
struct MetricsRow {
  std::int64_t step = 0;
  std::int64_t episode = 0;
  std::optional<EpisodeResult> result;
  std::optional<EvalReport> eval;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  std::vector<EvalReport> evals;
  std::int64_t total_steps = 0;
  std::int64_t episodes = 0;
  DemoArchive demos;
  std::optional<ReplayBuffer> buffer;
  std::optional<SacLearner> learner;
  std::optional<StartStateSampler> sampler;
};

struct RunHooks {
  std::ostream* metrics = nullptr;  // CSV, flushed at every checkpoint
  std::function<void(const EvalReport&)> on_eval;
};

// The online loop: pick a start state (auxiliary sampler, p0 or jump-start
// schedule), train one episode from it, advance t by its length, feed the
// length back to the sampler, evaluate on schedule; stop once t >= T_max.
RunResult run_training(const RunConfig& cfg, const RunHooks& hooks = {});

// Demo archive a run would use (loaded or generated).
DemoArchive demos_for(const RunConfig& cfg);

}  // namespace auxss
