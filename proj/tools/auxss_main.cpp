#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "auxss/config.hpp"
#include "auxss/demos.hpp"
#include "auxss/errors.hpp"
#include "auxss/evaluation.hpp"
#include "auxss/metrics.hpp"
#include "auxss/safety.hpp"
#include "auxss/sweep.hpp"
#include "auxss/training.hpp"

namespace fs = std::filesystem;
using namespace auxss;

namespace {

KeyValueConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  KeyValueConfig kv = path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
    kv.set(trim(std::string_view(o).substr(0, eq)), trim(std::string_view(o).substr(eq + 1)));
  }
  return kv;
}

// Copy of kv without the keys under `prefix`, which the caller handles.
KeyValueConfig without_prefix(const KeyValueConfig& kv, const std::string& prefix) {
  KeyValueConfig out;
  for (const auto& [k, v] : kv.entries())
    if (k.rfind(prefix, 0) != 0) out.set(k, v);
  return out;
}

void open_out(std::ofstream& f, const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  f.open(path, mode);
  if (!f) throw ConfigError("cannot write " + path.string());
}

int cmd_gen_demos(std::size_t n, std::uint64_t seed, const std::string& out, const std::string& config,
                  const std::vector<std::string>& overrides) {
  const KeyValueConfig kv = load_config(config, overrides);
  const EnvConfig env_cfg = EnvConfig::from_config(kv);
  const ExpertConfig expert = ExpertConfig::from_config(kv);
  kv.require_all_consumed();
  const DemoArchive archive = generate_demos(LavaBridge(env_cfg), n, seed, expert);
  std::ofstream f;
  open_out(f, out);
  save_archive(archive, f);
  std::cerr << "wrote " << archive.transition_count() << " transitions from " << archive.trajectories.size()
            << " trajectories to " << out << '\n';
  return 0;
}

int cmd_train(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out_dir,
              const std::vector<std::string>& overrides) {
  KeyValueConfig kv = load_config(config, overrides);
  if (seed) kv.set("run.seed", std::to_string(*seed));
  const RunConfig cfg = RunConfig::from_config(kv);
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  std::ofstream metrics;
  open_out(metrics, dir / "metrics.csv");
  RunHooks hooks;
  hooks.metrics = &metrics;
  hooks.on_eval = [](const EvalReport& e) {
    std::cerr << "step " << e.step << "  id " << e.id_success << "  ood " << e.ood_success << '\n';
  };
  const RunResult result = run_training(cfg, hooks);

  std::ofstream ckpt;
  open_out(ckpt, dir / "checkpoint.bin", std::ios::binary);
  result.learner->save(ckpt);
  if (result.sampler) {
    std::ofstream snap;
    open_out(snap, dir / "sampler.csv");
    result.sampler->write_snapshot(snap);
  }
  std::cerr << cfg.name() << " seed " << cfg.seed << ": " << result.episodes << " episodes, " << result.total_steps
            << " steps\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& dist, int episodes, std::uint64_t seed,
             const std::string& config, const std::vector<std::string>& overrides) {
  const KeyValueConfig kv = load_config(config, overrides);
  const EnvConfig env_cfg = EnvConfig::from_config(kv);
  const LearnerConfig learner_cfg = LearnerConfig::from_config(kv);
  kv.require_all_consumed();
  Rng init(seed);
  SacLearner learner(learner_cfg, env_cfg, init);
  std::ifstream in(checkpoint, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + checkpoint);
  learner.load(in);
  GreedyPolicy policy(learner);
  const auto which = dist == "id" ? StartDistribution::P0 : StartDistribution::OOD;
  const EvalResult r = evaluate(policy, env_cfg, which, episodes, learner_cfg.gamma, seed);
  std::cout << "dist=" << dist << " episodes=" << r.episodes << " successes=" << r.successes
            << " success_rate=" << r.success_rate << " mean_return=" << r.mean_return << '\n';
  return 0;
}

int cmd_sweep(const std::string& config, int seeds, int jobs, const std::string& out_dir,
              const std::vector<std::string>& overrides) {
  const KeyValueConfig kv = load_config(config, overrides);
  const std::string methods = kv.get_string("sweep.methods", "auxss");
  std::vector<RunConfig> configs;
  for (const auto& m : split(methods, ',')) {
    KeyValueConfig per = without_prefix(kv, "sweep.");
    per.set("run.method", trim(m));
    configs.push_back(RunConfig::from_config(per));
  }
  SweepOptions opts;
  opts.n_seeds = seeds;
  opts.parallelism = jobs;
  opts.out_dir = fs::path(out_dir);
  opts.on_job_done = [](const SweepJob& j) {
    if (j.ok) {
      std::cerr << j.label << " seed " << j.seed << " done\n";
    } else {
      std::cerr << j.label << " seed " << j.seed << " FAILED: " << j.error << '\n';
    }
  };
  const SweepResult result = sweep(configs, opts);
  std::ofstream agg;
  open_out(agg, fs::path(out_dir) / "aggregate.csv");
  write_aggregate(agg, result.aggregate);
  int failed = 0;
  for (const auto& j : result.jobs) failed += j.ok ? 0 : 1;
  std::cerr << result.jobs.size() - failed << " of " << result.jobs.size() << " jobs completed\n";
  return failed == 0 ? 0 : 2;
}

int cmd_safety_map(int grid, int k, int rollouts, std::uint64_t seed, bool goal_unsafe, const std::string& out,
                   const std::string& config, const std::vector<std::string>& overrides) {
  const KeyValueConfig kv = load_config(config, overrides);
  const EnvConfig env_cfg = EnvConfig::from_config(kv);
  kv.require_all_consumed();
  std::ofstream f;
  open_out(f, out);
  SafetyOptions options;
  options.goal_is_unsafe = goal_unsafe;
  write_safety_map(f, LavaBridge(env_cfg), grid, k, rollouts, seed, options);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auxiliary start-state sampling for SAC on a 2D lava-bridge task"};
  app.require_subcommand(1);
  std::string config;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key = value config file");
    sub->add_option("--set", overrides, "override a config key (key=value), repeatable");
  };

  std::size_t n = 500;
  std::uint64_t seed = 1;
  std::string out;
  auto* gen = app.add_subcommand("gen-demos", "generate scripted-expert demonstrations");
  gen->add_option("--n", n, "transitions")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--out", out, "output CSV")->required();
  add_config(gen);

  std::optional<std::uint64_t> train_seed;
  std::string out_dir;
  auto* train = app.add_subcommand("train", "run one training job");
  train->add_option("--seed", train_seed, "master seed (overrides run.seed)");
  train->add_option("--out-dir", out_dir, "directory for metrics.csv, checkpoint.bin, sampler.csv")->required();
  add_config(train);

  std::string checkpoint;
  std::string dist = "id";
  int episodes = 20;
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint with the deterministic policy");
  ev->add_option("--checkpoint", checkpoint, "checkpoint.bin")->required();
  ev->add_option("--dist", dist, "start distribution")->check(CLI::IsMember({"id", "ood"}));
  ev->add_option("--episodes", episodes, "episodes")->check(CLI::PositiveNumber);
  ev->add_option("--seed", seed, "evaluation seed");
  add_config(ev);

  int seeds = 5;
  int jobs = 1;
  std::string sweep_out = "sweep_out";
  auto* sw = app.add_subcommand("sweep", "run configs x seeds and aggregate success rates");
  sw->add_option("--seeds", seeds, "seeds per method")->check(CLI::PositiveNumber);
  sw->add_option("--jobs", jobs, "parallel jobs")->check(CLI::PositiveNumber);
  sw->add_option("--out", sweep_out, "output directory");
  add_config(sw);

  int grid = 50;
  int k = 4;
  int rollouts = 64;
  bool goal_unsafe = false;
  auto* sm = app.add_subcommand("safety-map", "k-step safety of the uniform policy on a position grid");
  sm->add_option("--grid", grid, "cells per side")->check(CLI::PositiveNumber);
  sm->add_option("--k", k, "lookahead steps")->check(CLI::PositiveNumber);
  sm->add_option("--rollouts", rollouts, "rollouts per cell")->check(CLI::PositiveNumber);
  sm->add_option("--seed", seed, "rng seed");
  sm->add_flag("--goal-unsafe", goal_unsafe, "count goal terminations as unsafe");
  sm->add_option("--out", out, "output CSV")->required();
  add_config(sm);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen_demos(n, seed, out, config, overrides);
    if (*train) return cmd_train(config, train_seed, out_dir, overrides);
    if (*ev) return cmd_eval(checkpoint, dist, episodes, seed, config, overrides);
    if (*sw) return cmd_sweep(config, seeds, jobs, sweep_out, overrides);
    if (*sm) return cmd_safety_map(grid, k, rollouts, seed, goal_unsafe, out, config, overrides);
  } catch (const std::exception& e) {
    std::cerr << "auxss: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
