#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "auxss/demos.hpp"
#include "auxss/errors.hpp"
#include "auxss/evaluation.hpp"
#include "auxss/metrics.hpp"
#include "auxss/sweep.hpp"
#include "auxss/training.hpp"

using namespace auxss;

namespace {

RunConfig quick(Method m, std::int64_t t_max = 1500) {
  RunConfig cfg;
  cfg.method = m;
  cfg.t_max = t_max;
  cfg.eval_interval = 500;
  cfg.eval_episodes = 3;
  cfg.buffer_capacity = 2000;
  cfg.demo_transitions = 300;
  cfg.demo_subset = 50;
  cfg.learner.hidden = {16, 16};
  cfg.learner.batch_size = 32;
  cfg.env.horizon = 200;
  return cfg;
}

std::string csv_of(const RunConfig& cfg) {
  std::stringstream out;
  RunHooks hooks;
  hooks.metrics = &out;
  run_training(cfg, hooks);
  return out.str();
}

class ExpertWrapper final : public Policy {
 public:
  explicit ExpertWrapper(const LavaBridge& env) : expert_(env.geometry(), ExpertConfig{}, env.physics().f_max) {}
  void begin_episode(std::size_t i) override { expert_.begin_episode(i); }
  Action act(const State& s, Rng&) override { return expert_.act(s); }

 private:
  ScriptedExpert expert_;
};

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("zero budget gives one initial checkpoint") {
    RunConfig cfg = quick(Method::AuxSS, 0);
    const RunResult r = run_training(cfg);
    CHECK(r.episodes == 0);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].step == 0);
    CHECK(r.rows[0].eval.has_value());
    CHECK_FALSE(r.rows[0].result.has_value());
  }

  TEST_CASE("every method runs and is deterministic") {
    for (Method m : all_methods()) {
      INFO(to_string(m));
      const RunConfig cfg = quick(m, 700);
      const std::string a = csv_of(cfg);
      CHECK(a == csv_of(cfg));
      RunConfig other = cfg;
      other.seed = 2;
      const RunResult r1 = run_training(cfg);
      const RunResult r2 = run_training(other);
      CHECK(r1.learner->policy_net().layers()[0].weight != r2.learner->policy_net().layers()[0].weight);
    }
  }

  TEST_CASE("step accounting and checkpoint schedule") {
    for (Method m : {Method::AuxSS, Method::SacP0, Method::JSRL}) {
      const RunConfig cfg = quick(m);
      const RunResult r = run_training(cfg);
      std::int64_t total = 0;
      std::int64_t last_step = -1;
      for (const auto& row : r.rows) {
        if (row.result) total += row.result->length;
        CHECK(row.step >= last_step);
        if (row.result) CHECK(row.step > last_step);
        last_step = row.step;
      }
      CHECK(total == r.total_steps);
      CHECK(total >= cfg.t_max);
      CHECK(total < cfg.t_max + cfg.env.horizon);
      REQUIRE(r.evals.size() >= 4);  // t = 0, and after crossing 500, 1000, 1500
      CHECK(r.rows.back().eval.has_value());
      for (std::size_t k = 0; k < r.evals.size(); ++k) CHECK(r.evals[k].checkpoint == static_cast<int>(k));
    }
  }

  TEST_CASE("evaluation does not perturb training") {
    RunConfig with = quick(Method::AuxSS);
    RunConfig without = with;
    without.eval_interval = 0;
    const RunResult a = run_training(with);
    const RunResult b = run_training(without);
    std::vector<EpisodeResult> ea, eb;
    for (const auto& row : a.rows)
      if (row.result) ea.push_back(*row.result);
    for (const auto& row : b.rows)
      if (row.result) eb.push_back(*row.result);
    REQUIRE(ea.size() == eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
      CHECK(ea[i].length == eb[i].length);
      CHECK(ea[i].undiscounted_return == eb[i].undiscounted_return);
      CHECK(ea[i].cause == eb[i].cause);
    }
    CHECK(a.sampler->weights().weights == b.sampler->weights().weights);
    CHECK(b.evals.empty());
  }

  TEST_CASE("hybrid prefill stays frozen") {
    RunConfig cfg = quick(Method::HySAC, 2500);
    const RunResult r = run_training(cfg);
    const auto demo = r.demos.transitions();
    REQUIRE(r.buffer->frozen_prefix_len() == demo.size());
    CHECK(r.buffer->total_pushed() > cfg.buffer_capacity - demo.size());
    CHECK(std::equal(demo.begin(), demo.end(), r.buffer->frozen_prefix().begin()));
  }

  TEST_CASE("config consistency") {
    RunConfig cfg = quick(Method::HySAC);
    cfg.demo_transitions = cfg.buffer_capacity;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = quick(Method::AuxSS);
    cfg.demo_path = "/nonexistent/demos.csv";
    CHECK_THROWS_AS(run_training(cfg), ConfigError);
  }

  TEST_CASE("evaluation") {
    EnvConfig env_cfg;
    LavaBridge env(env_cfg);
    SUBCASE("expert succeeds everywhere it starts") {
      ExpertWrapper expert(env);
      const EvalResult r = evaluate(expert, env_cfg, StartDistribution::P0, 20, 0.99, 1);
      CHECK(r.success_rate == 1.0);
      CHECK(r.mean_return > 0.0);
      CHECK(r.mean_return < 1.0);
    }
    SUBCASE("random policy rarely succeeds") {
      UniformRandomPolicy random(env_cfg.physics.f_max);
      // A 100-episode sample is too noisy to pin a small rate, so bound the
      // rate itself: the 3 sigma upper limit from 5000 episodes stays below 2%.
      const EvalResult r = evaluate(random, env_cfg, StartDistribution::P0, 5000, 0.99, 2);
      const double upper = r.success_rate + 3.0 * std::sqrt(std::max(r.success_rate, 1e-4) / r.episodes);
      CHECK(upper < 0.02);
      CHECK(r.success_rate == static_cast<double>(r.successes) / r.episodes);
    }
    SUBCASE("zero episodes rejected") {
      UniformRandomPolicy random(env_cfg.physics.f_max);
      CHECK_THROWS_AS(evaluate(random, env_cfg, StartDistribution::OOD, 0, 0.99, 3), ConfigError);
    }
    SUBCASE("same seed same answer") {
      UniformRandomPolicy random(env_cfg.physics.f_max);
      const EvalResult a = evaluate(random, env_cfg, StartDistribution::OOD, 10, 0.99, 4);
      const EvalResult b = evaluate(random, env_cfg, StartDistribution::OOD, 10, 0.99, 4);
      CHECK(a.mean_return == b.mean_return);
    }
  }

  TEST_CASE("metrics CSV round trip") {
    const RunResult r = run_training(quick(Method::UniformSS));
    std::stringstream buf;
    write_metrics(buf, r.rows);
    const std::string text = buf.str();
    CHECK(text.rfind("step,episode,ep_len,ep_return,cause,id_success,ood_success,id_return,ood_return\n", 0) == 0);
    const auto back = read_metrics(buf);
    REQUIRE(back.size() == r.rows.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].step == r.rows[i].step);
      CHECK(back[i].eval.has_value() == r.rows[i].eval.has_value());
      if (back[i].eval) CHECK(back[i].eval->ood_return == r.rows[i].eval->ood_return);
      if (back[i].result) CHECK(back[i].result->cause == r.rows[i].result->cause);
    }
    std::stringstream bad("step,episode\n1,2\n");
    CHECK_THROWS_AS(read_metrics(bad), ParseError);
  }

  TEST_CASE("quantiles") {
    CHECK(quantile({3.0}, 0.25) == 3.0);
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
    CHECK(quantile({4, 1, 3, 2}, 0.75) == 3.25);
    CHECK_THROWS_AS(quantile({}, 0.5), ConfigError);
  }

  TEST_CASE("single run sweep reproduces the run") {
    const RunConfig cfg = quick(Method::AuxSS);
    SweepOptions opts;
    opts.n_seeds = 1;
    const SweepResult s = sweep({cfg}, opts);
    const RunResult r = run_training(cfg);
    REQUIRE(s.jobs.size() == 1);
    CHECK(s.jobs[0].ok);
    REQUIRE(s.aggregate.size() == r.evals.size());
    for (std::size_t k = 0; k < r.evals.size(); ++k) {
      CHECK(s.aggregate[k].runs == 1);
      CHECK(s.aggregate[k].id_median == r.evals[k].id_success);
      CHECK(s.aggregate[k].ood_median == r.evals[k].ood_success);
      CHECK(s.aggregate[k].id_q25 == r.evals[k].id_success);
    }
  }

  TEST_CASE("sweep records failures and writes per-seed files") {
    const auto dir = std::filesystem::temp_directory_path() / "auxss_sweep_test";
    std::filesystem::remove_all(dir);
    RunConfig good = quick(Method::SacP0, 600);
    RunConfig broken = quick(Method::JSRL, 600);
    broken.demo_path = "/nonexistent/demos.csv";
    SweepOptions opts;
    opts.n_seeds = 2;
    opts.parallelism = 2;
    opts.out_dir = dir;
    const SweepResult s = sweep({good, broken}, opts);
    REQUIRE(s.jobs.size() == 4);
    int ok = 0;
    for (const auto& j : s.jobs) {
      ok += j.ok;
      if (!j.ok) CHECK_FALSE(j.error.empty());
    }
    CHECK(ok == 2);
    CHECK(std::filesystem::exists(dir / "sac_p0" / "seed_1.csv"));
    CHECK(std::filesystem::exists(dir / "sac_p0" / "seed_2.csv"));
    for (const auto& row : s.aggregate) {
      CHECK(row.label == "sac_p0");
      CHECK(row.runs == 2);
    }
    // Files on disk match what the jobs returned.
    const auto rows = read_metrics(dir / "sac_p0" / "seed_2.csv");
    CHECK(rows.size() == s.jobs[1].rows.size());
    std::filesystem::remove_all(dir);
  }
}
