// Acceptance runner: one PASS/FAIL line per criterion.
//
//   auxss_acceptance --group fast            oracle checks, seconds
//   auxss_acceptance --group desk --cache D  full-budget training sweeps
//
// Desk runs are cached in D keyed by the core library bytes and the run
// config, so repeated invocations only train what is missing or stale.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "auxss/demos.hpp"
#include "auxss/env.hpp"
#include "auxss/metrics.hpp"
#include "auxss/policy.hpp"
#include "auxss/safety.hpp"
#include "auxss/samplers.hpp"
#include "auxss/sweep.hpp"
#include "auxss/training.hpp"
#include "gradcheck.hpp"

namespace fs = std::filesystem;
using namespace auxss;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  int id;
  bool pass;
  std::string detail;
};

int report(const std::vector<Verdict>& verdicts) {
  int failed = 0;
  for (const auto& v : verdicts) {
    std::cout << "criterion " << v.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "\n";
    failed += !v.pass;
  }
  std::cout.flush();
  return failed == 0 ? 0 : 1;
}

double three_sigma(double p, int n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

// ---------------------------------------------------------------- fast group

Verdict auxss_update_oracle() {
  const auto start = Clock::now();
  SamplerConfig cfg;
  cfg.sigma = 0.5;
  cfg.delta = 0.05;
  DemoStates d;
  // s1 differs from s0 by (0.5, 0.5) in position, s2 by (0.5, -0.5) in
  // velocity: both at squared distance 0.5 = 2 sigma^2, kernel e^-1.
  d.states = {{{1.0, 1.0}, {0.0, 0.0}}, {{1.5, 1.5}, {0.0, 0.0}}, {{1.0, 1.0}, {0.5, -0.5}}};
  d.trajectory = {0, 0, 0};
  const std::vector<double> w0{1.0, 0.8, 0.3};
  const int horizon = 500;
  const int length = 400;
  const double target = std::max(double(horizon - length) / horizon, cfg.delta);  // 0.2
  const double lambda = std::exp(-0.5 / (2.0 * 0.25));
  const std::vector<double> expected{target, (1 - lambda) * 0.8 + lambda * target,
                                     (1 - lambda) * 0.3 + lambda * target};
  const SamplerWeights out = update_auxss({w0, 2.1}, 0, length, horizon, d, cfg);
  double worst = 0.0;
  for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(out.weights[j] - expected[j]));
  bool pass = worst <= 1e-12;

  // Boundedness over random sequences.
  Rng rng(2024);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> pos(0.5, 9.5);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  std::uniform_real_distribution<double> sigma(0.05, 3.0);
  std::uniform_real_distribution<double> delta(0.001, 0.9);
  std::uniform_int_distribution<int> len(0, horizon);
  int violations = 0;
  const auto prop_start = Clock::now();
  for (int seq = 0; seq < 10000; ++seq) {
    DemoStates r;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      r.states.push_back({{pos(rng), pos(rng)}, {vel(rng), vel(rng)}});
      r.trajectory.push_back(0);
    }
    SamplerConfig c;
    c.sigma = sigma(rng);
    c.delta = delta(rng);
    SamplerWeights w = init_weights(r);
    for (int u = 0; u < 10; ++u) {
      const std::size_t i = sample_index(w, rng);
      const int l = len(rng);
      w = update_auxss(std::move(w), i, l, horizon, r, c);
      if (w.weights[i] != std::max(double(horizon - l) / horizon, c.delta)) ++violations;
      for (double x : w.weights)
        if (!(x >= c.delta && x <= 1.0)) ++violations;
    }
  }
  const double prop_time = seconds_since(prop_start);
  pass = pass && violations == 0 && prop_time < 1.0;
  std::ostringstream msg;
  msg << "3-state max error " << worst << " (tol 1e-12); 10^4 random sequences, " << violations
      << " bound violations, " << prop_time << " s (limit 1 s); total " << seconds_since(start) << " s";
  return {1, pass, msg.str()};
}

Verdict safety_oracle() {
  const auto start = Clock::now();
  LavaBridge env;
  const double f_max = env.physics().f_max;
  const int k = 2, grid = 5, n_mc = 1024;
  Rng pick(31);
  std::uniform_real_distribution<double> x(4.0, 6.0);
  std::uniform_real_distribution<double> y(4.55, 5.45);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  int exact_mismatch = 0;
  int outside = 0;
  int fractional = 0;
  double worst_gap = 0.0;
  int sampled = 0;
  while (sampled < 20) {
    const State s{{x(pick), y(pick)}, {v(pick), v(pick)}};
    if (env.is_terminal(s) != Cause::None) continue;
    ++sampled;
    const double exact = brute_force_safety(env, s, k, grid);
    GridEnumerationPolicy walk(f_max, grid);
    Rng r1(1000 + sampled);
    const auto enumerated = estimate_safety(env, s, walk, k, static_cast<int>(std::pow(grid * grid, k)), r1);
    if (enumerated.value != exact) ++exact_mismatch;
    UniformRandomPolicy uniform(f_max);
    Rng r2(2000 + sampled);
    const auto mc = estimate_safety(env, s, uniform, k, n_mc, r2);
    const double gap = std::abs(mc.value - exact);
    worst_gap = std::max(worst_gap, gap);
    if (gap > three_sigma(exact, n_mc)) ++outside;
    if (exact > 0.0 && exact < 1.0) ++fractional;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream msg;
  msg << "20 bridge states: " << exact_mismatch << " enumeration mismatches, " << outside
      << " continuous MC estimates outside 3 sigma (worst gap " << worst_gap << "), " << fractional
      << " with fractional grid safety; " << elapsed << " s (limit 60 s)";
  return {2, exact_mismatch == 0 && outside == 0 && elapsed < 60.0, msg.str()};
}

Verdict gradient_oracle() {
  const auto start = Clock::now();
  const auto r = testing::gradient_check(7, 8);
  const double elapsed = seconds_since(start);
  std::ostringstream msg;
  msg << r.parameters << " parameters, max relative error " << r.max_rel_error << " at " << r.worst
      << " (tol 1e-4); " << elapsed << " s (limit 10 s)";
  return {3, r.max_rel_error <= 1e-4 && elapsed < 10.0, msg.str()};
}

Verdict expert_validity() {
  const auto start = Clock::now();
  LavaBridge env;
  ScriptedExpert expert(env.geometry(), ExpertConfig{}, env.physics().f_max);
  Rng rng(derive_seed(1, Stream::Env));
  int goals = 0, lava = 0;
  for (int e = 0; e < 100; ++e) {
    env.reset_to(env.sample_start(StartDistribution::P0, rng));
    expert.begin_episode(static_cast<std::size_t>(e));
    StepResult r;
    do {
      r = env.step(expert.act(env.state()));
      lava += r.cause == Cause::Lava;
    } while (!r.terminated);
    goals += r.cause == Cause::Goal;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream msg;
  msg << goals << "/100 goal, " << lava << " lava entries; " << elapsed << " s (limit 10 s)";
  return {4, goals == 100 && lava == 0 && elapsed < 10.0, msg.str()};
}

Verdict determinism() {
  std::vector<std::string> differing;
  for (Method m : all_methods()) {
    RunConfig cfg;
    cfg.method = m;
    cfg.t_max = 1500;
    cfg.eval_interval = 500;
    cfg.eval_episodes = 3;
    cfg.buffer_capacity = 2000;
    cfg.demo_transitions = 300;
    cfg.demo_subset = 50;
    cfg.learner.hidden = {16, 16};
    cfg.learner.batch_size = 32;
    cfg.seed = 11;
    auto csv = [&] {
      std::ostringstream out;
      RunHooks hooks;
      hooks.metrics = &out;
      run_training(cfg, hooks);
      return out.str();
    };
    if (csv() != csv()) differing.push_back(std::string(to_string(m)));
  }
  std::ostringstream msg;
  msg << "8 methods, two runs each: ";
  if (differing.empty()) msg << "metrics CSVs byte-identical";
  for (const auto& d : differing) msg << d << " differs; ";
  return {8, differing.empty(), msg.str()};
}

// ---------------------------------------------------------------- desk group

constexpr int kSeeds = 5;

RunConfig desk_config(Method m, std::uint64_t seed) {
  RunConfig cfg;
  cfg.method = m;
  cfg.seed = seed;
  cfg.t_max = 150000;
  cfg.demo_transitions = 500;
  cfg.demo_subset = 150;
  return cfg;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Anything that can change a run's output: the compiled core, and every
// config field the desk runs touch.
std::string fingerprint(const RunConfig& c) {
  std::ifstream lib(AUXSS_CORE_LIBRARY, std::ios::binary);
  std::ostringstream bytes;
  bytes << lib.rdbuf();
  std::ostringstream s;
  s.precision(17);
  s << "core=" << std::hex << fnv1a(bytes.str()) << std::dec << " method=" << to_string(c.method)
    << " seed=" << c.seed << " t_max=" << c.t_max << " eval=" << c.eval_interval << "x" << c.eval_episodes
    << " buffer=" << c.buffer_capacity << " demos=" << c.demo_transitions << "/" << c.demo_subset
    << " geometry=" << c.env.geometry_hash() << " horizon=" << c.env.horizon << " gamma=" << c.learner.gamma
    << " lr=" << c.learner.policy_lr << "," << c.learner.critic_lr << " batch=" << c.learner.batch_size
    << " tau=" << c.learner.tau << " alpha=" << c.learner.alpha << " hidden=";
  for (int h : c.learner.hidden) s << h << ",";
  s << " sampler=" << c.sampler.delta << "," << c.sampler.sigma << "," << c.sampler.tau0 << ","
    << c.sampler.tau1 << "," << c.sampler.epsilon << "," << c.sampler.k_safety << ","
    << c.sampler.n_safety_rollouts;
  return s.str();
}

class DeskCache {
 public:
  explicit DeskCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  // Metrics rows for a run, training it first unless a matching cached
  // copy exists.
  std::vector<MetricsRow> rows(const RunConfig& cfg) {
    const fs::path base = dir_ / cfg.name() / ("seed_" + std::to_string(cfg.seed));
    const fs::path csv = base.string() + ".csv";
    const fs::path fp = base.string() + ".fingerprint";
    const std::string want = fingerprint(cfg);
    if (read_text(fp) == want && fs::exists(csv)) return read_metrics(csv);

    fs::create_directories(base.parent_path());
    const auto start = Clock::now();
    std::cerr << "training " << cfg.name() << " seed " << cfg.seed << "...\n";
    const fs::path tmp = csv.string() + ".tmp";
    {
      std::ofstream out(tmp);
      RunHooks hooks;
      hooks.metrics = &out;
      run_training(cfg, hooks);
    }
    fs::rename(tmp, csv);
    std::ofstream(fp) << want;
    std::cerr << "  done in " << seconds_since(start) << " s\n";
    return read_metrics(csv);
  }

  // Cached pass/fail of a check that needs in-memory run state.
  std::optional<std::string> lookup(const std::string& key, const std::string& want) const {
    const std::string text = read_text(dir_ / (key + ".result"));
    const auto nl = text.find('\n');
    if (nl == std::string::npos || text.substr(0, nl) != want) return std::nullopt;
    return text.substr(nl + 1);
  }
  void store(const std::string& key, const std::string& want, const std::string& result) const {
    std::ofstream(dir_ / (key + ".result")) << want << "\n" << result;
  }

 private:
  static std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  fs::path dir_;
};

struct MethodRuns {
  std::vector<std::vector<EvalReport>> evals;  // per seed
};

std::vector<EvalReport> evals_of(const std::vector<MetricsRow>& rows) {
  std::vector<EvalReport> out;
  for (const auto& r : rows)
    if (r.eval) out.push_back(*r.eval);
  return out;
}

constexpr double kNever = std::numeric_limits<double>::infinity();

// Env steps at the first checkpoint meeting `pred`; infinity if none does.
double first_step(const std::vector<EvalReport>& evals, const std::function<bool(const EvalReport&)>& pred) {
  for (const auto& e : evals)
    if (pred(e)) return static_cast<double>(e.step);
  return kNever;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2) return v[n / 2];
  const double a = v[n / 2 - 1], b = v[n / 2];
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) ? a : b;
  return 0.5 * (a + b);
}

std::string fmt_steps(double s) {
  if (std::isinf(s)) return "never";
  std::ostringstream o;
  o << static_cast<long long>(s);
  return o.str();
}

std::string join(const std::vector<double>& v, bool steps) {
  std::ostringstream o;
  o << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) o << " ";
    if (steps)
      o << fmt_steps(v[i]);
    else
      o << v[i];
  }
  o << "]";
  return o.str();
}

int run_desk(const fs::path& cache_dir) {
  DeskCache cache(cache_dir);
  const std::vector<Method> methods{Method::AuxSS,  Method::UniformSS,  Method::GoalDistSS, Method::OmegaSS,
                                    Method::SacP0, Method::HySACAuxSS, Method::JSRL};
  std::map<Method, MethodRuns> runs;
  std::vector<SweepJob> jobs;
  std::vector<RunConfig> configs;
  for (Method m : methods) {
    configs.push_back(desk_config(m, 1));
    for (int s = 1; s <= kSeeds; ++s) {
      const RunConfig cfg = desk_config(m, static_cast<std::uint64_t>(s));
      SweepJob job;
      job.label = cfg.name();
      job.seed = cfg.seed;
      job.rows = cache.rows(cfg);
      job.ok = true;
      runs[m].evals.push_back(evals_of(job.rows));
      jobs.push_back(std::move(job));
    }
  }
  {
    std::ofstream agg(cache_dir / "aggregate.csv");
    write_aggregate(agg, aggregate(jobs, configs));
  }

  std::vector<Verdict> verdicts;

  // 5: steps to the first checkpoint with ID success >= 0.8.
  {
    auto sustained = [&](Method m) {
      std::vector<double> v;
      for (const auto& e : runs[m].evals) v.push_back(first_step(e, [](const EvalReport& r) { return r.id_success >= 0.8; }));
      return v;
    };
    auto any_success = [&](Method m) {
      std::vector<double> v;
      for (const auto& e : runs[m].evals) v.push_back(first_step(e, [](const EvalReport& r) { return r.id_success > 0.0; }));
      return v;
    };
    const auto aux = sustained(Method::AuxSS);
    const auto uni = sustained(Method::UniformSS);
    const auto goal = sustained(Method::GoalDistSS);
    const auto aux_first = any_success(Method::AuxSS);
    const auto omega_first = any_success(Method::OmegaSS);
    const double m_aux = median(aux), m_uni = median(uni), m_goal = median(goal);
    const double m_aux_first = median(aux_first), m_omega_first = median(omega_first);
    const bool faster = std::isfinite(m_aux) && m_aux < 0.6 * m_uni && m_aux < 0.6 * m_goal;
    const bool omega_early = m_omega_first <= m_aux_first;
    std::ostringstream msg;
    msg << "median steps to ID>=0.8: auxss " << fmt_steps(m_aux) << " " << join(aux, true) << ", uniform_ss "
        << fmt_steps(m_uni) << " " << join(uni, true) << ", goaldist_ss " << fmt_steps(m_goal) << " "
        << join(goal, true) << " (need auxss < 0.6x both); median first ID success: omega_ss "
        << fmt_steps(m_omega_first) << " " << join(omega_first, true) << " vs auxss " << fmt_steps(m_aux_first)
        << " " << join(aux_first, true);
    verdicts.push_back({5, faster && omega_early, msg.str()});
  }

  // 6: SAC from p0 stays at or below 0.1 final ID success on every seed.
  {
    std::vector<double> finals;
    for (const auto& e : runs[Method::SacP0].evals) finals.push_back(e.empty() ? 1.0 : e.back().id_success);
    const bool pass = std::all_of(finals.begin(), finals.end(), [](double x) { return x <= 0.1; });
    std::ostringstream msg;
    msg << "sac_p0 final ID success per seed " << join(finals, false) << " (need every seed <= 0.1)";
    verdicts.push_back({6, pass, msg.str()});
  }

  // 7: final OOD medians.
  {
    auto final_ood = [&](Method m) {
      std::vector<double> v;
      for (const auto& e : runs[m].evals) v.push_back(e.empty() ? 0.0 : e.back().ood_success);
      return v;
    };
    const auto aux = final_ood(Method::AuxSS);
    const auto hy = final_ood(Method::HySACAuxSS);
    const auto js = final_ood(Method::JSRL);
    const double m_aux = median(aux), m_hy = median(hy), m_js = median(js);
    const bool pass = m_aux >= m_js + 0.2 && m_hy >= m_js + 0.2;
    std::ostringstream msg;
    msg << "median final OOD success: auxss " << m_aux << " " << join(aux, false) << ", hysac_auxss " << m_hy
        << " " << join(hy, false) << ", jsrl " << m_js << " " << join(js, false) << " (need both >= jsrl + 0.2)";
    verdicts.push_back({7, pass, msg.str()});
  }

  // 9: a full HySAC run keeps its demo transitions untouched.
  {
    const RunConfig cfg = desk_config(Method::HySAC, 1);
    const std::string want = fingerprint(cfg);
    std::string result;
    if (auto cached = cache.lookup("hysac_frozen_prefix", want)) {
      result = *cached;
    } else {
      std::cerr << "training hysac seed 1 (frozen prefix check)...\n";
      const RunResult r = run_training(cfg);
      const auto demo = r.demos.transitions();
      const auto prefix = r.buffer->frozen_prefix();
      const bool same = demo.size() == 500 && prefix.size() == demo.size() &&
                        std::equal(demo.begin(), demo.end(), prefix.begin());
      std::ostringstream o;
      o << (same ? "PASS" : "FAIL") << " " << prefix.size() << " frozen transitions, " << r.buffer->total_pushed()
        << " pushed into a buffer of " << cfg.buffer_capacity << " over " << r.total_steps << " env steps";
      result = o.str();
      cache.store("hysac_frozen_prefix", want, result);
    }
    const bool pass = result.rfind("PASS", 0) == 0;
    verdicts.push_back({9, pass, result.substr(result.find(' ') + 1) + "; prefix bit-identical: " + (pass ? "yes" : "no")});
  }

  return report(verdicts);
}

int run_fast() {
  std::vector<Verdict> v;
  v.push_back(auxss_update_oracle());
  v.push_back(safety_oracle());
  v.push_back(gradient_oracle());
  v.push_back(expert_validity());
  v.push_back(determinism());
  return report(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auxss acceptance checks"};
  std::string group = "fast";
  std::string cache = "acceptance_runs";
  app.add_option("--group", group, "fast or desk")->check(CLI::IsMember({"fast", "desk"}));
  app.add_option("--cache", cache, "directory for cached desk runs");
  CLI11_PARSE(app, argc, argv);
  try {
    return group == "fast" ? run_fast() : run_desk(cache);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
