#include "auxss/safety.hpp"

#include <cmath>

#include "auxss/errors.hpp"
#include "auxss/format.hpp"

namespace auxss {

namespace {

bool unsafe(Cause cause, const SafetyOptions& options) {
  return cause == Cause::Lava || (options.goal_is_unsafe && cause == Cause::Goal);
}

// Number of safe leaves below `sim`'s current state with `depth` steps left.
std::uint64_t count_safe(const LavaBridge& sim, int depth, const std::vector<Action>& actions,
                         std::uint64_t leaves_per_branch, const SafetyOptions& options) {
  if (depth == 0) return 1;
  std::uint64_t safe = 0;
  const std::uint64_t below = leaves_per_branch / actions.size();
  for (const auto& a : actions) {
    LavaBridge child = sim;
    const StepResult r = child.step(a);
    if (unsafe(r.cause, options)) continue;
    // Any other termination freezes the outcome for every continuation.
    safe += r.terminated ? below : count_safe(child, depth - 1, actions, below, options);
  }
  return safe;
}

}  // namespace

SafetyEstimate estimate_safety(const LavaBridge& env, const State& state, Policy& policy, int k, int n,
                               Rng& rng, SafetyOptions options) {
  if (k < 1 || n < 1) throw ContractViolation("estimate_safety needs k >= 1 and n >= 1");
  if (env.is_terminal(state) != Cause::None) {
    throw ContractViolation("estimate_safety called on a terminal state");
  }
  const std::uint64_t base = rng();
  LavaBridge sim = env;
  SafetyEstimate est;
  est.k = k;
  est.n_rollouts = n;
  for (int r = 0; r < n; ++r) {
    Rng rollout_rng(derive_seed(base, Stream::Safety, static_cast<std::uint64_t>(r)));
    sim.reset_to(state);
    policy.begin_episode(static_cast<std::size_t>(r));
    bool safe = true;
    for (int t = 0; t < k; ++t) {
      const StepResult res = sim.step(policy.act(sim.state(), rollout_rng));
      if (unsafe(res.cause, options)) {
        safe = false;
        break;
      }
      if (res.terminated) break;
    }
    if (safe) ++est.safe_rollouts;
  }
  est.value = static_cast<double>(est.safe_rollouts) / static_cast<double>(n);
  return est;
}

double brute_force_safety(const LavaBridge& env, const State& state, int k, int grid,
                          SafetyOptions options) {
  if (grid < 2) throw ConfigError("brute_force_safety needs grid >= 2");
  if (k < 1) throw ContractViolation("brute_force_safety needs k >= 1");
  const double branching = static_cast<double>(grid) * grid;
  if (std::pow(branching, k) > 1e7) {
    throw ConfigError("brute_force_safety: (grid^2)^k exceeds 1e7 sequences");
  }
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::uint64_t>(grid) * grid;

  LavaBridge sim = env;
  sim.reset_to(state);
  const auto actions = action_grid(env.physics().f_max, grid);
  const std::uint64_t safe = count_safe(sim, k, actions, total, options);
  return static_cast<double>(safe) / static_cast<double>(total);
}

void write_safety_map(std::ostream& out, const LavaBridge& env, int grid, int k, int n_rollouts,
                      std::uint64_t seed, SafetyOptions options) {
  if (grid < 1) throw ConfigError("safety map grid must be >= 1");
  const auto& b = env.geometry().bounds;
  UniformRandomPolicy policy(env.physics().f_max);
  Rng rng(seed);
  out << "px,py,omega\n";
  for (int iy = 0; iy < grid; ++iy) {
    for (int ix = 0; ix < grid; ++ix) {
      const Vec2 p{b.x_min + (ix + 0.5) * (b.x_max - b.x_min) / grid,
                   b.y_min + (iy + 0.5) * (b.y_max - b.y_min) / grid};
      const State s{p, {}};
      double omega = 0.0;
      switch (env.is_terminal(s)) {
        case Cause::Lava: omega = 0.0; break;
        case Cause::Goal: omega = options.goal_is_unsafe ? 0.0 : 1.0; break;
        default: omega = estimate_safety(env, s, policy, k, n_rollouts, rng, options).value;
      }
      out << format_real(p.x) << ',' << format_real(p.y) << ',' << format_real(omega) << '\n';
    }
  }
}

}  // namespace auxss
