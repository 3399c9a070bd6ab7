#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "auxss/env.hpp"
#include "auxss/rng.hpp"

namespace auxss {

class KeyValueConfig;

// Candidate start states: the demonstration states, each tagged with the
// trajectory it came from.
struct DemoStates {
  std::vector<State> states;
  std::vector<int> trajectory;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
};

// Unnormalised sampling weights and their running sum.
struct SamplerWeights {
  std::vector<double> weights;
  double norm = 0.0;

  std::size_t size() const { return weights.size(); }
  double probability(std::size_t j) const { return weights[j] / norm; }
};

enum class SamplerKind { AuxSS, Uniform, GoalDist, OmegaSS };

std::string_view to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(std::string_view text);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::AuxSS;
  double delta = 0.05;   // weight floor for AuxSS targets
  double sigma = 0.5;    // kernel length scale, state units
  double tau0 = 0.5;     // GoalDist temperature at t = 0
  double tau1 = 5.0;     // GoalDist temperature at t = T_max
  double epsilon = 0.05; // OmegaSS safety floor
  int k_safety = 4;
  int n_safety_rollouts = 64;
  // Per-dimension multipliers applied before the kernel distance:
  // (px, py, vx, vy).
  std::array<double, 4> scale{1.0, 1.0, 1.0, 1.0};
  // Goal-terminated episodes push the target to delta instead of
  // (H - L)/H. Off by default.
  bool cause_aware = false;
  bool goal_is_unsafe = false;

  static SamplerConfig from_config(const KeyValueConfig& kv);
  void validate() const;
};

// All ones; N = |demo|. Throws ConfigError on an empty archive.
SamplerWeights init_weights(const DemoStates& demo);
SamplerWeights uniform_weights(const DemoStates& demo);

// Categorical draw with P(j) = W[j] / N.
std::size_t sample_index(const SamplerWeights& weights, Rng& rng);

// exp(-|a - b|^2 / (2 sigma^2)) over the scaled 4D state; 1 at a == b.
double smoothing_kernel(const State& a, const State& b, double sigma,
                        const std::array<double, 4>& scale);

// Episode-length update: target w* = max((H - L)/H, delta) for the start
// state i, blended into every weight with the kernel centred on state i.
// W[i] becomes exactly w*. Throws ContractViolation unless 0 <= L <= H and
// i is in range.
SamplerWeights update_auxss(SamplerWeights weights, std::size_t i, int episode_length, int horizon,
                            const DemoStates& demo, const SamplerConfig& cfg,
                            Cause cause = Cause::None);

// exp(-|pos - goal| / tau(t)) with tau annealed linearly tau0 -> tau1,
// scaled so the largest weight is 1.
SamplerWeights goal_dist_weights(const DemoStates& demo, Vec2 goal, std::int64_t t, std::int64_t t_max,
                                 const SamplerConfig& cfg);

// 1 / max(Omega, epsilon) where Omega is the k-step safety under the
// uniform random policy, scaled so the largest weight is 1.
SamplerWeights omega_weights(const DemoStates& demo, const LavaBridge& env, const SamplerConfig& cfg,
                             Rng& rng);
SamplerWeights omega_weights_from_safety(std::span<const double> omega, double epsilon);

// Owns one run's start-state distribution over a fixed archive.
class StartStateSampler {
 public:
  // `rng` is only consumed by OmegaSS, for its one-off safety estimates.
  StartStateSampler(SamplerConfig cfg, DemoStates demo, const LavaBridge& env, Rng& rng);

  // `t` and `t_max` drive the GoalDist temperature; other kinds ignore them.
  std::size_t sample(Rng& rng, std::int64_t t, std::int64_t t_max);
  void observe(std::size_t index, int episode_length, int horizon, Cause cause);

  const SamplerWeights& weights() const { return weights_; }
  const DemoStates& demo() const { return demo_; }
  const SamplerConfig& config() const { return cfg_; }
  const State& state(std::size_t index) const { return demo_.states.at(index); }

  // `# key = value` config lines, then index,px,py,vx,vy,weight rows.
  void write_snapshot(std::ostream& out) const;

 private:
  SamplerConfig cfg_;
  DemoStates demo_;
  Vec2 goal_;
  SamplerWeights weights_;
};

struct SamplerSnapshot {
  SamplerConfig config;
  DemoStates demo;
  SamplerWeights weights;
};

// Inverse of write_snapshot. Throws ParseError naming the offending line.
SamplerSnapshot read_snapshot(std::istream& in);

}  // namespace auxss
