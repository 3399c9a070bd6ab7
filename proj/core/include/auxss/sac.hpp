#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "auxss/env.hpp"
#include "auxss/mlp.hpp"
#include "auxss/policy.hpp"
#include "auxss/replay_buffer.hpp"
#include "auxss/rng.hpp"

namespace auxss {

class KeyValueConfig;

struct LearnerConfig {
  double gamma = 0.99;
  double policy_lr = 3e-4;
  double critic_lr = 3e-4;
  int batch_size = 256;
  double tau = 0.005;    // target smoothing
  // Fixed entropy coefficient. Rewards are a single +-1 at termination, so
  // the discounted entropy bonus, up to alpha ln 4 / (1 - gamma), has to stay
  // below 1 or timing out beats reaching the goal. 0.2 and 0.01 both stall.
  double alpha = 0.002;
  std::vector<int> hidden{64, 64};
  int gradient_steps = 1;  // per environment step
  Activation activation = Activation::SiLU;
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  static LearnerConfig from_config(const KeyValueConfig& kv);
  void validate() const;
};

struct LossReport {
  double critic_loss = 0.0;
  double policy_loss = 0.0;
  double entropy = 0.0;
};

// Column-per-sample minibatch in network coordinates: observations are
// normalised states, actions are forces divided by f_max.
struct Batch {
  Eigen::MatrixXd obs;       // 4 x B
  Eigen::MatrixXd actions;   // 2 x B
  Eigen::RowVectorXd rewards;
  Eigen::MatrixXd next_obs;  // 4 x B
  Eigen::RowVectorXd not_done;

  Eigen::Index size() const { return obs.cols(); }
};

// Soft actor-critic with twin critics, delayed target critics and a
// tanh-squashed Gaussian policy.
class SacLearner {
 public:
  static constexpr int kObsDim = 4;
  static constexpr int kActDim = 2;

  SacLearner(LearnerConfig cfg, const EnvConfig& env, Rng& init_rng);

  // Stochastic: squashed Gaussian sample. Deterministic: tanh of the mean.
  // Throws Divergence on non-finite network output.
  Action act(const State& state, bool stochastic, Rng& rng) const;

  // One critic step, one policy step, one target update.
  LossReport update(const ReplayBuffer& buffer, Rng& rng);

  const LearnerConfig& config() const { return cfg_; }

  // Building blocks of update(), exposed for gradient checks.
  Eigen::VectorXd observe(const State& s) const;
  Batch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices) const;
  Batch sample_batch(const ReplayBuffer& buffer, Rng& rng) const;
  Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) const;

  // r + gamma (1 - done) (min target Q(s', a') - alpha log pi(a'|s')),
  // a' = squash(mean + std * next_noise).
  Eigen::RowVectorXd critic_targets(const Batch& batch, const Eigen::MatrixXd& next_noise) const;
  // 0.5 mean (Q1 - y)^2 + 0.5 mean (Q2 - y)^2; gradients accumulated into
  // g1/g2 when non-null.
  double critic_loss(const Batch& batch, const Eigen::RowVectorXd& targets, MlpGrad* g1, MlpGrad* g2) const;
  // mean(alpha log pi(a|s) - min Q(s, a)) with reparameterised a.
  double policy_loss(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise, MlpGrad* grad,
                     double* entropy = nullptr) const;

  Mlp& policy_net() { return policy_; }
  Mlp& critic_net(int i) { return i == 0 ? q1_ : q2_; }
  Mlp& target_net(int i) { return i == 0 ? q1_target_ : q2_target_; }
  const Mlp& policy_net() const { return policy_; }
  const Mlp& critic_net(int i) const { return i == 0 ? q1_ : q2_; }
  const Mlp& target_net(int i) const { return i == 0 ? q1_target_ : q2_target_; }

  bool parameters_finite() const;

  // Binary checkpoint, little-endian:
  //   "AUXSSCKP" | u32 version | u32 network count (5) |
  //   per network: u32 activation, u32 size count, u32 sizes... |
  //   f64 log_std_min | f64 log_std_max |
  //   per network: per layer, weights row-major then biases, f64.
  // Network order: policy, critic 1, critic 2, target 1, target 2.
  void save(std::ostream& out) const;
  // Replaces every network; optimiser state is reset.
  void load(std::istream& in);

 private:
  struct Sample {
    Eigen::MatrixXd action;      // squashed, 2 x B
    Eigen::RowVectorXd log_prob;
    Eigen::MatrixXd u;           // pre-squash
    Eigen::MatrixXd std;
    Eigen::MatrixXd raw_log_std;
    Mlp::Tape tape;
  };
  Sample sample_actions(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise, bool keep_tape) const;
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const;

  LearnerConfig cfg_;
  double f_max_;
  Eigen::Vector4d obs_offset_;
  Eigen::Vector4d obs_scale_;
  Mlp policy_;
  Mlp q1_, q2_, q1_target_, q2_target_;
  Adam policy_opt_, q1_opt_, q2_opt_;
};

// Deterministic (tanh of the mean) policy wrapper for evaluation.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(const SacLearner& learner) : learner_(learner) {}
  Action act(const State& state, Rng& rng) override { return learner_.act(state, false, rng); }

 private:
  const SacLearner& learner_;
};

}  // namespace auxss
