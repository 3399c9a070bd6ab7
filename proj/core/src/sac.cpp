#include "auxss/sac.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"

namespace auxss {

LearnerConfig LearnerConfig::from_config(const KeyValueConfig& kv) {
  LearnerConfig c;
  c.gamma = kv.get_double("learner.gamma", c.gamma);
  if (kv.has("learner.lr")) {
    c.policy_lr = c.critic_lr = kv.get_double("learner.lr", c.policy_lr);
  }
  c.policy_lr = kv.get_double("learner.policy_lr", c.policy_lr);
  c.critic_lr = kv.get_double("learner.critic_lr", c.critic_lr);
  c.batch_size = static_cast<int>(kv.get_int("learner.batch_size", c.batch_size));
  c.tau = kv.get_double("learner.tau", c.tau);
  c.alpha = kv.get_double("learner.alpha", c.alpha);
  if (auto groups = kv.get_groups("learner.hidden")) {
    c.hidden.clear();
    for (const auto& g : *groups) {
      for (double v : g) c.hidden.push_back(static_cast<int>(v));
    }
  }
  c.gradient_steps = static_cast<int>(kv.get_int("learner.gradient_steps", c.gradient_steps));
  if (auto act = kv.get("learner.activation")) c.activation = activation_from_string(*act);
  c.log_std_min = kv.get_double("learner.log_std_min", c.log_std_min);
  c.log_std_max = kv.get_double("learner.log_std_max", c.log_std_max);
  c.validate();
  return c;
}

void LearnerConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("learner.gamma must lie in (0, 1)");
  if (!(policy_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (batch_size < 1) throw ConfigError("learner.batch_size must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("learner.tau must lie in (0, 1]");
  if (!(alpha >= 0.0)) throw ConfigError("learner.alpha must be non-negative");
  if (hidden.empty()) throw ConfigError("learner.hidden needs at least one layer");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("learner.hidden sizes must be positive");
  }
  if (gradient_steps < 0) throw ConfigError("learner.gradient_steps must be >= 0");
  if (!(log_std_max > log_std_min)) throw ConfigError("learner.log_std_max must exceed log_std_min");
}

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

// log(1 + exp(x)) without overflow.
Eigen::ArrayXXd softplus(const Eigen::ArrayXXd& x) {
  return x.max(0.0) + (-x.abs()).exp().log1p();
}

constexpr char kMagic[8] = {'A', 'U', 'X', 'S', 'S', 'C', 'K', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

SacLearner::SacLearner(LearnerConfig cfg, const EnvConfig& env, Rng& init_rng)
    : cfg_(std::move(cfg)), f_max_(env.physics.f_max) {
  cfg_.validate();
  const auto& b = env.geometry.bounds;
  const Vec2 c = b.center();
  obs_offset_ << c.x, c.y, 0.0, 0.0;
  obs_scale_ << 2.0 / (b.x_max - b.x_min), 2.0 / (b.y_max - b.y_min), 1.0 / env.physics.v_max,
      1.0 / env.physics.v_max;

  policy_ = Mlp(layer_sizes(kObsDim, cfg_.hidden, 2 * kActDim), cfg_.activation, init_rng);
  q1_ = Mlp(layer_sizes(kObsDim + kActDim, cfg_.hidden, 1), cfg_.activation, init_rng);
  q2_ = Mlp(layer_sizes(kObsDim + kActDim, cfg_.hidden, 1), cfg_.activation, init_rng);
  q1_target_ = q1_;
  q2_target_ = q2_;
  policy_opt_ = Adam(policy_, AdamConfig{cfg_.policy_lr});
  q1_opt_ = Adam(q1_, AdamConfig{cfg_.critic_lr});
  q2_opt_ = Adam(q2_, AdamConfig{cfg_.critic_lr});
}

Eigen::VectorXd SacLearner::observe(const State& s) const {
  Eigen::Vector4d raw(s.position.x, s.position.y, s.velocity.x, s.velocity.y);
  return ((raw - obs_offset_).array() * obs_scale_.array()).matrix();
}

Eigen::MatrixXd SacLearner::standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) const {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = n(rng);
  return out;
}

SacLearner::Sample SacLearner::sample_actions(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise,
                                              bool keep_tape) const {
  Sample s;
  const Eigen::MatrixXd out = keep_tape ? policy_.forward(obs, s.tape) : policy_.forward(obs);
  const Eigen::ArrayXXd mean = out.topRows(kActDim).array();
  s.raw_log_std = out.bottomRows(kActDim);
  const double half_range = 0.5 * (cfg_.log_std_max - cfg_.log_std_min);
  const Eigen::ArrayXXd log_std = cfg_.log_std_min + half_range * (s.raw_log_std.array().tanh() + 1.0);
  s.std = log_std.exp().matrix();
  const Eigen::ArrayXXd u = mean + s.std.array() * noise.array();
  s.u = u.matrix();
  s.action = u.tanh().matrix();
  // Gaussian log-density of u, minus log|d tanh(u)/du|
  // = log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)).
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd per_dim = -0.5 * noise.array().square() - log_std - half_log_2pi -
                                  2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
  s.log_prob = per_dim.colwise().sum().matrix();
  return s;
}

Eigen::MatrixXd SacLearner::critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd x(kObsDim + kActDim, obs.cols());
  x.topRows(kObsDim) = obs;
  x.bottomRows(kActDim) = actions;
  return x;
}

Action SacLearner::act(const State& state, bool stochastic, Rng& rng) const {
  const Eigen::MatrixXd obs = observe(state);
  Eigen::MatrixXd a;
  if (stochastic) {
    a = sample_actions(obs, standard_normal(kActDim, 1, rng), false).action;
  } else {
    a = policy_.forward(obs).topRows(kActDim).array().tanh().matrix();
  }
  if (!a.allFinite()) throw Divergence("policy produced a non-finite action");
  return Action{{f_max_ * a(0, 0), f_max_ * a(1, 0)}};
}

Batch SacLearner::make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.obs.resize(kObsDim, n);
  b.next_obs.resize(kObsDim, n);
  b.actions.resize(kActDim, n);
  b.rewards.resize(n);
  b.not_done.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = buffer[indices[static_cast<std::size_t>(j)]];
    b.obs.col(j) = observe(t.state);
    b.next_obs.col(j) = observe(t.next_state);
    b.actions(0, j) = t.action.force.x / f_max_;
    b.actions(1, j) = t.action.force.y / f_max_;
    b.rewards(j) = t.reward;
    b.not_done(j) = t.done ? 0.0 : 1.0;
  }
  return b;
}

Batch SacLearner::sample_batch(const ReplayBuffer& buffer, Rng& rng) const {
  if (buffer.size() == 0) throw ContractViolation("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
  std::vector<std::size_t> idx(static_cast<std::size_t>(cfg_.batch_size));
  for (auto& i : idx) i = pick(rng);
  return make_batch(buffer, idx);
}

Eigen::RowVectorXd SacLearner::critic_targets(const Batch& batch, const Eigen::MatrixXd& next_noise) const {
  const Sample next = sample_actions(batch.next_obs, next_noise, false);
  const Eigen::MatrixXd x = critic_input(batch.next_obs, next.action);
  const Eigen::RowVectorXd q1 = q1_target_.forward(x);
  const Eigen::RowVectorXd q2 = q2_target_.forward(x);
  const Eigen::RowVectorXd soft_value = q1.cwiseMin(q2) - cfg_.alpha * next.log_prob;
  return batch.rewards + cfg_.gamma * batch.not_done.cwiseProduct(soft_value);
}

double SacLearner::critic_loss(const Batch& batch, const Eigen::RowVectorXd& targets, MlpGrad* g1,
                               MlpGrad* g2) const {
  const Eigen::MatrixXd x = critic_input(batch.obs, batch.actions);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  Mlp::Tape t1, t2;
  const Eigen::RowVectorXd e1 = q1_.forward(x, t1) - targets;
  const Eigen::RowVectorXd e2 = q2_.forward(x, t2) - targets;
  if (g1 != nullptr) q1_.backward(t1, e1 * inv_b, g1);
  if (g2 != nullptr) q2_.backward(t2, e2 * inv_b, g2);
  return 0.5 * inv_b * (e1.squaredNorm() + e2.squaredNorm());
}

double SacLearner::policy_loss(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& noise, MlpGrad* grad,
                               double* entropy) const {
  const double inv_b = 1.0 / static_cast<double>(obs.cols());
  const Sample s = sample_actions(obs, noise, grad != nullptr);
  const Eigen::MatrixXd x = critic_input(obs, s.action);
  Mlp::Tape t1, t2;
  const Eigen::RowVectorXd q1 = q1_.forward(x, t1);
  const Eigen::RowVectorXd q2 = q2_.forward(x, t2);
  const Eigen::RowVectorXd q_min = q1.cwiseMin(q2);
  if (entropy != nullptr) *entropy = -s.log_prob.mean();
  const double loss = inv_b * (cfg_.alpha * s.log_prob - q_min).sum();
  if (grad == nullptr) return loss;

  // Route dL/dQmin = -1/B through whichever critic attains the minimum.
  const auto take_first = (q1.array() <= q2.array());
  const Eigen::RowVectorXd gq1 = take_first.select(Eigen::RowVectorXd::Constant(q1.size(), -inv_b), 0.0);
  const Eigen::RowVectorXd gq2 = take_first.select(0.0, Eigen::RowVectorXd::Constant(q1.size(), -inv_b));
  const Eigen::MatrixXd dx = q1_.backward(t1, gq1, nullptr) + q2_.backward(t2, gq2, nullptr);
  const Eigen::ArrayXXd dq_da = dx.bottomRows(kActDim).array();

  const Eigen::ArrayXXd a = s.action.array();
  const Eigen::ArrayXXd du = dq_da * (1.0 - a.square()) + (2.0 * cfg_.alpha * inv_b) * a;
  const Eigen::ArrayXXd d_log_std = du * s.std.array() * noise.array() - cfg_.alpha * inv_b;
  const double half_range = 0.5 * (cfg_.log_std_max - cfg_.log_std_min);
  const Eigen::ArrayXXd d_raw = d_log_std * half_range * (1.0 - s.raw_log_std.array().tanh().square());

  Eigen::MatrixXd grad_out(2 * kActDim, obs.cols());
  grad_out.topRows(kActDim) = du.matrix();
  grad_out.bottomRows(kActDim) = d_raw.matrix();
  policy_.backward(s.tape, grad_out, grad);
  return loss;
}

LossReport SacLearner::update(const ReplayBuffer& buffer, Rng& rng) {
  const Batch batch = sample_batch(buffer, rng);
  const Eigen::MatrixXd next_noise = standard_normal(kActDim, batch.size(), rng);
  const Eigen::RowVectorXd targets = critic_targets(batch, next_noise);

  LossReport report;
  MlpGrad g1 = q1_.zero_grad();
  MlpGrad g2 = q2_.zero_grad();
  report.critic_loss = critic_loss(batch, targets, &g1, &g2);
  q1_opt_.step(q1_, g1);
  q2_opt_.step(q2_, g2);

  const Eigen::MatrixXd noise = standard_normal(kActDim, batch.size(), rng);
  MlpGrad gp = policy_.zero_grad();
  report.policy_loss = policy_loss(batch.obs, noise, &gp, &report.entropy);
  policy_opt_.step(policy_, gp);

  q1_target_.soft_update_from(q1_, cfg_.tau);
  q2_target_.soft_update_from(q2_, cfg_.tau);

  if (!std::isfinite(report.critic_loss) || !std::isfinite(report.policy_loss)) {
    throw Divergence("non-finite SAC loss (critic " + std::to_string(report.critic_loss) + ", policy " +
                     std::to_string(report.policy_loss) + ")");
  }
  return report;
}

bool SacLearner::parameters_finite() const {
  return policy_.all_finite() && q1_.all_finite() && q2_.all_finite() && q1_target_.all_finite() &&
         q2_target_.all_finite();
}

void SacLearner::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  binio::write_u32(out, kCheckpointVersion);
  const Mlp* nets[] = {&policy_, &q1_, &q2_, &q1_target_, &q2_target_};
  binio::write_u32(out, 5);
  for (const Mlp* net : nets) {
    binio::write_u32(out, static_cast<std::uint32_t>(net->activation()));
    binio::write_u32(out, static_cast<std::uint32_t>(net->sizes().size()));
    for (int s : net->sizes()) binio::write_u32(out, static_cast<std::uint32_t>(s));
  }
  binio::write_f64(out, cfg_.log_std_min);
  binio::write_f64(out, cfg_.log_std_max);
  for (const Mlp* net : nets) net->write_parameters(out);
  if (!out) throw std::runtime_error("failed writing checkpoint");
}

void SacLearner::load(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(0, "not an auxss checkpoint (bad magic)");
  }
  const std::uint32_t version = binio::read_u32(in);
  if (version != kCheckpointVersion) throw ParseError(0, "unsupported checkpoint version " + std::to_string(version));
  if (binio::read_u32(in) != 5) throw ParseError(0, "checkpoint must hold 5 networks");
  std::vector<Mlp> nets;
  for (int n = 0; n < 5; ++n) {
    const std::uint32_t act = binio::read_u32(in);
    if (act != static_cast<std::uint32_t>(Activation::SiLU) && act != static_cast<std::uint32_t>(Activation::Tanh)) {
      throw ParseError(0, "unknown activation code in checkpoint");
    }
    const std::uint32_t count = binio::read_u32(in);
    if (count < 2 || count > 64) throw ParseError(0, "implausible layer count in checkpoint");
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t s = binio::read_u32(in);
      if (s == 0 || s > (1U << 16)) throw ParseError(0, "implausible layer size in checkpoint");
      sizes.push_back(static_cast<int>(s));
    }
    nets.emplace_back(std::move(sizes), static_cast<Activation>(act));
  }
  const int policy_out = nets[0].sizes().back();
  if (nets[0].sizes().front() != kObsDim || policy_out != 2 * kActDim) {
    throw ParseError(0, "checkpoint policy has the wrong input/output size");
  }
  for (int n = 1; n < 5; ++n) {
    if (nets[n].sizes().front() != kObsDim + kActDim || nets[n].sizes().back() != 1) {
      throw ParseError(0, "checkpoint critic has the wrong input/output size");
    }
  }
  const double lo = binio::read_f64(in);
  const double hi = binio::read_f64(in);
  for (auto& net : nets) net.read_parameters(in);

  cfg_.log_std_min = lo;
  cfg_.log_std_max = hi;
  cfg_.activation = nets[0].activation();
  cfg_.hidden.assign(nets[0].sizes().begin() + 1, nets[0].sizes().end() - 1);
  policy_ = std::move(nets[0]);
  q1_ = std::move(nets[1]);
  q2_ = std::move(nets[2]);
  q1_target_ = std::move(nets[3]);
  q2_target_ = std::move(nets[4]);
  policy_opt_ = Adam(policy_, AdamConfig{cfg_.policy_lr});
  q1_opt_ = Adam(q1_, AdamConfig{cfg_.critic_lr});
  q2_opt_ = Adam(q2_, AdamConfig{cfg_.critic_lr});
}

}  // namespace auxss
