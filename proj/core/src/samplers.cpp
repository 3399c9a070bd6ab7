#include "auxss/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"
#include "auxss/format.hpp"
#include "auxss/policy.hpp"
#include "auxss/safety.hpp"

namespace auxss {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::AuxSS: return "auxss";
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::GoalDist: return "goaldist";
    case SamplerKind::OmegaSS: return "omega";
  }
  return "auxss";
}

SamplerKind sampler_kind_from_string(std::string_view text) {
  if (text == "auxss") return SamplerKind::AuxSS;
  if (text == "uniform") return SamplerKind::Uniform;
  if (text == "goaldist") return SamplerKind::GoalDist;
  if (text == "omega") return SamplerKind::OmegaSS;
  throw ConfigError("unknown sampler kind '" + std::string(text) + "'");
}

SamplerConfig SamplerConfig::from_config(const KeyValueConfig& kv) {
  SamplerConfig c;
  if (auto kind = kv.get("sampler.kind")) c.kind = sampler_kind_from_string(*kind);
  c.delta = kv.get_double("sampler.delta", c.delta);
  c.sigma = kv.get_double("sampler.sigma", c.sigma);
  c.tau0 = kv.get_double("sampler.tau0", c.tau0);
  c.tau1 = kv.get_double("sampler.tau1", c.tau1);
  c.epsilon = kv.get_double("sampler.epsilon", c.epsilon);
  c.k_safety = static_cast<int>(kv.get_int("sampler.k_safety", c.k_safety));
  c.n_safety_rollouts = static_cast<int>(kv.get_int("sampler.n_safety_rollouts", c.n_safety_rollouts));
  if (auto groups = kv.get_groups("sampler.scale")) {
    if (groups->size() != 1 || groups->front().size() != 4) {
      throw ConfigError("sampler.scale: expected four comma separated values");
    }
    std::copy_n(groups->front().begin(), 4, c.scale.begin());
  }
  c.cause_aware = kv.get_bool("sampler.cause_aware", c.cause_aware);
  c.goal_is_unsafe = kv.get_bool("sampler.goal_is_unsafe", c.goal_is_unsafe);
  c.validate();
  return c;
}

void SamplerConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("sampler.delta must lie in (0, 1)");
  if (!(sigma > 0.0)) throw ConfigError("sampler.sigma must be positive");
  if (!(tau0 > 0.0) || !(tau1 >= tau0)) throw ConfigError("sampler.tau0/tau1 need 0 < tau0 <= tau1");
  if (!(epsilon > 0.0)) throw ConfigError("sampler.epsilon must be positive");
  if (k_safety < 1 || n_safety_rollouts < 1) throw ConfigError("sampler safety k and rollouts must be >= 1");
  for (double s : scale) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("sampler.scale entries must be finite and >= 0");
  }
}

namespace {

double sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

SamplerWeights normalised_to_max(std::vector<double> w) {
  const double peak = *std::max_element(w.begin(), w.end());
  for (auto& x : w) x /= peak;
  SamplerWeights out{std::move(w), 0.0};
  out.norm = sum(out.weights);
  return out;
}

}  // namespace

SamplerWeights init_weights(const DemoStates& demo) {
  if (demo.empty()) throw ConfigError("start-state archive is empty");
  SamplerWeights w;
  w.weights.assign(demo.size(), 1.0);
  w.norm = static_cast<double>(demo.size());
  return w;
}

SamplerWeights uniform_weights(const DemoStates& demo) { return init_weights(demo); }

std::size_t sample_index(const SamplerWeights& weights, Rng& rng) {
  std::discrete_distribution<std::size_t> pick(weights.weights.begin(), weights.weights.end());
  return pick(rng);
}

double smoothing_kernel(const State& a, const State& b, double sigma, const std::array<double, 4>& scale) {
  const double d[4] = {
      scale[0] * (a.position.x - b.position.x), scale[1] * (a.position.y - b.position.y),
      scale[2] * (a.velocity.x - b.velocity.x), scale[3] * (a.velocity.y - b.velocity.y)};
  const double sq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
  return std::exp(-sq / (2.0 * sigma * sigma));
}

SamplerWeights update_auxss(SamplerWeights weights, std::size_t i, int episode_length, int horizon,
                            const DemoStates& demo, const SamplerConfig& cfg, Cause cause) {
  if (horizon < 1) throw ContractViolation("update_auxss: horizon must be >= 1");
  if (episode_length < 0 || episode_length > horizon) {
    throw ContractViolation("update_auxss: episode length " + std::to_string(episode_length) +
                            " outside [0, " + std::to_string(horizon) + "]");
  }
  if (i >= demo.size() || weights.size() != demo.size()) {
    throw ContractViolation("update_auxss: index or weight vector does not match the archive");
  }
  double target = std::max(static_cast<double>(horizon - episode_length) / horizon, cfg.delta);
  if (cfg.cause_aware && cause == Cause::Goal) target = cfg.delta;

  const State& centre = demo.states[i];
  for (std::size_t j = 0; j < demo.size(); ++j) {
    const double lambda = smoothing_kernel(demo.states[j], centre, cfg.sigma, cfg.scale);
    const double w = weights.weights[j];
    const double blended = (1.0 - lambda) * w + lambda * target;
    weights.weights[j] = std::clamp(blended, std::min(w, target), std::max(w, target));
  }
  weights.weights[i] = target;
  weights.norm = sum(weights.weights);
  return weights;
}

SamplerWeights goal_dist_weights(const DemoStates& demo, Vec2 goal, std::int64_t t, std::int64_t t_max,
                                 const SamplerConfig& cfg) {
  if (demo.empty()) throw ConfigError("start-state archive is empty");
  if (t_max <= 0) throw ContractViolation("goal_dist_weights: T_max must be positive");
  const double frac = std::clamp(static_cast<double>(t) / static_cast<double>(t_max), 0.0, 1.0);
  const double tau = cfg.tau0 + (cfg.tau1 - cfg.tau0) * frac;
  std::vector<double> dist(demo.size());
  for (std::size_t j = 0; j < demo.size(); ++j) dist[j] = (demo.states[j].position - goal).norm();
  const double nearest = *std::min_element(dist.begin(), dist.end());
  // Shifted by the nearest distance so the peak is exactly 1 and nothing
  // underflows at low temperature.
  std::vector<double> w(demo.size());
  for (std::size_t j = 0; j < demo.size(); ++j) w[j] = std::exp(-(dist[j] - nearest) / tau);
  SamplerWeights out{std::move(w), 0.0};
  out.norm = sum(out.weights);
  return out;
}

SamplerWeights omega_weights(const DemoStates& demo, const LavaBridge& env, const SamplerConfig& cfg,
                             Rng& rng) {
  if (demo.empty()) throw ConfigError("start-state archive is empty");
  UniformRandomPolicy policy(env.physics().f_max);
  SafetyOptions options;
  options.goal_is_unsafe = cfg.goal_is_unsafe;
  std::vector<double> omega(demo.size());
  for (std::size_t j = 0; j < demo.size(); ++j) {
    omega[j] = estimate_safety(env, demo.states[j], policy, cfg.k_safety, cfg.n_safety_rollouts, rng, options).value;
  }
  return omega_weights_from_safety(omega, cfg.epsilon);
}

SamplerWeights omega_weights_from_safety(std::span<const double> omega, double epsilon) {
  if (omega.empty()) throw ConfigError("start-state archive is empty");
  std::vector<double> w(omega.size());
  for (std::size_t j = 0; j < omega.size(); ++j) w[j] = 1.0 / std::max(omega[j], epsilon);
  return normalised_to_max(std::move(w));
}

StartStateSampler::StartStateSampler(SamplerConfig cfg, DemoStates demo, const LavaBridge& env, Rng& rng)
    : cfg_(cfg), demo_(std::move(demo)), goal_(env.geometry().goal_center) {
  cfg_.validate();
  if (demo_.empty()) throw ConfigError("start-state archive is empty");
  for (const auto& s : demo_.states) env.check_reset(s);
  switch (cfg_.kind) {
    case SamplerKind::AuxSS: weights_ = init_weights(demo_); break;
    case SamplerKind::Uniform: weights_ = uniform_weights(demo_); break;
    case SamplerKind::GoalDist: weights_ = goal_dist_weights(demo_, goal_, 0, 1, cfg_); break;
    case SamplerKind::OmegaSS: weights_ = omega_weights(demo_, env, cfg_, rng); break;
  }
}

std::size_t StartStateSampler::sample(Rng& rng, std::int64_t t, std::int64_t t_max) {
  if (cfg_.kind == SamplerKind::GoalDist) {
    weights_ = goal_dist_weights(demo_, goal_, std::max<std::int64_t>(t, 0), std::max<std::int64_t>(t_max, 1),
                                 cfg_);
  }
  return sample_index(weights_, rng);
}

void StartStateSampler::observe(std::size_t index, int episode_length, int horizon, Cause cause) {
  if (cfg_.kind != SamplerKind::AuxSS) return;
  weights_ = update_auxss(std::move(weights_), index, episode_length, horizon, demo_, cfg_, cause);
}

void StartStateSampler::write_snapshot(std::ostream& out) const {
  out << "# sampler.kind = " << to_string(cfg_.kind) << '\n';
  out << "# sampler.delta = " << format_real17(cfg_.delta) << '\n';
  out << "# sampler.sigma = " << format_real17(cfg_.sigma) << '\n';
  out << "# sampler.tau0 = " << format_real17(cfg_.tau0) << '\n';
  out << "# sampler.tau1 = " << format_real17(cfg_.tau1) << '\n';
  out << "# sampler.epsilon = " << format_real17(cfg_.epsilon) << '\n';
  out << "# sampler.k_safety = " << cfg_.k_safety << '\n';
  out << "# sampler.n_safety_rollouts = " << cfg_.n_safety_rollouts << '\n';
  out << "# sampler.scale = " << format_real17(cfg_.scale[0]) << ',' << format_real17(cfg_.scale[1]) << ','
      << format_real17(cfg_.scale[2]) << ',' << format_real17(cfg_.scale[3]) << '\n';
  out << "# sampler.cause_aware = " << (cfg_.cause_aware ? "true" : "false") << '\n';
  out << "# sampler.goal_is_unsafe = " << (cfg_.goal_is_unsafe ? "true" : "false") << '\n';
  out << "# norm = " << format_real17(weights_.norm) << '\n';
  out << "index,px,py,vx,vy,weight\n";
  for (std::size_t j = 0; j < demo_.size(); ++j) {
    const auto& s = demo_.states[j];
    out << j << ',' << format_real17(s.position.x) << ',' << format_real17(s.position.y) << ','
        << format_real17(s.velocity.x) << ',' << format_real17(s.velocity.y) << ','
        << format_real17(weights_.weights[j]) << '\n';
  }
}

SamplerSnapshot read_snapshot(std::istream& in) {
  SamplerSnapshot snap;
  std::string config_text;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!header_seen) {
      if (line.rfind("#", 0) == 0) {
        const std::string body = trim(std::string_view(line).substr(1));
        if (body.rfind("norm", 0) != 0) config_text += body + '\n';
        continue;
      }
      if (trim(line) != "index,px,py,vx,vy,weight") throw ParseError(line_no, "unexpected snapshot header");
      header_seen = true;
      continue;
    }
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 6) throw ParseError(line_no, "expected 6 columns");
    try {
      if (parse_int(cols[0]) != static_cast<std::int64_t>(snap.demo.size())) {
        throw ParseError(line_no, "indices must be consecutive from 0");
      }
      snap.demo.states.push_back(State{{parse_double(cols[1]), parse_double(cols[2])},
                                       {parse_double(cols[3]), parse_double(cols[4])}});
      snap.demo.trajectory.push_back(0);
      snap.weights.weights.push_back(parse_double(cols[5]));
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!header_seen) throw ParseError(line_no, "missing snapshot header");
  snap.config = SamplerConfig::from_config(KeyValueConfig::parse_string(config_text));
  snap.weights.norm = sum(snap.weights.weights);
  return snap;
}

}  // namespace auxss
