#include "auxss/env.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"

namespace auxss {

std::string_view to_string(Cause cause) {
  switch (cause) {
    case Cause::None: return "none";
    case Cause::Goal: return "goal";
    case Cause::Lava: return "lava";
    case Cause::Timeout: return "timeout";
  }
  return "none";
}

std::optional<Cause> cause_from_string(std::string_view text) {
  if (text == "none") return Cause::None;
  if (text == "goal") return Cause::Goal;
  if (text == "lava") return Cause::Lava;
  if (text == "timeout") return Cause::Timeout;
  return std::nullopt;
}

WorldGeometry WorldGeometry::lava_bridge() {
  WorldGeometry g;
  g.bounds = {0.0, 10.0, 0.0, 10.0};
  g.lava = {{4.0, 6.0, 0.0, 4.5}, {4.0, 6.0, 5.5, 10.0}};
  g.goal_center = {9.0, 5.0};
  g.goal_radius = 0.4;
  g.p0 = {{{1.0, 2.5}, 0.3}, {{1.0, 7.5}, 0.3}};
  g.ood_points = {{1.0, 5.0}, {2.5, 1.0}, {2.5, 9.0}, {3.5, 4.0}, {3.5, 6.0}, {0.5, 0.5}};
  g.ood_jitter = 0.15;
  return g;
}

bool WorldGeometry::in_lava(Vec2 p) const {
  return std::any_of(lava.begin(), lava.end(), [p](const Rect& r) { return r.contains(p); });
}

bool WorldGeometry::in_goal(Vec2 p) const {
  return (p - goal_center).squared_norm() <= goal_radius * goal_radius;
}

void WorldGeometry::validate() const {
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
    throw ConfigError("world bounds are empty");
  }
  for (const auto& r : lava) {
    if (!(r.x_max >= r.x_min) || !(r.y_max >= r.y_min)) throw ConfigError("degenerate lava rectangle");
    if (!bounds.contains(r)) throw ConfigError("lava rectangle outside world bounds");
  }
  if (!goal_center.finite() || !bounds.contains(goal_center)) throw ConfigError("goal outside world");
  if (in_lava(goal_center)) throw ConfigError("goal center inside lava");
  if (!(goal_radius > 0.0)) throw ConfigError("goal radius must be positive");
  if (p0.empty()) throw ConfigError("p0 needs at least one component");
  for (const auto& blob : p0) {
    if (!(blob.stddev >= 0.0)) throw ConfigError("p0 stddev must be non-negative");
    if (!bounds.contains(blob.mean) || in_lava(blob.mean) || in_goal(blob.mean)) {
      throw ConfigError("p0 mean must be a free, non-terminal position");
    }
  }
  if (ood_points.empty()) throw ConfigError("OOD distribution needs at least one point");
  if (!(ood_jitter >= 0.0)) throw ConfigError("OOD jitter must be non-negative");
  for (const auto& p : ood_points) {
    if (!bounds.contains(p) || in_lava(p) || in_goal(p)) {
      throw ConfigError("OOD point must be a free, non-terminal position");
    }
  }
}

void Physics::validate() const {
  if (!(dt > 0.0)) throw ConfigError("env.dt must be positive");
  if (!(mass > 0.0)) throw ConfigError("env.mass must be positive");
  if (!(f_max > 0.0)) throw ConfigError("env.f_max must be positive");
  if (!(drag >= 0.0)) throw ConfigError("env.drag must be non-negative");
  if (!(v_max > 0.0)) throw ConfigError("env.v_max must be positive");
}

void EnvConfig::validate() const {
  geometry.validate();
  physics.validate();
  if (horizon < 1) throw ConfigError("env.horizon must be >= 1");
}

namespace {

Rect rect_from(const std::vector<double>& v, const char* key) {
  if (v.size() != 4) throw ConfigError(std::string(key) + ": rectangles need x_min,x_max,y_min,y_max");
  return {v[0], v[1], v[2], v[3]};
}

Vec2 vec_from(const std::vector<double>& v, const char* key) {
  if (v.size() != 2) throw ConfigError(std::string(key) + ": points need x,y");
  return {v[0], v[1]};
}

}  // namespace

EnvConfig EnvConfig::from_config(const KeyValueConfig& kv) {
  EnvConfig cfg;
  auto& p = cfg.physics;
  p.dt = kv.get_double("env.dt", p.dt);
  p.mass = kv.get_double("env.mass", p.mass);
  p.f_max = kv.get_double("env.f_max", p.f_max);
  p.drag = kv.get_double("env.drag", p.drag);
  p.v_max = kv.get_double("env.v_max", p.v_max);
  cfg.horizon = static_cast<int>(kv.get_int("env.horizon", cfg.horizon));

  auto& g = cfg.geometry;
  if (auto groups = kv.get_groups("env.bounds")) {
    if (groups->size() != 1) throw ConfigError("env.bounds: expected one rectangle");
    g.bounds = rect_from(groups->front(), "env.bounds");
  }
  if (auto groups = kv.get_groups("env.lava")) {
    g.lava.clear();
    for (const auto& v : *groups) g.lava.push_back(rect_from(v, "env.lava"));
  }
  if (auto groups = kv.get_groups("env.goal")) {
    if (groups->size() != 1) throw ConfigError("env.goal: expected one point");
    g.goal_center = vec_from(groups->front(), "env.goal");
  }
  g.goal_radius = kv.get_double("env.goal_radius", g.goal_radius);
  if (auto groups = kv.get_groups("env.p0")) {
    g.p0.clear();
    for (const auto& v : *groups) {
      if (v.size() != 3) throw ConfigError("env.p0: components need mean_x,mean_y,stddev");
      g.p0.push_back({{v[0], v[1]}, v[2]});
    }
  }
  if (kv.has("env.p0_stddev")) {
    const double s = kv.get_double("env.p0_stddev", 0.0);
    for (auto& blob : g.p0) blob.stddev = s;
  }
  if (auto groups = kv.get_groups("env.ood_points")) {
    g.ood_points.clear();
    for (const auto& v : *groups) g.ood_points.push_back(vec_from(v, "env.ood_points"));
  }
  g.ood_jitter = kv.get_double("env.ood_jitter", g.ood_jitter);
  cfg.validate();
  return cfg;
}

std::uint64_t EnvConfig::geometry_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  const auto& g = geometry;
  mix(g.bounds.x_min); mix(g.bounds.x_max); mix(g.bounds.y_min); mix(g.bounds.y_max);
  mix(static_cast<double>(g.lava.size()));
  for (const auto& r : g.lava) { mix(r.x_min); mix(r.x_max); mix(r.y_min); mix(r.y_max); }
  mix(g.goal_center.x); mix(g.goal_center.y); mix(g.goal_radius);
  mix(static_cast<double>(g.p0.size()));
  for (const auto& b : g.p0) { mix(b.mean.x); mix(b.mean.y); mix(b.stddev); }
  mix(static_cast<double>(g.ood_points.size()));
  for (const auto& p : g.ood_points) { mix(p.x); mix(p.y); }
  mix(g.ood_jitter);
  mix(physics.dt); mix(physics.mass); mix(physics.f_max); mix(physics.drag); mix(physics.v_max);
  return h;
}

LavaBridge::LavaBridge(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  state_.position = config_.geometry.p0.front().mean;
}

std::optional<ResetRejection> LavaBridge::reset_rejection(const State& s) const {
  const auto& g = config_.geometry;
  if (!s.position.finite() || !s.velocity.finite()) return ResetRejection::NonFinite;
  if (!g.bounds.contains(s.position)) return ResetRejection::OutOfBounds;
  if (g.in_lava(s.position)) return ResetRejection::Lava;
  if (s.velocity.norm() > config_.physics.v_max) return ResetRejection::TooFast;
  return std::nullopt;
}

void LavaBridge::check_reset(const State& s) const {
  const auto reason = reset_rejection(s);
  if (!reason) return;
  switch (*reason) {
    case ResetRejection::NonFinite: throw InvalidReset(*reason, "reset state is not finite");
    case ResetRejection::OutOfBounds: throw InvalidReset(*reason, "reset position outside world bounds");
    case ResetRejection::Lava: throw InvalidReset(*reason, "reset position inside lava");
    case ResetRejection::TooFast: throw InvalidReset(*reason, "reset velocity exceeds v_max");
  }
}

const State& LavaBridge::reset_to(const State& s) {
  check_reset(s);
  state_ = s;
  elapsed_ = 0;
  done_ = false;
  return state_;
}

StepResult LavaBridge::step(const Action& action) {
  if (done_) throw ContractViolation("step() on a terminated episode; call reset_to first");
  if (!action.force.finite()) throw ContractViolation("non-finite action");
  const auto& ph = config_.physics;
  const auto& g = config_.geometry;

  const Vec2 force{std::clamp(action.force.x, -ph.f_max, ph.f_max),
                   std::clamp(action.force.y, -ph.f_max, ph.f_max)};
  Vec2 v = state_.velocity + ((force - ph.drag * state_.velocity) * (ph.dt / ph.mass));
  const double speed = v.norm();
  if (speed > ph.v_max) {
    v = v * (ph.v_max / speed);
    while (v.norm() > ph.v_max) v = v * std::nextafter(1.0, 0.0);
  }
  Vec2 p = state_.position + v * ph.dt;
  if (p.x < g.bounds.x_min) { p.x = g.bounds.x_min; v.x = 0.0; }
  if (p.x > g.bounds.x_max) { p.x = g.bounds.x_max; v.x = 0.0; }
  if (p.y < g.bounds.y_min) { p.y = g.bounds.y_min; v.y = 0.0; }
  if (p.y > g.bounds.y_max) { p.y = g.bounds.y_max; v.y = 0.0; }

  state_ = {p, v};
  ++elapsed_;

  StepResult out;
  out.next_state = state_;
  out.cause = is_terminal(state_);
  if (out.cause == Cause::Lava) {
    out.reward = -1.0;
  } else if (out.cause == Cause::Goal) {
    out.reward = 1.0;
  } else if (elapsed_ >= config_.horizon) {
    out.cause = Cause::Timeout;
  }
  out.terminated = out.cause != Cause::None;
  done_ = out.terminated;
  return out;
}

Cause LavaBridge::is_terminal(const State& s) const {
  const auto& g = config_.geometry;
  if (g.in_lava(s.position)) return Cause::Lava;
  if (g.in_goal(s.position)) return Cause::Goal;
  return Cause::None;
}

State LavaBridge::sample_start(StartDistribution which, Rng& rng) const {
  const auto& g = config_.geometry;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec2 center;
  double stddev = 0.0;
  if (which == StartDistribution::P0) {
    std::uniform_int_distribution<std::size_t> pick(0, g.p0.size() - 1);
    const auto& blob = g.p0[pick(rng)];
    center = blob.mean;
    stddev = blob.stddev;
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, g.ood_points.size() - 1);
    center = g.ood_points[pick(rng)];
    stddev = g.ood_jitter;
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Vec2 p{center.x + stddev * normal(rng), center.y + stddev * normal(rng)};
    if (g.bounds.contains(p) && is_terminal(State{p, {}}) == Cause::None) return State{p, {}};
  }
  return State{center, {}};
}

}  // namespace auxss
