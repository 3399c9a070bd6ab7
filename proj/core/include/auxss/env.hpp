#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auxss/errors.hpp"
#include "auxss/rng.hpp"

namespace auxss {

class KeyValueConfig;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::sqrt(squared_norm()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

struct State {
  Vec2 position;
  Vec2 velocity;
  friend bool operator==(const State&, const State&) = default;
};

struct Action {
  Vec2 force;
  friend bool operator==(const Action&, const Action&) = default;
};

// Closed axis-aligned rectangle.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool contains(const Rect& r) const {
    return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min && r.y_max <= y_max;
  }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
};

enum class Cause { None, Goal, Lava, Timeout };

std::string_view to_string(Cause cause);
std::optional<Cause> cause_from_string(std::string_view text);

enum class StartDistribution { P0, OOD };

struct GaussianBlob {
  Vec2 mean;
  double stddev = 0.0;
};

struct WorldGeometry {
  Rect bounds{0.0, 10.0, 0.0, 10.0};
  std::vector<Rect> lava;
  Vec2 goal_center;
  double goal_radius = 0.0;
  std::vector<GaussianBlob> p0;
  std::vector<Vec2> ood_points;
  double ood_jitter = 0.0;

  // Two open regions joined by a one-unit bridge at y = 5, lava on both
  // flanks of the bridge, goal on the far side.
  static WorldGeometry lava_bridge();

  bool in_lava(Vec2 p) const;
  bool in_goal(Vec2 p) const;
  // Throws ConfigError when the layout is inconsistent.
  void validate() const;
};

struct Physics {
  double dt = 0.1;
  double mass = 1.0;
  double f_max = 1.0;
  double drag = 0.1;
  double v_max = 2.0;

  void validate() const;
};

struct EnvConfig {
  WorldGeometry geometry = WorldGeometry::lava_bridge();
  Physics physics;
  int horizon = 500;

  static EnvConfig from_config(const KeyValueConfig& kv);
  void validate() const;
  // FNV-1a over the bit patterns of every geometry and physics constant.
  // Demo archives carry it so they are never replayed in a different world.
  std::uint64_t geometry_hash() const;
};

struct StepResult {
  State next_state;
  double reward = 0.0;
  bool terminated = false;
  Cause cause = Cause::None;
};

// Point mass in a walled plane. Resettable to any valid state; rewards are
// +1 on entering the goal disc, -1 on entering lava and 0 otherwise.
class LavaBridge {
 public:
  explicit LavaBridge(EnvConfig config = {});

  const EnvConfig& config() const { return config_; }
  const WorldGeometry& geometry() const { return config_.geometry; }
  const Physics& physics() const { return config_.physics; }
  int horizon() const { return config_.horizon; }

  // Throws InvalidReset for out-of-bounds, lava, over-speed or non-finite
  // states.
  const State& reset_to(const State& state);
  void check_reset(const State& state) const;
  std::optional<ResetRejection> reset_rejection(const State& state) const;
  bool valid_start(const State& state) const { return !reset_rejection(state).has_value(); }

  StepResult step(const Action& action);

  // Lava, Goal or None; a pure function of position.
  Cause is_terminal(const State& state) const;

  State sample_start(StartDistribution which, Rng& rng) const;

  const State& state() const { return state_; }
  int elapsed() const { return elapsed_; }
  bool done() const { return done_; }

 private:
  EnvConfig config_;
  State state_;
  int elapsed_ = 0;
  bool done_ = true;
};

}  // namespace auxss
