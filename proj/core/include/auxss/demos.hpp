#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "auxss/env.hpp"
#include "auxss/policy.hpp"
#include "auxss/replay_buffer.hpp"
#include "auxss/samplers.hpp"

namespace auxss {

class KeyValueConfig;

struct ExpertConfig {
  double kp = 0.4;
  double kd = 1.2;
  double switch_radius = 0.5;
  // Visited in order before heading for the goal centre.
  std::vector<Vec2> waypoints{{4.0, 5.0}, {6.0, 5.0}};

  static ExpertConfig from_config(const KeyValueConfig& kv);
};

// Waypoint-following PD controller: bridge entrance, bridge exit, goal.
// Coming within switch_radius of a waypoint targets the one after it. The
// index only moves forward, so the controller is stateful within an episode.
class ScriptedExpert final : public Policy {
 public:
  ScriptedExpert(const WorldGeometry& geometry, ExpertConfig cfg, double f_max);

  void begin_episode(std::size_t index) override;
  Action act(const State& state, Rng& rng) override;
  Action act(const State& state);

  std::size_t waypoint_index() const { return next_; }
  const std::vector<Vec2>& route() const { return route_; }

 private:
  ExpertConfig cfg_;
  double f_max_;
  std::vector<Vec2> route_;
  std::size_t next_ = 0;
};

struct DemoTrajectory {
  int episode = 0;
  int first_step = 0;  // step index of transitions.front() within its episode
  std::vector<Transition> transitions;

  friend bool operator==(const DemoTrajectory&, const DemoTrajectory&) = default;
};

struct DemoArchive {
  std::vector<DemoTrajectory> trajectories;
  std::uint64_t seed = 0;
  std::uint64_t geometry_hash = 0;

  std::size_t transition_count() const;
  std::vector<Transition> transitions() const;
  // Pre-transition states in archive order, tagged by episode.
  DemoStates states() const;

  friend bool operator==(const DemoArchive&, const DemoArchive&) = default;
};

// Runs the expert from p0 draws until n transitions from goal-reaching
// episodes are collected. The last episode is cut to its final (goal
// reaching) steps so the total is exactly n. Throws ConfigError for n == 0
// or when more than half the attempted episodes fail.
DemoArchive generate_demos(const LavaBridge& env, std::size_t n, std::uint64_t seed, ExpertConfig expert = {});

// Uniform subset of m archive states without replacement, kept in archive
// order. Throws ConfigError when m exceeds the archive size.
DemoStates subsample_states(const DemoArchive& archive, std::size_t m, std::uint64_t seed);

// CSV: `# key = value` metadata lines, then the header
// episode,t,px,py,vx,vy,ax,ay,r,done and one row per transition. The next
// state of a row is the following row's state, or, on a terminal row, the
// state the (deterministic) dynamics produce.
void save_archive(const DemoArchive& archive, std::ostream& out);
void save_archive(const DemoArchive& archive, const std::filesystem::path& path);
// Throws ParseError (with line number) on malformed input or a geometry
// hash that does not match `env`.
DemoArchive load_archive(std::istream& in, const LavaBridge& env);
DemoArchive load_archive(const std::filesystem::path& path, const LavaBridge& env);

}  // namespace auxss
