#include "auxss/demos.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"
#include "auxss/format.hpp"

namespace auxss {

ExpertConfig ExpertConfig::from_config(const KeyValueConfig& kv) {
  ExpertConfig c;
  c.kp = kv.get_double("expert.kp", c.kp);
  c.kd = kv.get_double("expert.kd", c.kd);
  c.switch_radius = kv.get_double("expert.switch_radius", c.switch_radius);
  if (auto groups = kv.get_groups("expert.waypoints")) {
    c.waypoints.clear();
    for (const auto& g : *groups) {
      if (g.size() != 2) throw ConfigError("expert.waypoints: points need x,y");
      c.waypoints.push_back({g[0], g[1]});
    }
  }
  return c;
}

ScriptedExpert::ScriptedExpert(const WorldGeometry& geometry, ExpertConfig cfg, double f_max)
    : cfg_(std::move(cfg)), f_max_(f_max), route_(cfg_.waypoints) {
  route_.push_back(geometry.goal_center);
}

void ScriptedExpert::begin_episode(std::size_t) { next_ = 0; }

Action ScriptedExpert::act(const State& state, Rng&) { return act(state); }

Action ScriptedExpert::act(const State& state) {
  // Skip ahead past any waypoint we are already close to.
  for (std::size_t j = route_.size() - 1; j-- > next_;) {
    if ((route_[j] - state.position).norm() < cfg_.switch_radius) {
      next_ = j + 1;
      break;
    }
  }
  const Vec2 f = cfg_.kp * (route_[next_] - state.position) - cfg_.kd * state.velocity;
  return Action{{std::clamp(f.x, -f_max_, f_max_), std::clamp(f.y, -f_max_, f_max_)}};
}

std::size_t DemoArchive::transition_count() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.transitions.size();
  return n;
}

std::vector<Transition> DemoArchive::transitions() const {
  std::vector<Transition> out;
  out.reserve(transition_count());
  for (const auto& t : trajectories) out.insert(out.end(), t.transitions.begin(), t.transitions.end());
  return out;
}

DemoStates DemoArchive::states() const {
  DemoStates out;
  for (const auto& traj : trajectories) {
    for (const auto& t : traj.transitions) {
      out.states.push_back(t.state);
      out.trajectory.push_back(traj.episode);
    }
  }
  return out;
}

DemoArchive generate_demos(const LavaBridge& env, std::size_t n, std::uint64_t seed, ExpertConfig expert_cfg) {
  if (n == 0) throw ConfigError("generate_demos: requested an empty archive");
  LavaBridge sim = env;
  ScriptedExpert expert(env.geometry(), std::move(expert_cfg), env.physics().f_max);
  Rng rng(seed);

  DemoArchive archive;
  archive.seed = seed;
  archive.geometry_hash = env.config().geometry_hash();
  std::size_t collected = 0;
  int attempts = 0;
  int failures = 0;
  while (collected < n) {
    DemoTrajectory traj;
    traj.episode = attempts;
    ++attempts;
    sim.reset_to(sim.sample_start(StartDistribution::P0, rng));
    expert.begin_episode(static_cast<std::size_t>(traj.episode));
    StepResult step;
    do {
      const State s = sim.state();
      const Action a = expert.act(s);
      step = sim.step(a);
      traj.transitions.push_back(
          {s, a, step.reward, step.next_state, step.cause == Cause::Goal || step.cause == Cause::Lava, step.cause});
    } while (!step.terminated);

    if (step.cause != Cause::Goal) {
      ++failures;
      if (attempts >= 4 && 2 * failures > attempts) {
        throw ConfigError("scripted expert failed " + std::to_string(failures) + " of " +
                          std::to_string(attempts) + " episodes; check geometry and expert gains");
      }
      continue;
    }
    collected += traj.transitions.size();
    archive.trajectories.push_back(std::move(traj));
  }

  const std::size_t excess = collected - n;
  if (excess > 0) {
    auto& last = archive.trajectories.back();
    last.transitions.erase(last.transitions.begin(), last.transitions.begin() + static_cast<std::ptrdiff_t>(excess));
    last.first_step = static_cast<int>(excess);
  }
  return archive;
}

DemoStates subsample_states(const DemoArchive& archive, std::size_t m, std::uint64_t seed) {
  const DemoStates all = archive.states();
  if (m > all.size()) {
    throw ConfigError("cannot draw " + std::to_string(m) + " states from an archive of " +
                      std::to_string(all.size()));
  }
  std::vector<std::size_t> population(all.size());
  std::iota(population.begin(), population.end(), 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(m);
  Rng rng(seed);
  std::sample(population.begin(), population.end(), std::back_inserter(chosen), m, rng);
  std::sort(chosen.begin(), chosen.end());
  DemoStates out;
  for (std::size_t j : chosen) {
    out.states.push_back(all.states[j]);
    out.trajectory.push_back(all.trajectory[j]);
  }
  return out;
}

namespace {

constexpr const char* kHeader = "episode,t,px,py,vx,vy,ax,ay,r,done";

}  // namespace

void save_archive(const DemoArchive& archive, std::ostream& out) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(archive.geometry_hash));
  out << "# seed = " << archive.seed << '\n';
  out << "# geometry_hash = " << hash << '\n';
  out << "# count = " << archive.transition_count() << '\n';
  out << kHeader << '\n';
  for (const auto& traj : archive.trajectories) {
    int t = traj.first_step;
    for (const auto& tr : traj.transitions) {
      out << traj.episode << ',' << t++ << ',' << format_real17(tr.state.position.x) << ','
          << format_real17(tr.state.position.y) << ',' << format_real17(tr.state.velocity.x) << ','
          << format_real17(tr.state.velocity.y) << ',' << format_real17(tr.action.force.x) << ','
          << format_real17(tr.action.force.y) << ',' << format_real17(tr.reward) << ','
          << (tr.done ? 1 : 0) << '\n';
    }
  }
}

void save_archive(const DemoArchive& archive, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write demo archive " + path.string());
  save_archive(archive, out);
  if (!out) throw ConfigError("failed writing demo archive " + path.string());
}

DemoArchive load_archive(std::istream& in, const LavaBridge& env) {
  struct Row {
    std::size_t line;
    int episode;
    int t;
    State s;
    Action a;
    double r;
    bool done;
  };
  DemoArchive archive;
  bool have_hash = false;
  std::size_t declared_count = 0;
  bool have_count = false;
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("#", 0) == 0) {
        const std::string body = trim(std::string_view(line).substr(1));
        const auto eq = body.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        try {
          if (key == "seed") {
            archive.seed = std::stoull(value);
          } else if (key == "geometry_hash") {
            archive.geometry_hash = std::stoull(value, nullptr, 16);
            have_hash = true;
          } else if (key == "count") {
            declared_count = std::stoull(value);
            have_count = true;
          }
        } catch (const std::exception&) {
          throw ParseError(line_no, "bad metadata value for '" + key + "'");
        }
        continue;
      }
      if (trim(line) != kHeader) throw ParseError(line_no, std::string("schema mismatch: expected header '") + kHeader + "'");
      header_seen = true;
      continue;
    }
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 10) throw ParseError(line_no, "expected 10 columns, found " + std::to_string(cols.size()));
    try {
      Row row;
      row.line = line_no;
      row.episode = static_cast<int>(parse_int(cols[0]));
      row.t = static_cast<int>(parse_int(cols[1]));
      row.s = {{parse_double(cols[2]), parse_double(cols[3])}, {parse_double(cols[4]), parse_double(cols[5])}};
      row.a = {{parse_double(cols[6]), parse_double(cols[7])}};
      row.r = parse_double(cols[8]);
      const auto done = parse_int(cols[9]);
      if (done != 0 && done != 1) throw ConfigError("done must be 0 or 1");
      row.done = done == 1;
      rows.push_back(row);
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!header_seen) throw ParseError(line_no, "schema mismatch: missing header");
  if (!have_hash) throw ParseError(0, "demo archive has no geometry_hash metadata");
  if (archive.geometry_hash != env.config().geometry_hash()) {
    throw ParseError(0, "demo archive geometry hash does not match the environment");
  }

  LavaBridge sim = env;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& row = rows[k];
    if (auto reason = sim.reset_rejection(row.s)) {
      throw ParseError(row.line, "recorded state is not a valid environment state");
    }
    const bool starts_new = k == 0 || rows[k - 1].done || rows[k - 1].episode != row.episode;
    if (k > 0 && !rows[k - 1].done && rows[k - 1].episode != row.episode) {
      throw ParseError(rows[k - 1].line, "trajectory ends without a terminal row");
    }
    if (starts_new) {
      DemoTrajectory traj;
      traj.episode = row.episode;
      traj.first_step = row.t;
      archive.trajectories.push_back(std::move(traj));
    } else if (row.t != rows[k - 1].t + 1) {
      throw ParseError(row.line, "step index is not consecutive");
    }
    Transition tr;
    tr.state = row.s;
    tr.action = row.a;
    tr.reward = row.r;
    tr.done = row.done;
    if (row.done) {
      sim.reset_to(row.s);
      const StepResult res = sim.step(row.a);
      if (res.cause != Cause::Goal && res.cause != Cause::Lava) {
        throw ParseError(row.line, "terminal row does not terminate under the environment dynamics");
      }
      if (res.reward != row.r) throw ParseError(row.line, "terminal reward disagrees with the dynamics");
      tr.next_state = res.next_state;
      tr.cause = res.cause;
    } else {
      if (row.r != 0.0) throw ParseError(row.line, "non-terminal row with non-zero reward");
      if (k + 1 >= rows.size() || rows[k + 1].episode != row.episode) {
        throw ParseError(row.line, "trajectory ends without a terminal row (truncated file?)");
      }
      tr.next_state = rows[k + 1].s;
      tr.cause = Cause::None;
    }
    archive.trajectories.back().transitions.push_back(tr);
  }
  if (have_count && declared_count != rows.size()) {
    throw ParseError(line_no, "archive declares " + std::to_string(declared_count) + " transitions but holds " +
                                  std::to_string(rows.size()));
  }
  return archive;
}

DemoArchive load_archive(const std::filesystem::path& path, const LavaBridge& env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open demo archive " + path.string());
  return load_archive(in, env);
}

}  // namespace auxss
