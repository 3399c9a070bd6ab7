#include <doctest.h>

#include <sstream>

#include "auxss/config.hpp"
#include "auxss/errors.hpp"
#include "auxss/policy.hpp"
#include "auxss/safety.hpp"
#include "helpers.hpp"

using namespace auxss;

TEST_SUITE("safety") {
  TEST_CASE("open space is safe for any policy") {
    LavaBridge env;
    const State s{{1.5, 2.0}, {}};
    Rng rng(1);
    UniformRandomPolicy uniform(1.0);
    GridRandomPolicy grid(1.0, 3);
    CHECK(estimate_safety(env, s, uniform, 4, 200, rng).value == 1.0);
    CHECK(estimate_safety(env, s, grid, 4, 200, rng).value == 1.0);
    CHECK(brute_force_safety(env, s, 2, 3) == 1.0);
  }

  TEST_CASE("full speed one step from lava is doomed") {
    LavaBridge env;
    // Braking changes the next velocity by at most f_max dt = 0.1, far less
    // than the 0.1 m gap needs at v_max.
    const State s{{5.0, 4.6}, {0.0, -2.0}};
    Rng rng(2);
    UniformRandomPolicy policy(1.0);
    CHECK(estimate_safety(env, s, policy, 4, 256, rng).value == 0.0);
    CHECK(brute_force_safety(env, s, 1, 5) == 0.0);
    CHECK(brute_force_safety(env, s, 3, 3) == 0.0);
  }

  TEST_CASE("grid enumeration reproduces the exhaustive count") {
    LavaBridge env;
    Rng pick(3);
    std::uniform_real_distribution<double> x(4.0, 6.0);
    std::uniform_real_distribution<double> y(4.55, 5.45);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    int fractional = 0;
    for (int i = 0; i < 20; ++i) {
      const State s{{x(pick), y(pick)}, {v(pick), v(pick)}};
      const double exact = brute_force_safety(env, s, 2, 5);
      GridEnumerationPolicy walk(1.0, 5);
      Rng rng(100 + i);
      const auto est = estimate_safety(env, s, walk, 2, 625, rng);
      CHECK(est.value == exact);
      if (exact > 0.0 && exact < 1.0) ++fractional;
    }
    MESSAGE(fractional << " of 20 states have a fractional safety");
  }

  TEST_CASE("mid-bridge Monte Carlo agrees with the grid oracle") {
    LavaBridge env;
    // Drifting towards the lower edge: a fraction of action sequences fail.
    const State s{{5.0, 4.72}, {0.0, -1.0}};
    const double exact = brute_force_safety(env, s, 2, 5);
    CHECK(exact > 0.0);
    CHECK(exact < 1.0);
    GridRandomPolicy policy(1.0, 5);
    Rng rng(4);
    const int n = 4000;
    const auto est = estimate_safety(env, s, policy, 2, n, rng);
    CHECK(std::abs(est.value - exact) <= three_sigma(exact, n));
  }

  TEST_CASE("estimates are proper fractions, deterministic, and shrink with k") {
    LavaBridge env;
    UniformRandomPolicy policy(1.0);
    Rng pick(5);
    std::uniform_real_distribution<double> x(3.5, 6.5);
    std::uniform_real_distribution<double> y(4.55, 5.45);
    std::uniform_real_distribution<double> v(-1.5, 1.5);
    for (int i = 0; i < 30; ++i) {
      const State s{{x(pick), y(pick)}, {v(pick), v(pick) * 0.5}};
      if (env.is_terminal(s) != Cause::None) continue;
      double previous = 1.0;
      for (int k = 1; k <= 8; ++k) {
        Rng a(77 + i);
        Rng b(77 + i);
        const auto e1 = estimate_safety(env, s, policy, k, 100, a);
        const auto e2 = estimate_safety(env, s, policy, k, 100, b);
        CHECK(e1.value == e2.value);
        CHECK(e1.value >= 0.0);
        CHECK(e1.value <= 1.0);
        CHECK(e1.value * e1.n_rollouts == doctest::Approx(e1.safe_rollouts));
        CHECK(e1.value <= previous);
        previous = e1.value;
      }
    }
  }

  TEST_CASE("goal handling flag") {
    LavaBridge env;
    const Vec2 g = env.geometry().goal_center;
    const State s{{g.x - 0.5, g.y}, {1.0, 0.0}};
    UniformRandomPolicy policy(1.0);
    Rng rng(6);
    CHECK(estimate_safety(env, s, policy, 3, 64, rng).value == 1.0);
    SafetyOptions strict;
    strict.goal_is_unsafe = true;
    CHECK(estimate_safety(env, s, policy, 3, 64, rng, strict).value == 0.0);
    CHECK(brute_force_safety(env, s, 2, 3, strict) == 0.0);
  }

  TEST_CASE("preconditions") {
    LavaBridge env;
    UniformRandomPolicy policy(1.0);
    Rng rng(7);
    CHECK_THROWS_AS(estimate_safety(env, {{5.0, 2.0}, {}}, policy, 2, 10, rng), ContractViolation);
    CHECK_THROWS_AS(estimate_safety(env, {{1.0, 2.0}, {}}, policy, 0, 10, rng), ContractViolation);
    CHECK_THROWS_AS(estimate_safety(env, {{1.0, 2.0}, {}}, policy, 2, 0, rng), ContractViolation);
    CHECK_THROWS_AS(brute_force_safety(env, {{1.0, 2.0}, {}}, 6, 5), ConfigError);
  }

  TEST_CASE("action grid layout") {
    CHECK(grid_value(0, 5, 1.0) == -1.0);
    CHECK(grid_value(2, 5, 1.0) == 0.0);
    CHECK(grid_value(4, 5, 1.0) == 1.0);
    const auto grid = action_grid(2.0, 3);
    REQUIRE(grid.size() == 9);
    CHECK(grid[1].force == Vec2{-2.0, 0.0});
    CHECK(grid[3].force == Vec2{0.0, -2.0});
    CHECK_THROWS_AS(action_grid(1.0, 1), ConfigError);
  }

  TEST_CASE("safety map") {
    LavaBridge env;
    std::stringstream out;
    write_safety_map(out, env, 10, 2, 16, 8);
    std::string line;
    std::getline(out, line);
    CHECK(line == "px,py,omega");
    int rows = 0;
    int zeros = 0;
    while (std::getline(out, line)) {
      ++rows;
      const auto cols = split(line, ',');
      REQUIRE(cols.size() == 3);
      const double omega = parse_double(cols[2]);
      CHECK(omega >= 0.0);
      CHECK(omega <= 1.0);
      if (omega == 0.0) ++zeros;
    }
    CHECK(rows == 100);
    CHECK(zeros >= 18);  // the lava columns x in [4, 6]
  }
}
