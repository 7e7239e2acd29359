#include <doctest.h>

#include <numeric>

#include "mecco/env.hpp"
#include "mecco/random.hpp"

using namespace mecco;

namespace {

OffloadEnv make_env(std::size_t n, int lf = 8, int lw = 8) {
  ScenarioConfig s;
  s.n_devices = n;
  return OffloadEnv(s, WorkloadConfig{}, ActionGrid{lf, lw});
}

std::size_t count(const ActionMask& m) { return static_cast<std::size_t>(std::accumulate(m.begin(), m.end(), 0)); }

std::vector<std::size_t> feasible_list(const ActionMask& m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("action grid indexing") {
  const ActionGrid g{8, 8};
  CHECK(g.size() == 72);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.index_of(g.action_at(i)) == i);
  CHECK(g.action_at(0) == DiscreteAction{Platform::Cloud, 0, 1});
  CHECK(g.action_at(7) == DiscreteAction{Platform::Cloud, 0, 8});
  CHECK(g.action_at(8) == DiscreteAction{Platform::Edge, 1, 1});
  CHECK(g.action_at(71) == DiscreteAction{Platform::Edge, 8, 8});
}

TEST_CASE("reset gives a full budget state") {
  const OffloadEnv env = make_env(1);
  const SystemState s = env.reset(3);
  CHECK(s.tc == 0.0);
  CHECK(s.ec == env.scenario().edge_capacity);
  CHECK(s.bw == 1.0);
  CHECK(s.cursor == 0);
  const Features f = encode_state(s);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 1.0);
  CHECK(f[2] == 1.0);
  const Task& t = s.episode->tasks[0];
  CHECK(f[3] == doctest::Approx(t.data_bits / env.workload().task_max_bits));
  CHECK(f[4] == doctest::Approx(t.data_bits / env.workload().task_max_bits));
  CHECK(f[5] == 1.0);
}

TEST_CASE("more devices than bandwidth levels is not admissible") {
  CHECK_THROWS_AS(make_env(9, 8, 8), AdmissionError);
  CHECK_NOTHROW(make_env(8, 8, 8));
  const OffloadEnv env = make_env(2, 8, 8);
  CHECK_THROWS_AS(env.reset_with_tasks(std::vector<Task>(9, make_task(1e6, 100, 100))), AdmissionError);
}

TEST_CASE("single device sees every action") {
  const OffloadEnv env = make_env(1);
  CHECK(count(feasible_actions(env.reset(1))) == 72);
}

TEST_CASE("bandwidth is reserved for later devices") {
  const OffloadEnv env = make_env(3);
  const SystemState s = env.reset(1);
  const ActionMask m = feasible_actions(s);
  const ActionGrid& g = env.grid();
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(static_cast<bool>(m[i]) == (g.action_at(i).w_level <= 6));
  const auto after = step(s, g.index_of({Platform::Cloud, 0, 6})).next_state;
  const ActionMask m2 = feasible_actions(after);
  for (std::size_t i = 0; i < m2.size(); ++i) CHECK(static_cast<bool>(m2[i]) == (g.action_at(i).w_level <= 1));
  CHECK_THROWS_AS(step(s, g.index_of({Platform::Cloud, 0, 7})), ConstraintError);
}

TEST_CASE("exhausted edge capacity leaves only cloud actions") {
  const OffloadEnv env = make_env(2);
  const ActionGrid& g = env.grid();
  const auto s = step(env.reset(2), g.index_of({Platform::Edge, 8, 1})).next_state;
  CHECK(s.ec == 0.0);
  for (std::size_t i : feasible_list(feasible_actions(s))) CHECK(g.action_at(i).platform == Platform::Cloud);
  try {
    step(s, g.index_of({Platform::Edge, 1, 1}));
    FAIL("expected ConstraintError");
  } catch (const ConstraintError& e) {
    CHECK(e.constraint() == Constraint::C3);
  }
}

TEST_CASE("cloud actions leave edge capacity untouched") {
  const OffloadEnv env = make_env(3);
  const SystemState s = env.reset(4);
  const auto next = step(s, env.grid().index_of({Platform::Cloud, 0, 2})).next_state;
  CHECK(next.ec == s.ec);
  CHECK(next.bw == doctest::Approx(s.bw - 0.25));
}

TEST_CASE("random episodes: masks, costs and features") {
  Rng rng(99);
  for (int ep = 0; ep < 10000; ++ep) {
    const std::size_t n = 1 + uniform_index(rng, 6);
    const OffloadEnv env = make_env(n, 6, 6);
    SystemState s = env.reset(static_cast<std::uint64_t>(ep));
    double summed = 0.0;
    while (!s.terminal()) {
      const ActionMask m = feasible_actions(s);
      REQUIRE(count(m) > 0);
      for (double v : encode_state(s)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      const auto ids = feasible_list(m);
      const auto out = step(s, ids[uniform_index(rng, ids.size())]);
      CHECK(out.step_cost >= 0.0);
      summed += out.step_cost;
      s = out.next_state;
    }
    // Every completed episode is a feasible plan whose cost matches tc.
    REQUIRE_FALSE(validate_plan(s.plan, s.episode->scenario).has_value());
    const SystemCost total = system_cost(s.plan, s.episode->tasks, s.episode->devices, s.episode->scenario);
    CHECK(s.tc == doctest::Approx(total.total).epsilon(1e-12));
    CHECK(summed == doctest::Approx(total.total).epsilon(1e-9));
    CHECK(count(feasible_actions(s)) == 0);
  }
}

TEST_CASE("mask completeness at N = 3") {
  // Every action the mask rejects raises, every action it allows succeeds.
  const OffloadEnv env = make_env(3, 4, 4);
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    SystemState s = env.reset(static_cast<std::uint64_t>(trial));
    while (!s.terminal()) {
      const ActionMask m = feasible_actions(s);
      for (std::size_t a = 0; a < m.size(); ++a) {
        if (m[a]) CHECK_NOTHROW(step(s, a));
        else CHECK_THROWS_AS(step(s, a), ConstraintError);
      }
      const auto ids = feasible_list(m);
      s = step(s, ids[uniform_index(rng, ids.size())]).next_state;
    }
  }
}

TEST_CASE("episodes are reproducible from the seed") {
  const OffloadEnv env = make_env(5);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    SystemState s = env.reset(seed);
    std::vector<double> costs;
    while (!s.terminal()) {
      const auto ids = feasible_list(feasible_actions(s));
      const auto out = step(s, ids[uniform_index(rng, ids.size())]);
      costs.push_back(out.step_cost);
      s = out.next_state;
    }
    return costs;
  };
  CHECK(run(11) == run(11));
  CHECK(run(11) != run(12));
}

TEST_CASE("task draws share a prefix across device counts") {
  const auto a = make_env(3).draw_tasks(21);
  const auto b = make_env(6).draw_tasks(21);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].data_bits == b[i].data_bits);
}

TEST_CASE("step on a terminal state is rejected") {
  const OffloadEnv env = make_env(1);
  const auto s = step(env.reset(1), 0).next_state;
  CHECK(s.terminal());
  CHECK_THROWS_AS(step(s, 0), ConstraintError);
}
