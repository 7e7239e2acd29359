#include "mecco/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "mecco/random.hpp"

namespace mecco {

void WorkloadConfig::validate() const {
  device.validate();
  if (!(cycles_per_bit > 0.0)) throw ConfigError("cycles_per_bit must be positive");
  if (!(task_min_bits > 0.0)) throw ConfigError("task_min_mb must be positive");
  if (!(task_max_bits >= task_min_bits)) throw ConfigError("task_max_mb must be >= task_min_mb");
  if (!(deadline_s > 0.0)) throw ConfigError("deadline must be positive");
}

void ActionGrid::validate() const {
  if (edge_levels < 1 || bw_levels < 1) throw ConfigError("action grid needs at least one level");
}

std::size_t ActionGrid::index_of(const DiscreteAction& a) const {
  const auto lw = static_cast<std::size_t>(bw_levels);
  if (a.platform == Platform::Cloud) return static_cast<std::size_t>(a.w_level - 1);
  return lw + static_cast<std::size_t>(a.f_level - 1) * lw + static_cast<std::size_t>(a.w_level - 1);
}

DiscreteAction ActionGrid::action_at(std::size_t index) const {
  const auto lw = static_cast<std::size_t>(bw_levels);
  if (index < lw) return {Platform::Cloud, 0, static_cast<int>(index) + 1};
  const std::size_t e = index - lw;
  return {Platform::Edge, static_cast<int>(e / lw) + 1, static_cast<int>(e % lw) + 1};
}

OffloadEnv::OffloadEnv(ScenarioConfig scenario, WorkloadConfig workload, ActionGrid grid)
    : scenario_(scenario), workload_(workload), grid_(grid) {
  scenario_.validate();
  workload_.validate();
  grid_.validate();
  if (scenario_.n_devices > static_cast<std::size_t>(grid_.bw_levels))
    throw AdmissionError("n_devices = " + std::to_string(scenario_.n_devices) +
                         " exceeds the " + std::to_string(grid_.bw_levels) +
                         " bandwidth levels; every device needs at least one bandwidth quantum");
}

std::vector<Task> OffloadEnv::draw_tasks(std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Task> tasks;
  tasks.reserve(scenario_.n_devices);
  for (std::size_t n = 0; n < scenario_.n_devices; ++n) {
    const double bits = uniform_real(rng, workload_.task_min_bits, workload_.task_max_bits);
    tasks.push_back(make_task(bits, workload_.cycles_per_bit, workload_.deadline_s));
  }
  return tasks;
}

double OffloadEnv::all_cloud_cost(const std::vector<Task>& tasks) const {
  if (tasks.empty()) return 1.0;
  AllocationPlan plan;
  const double w = 1.0 / static_cast<double>(tasks.size());
  for (std::size_t n = 0; n < tasks.size(); ++n) plan.push_back(OffloadDecision::to_cloud(), 0.0, w);
  ScenarioConfig cfg = scenario_;
  cfg.enforce_deadline = false;
  const std::vector<DeviceProfile> devs(tasks.size(), workload_.device);
  return system_cost(plan, tasks, devs, cfg).total;
}

SystemState OffloadEnv::reset(std::uint64_t seed) const { return reset_with_tasks(draw_tasks(seed)); }

SystemState OffloadEnv::reset_with_tasks(std::vector<Task> tasks) const {
  if (tasks.size() > static_cast<std::size_t>(grid_.bw_levels))
    throw AdmissionError("more tasks than bandwidth levels");
  auto ep = std::make_shared<Episode>();
  ep->scenario = scenario_;
  ep->grid = grid_;
  ep->devices.assign(tasks.size(), workload_.device);
  ep->cost_scale = all_cloud_cost(tasks);
  ep->task_max_bits = workload_.task_max_bits;
  ep->cycles_max = workload_.task_max_bits * workload_.cycles_per_bit;
  ep->tasks = std::move(tasks);

  SystemState s;
  s.tc = 0.0;
  s.ec = scenario_.edge_capacity;
  s.bw = 1.0;
  s.cursor = 0;
  s.edge_quanta_left = grid_.edge_levels;
  s.bw_quanta_left = grid_.bw_levels;
  s.episode = std::move(ep);
  return s;
}

ActionMask feasible_actions(const SystemState& state) {
  const ActionGrid& grid = state.episode->grid;
  ActionMask mask(grid.size(), 0);
  if (state.terminal()) return mask;
  const int reserved_bw = static_cast<int>(state.n_devices() - state.cursor - 1);
  const int max_w = state.bw_quanta_left - reserved_bw;
  const int max_f = state.edge_quanta_left;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const DiscreteAction a = grid.action_at(i);
    const bool bw_ok = a.w_level <= max_w;
    const bool f_ok = a.platform == Platform::Cloud || a.f_level <= max_f;
    mask[i] = (bw_ok && f_ok) ? 1 : 0;
  }
  return mask;
}

StepOutcome step(const SystemState& state, std::size_t action_index) {
  const Episode& ep = *state.episode;
  if (state.terminal())
    throw ConstraintError(Constraint::C6, "episode already finished");
  if (action_index >= ep.grid.size())
    throw ConstraintError(Constraint::C1, "action index out of range");
  if (!feasible_actions(state)[action_index]) {
    const DiscreteAction a = ep.grid.action_at(action_index);
    const bool edge_short = a.platform == Platform::Edge && a.f_level > state.edge_quanta_left;
    throw ConstraintError(edge_short ? Constraint::C3 : Constraint::C6,
                          "action " + std::to_string(action_index) + " is not feasible in this state");
  }

  const DiscreteAction a = ep.grid.action_at(action_index);
  const bool edge = a.platform == Platform::Edge;
  const double f = edge ? ep.grid.edge_alloc(a.f_level, ep.scenario.edge_capacity) : 0.0;
  const double w = ep.grid.bw_share(a.w_level);

  StepOutcome out;
  SystemState& next = out.next_state;
  next = state;
  next.plan.push_back(edge ? OffloadDecision::to_edge() : OffloadDecision::to_cloud(), f, w);
  next.cursor = state.cursor + 1;
  next.edge_quanta_left = state.edge_quanta_left - (edge ? a.f_level : 0);
  next.bw_quanta_left = state.bw_quanta_left - a.w_level;
  next.ec = ep.grid.edge_alloc(next.edge_quanta_left, ep.scenario.edge_capacity);
  next.bw = ep.grid.bw_share(next.bw_quanta_left);

  ScenarioConfig cfg = ep.scenario;
  cfg.enforce_deadline = false;
  const std::span<const Task> tasks(ep.tasks.data(), next.cursor);
  const std::span<const DeviceProfile> devs(ep.devices.data(), next.cursor);
  const SystemCost cost = system_cost(next.plan, tasks, devs, cfg);
  next.tc = cost.total;
  out.step_cost = std::max(0.0, cost.total - state.tc);
  out.done = next.terminal();
  out.deadline_met = cost.per_device.back().latency <= ep.tasks[state.cursor].deadline_s;
  return out;
}

Features encode_state(const SystemState& state) {
  const Episode& ep = *state.episode;
  const std::size_t n = state.n_devices();
  Features f{};
  f[0] = state.tc / (state.tc + ep.cost_scale);
  f[1] = state.ec / ep.scenario.edge_capacity;
  f[2] = state.bw;
  if (!state.terminal()) {
    const Task& t = ep.tasks[state.cursor];
    f[3] = std::min(1.0, t.data_bits / ep.task_max_bits);
    f[4] = std::min(1.0, t.cycles / ep.cycles_max);
  }
  f[5] = n == 0 ? 0.0 : static_cast<double>(n - state.cursor) / static_cast<double>(n);
  return f;
}

void write_trajectory_row(std::ostream& out, std::size_t episode, std::size_t step_no,
                          std::size_t action_index, const ActionGrid& grid, double edge_capacity,
                          double step_cost) {
  const DiscreteAction a = grid.action_at(action_index);
  const bool edge = a.platform == Platform::Edge;
  out << episode << '\t' << step_no << '\t' << action_index << '\t'
      << (edge ? grid.edge_alloc(a.f_level, edge_capacity) : 0.0) << '\t' << grid.bw_share(a.w_level)
      << '\t' << (edge ? "edge" : "cloud") << '\t' << step_cost << '\n';
}

}  // namespace mecco
