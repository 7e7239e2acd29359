#pragma once

// Sequential discrete-action MDP over the joint offloading problem. One
// device is scheduled per step; the state tracks accumulated cost and the
// edge capacity and bandwidth that remain for the devices still to come.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "mecco/model.hpp"

namespace mecco {

inline constexpr double kBitsPerMegabyte = 8e6;

// Per-device radio profile and task generator. Every device shares the same
// profile; task sizes are drawn uniformly in [task_min_bits, task_max_bits].
struct WorkloadConfig {
  DeviceProfile device;
  double cycles_per_bit = 100.0;
  double task_min_bits = 0.1 * kBitsPerMegabyte;
  double task_max_bits = 12.0 * kBitsPerMegabyte;
  double deadline_s = 100.0;

  void validate() const;
};

enum class Platform { Edge, Cloud };

struct DiscreteAction {
  Platform platform = Platform::Cloud;
  int f_level = 0;  // 1..L_f for edge actions, 0 for cloud
  int w_level = 1;  // 1..L_w
  friend bool operator==(const DiscreteAction&, const DiscreteAction&) = default;
};

// Quantization of edge capacity into L_f levels and bandwidth into L_w
// levels. Action indices: cloud actions first (w_level 1..L_w), then edge
// actions ordered by f_level, then w_level.
struct ActionGrid {
  int edge_levels = 12;
  int bw_levels = 12;

  std::size_t size() const {
    return static_cast<std::size_t>(bw_levels) * (1 + static_cast<std::size_t>(edge_levels));
  }
  std::size_t index_of(const DiscreteAction& a) const;
  DiscreteAction action_at(std::size_t index) const;
  double edge_alloc(int f_level, double edge_capacity) const {
    return f_level * edge_capacity / edge_levels;
  }
  double bw_share(int w_level) const { return static_cast<double>(w_level) / bw_levels; }
  void validate() const;
};

// Everything fixed for one episode: the scenario, the drawn tasks and the
// normalisation constants of the state encoding.
struct Episode {
  ScenarioConfig scenario;
  ActionGrid grid;
  std::vector<DeviceProfile> devices;
  std::vector<Task> tasks;
  double cost_scale = 1.0;  // all-cloud, equal-bandwidth plan cost
  double task_max_bits = 1.0;
  double cycles_max = 1.0;
};

struct SystemState {
  double tc = 0.0;  // accumulated weighted cost
  double ec = 0.0;  // remaining edge capacity, cycles/s
  double bw = 0.0;  // remaining bandwidth fraction
  std::size_t cursor = 0;
  int edge_quanta_left = 0;
  int bw_quanta_left = 0;
  AllocationPlan plan;  // decisions of devices [0, cursor)
  std::shared_ptr<const Episode> episode;

  std::size_t n_devices() const { return episode->tasks.size(); }
  bool terminal() const { return cursor >= n_devices(); }
};

using ActionMask = std::vector<std::uint8_t>;

struct StepOutcome {
  SystemState next_state;
  double step_cost = 0.0;
  bool done = false;
  bool deadline_met = true;
};

class OffloadEnv {
 public:
  // Throws ConfigError for invalid settings and AdmissionError when the
  // bandwidth grid cannot give every device one quantum (N > L_w).
  OffloadEnv(ScenarioConfig scenario, WorkloadConfig workload, ActionGrid grid);

  // Initial state with tasks drawn from the seed. The first k draws do not
  // depend on n_devices, so scenarios differing only in N share a prefix.
  SystemState reset(std::uint64_t seed) const;
  SystemState reset_with_tasks(std::vector<Task> tasks) const;
  std::vector<Task> draw_tasks(std::uint64_t seed) const;

  const ScenarioConfig& scenario() const { return scenario_; }
  const WorkloadConfig& workload() const { return workload_; }
  const ActionGrid& grid() const { return grid_; }
  std::size_t action_count() const { return grid_.size(); }

  // Cost of the all-cloud plan with bandwidth split equally.
  double all_cloud_cost(const std::vector<Task>& tasks) const;

 private:
  ScenarioConfig scenario_;
  WorkloadConfig workload_;
  ActionGrid grid_;
};

// One entry per action index; 1 = feasible. An action is feasible when its
// quanta fit into what remains after reserving one bandwidth quantum for
// every device still unscheduled. Terminal states have no feasible action.
ActionMask feasible_actions(const SystemState& state);

// Schedules the cursor device. step_cost is the increase of the partial
// plan's system cost, so tc always equals the system cost of the devices
// scheduled so far. Throws ConstraintError for an infeasible action.
StepOutcome step(const SystemState& state, std::size_t action_index);

inline constexpr std::size_t kFeatureCount = 6;
using Features = std::array<double, kFeatureCount>;

// [tc/(tc+scale), ec/F_e, bw, D/D_max, X/X_max, remaining/N], all in [0, 1].
Features encode_state(const SystemState& state);

// Debug dump, tab separated:
// episode, step, action index, f, w, platform, step_cost
void write_trajectory_row(std::ostream& out, std::size_t episode, std::size_t step_no,
                          std::size_t action_index, const ActionGrid& grid, double edge_capacity,
                          double step_cost);

}  // namespace mecco
