#pragma once

// Physical quantities and closed-form latency/energy costs of edge-cloud
// offloading, plus feasibility checking of joint allocation plans.
//
// All quantities are SI: Hz, W, W/Hz, bits, CPU cycles, cycles/s, seconds, J.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mecco/errors.hpp"

namespace mecco {

enum class CloudShareMode {
  Full,        // every cloud task receives the whole cloud capacity
  EqualSplit,  // cloud capacity divided by the number of cloud tasks
};

// 10^((x - 30) / 10)
double dbm_per_hz_to_watts_per_hz(double dbm_per_hz);

struct ScenarioConfig {
  double bandwidth_hz = 15e6;
  double noise_psd = 1e-13;  // W/Hz
  double edge_capacity = 2e9;
  double cloud_capacity = 10e9;
  double wired_rate = 1e6;  // bits/s
  double beta_t = 0.5;
  double beta_e = 0.5;
  CloudShareMode cloud_share_mode = CloudShareMode::EqualSplit;
  std::size_t n_devices = 10;
  bool enforce_deadline = false;

  // Throws ConfigError naming the first violated invariant.
  void validate() const;
};

struct DeviceProfile {
  double tx_power = 0.5;   // p_n, W
  double idle_power = 0.1; // p_n^i, W
  double channel_gain = 1e-5;

  void validate() const;
};

// One computation task. cycles is the TOTAL cycle count of the task.
struct Task {
  double data_bits = 0.0;
  double cycles = 0.0;
  double deadline_s = 0.0;

  void validate() const;
};

Task make_task(double data_bits, double cycles_per_bit, double deadline_s);

// Offloading flags of one device. Kept as plain integers so that plans
// violating the binary constraint can still be represented and rejected.
struct OffloadDecision {
  int edge = 0;
  int cloud = 0;

  static constexpr OffloadDecision to_edge() { return {1, 0}; }
  static constexpr OffloadDecision to_cloud() { return {0, 1}; }
  bool is_edge() const { return edge == 1 && cloud == 0; }
  bool is_cloud() const { return edge == 0 && cloud == 1; }
  friend bool operator==(const OffloadDecision&, const OffloadDecision&) = default;
};

struct AllocationPlan {
  std::vector<OffloadDecision> decisions;
  std::vector<double> edge_alloc;  // f_n, cycles/s
  std::vector<double> bw_alloc;    // w_n, fraction of B

  std::size_t size() const { return decisions.size(); }
  void push_back(OffloadDecision d, double f, double w) {
    decisions.push_back(d);
    edge_alloc.push_back(f);
    bw_alloc.push_back(w);
  }
};

struct LatencyEnergy {
  double latency = 0.0;
  double energy = 0.0;
};

struct CostBreakdown {
  double latency = 0.0;
  double energy = 0.0;
  double cost = 0.0;  // beta_t * latency + beta_e * energy
};

struct SystemCost {
  double total = 0.0;
  std::vector<CostBreakdown> per_device;
};

// Sums of allocations may exceed their budget by this relative amount and
// still count as feasible; quantized shares such as 12 * (F_e / 12) do not
// always sum back to F_e exactly in floating point.
inline constexpr double kFeasibilityTolerance = 1e-12;

// r = w B log2(1 + p h / (w N0 B))
double transmission_rate(double w, const DeviceProfile& dev, const ScenarioConfig& cfg);

// T = D/r + X/f_e,  E = p D/r + p_i X/f_e
LatencyEnergy edge_cost(const Task& task, const DeviceProfile& dev, double f_e, double w,
                        const ScenarioConfig& cfg);

// T = D/r + D/r_w + X/f_c,  E = p D/r + p_i (D/r_w + X/f_c)
LatencyEnergy cloud_cost(const Task& task, const DeviceProfile& dev, double w, double f_c,
                         const ScenarioConfig& cfg);

// Exactly one branch contributes, selected by the decision flags.
CostBreakdown device_cost(const Task& task, const DeviceProfile& dev, OffloadDecision decision,
                          double f_e, double f_c, double w, const ScenarioConfig& cfg);

// Cloud capacity granted to each cloud task of the plan.
double cloud_share(const AllocationPlan& plan, const ScenarioConfig& cfg);

// First violated constraint in the order C1..C6, or nullopt when feasible.
// Throws std::invalid_argument if the plan's vectors differ in length.
std::optional<Constraint> validate_plan(const AllocationPlan& plan, const ScenarioConfig& cfg);

// Sum of weighted device costs. tasks and devs must match the plan length.
// Throws ConstraintError for infeasible plans (and for deadline misses when
// cfg.enforce_deadline is set).
SystemCost system_cost(const AllocationPlan& plan, std::span<const Task> tasks,
                       std::span<const DeviceProfile> devs, const ScenarioConfig& cfg);

}  // namespace mecco
