#pragma once

// Parameter sweeps comparing policies across a grid of scenario values.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mecco/config.hpp"
#include "mecco/policies.hpp"

namespace mecco {

enum class SweepVar { NDevices, TaskSizeMb, EdgeCapacityGhz, BandwidthMhz };

const char* to_string(SweepVar v);

struct SweepSpec {
  std::string name;
  SweepVar var = SweepVar::NDevices;
  std::vector<double> grid;
  std::vector<PolicyKind> policies;
  std::size_t seeds_per_point = 50;
  bool shared_model = false;
  // TaskSizeMb only: every task has exactly the swept size when true,
  // otherwise the swept value is the upper end of the size range.
  bool fixed_task_size = false;
  // Applied to the base configuration before the swept value.
  std::vector<std::pair<std::string, std::string>> overrides;

  void validate() const;
};

// fig8a, fig8b, fig9a, fig9b, fig10. Throws ConfigError for other names.
SweepSpec preset(const std::string& name);

struct SweepRow {
  double sweep_value = 0.0;
  std::string policy;
  bool aggregate = false;
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  double mean_latency_s = 0.0;
  double mean_energy_j = 0.0;
  bool skipped = false;
  std::string reason;
};

struct SweepResult {
  SweepSpec spec;
  std::string config_echo;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepRow> rows;  // ordered by (point, policy, seed), aggregate last per group
};

// Evaluation seeds of a sweep: base_seed, base_seed + 1, ...
std::vector<std::uint64_t> sweep_seeds(std::uint64_t base_seed, std::size_t count);

// Scenario of one grid point; throws ConfigError/AdmissionError.
RunConfig sweep_point_config(const SweepSpec& spec, const RunConfig& base, double value);

// Learned policies use models trained per point, or one model trained over
// every admissible point when spec.shared_model is set. Throws TrainingError.
SweepResult run_sweep(const SweepSpec& spec, const RunConfig& base, std::ostream* progress = nullptr);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace mecco
