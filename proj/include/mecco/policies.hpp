#pragma once

// Offloading decision rules (learned, greedy baselines, equal-share
// ablations, random), the exhaustive oracle for small instances, and the
// evaluation runner shared by every experiment.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mecco/agent.hpp"
#include "mecco/env.hpp"

namespace mecco {

enum class PolicyKind { ADRLO, DRLO, EO, CO, EOEqual, COEqual, NoEdgeAlloc, NoBwAlloc, Oracle, Random };

std::string_view policy_name(PolicyKind kind);
// Accepts the names printed by policy_name; throws ConfigError otherwise.
PolicyKind parse_policy(std::string_view name);
bool is_learned(PolicyKind kind);

struct Decision {
  std::size_t action = 0;
  bool fallback = false;  // EO could not place the device on the edge
};

class Policy {
 public:
  // Learned kinds and the two ablations need a model; throws ConfigError
  // when it is missing.
  explicit Policy(PolicyKind kind, std::shared_ptr<const TrainedModel> model = nullptr);

  PolicyKind kind() const { return kind_; }
  std::string_view name() const { return policy_name(kind_); }
  const TrainedModel* model() const { return model_.get(); }

  // Always returns a feasible action of a non-terminal state. rng is only
  // consumed by RANDOM.
  Decision choose(const SystemState& state, Rng& rng) const;

 private:
  PolicyKind kind_;
  std::shared_ptr<const TrainedModel> model_;
  mutable std::shared_ptr<const Episode> oracle_episode_;
  mutable std::vector<std::size_t> oracle_actions_;
};

// Greedy myopic rules: among the candidate actions pick the one with the
// smallest immediate cost increase; ties go to the lowest index.
Decision eo_decision(const SystemState& state);
Decision co_decision(const SystemState& state);

// Equal-share quantum floor(L / N). Throws AdmissionError when N > L.
int equal_share_level(int levels, std::size_t n_devices);

struct OracleResult {
  std::vector<std::size_t> actions;  // one action index per device
  AllocationPlan plan;
  double total_cost = 0.0;
};

inline constexpr double kOracleSearchLimit = 1e7;

// Exhaustive search over every feasible joint plan on the action grid.
// Costs come from system_cost; ties resolve to the lexicographically smallest
// action sequence. Throws SizeError when (L_w + L_f L_w)^N exceeds the limit.
OracleResult brute_force_oracle(const ScenarioConfig& scenario, const ActionGrid& grid,
                                std::span<const Task> tasks, std::span<const DeviceProfile> devices);
OracleResult brute_force_oracle(const SystemState& initial);

struct EpisodeResult {
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  double mean_latency_s = 0.0;
  double mean_energy_j = 0.0;
  double edge_fraction = 0.0;
  std::size_t fallback_count = 0;
  std::vector<CostBreakdown> per_device;
  std::vector<std::size_t> actions;
};

struct EvalReport {
  std::string policy;
  std::vector<EpisodeResult> episodes;  // in seed order
  double mean_total_cost = 0.0;
  double mean_latency_s = 0.0;
  double mean_energy_j = 0.0;

  std::size_t seed_count() const { return episodes.size(); }
};

// One greedy episode from the given initial state.
EpisodeResult run_episode(const Policy& policy, const SystemState& initial, std::uint64_t seed);

// One episode per seed, tasks drawn by env.reset(seed).
EvalReport evaluate_policy(const Policy& policy, const OffloadEnv& env, std::span<const std::uint64_t> seeds);

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace mecco
