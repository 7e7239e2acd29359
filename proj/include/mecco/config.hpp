#pragma once

// Flat `key = value` run configuration. Scenario keys use human units
// (MHz, dBm/Hz, GHz, Mbit/s, MB); agent.*, grid.* and chain.* keys tune the
// learner, the action grid and the access-control layer.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mecco/agent.hpp"
#include "mecco/env.hpp"
#include "mecco/model.hpp"

namespace mecco {

struct ChainSettings {
  std::uint64_t admin_seed = 1000;
  std::size_t miners = 3;
  // Device indices left out of the policy table in pipeline runs.
  std::vector<std::size_t> unregistered;
};

// Values exactly as written in the file (or defaulted), in file units.
struct ConfigValues {
  double bandwidth_mhz = 15.0;
  double noise_dbm_hz = -100.0;
  double edge_capacity_ghz = 2.0;
  double cloud_capacity_ghz = 10.0;
  double wired_rate_mbps = 1.0;
  double beta_t = 0.5;
  double beta_e = 0.5;
  CloudShareMode cloud_share_mode = CloudShareMode::EqualSplit;
  std::size_t n_devices = 10;
  double tx_power_w = 0.5;
  double idle_power_w = 0.1;
  double channel_gain = 1e-5;
  double cycles_per_bit = 100.0;
  double task_min_mb = 0.1;
  double task_max_mb = 12.0;
  bool enforce_deadline = false;
  std::uint64_t seed = 1;

  int edge_levels = 12;
  int bw_levels = 12;

  AgentConfig agent;
  ChainSettings chain;

  friend bool operator==(const ConfigValues&, const ConfigValues&);
};

struct RunConfig {
  ConfigValues values;
  ScenarioConfig scenario;
  WorkloadConfig workload;
  ActionGrid grid;
  AgentConfig agent;
  ChainSettings chain;
  std::uint64_t seed = 1;
};

// Converts to SI and validates; throws ConfigError.
RunConfig resolve(const ConfigValues& values);
RunConfig default_config();

// Throws ConfigError (with the line number) for unknown keys, malformed
// lines, unparsable or out-of-range values, and duplicates.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Sets one key from its text form; throws ConfigError.
void set_config_value(ConfigValues& values, std::string_view key, std::string_view value);

// Every key with its effective value, one per line, in a fixed order.
// parse_config(echo_config(c)) reproduces c.
std::string echo_config(const ConfigValues& values);
// SHA-256 of echo_config, hex.
std::string config_hash(const ConfigValues& values);

}  // namespace mecco
