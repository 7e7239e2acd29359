#pragma once

// Joint run: every device asks the access-control contract for permission,
// denied devices are penalised and dropped, and the authorised subset is
// offloaded by the given policy. All verdicts end up on the ledger.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mecco/chain.hpp"
#include "mecco/config.hpp"
#include "mecco/policies.hpp"

namespace mecco {

struct PipelineDevice {
  std::size_t index = 0;
  std::string device_id;
  bool registered = false;
  chain::AccessResult access;
};

struct PipelineRun {
  std::vector<PipelineDevice> devices;
  std::vector<std::size_t> authorized;  // indices into devices, ascending
  std::optional<EpisodeResult> offload;  // empty when nobody was authorised
  chain::Ledger ledger;
  std::size_t penalties = 0;
  bool chain_valid = false;
};

std::string device_id_for(std::size_t index);
std::vector<std::string> miner_ids(std::size_t count);

// Builds the policy for a given authorised-subset environment. Lets callers
// train inline once the subset size is known.
using PolicyFactory = std::function<Policy(const OffloadEnv&)>;

// Tasks are drawn as OffloadEnv::reset(seed) would for all devices, then
// restricted to the authorised ones.
PipelineRun run_pipeline(const RunConfig& config, std::uint64_t seed, const PolicyFactory& make_policy);

}  // namespace mecco
