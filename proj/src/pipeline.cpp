#include "mecco/pipeline.hpp"

namespace mecco {

std::string device_id_for(std::size_t index) { return "md-" + std::to_string(index); }

std::vector<std::string> miner_ids(std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back("miner-" + std::to_string(i));
  return out;
}

PipelineRun run_pipeline(const RunConfig& config, std::uint64_t seed, const PolicyFactory& make_policy) {
  const std::size_t n = config.scenario.n_devices;
  for (std::size_t u : config.chain.unregistered)
    if (u >= n) throw ConfigError("unregistered device index " + std::to_string(u) + " is out of range");

  PipelineRun run{{}, {}, std::nullopt, chain::Ledger(miner_ids(config.chain.miners)), 0, false};
  chain::TxPool pool;
  chain::AccessControl gate(chain::new_account(config.chain.admin_seed));

  std::vector<chain::Account> accounts;
  for (std::size_t i = 0; i < n; ++i) {
    accounts.push_back(chain::new_account(mix_seed(config.chain.admin_seed, i + 1)));
    PipelineDevice d;
    d.index = i;
    d.device_id = device_id_for(i);
    d.registered = true;
    for (std::size_t u : config.chain.unregistered)
      if (u == i) d.registered = false;
    run.devices.push_back(std::move(d));
  }

  // Registration by the admin.
  for (const auto& d : run.devices)
    if (d.registered)
      pool.submit(chain::build_registration_tx(gate.admin(), chain::RegistrationOp::AddMd,
                                               accounts[d.index].public_key, d.device_id));
  chain::mine_block(pool, run.ledger);
  const chain::PolicyTable table = chain::replay_policy_table(run.ledger, gate.admin_pk());

  // Access control phase.
  std::vector<chain::Transaction> granted;
  for (auto& d : run.devices) {
    const chain::Digest digest = chain::sha256("offload " + d.device_id + " " + std::to_string(seed));
    const chain::Transaction req = chain::build_offload_tx(accounts[d.index], d.device_id, digest);
    auto outcome = gate.process(req.serialize(), table);
    d.access = outcome.result;
    if (outcome.result.verdict == chain::Verdict::Granted) {
      run.authorized.push_back(d.index);
      granted.push_back(std::move(outcome.request));
    } else if (outcome.penalty) {
      pool.submit(std::move(*outcome.penalty));
      ++run.penalties;
    }
  }
  chain::mine_block(pool, run.ledger);

  // Offloading phase over the authorised subset.
  if (!run.authorized.empty()) {
    const OffloadEnv full(config.scenario, config.workload, config.grid);
    const std::vector<Task> all_tasks = full.draw_tasks(seed);
    std::vector<Task> tasks;
    for (std::size_t i : run.authorized) tasks.push_back(all_tasks[i]);

    ScenarioConfig sub = config.scenario;
    sub.n_devices = tasks.size();
    const OffloadEnv env(sub, config.workload, config.grid);
    const Policy policy = make_policy(env);
    run.offload = run_episode(policy, env.reset_with_tasks(std::move(tasks)), seed);
    for (auto& tx : granted) pool.submit(std::move(tx));
    chain::mine_block(pool, run.ledger);
  }

  run.chain_valid = chain::verify_chain(run.ledger);
  return run;
}

}  // namespace mecco
