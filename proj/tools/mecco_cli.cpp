#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mecco/chain.hpp"
#include "mecco/config.hpp"
#include "mecco/pipeline.hpp"
#include "mecco/policies.hpp"
#include "mecco/sweep.hpp"

using namespace mecco;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> seeds_per_point;
  bool shared_model = false;
};

void add_common(CLI::App* app, Common& c, const std::string& out_help) {
  app->add_option("--config", c.config_path, "Configuration file (key = value)");
  app->add_option("--seed", c.seed, "Base seed (overrides the config)");
  app->add_option("--out", c.out, out_help);
}

RunConfig load(const Common& c) {
  RunConfig rc = c.config_path.empty() ? default_config() : load_config(c.config_path);
  if (c.seed) {
    rc.values.seed = *c.seed;
    rc.seed = *c.seed;
  }
  return rc;
}

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------

int cmd_train(const Common& c, const std::string& policy, const std::string& trace_path,
              const std::string& trajectory_path) {
  const RunConfig rc = load(c);
  const PolicyKind kind = parse_policy(policy);
  if (kind != PolicyKind::ADRLO && kind != PolicyKind::DRLO) throw ConfigError("train supports ADRLO and DRLO");
  const OffloadEnv env(rc.scenario, rc.workload, rc.grid);
  const AgentConfig cfg = kind == PolicyKind::ADRLO ? rc.agent : rc.agent.as_plain_dqn();

  std::ofstream traj;
  if (!trajectory_path.empty()) {
    traj.open(trajectory_path, std::ios::binary | std::ios::trunc);
    if (!traj) throw std::runtime_error("cannot write " + trajectory_path);
  }
  const TrainResult res = train(env, cfg, rc.seed, trajectory_path.empty() ? nullptr : &traj);
  const std::string model_path = c.out.empty() ? "model.txt" : c.out;
  save_model(res.model, model_path);
  if (!trace_path.empty()) {
    std::ofstream tr(trace_path, std::ios::binary | std::ios::trunc);
    if (!tr) throw std::runtime_error("cannot write " + trace_path);
    write_trace_csv(tr, res.trace);
  }
  double tail = 0.0;
  const std::size_t k = std::min<std::size_t>(100, res.trace.size());
  for (std::size_t i = res.trace.size() - k; i < res.trace.size(); ++i) tail += res.trace[i].episode_cost;
  std::cout << "trained " << policy << " for " << cfg.episodes << " episodes -> " << model_path << "\n";
  if (k) std::cout << "mean cost of the last " << k << " episodes: " << fmt(tail / static_cast<double>(k)) << "\n";
  return 0;
}

int cmd_eval(const Common& c, std::vector<std::string> policies, const std::string& model_path) {
  const RunConfig rc = load(c);
  const OffloadEnv env(rc.scenario, rc.workload, rc.grid);
  std::shared_ptr<const TrainedModel> model;
  if (!model_path.empty()) model = std::make_shared<const TrainedModel>(load_model(model_path));
  if (policies.empty()) {
    policies = {"EO", "CO", "RANDOM"};
    if (model) policies.insert(policies.begin(), "ADRLO");
  }
  const auto seeds = sweep_seeds(rc.seed, c.seeds_per_point.value_or(50));
  std::vector<EvalReport> reports;
  for (const auto& name : policies) {
    const PolicyKind kind = parse_policy(name);
    reports.push_back(evaluate_policy(Policy(kind, is_learned(kind) ? model : nullptr), env, seeds));
  }
  std::ostringstream csv;
  write_report_csv(csv, reports);
  if (c.out.empty()) std::cout << csv.str();
  else write_file(c.out, csv.str());
  for (const auto& r : reports)
    std::cerr << r.policy << ": mean total cost " << fmt(r.mean_total_cost) << " over " << r.seed_count()
              << " seeds\n";
  return 0;
}

int cmd_sweep(const Common& c, const std::string& preset_name) {
  const RunConfig rc = load(c);
  SweepSpec spec = preset(preset_name);
  spec.seeds_per_point = c.seeds_per_point.value_or(50);
  spec.shared_model = c.shared_model;
  const SweepResult res = run_sweep(spec, rc, &std::cerr);
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  const std::string path = c.out.empty() ? preset_name + ".csv" : c.out;
  write_file(path, csv.str());
  std::cout << "wrote " << res.rows.size() << " rows to " << path << "\n";
  return 0;
}

int cmd_oracle(const Common& c) {
  const RunConfig rc = load(c);
  const OffloadEnv env(rc.scenario, rc.workload, rc.grid);
  const SystemState s0 = env.reset(rc.seed);
  const OracleResult best = brute_force_oracle(s0);
  ScenarioConfig cfg = rc.scenario;
  cfg.enforce_deadline = false;
  const Episode& ep = *s0.episode;
  const SystemCost cost = system_cost(best.plan, ep.tasks, ep.devices, cfg);

  std::ostringstream csv;
  csv << "device,data_mb,action,platform,f_level,w_level,edge_hz,bw_share,latency_s,energy_j,cost\n";
  for (std::size_t i = 0; i < best.actions.size(); ++i) {
    const DiscreteAction a = rc.grid.action_at(best.actions[i]);
    csv << i << ',' << fmt(ep.tasks[i].data_bits / kBitsPerMegabyte) << ',' << best.actions[i] << ','
        << (a.platform == Platform::Edge ? "edge" : "cloud") << ',' << a.f_level << ',' << a.w_level << ','
        << fmt(best.plan.edge_alloc[i]) << ',' << fmt(best.plan.bw_alloc[i]) << ','
        << fmt(cost.per_device[i].latency) << ',' << fmt(cost.per_device[i].energy) << ','
        << fmt(cost.per_device[i].cost) << '\n';
  }
  if (c.out.empty()) std::cout << csv.str();
  else write_file(c.out, csv.str());
  std::cout << "optimal total cost " << fmt(best.total_cost) << "\n";
  return 0;
}

int cmd_pipeline(const Common& c, const std::string& model_path, const std::string& policy_name_arg,
                 const std::string& report_path) {
  const RunConfig rc = load(c);
  const PolicyKind kind = parse_policy(policy_name_arg);
  std::shared_ptr<const TrainedModel> model;
  if (!model_path.empty()) model = std::make_shared<const TrainedModel>(load_model(model_path));
  const PolicyFactory factory = [&](const OffloadEnv& env) {
    if (!is_learned(kind) || model) return Policy(kind, model);
    std::cerr << "training " << policy_name(kind) << " inline for " << env.scenario().n_devices << " devices\n";
    const AgentConfig cfg = kind == PolicyKind::DRLO ? rc.agent.as_plain_dqn() : rc.agent;
    return Policy(kind, std::make_shared<const TrainedModel>(train(env, cfg, rc.seed).model));
  };
  const PipelineRun run = run_pipeline(rc, rc.seed, factory);

  const std::string ledger_path = c.out.empty() ? "pipeline.ledger" : c.out;
  chain::save_ledger(ledger_path, run.ledger);
  std::ostringstream rep;
  rep << "device,registered,verdict,authorized,total_cost_share,latency_s,energy_j\n";
  std::size_t k = 0;
  for (const auto& d : run.devices) {
    const bool granted = d.access.verdict == chain::Verdict::Granted;
    rep << d.device_id << ',' << (d.registered ? 1 : 0) << ',' << d.access.message << ',' << (granted ? 1 : 0);
    if (granted && run.offload) {
      const CostBreakdown& b = run.offload->per_device[k++];
      rep << ',' << fmt(b.cost) << ',' << fmt(b.latency) << ',' << fmt(b.energy);
    } else {
      rep << ",,,";
    }
    rep << '\n';
  }
  if (!report_path.empty()) write_file(report_path, rep.str());
  else std::cout << rep.str();

  std::cout << "authorized " << run.authorized.size() << " of " << run.devices.size() << " devices, "
            << run.penalties << " penalties\n";
  if (run.offload) std::cout << "offloading total cost " << fmt(run.offload->total_cost) << "\n";
  else std::cout << "no device authorized; offloading phase skipped\n";
  std::cout << "ledger height " << run.ledger.height() << ", verify_chain " << (run.chain_valid ? "true" : "false")
            << " -> " << ledger_path << "\n";
  return run.chain_valid ? 0 : 1;
}

// ---------------------------------------------------------------------------

chain::Ledger open_ledger(const std::string& path, const RunConfig& rc) {
  return chain::load_ledger(path, miner_ids(rc.chain.miners));
}

chain::Account account_at(std::uint64_t seed, const chain::Ledger& ledger) {
  chain::Account a = chain::new_account(seed);
  a.next_nonce = ledger.last_nonce(a.public_key) + 1;
  return a;
}

void commit(chain::TxPool& pool, chain::Ledger& ledger, const std::string& path) {
  if (auto b = chain::mine_block(pool, ledger)) chain::append_block_to_file(path, *b);
  for (const auto& line : ledger.rejection_log()) std::cerr << "rejected " << line << "\n";
}

int cmd_chain_init(const Common& c, const std::string& ledger_path) {
  const RunConfig rc = load(c);
  chain::save_ledger(ledger_path, chain::Ledger(miner_ids(rc.chain.miners)));
  std::cout << "initialized " << ledger_path << " (admin " << chain::to_hex(chain::new_account(rc.chain.admin_seed).public_key)
            << ")\n";
  return 0;
}

int cmd_chain_register(const Common& c, const std::string& ledger_path, std::uint64_t md_seed,
                       const std::string& device, bool remove) {
  const RunConfig rc = load(c);
  chain::Ledger ledger = open_ledger(ledger_path, rc);
  chain::Account admin = account_at(rc.chain.admin_seed, ledger);
  const chain::Account md = chain::new_account(md_seed);
  chain::TxPool pool;
  pool.submit(chain::build_registration_tx(admin, remove ? chain::RegistrationOp::DeleteMd : chain::RegistrationOp::AddMd,
                                           md.public_key, device));
  commit(pool, ledger, ledger_path);
  std::cout << (remove ? "deleted " : "registered ") << device << " for " << chain::to_hex(md.public_key)
            << " at height " << ledger.height() << "\n";
  return 0;
}

int cmd_chain_request(const Common& c, const std::string& ledger_path, std::uint64_t md_seed,
                      const std::string& device) {
  const RunConfig rc = load(c);
  chain::Ledger ledger = open_ledger(ledger_path, rc);
  chain::AccessControl gate(account_at(rc.chain.admin_seed, ledger));
  const chain::PolicyTable table = chain::replay_policy_table(ledger, gate.admin_pk());
  chain::Account md = account_at(md_seed, ledger);
  const chain::Transaction req =
      chain::build_offload_tx(md, device, chain::sha256("offload " + device + " " + std::to_string(md.next_nonce)));
  auto outcome = gate.process(req.serialize(), table);
  chain::TxPool pool;
  if (outcome.result.verdict == chain::Verdict::Granted) pool.submit(outcome.request);
  else if (outcome.penalty) pool.submit(*outcome.penalty);
  commit(pool, ledger, ledger_path);
  std::cout << outcome.result.message << "\n";
  return 0;
}

int cmd_chain_audit(const Common& c, const std::string& ledger_path) {
  const RunConfig rc = load(c);
  const chain::Ledger ledger = open_ledger(ledger_path, rc);
  const bool ok = chain::verify_chain(ledger);
  const chain::LedgerStats s = chain::ledger_stats(ledger);
  std::cout << "height " << s.height << "\n"
            << "registrations " << s.registrations << "\n"
            << "granted " << s.granted << "\n"
            << "denied " << s.denied << "\n"
            << "verify_chain " << (ok ? "true" : "false") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure multi-user edge-cloud offloading: simulation, learning and access control"};
  app.require_subcommand(1);
  Common common;

  auto* train_cmd = app.add_subcommand("train", "Train an offloading agent");
  add_common(train_cmd, common, "Model file (default model.txt)");
  std::string train_policy = "ADRLO", trace_path, trajectory_path;
  train_cmd->add_option("--policy", train_policy, "ADRLO or DRLO");
  train_cmd->add_option("--trace", trace_path, "Per-episode training trace CSV");
  train_cmd->add_option("--trajectory", trajectory_path, "Per-step debug dump (tab separated)");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate policies over seeds");
  add_common(eval_cmd, common, "Report CSV (default stdout)");
  std::vector<std::string> eval_policies;
  std::string model_path;
  eval_cmd->add_option("--policy", eval_policies, "Policy name; repeatable");
  eval_cmd->add_option("--model", model_path, "Trained model for learned policies");
  eval_cmd->add_option("--seeds-per-point", common.seeds_per_point, "Number of evaluation seeds (default 50)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a named experiment sweep");
  add_common(sweep_cmd, common, "Sweep CSV (default <preset>.csv)");
  std::string preset_name;
  sweep_cmd->add_option("--preset", preset_name, "fig8a, fig8b, fig9a, fig9b or fig10")->required();
  sweep_cmd->add_option("--seeds-per-point", common.seeds_per_point, "Seeds per grid point (default 50)");
  sweep_cmd->add_flag("--shared-model", common.shared_model, "Train one model across all grid points");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum of one instance");
  add_common(oracle_cmd, common, "Plan CSV (default stdout)");

  auto* pipe_cmd = app.add_subcommand("pipeline", "Access control followed by offloading");
  add_common(pipe_cmd, common, "Ledger file (default pipeline.ledger)");
  std::string pipe_policy = "ADRLO", pipe_model, pipe_report;
  pipe_cmd->add_option("--policy", pipe_policy, "Offloading policy (default ADRLO)");
  pipe_cmd->add_option("--model", pipe_model, "Trained model; trained inline when absent");
  pipe_cmd->add_option("--report", pipe_report, "Per-device report CSV (default stdout)");

  auto* chain_cmd = app.add_subcommand("chain", "Ledger and access-control operations");
  chain_cmd->require_subcommand(1);
  std::string ledger_path = "mecco.ledger";
  std::uint64_t md_seed = 0;
  std::string device;
  bool remove = false;
  auto* c_init = chain_cmd->add_subcommand("init", "Create a ledger with its genesis block");
  auto* c_reg = chain_cmd->add_subcommand("register", "Admin registers a device for a key");
  auto* c_req = chain_cmd->add_subcommand("request", "Device submits an offloading request");
  auto* c_audit = chain_cmd->add_subcommand("audit", "Verify the ledger and count verdicts");
  for (auto* sc : {c_init, c_reg, c_req, c_audit}) {
    sc->add_option("--config", common.config_path, "Configuration file");
    sc->add_option("--ledger,--out", ledger_path, "Ledger file (default mecco.ledger)");
  }
  for (auto* sc : {c_reg, c_req}) {
    sc->add_option("--seed", md_seed, "Seed of the device's key pair")->required();
    sc->add_option("--device", device, "Device identifier")->required();
  }
  c_reg->add_flag("--delete", remove, "Remove the key instead of adding it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(common, train_policy, trace_path, trajectory_path);
    if (eval_cmd->parsed()) return cmd_eval(common, eval_policies, model_path);
    if (sweep_cmd->parsed()) return cmd_sweep(common, preset_name);
    if (oracle_cmd->parsed()) return cmd_oracle(common);
    if (pipe_cmd->parsed()) return cmd_pipeline(common, pipe_model, pipe_policy, pipe_report);
    if (c_init->parsed()) return cmd_chain_init(common, ledger_path);
    if (c_reg->parsed()) return cmd_chain_register(common, ledger_path, md_seed, device, remove);
    if (c_req->parsed()) return cmd_chain_request(common, ledger_path, md_seed, device);
    if (c_audit->parsed()) return cmd_chain_audit(common, ledger_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const AdmissionError& e) {
    std::cerr << "admission error: " << e.what() << "\n";
    return 3;
  } catch (const TrainingError& e) {
    std::cerr << "training failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
