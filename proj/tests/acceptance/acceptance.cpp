// End-to-end acceptance run. Prints one line per criterion:
//   criterion N: PASS|FAIL <measurements>
// Usage: mecco_acceptance PATH_TO_MECCO_CLI

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "../unit/golden.hpp"
#include "mecco/agent.hpp"
#include "mecco/chain.hpp"
#include "mecco/config.hpp"
#include "mecco/pipeline.hpp"
#include "mecco/policies.hpp"
#include "mecco/sweep.hpp"

using namespace mecco;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

// ---------------------------------------------------------------------------

Outcome formula_fidelity() {
  ScenarioConfig cfg;
  cfg.bandwidth_hz = 1.5e7;
  cfg.noise_psd = 1e-13;
  cfg.edge_capacity = 2e9;
  cfg.cloud_capacity = 1e10;
  cfg.wired_rate = 1e8;
  cfg.cloud_share_mode = CloudShareMode::Full;
  const DeviceProfile unit{0.5, 0.1, 3e-6};
  const Task t{1.5e7, 1e9, 10.0};

  const auto e = edge_cost(t, unit, 2e9, 1.0, cfg);
  const auto c = cloud_cost(t, unit, 1.0, 1e10, cfg);
  const auto d = device_cost(t, unit, OffloadDecision::to_edge(), 2e9, 1e10, 1.0, cfg);
  const auto dc = device_cost(t, unit, OffloadDecision::to_cloud(), 2e9, 1e10, 1.0, cfg);
  const std::vector<std::pair<double, double>> pairs{
      {transmission_rate(0.5, {0.5, 0.1, 1e-7}, cfg), golden::kRateHalfBand},
      {transmission_rate(1.0, unit, cfg), 1.5e7},
      {e.latency, golden::kEdgeLatency},
      {e.energy, golden::kEdgeEnergy},
      {c.latency, golden::kCloudLatency},
      {c.energy, golden::kCloudEnergy},
      {d.cost, golden::kEdgeWeighted},
      {dc.cost, 0.5 * golden::kCloudLatency + 0.5 * golden::kCloudEnergy}};
  double worst = 0.0;
  for (const auto& [got, want] : pairs) worst = std::max(worst, std::abs(got - want) / std::abs(want));
  return {worst <= 1e-12, std::to_string(pairs.size()) + " values, max relative error " + fmt(worst)};
}

// ---------------------------------------------------------------------------

std::optional<Constraint> reference_check(const AllocationPlan& p, const ScenarioConfig& cfg) {
  const auto& d = p.decisions;
  const bool c1 = std::any_of(d.begin(), d.end(), [](const OffloadDecision& x) {
    return x.edge < 0 || x.edge > 1 || x.cloud < 0 || x.cloud > 1;
  });
  const bool c2 = std::any_of(d.begin(), d.end(), [](const OffloadDecision& x) { return x.edge + x.cloud != 1; });
  const double fsum = std::accumulate(p.edge_alloc.begin(), p.edge_alloc.end(), 0.0);
  const bool c3 = std::isnan(fsum) || fsum > cfg.edge_capacity + cfg.edge_capacity * 1e-12;
  const bool c4 = std::any_of(p.edge_alloc.begin(), p.edge_alloc.end(), [](double f) { return std::isnan(f) || f < 0; });
  const bool c5 = std::any_of(p.bw_alloc.begin(), p.bw_alloc.end(),
                              [](double w) { return std::isnan(w) || w <= 0 || w > 1; });
  const double wsum = std::accumulate(p.bw_alloc.begin(), p.bw_alloc.end(), 0.0);
  const bool c6 = std::isnan(wsum) || wsum > 1 + 1e-12;
  const std::pair<bool, Constraint> order[] = {{c1, Constraint::C1}, {c2, Constraint::C2}, {c3, Constraint::C3},
                                               {c4, Constraint::C4}, {c5, Constraint::C5}, {c6, Constraint::C6}};
  for (const auto& [hit, which] : order)
    if (hit) return which;
  return std::nullopt;
}

Outcome constraint_oracle() {
  ScenarioConfig cfg;
  Rng rng(2024);
  std::size_t agree = 0;
  std::size_t feasible = 0;
  const std::size_t trials = 10000;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 8);
    AllocationPlan p;
    const int levels = 1 + static_cast<int>(uniform_index(rng, 12));
    for (std::size_t i = 0; i < n; ++i) {
      OffloadDecision d = uniform01(rng) < 0.5 ? OffloadDecision::to_edge() : OffloadDecision::to_cloud();
      if (uniform01(rng) < 0.03) d = {static_cast<int>(uniform_index(rng, 4)) - 1, static_cast<int>(uniform_index(rng, 4)) - 1};
      double f = d.edge == 1 ? cfg.edge_capacity * static_cast<double>(uniform_index(rng, static_cast<std::size_t>(levels)) + 1) / (levels * static_cast<double>(n)) : 0.0;
      if (uniform01(rng) < 0.05) f = cfg.edge_capacity * uniform01(rng) * 2.0;
      if (uniform01(rng) < 0.03) f = -uniform01(rng) * 1e9;
      double w = 1.0 / static_cast<double>(n) * (0.5 + 0.5 * uniform01(rng));
      if (uniform01(rng) < 0.05) w = uniform01(rng);
      if (uniform01(rng) < 0.02) w = uniform01(rng) < 0.5 ? 0.0 : 1.0 + uniform01(rng);
      p.push_back(d, f, w);
    }
    // Exact budget boundaries built from quantised shares.
    if (uniform01(rng) < 0.1) {
      for (std::size_t i = 0; i < n; ++i) {
        p.decisions[i] = OffloadDecision::to_edge();
        p.edge_alloc[i] = cfg.edge_capacity / static_cast<double>(n);
        p.bw_alloc[i] = 1.0 / static_cast<double>(n);
      }
    }
    const auto got = validate_plan(p, cfg);
    const auto want = reference_check(p, cfg);
    agree += got == want;
    feasible += !want.has_value();
  }
  return {agree == trials, std::to_string(agree) + "/" + std::to_string(trials) + " agree (" +
                               std::to_string(feasible) + " feasible plans)"};
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  ScenarioConfig s;
  s.n_devices = 2;
  const OffloadEnv env(s, WorkloadConfig{}, ActionGrid{4, 4});
  AgentConfig cfg;
  cfg.episodes = 3000;
  const auto model = std::make_shared<const TrainedModel>(train(env, cfg, 1).model);
  const Policy adrlo(PolicyKind::ADRLO, model);
  std::size_t within = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SystemState init = env.reset(seed);
    const double best = brute_force_oracle(init).total_cost;
    const double got = run_episode(adrlo, init, seed).total_cost;
    const double gap = got / best - 1.0;
    worst = std::max(worst, gap);
    within += gap <= 0.05;
  }
  return {within == 20, std::to_string(within) + "/20 held-out instances within 5% of the optimum, worst gap " +
                            fmt(100 * worst) + "%"};
}

// ---------------------------------------------------------------------------

struct SweepTable {
  std::vector<double> points;
  // point -> policy -> per-seed totals in seed order
  std::map<double, std::map<std::string, std::vector<double>>> per_seed;
  std::map<double, std::map<std::string, double>> aggregate;
  std::size_t skipped = 0;
};

SweepTable run_preset(const std::string& name, std::vector<PolicyKind> policies = {}) {
  SweepSpec spec = preset(name);
  spec.shared_model = true;
  if (!policies.empty()) spec.policies = std::move(policies);
  const SweepResult r = run_sweep(spec, default_config());
  SweepTable t;
  t.points = spec.grid;
  for (const auto& row : r.rows) {
    if (row.skipped) {
      ++t.skipped;
      continue;
    }
    if (row.aggregate) t.aggregate[row.sweep_value][row.policy] = row.total_cost;
    else t.per_seed[row.sweep_value][row.policy].push_back(row.total_cost);
  }
  return t;
}

std::string series(const SweepTable& t, const std::string& policy) {
  std::string s;
  for (double x : t.points) {
    if (!s.empty()) s += ' ';
    s += fmt(t.aggregate.at(x).at(policy));
  }
  return policy + "=[" + s + "]";
}

Outcome fig8a_trend() {
  const SweepTable t = run_preset("fig8a");
  const std::vector<std::string> order{"ADRLO", "DRLO", "EO", "CO"};

  std::vector<std::string> not_monotone;
  for (const auto& pol : order)
    for (std::size_t i = 1; i < t.points.size(); ++i)
      if (t.aggregate.at(t.points[i]).at(pol) < t.aggregate.at(t.points[i - 1]).at(pol)) {
        not_monotone.push_back(pol);
        break;
      }

  // Bootstrap over seed groups: the same resampled seeds for every policy.
  Rng rng(8);
  const std::size_t resamples = 1000;
  const std::size_t k = t.per_seed.at(t.points[0]).at("CO").size();
  std::size_t holds = 0;
  std::map<std::string, std::size_t> pair_fail;
  std::vector<std::size_t> idx(k);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& i : idx) i = uniform_index(rng, k);
    bool all = true;
    for (double x : t.points) {
      std::vector<double> means;
      for (const auto& pol : order) {
        const auto& v = t.per_seed.at(x).at(pol);
        double sum = 0.0;
        for (std::size_t i : idx) sum += v[i];
        means.push_back(sum / static_cast<double>(k));
      }
      for (std::size_t j = 1; j < means.size(); ++j)
        if (means[j - 1] > means[j]) {
          all = false;
          ++pair_fail[order[j - 1] + "<=" + order[j]];
        }
    }
    holds += all;
  }
  const double frac = static_cast<double>(holds) / static_cast<double>(resamples);
  std::string detail = "ordering held at every point in " + fmt(100 * frac) + "% of " +
                       std::to_string(resamples) + " resamples";
  for (const auto& [pair, n] : pair_fail) detail += "; " + pair + " violated " + std::to_string(n) + "x";
  detail += not_monotone.empty() ? "; all policies non-decreasing in N" : "; not monotone:";
  for (const auto& p : not_monotone) detail += " " + p;
  for (const auto& pol : order) detail += "; " + series(t, pol);
  return {not_monotone.empty() && frac >= 0.8, detail};
}

Outcome fig8b_crossover() {
  const SweepTable t = run_preset("fig8b", {PolicyKind::EO, PolicyKind::CO});
  // A crossover at x* in [3, 8]: EO < CO for every size below x*, CO < EO above.
  bool found = false;
  double where = 0.0;
  for (std::size_t i = 0; i + 1 < t.points.size() && !found; ++i) {
    const double lo = t.points[i];
    const double hi = t.points[i + 1];
    if (hi < 3.0 || lo > 8.0) continue;
    bool ok = true;
    for (double x : t.points) {
      const double eo = t.aggregate.at(x).at("EO");
      const double co = t.aggregate.at(x).at("CO");
      if (x <= lo && !(eo < co)) ok = false;
      if (x >= hi && !(co < eo)) ok = false;
    }
    if (ok) {
      found = true;
      where = 0.5 * (lo + hi);
    }
  }
  std::string detail = found ? "crossover near " + fmt(where) + " MB" : "no crossover in [3, 8] MB";
  std::string ratios;
  for (double x : t.points) ratios += " " + fmt(t.aggregate.at(x).at("CO") / t.aggregate.at(x).at("EO"));
  detail += "; CO/EO ratio per size:" + ratios + "; " + series(t, "EO") + "; " + series(t, "CO");
  return {found, detail};
}

Outcome fig9a_identities() {
  const SweepTable t = run_preset("fig9a");
  const double co0 = t.aggregate.at(t.points[0]).at("CO");
  bool co_const = true;
  bool eo_strict = true;
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    co_const = co_const && t.aggregate.at(t.points[i]).at("CO") == co0;
    if (i > 0)
      eo_strict = eo_strict && t.aggregate.at(t.points[i]).at("EO") < t.aggregate.at(t.points[i - 1]).at("EO");
  }
  return {co_const && eo_strict, std::string("CO constant: ") + (co_const ? "yes" : "no") +
                                     "; EO strictly decreasing: " + (eo_strict ? "yes" : "no") + "; " +
                                     series(t, "CO") + "; " + series(t, "EO")};
}

Outcome fig9b_direction() {
  const SweepTable t = run_preset("fig9b");
  std::string bad;
  std::string all;
  for (const auto& pol : {"ADRLO", "DRLO", "EO", "CO"}) {
    for (std::size_t i = 1; i < t.points.size(); ++i)
      if (t.aggregate.at(t.points[i]).at(pol) > t.aggregate.at(t.points[i - 1]).at(pol)) {
        bad += std::string(" ") + pol + "@" + fmt(t.points[i]);
      }
    all += "; " + series(t, pol);
  }
  return {bad.empty(), (bad.empty() ? std::string("all policies non-increasing in B") : "increases at" + bad) + all};
}

Outcome fig10_ablations() {
  const SweepTable t = run_preset("fig10");
  std::string bad;
  for (double x : t.points) {
    const auto& a = t.aggregate.at(x);
    if (a.at("ADRLO") > a.at("no-edge-alloc") || a.at("ADRLO") > a.at("no-bw-alloc")) bad += " " + fmt(x);
  }
  return {bad.empty(), (bad.empty() ? std::string("ADRLO lowest at every point") : "ADRLO above an ablation at" + bad) +
                           "; " + series(t, "ADRLO") + "; " + series(t, "no-edge-alloc") + "; " +
                           series(t, "no-bw-alloc")};
}

// ---------------------------------------------------------------------------

QNetworkParams constant_net(const std::vector<double>& q) {
  Rng rng(1);
  QNetworkParams p = init_params(kFeatureCount, 4, q.size(), false, rng);
  p.advantage.weight.setZero();
  for (std::size_t i = 0; i < q.size(); ++i) p.advantage.bias(static_cast<Eigen::Index>(i), 0) = q[i];
  return p;
}

Outcome agent_numerics() {
  // Finite differences.
  double worst_grad = 0.0;
  bool grad_ok = true;
  for (int net = 0; net < 10; ++net) {
    Rng rng(500 + static_cast<std::uint64_t>(net));
    const std::size_t actions = 4;
    QNetworkParams p = init_params(kFeatureCount, 6, actions, net % 2 == 0, rng);
    std::vector<Experience> xs;
    for (int j = 0; j < 4; ++j) {
      Experience e;
      for (auto& v : e.s) v = uniform01(rng);
      e.s_next = e.s;
      e.mask.assign(actions, 1);
      e.next_mask.assign(actions, 1);
      e.mask[uniform_index(rng, actions)] = 0;
      do e.a = uniform_index(rng, actions);
      while (!e.mask[e.a]);
      xs.push_back(e);
    }
    const Batch batch = make_batch(xs);
    std::vector<double> y(batch.size());
    for (auto& v : y) v = uniform01(rng);
    QNetworkParams grad;
    loss_and_gradient(p, batch, y, grad);
    std::vector<Eigen::MatrixXd*> g;
    grad.for_each_tensor([&](const std::string&, Eigen::MatrixXd& t) { g.push_back(&t); });
    std::size_t k = 0;
    p.for_each_tensor([&](const std::string&, Eigen::MatrixXd& t) {
      const Eigen::MatrixXd& gt = *g[k++];
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        const double keep = t.data()[i];
        QNetworkParams scratch;
        t.data()[i] = keep + 1e-5;
        const double up = loss_and_gradient(p, batch, y, scratch);
        t.data()[i] = keep - 1e-5;
        const double down = loss_and_gradient(p, batch, y, scratch);
        t.data()[i] = keep;
        const double fd = (up - down) / 2e-5;
        const double scale = std::max(std::abs(fd), std::abs(gt.data()[i]));
        const double err = std::abs(fd - gt.data()[i]);
        if (err > 1e-4 * scale + 1e-9) grad_ok = false;
        if (scale > 1e-6) worst_grad = std::max(worst_grad, err / scale);
      }
    });
  }

  // Shift invariance on an exactly representable head.
  Rng rng(9);
  QNetworkParams d = init_params(kFeatureCount, 4, 3, true, rng);
  d.advantage.weight.setZero();
  d.advantage.bias << 1.0, 2.0, 3.0;
  const Features f{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto before = forward(d, f, {1, 1, 1});
  d.advantage.bias.array() += 16.0;
  const bool shift_ok = forward(d, f, {1, 1, 1}) == before;

  // Hand example of the double-DQN target.
  Experience e;
  e.c = 1.0;
  e.mask = {1, 1};
  e.next_mask = {1, 1};
  const auto y = double_dqn_target(make_batch(std::vector<Experience>{e}), constant_net({2, 1}), constant_net({5, 4}), 0.9);
  const bool target_ok = y[0] == 1.0 + 0.9 * 4.0;

  // Toy MDP.
  struct Arc {
    std::size_t next;
    double cost;
  };
  const Arc mdp[3][2] = {{{1, 1.0}, {2, 3.0}}, {{2, 2.0}, {3, 0.5}}, {{3, 1.0}, {0, 0.2}}};
  double qs[3][2] = {};
  for (int it = 0; it < 2000; ++it) {
    double nx[3][2];
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t a = 0; a < 2; ++a) {
        const Arc arc = mdp[s][a];
        nx[s][a] = arc.cost + (arc.next == 3 ? 0.0 : 0.9 * std::min(qs[arc.next][0], qs[arc.next][1]));
      }
    std::copy(&nx[0][0], &nx[0][0] + 6, &qs[0][0]);
  }
  TabularQ tab(3, 2);
  Rng mrng(4);
  for (int it = 0; it < 50000; ++it) {
    const std::size_t s = uniform_index(mrng, 3);
    const std::size_t a = uniform_index(mrng, 2);
    const Arc arc = mdp[s][a];
    tab.update(s, a, arc.cost, arc.next == 3 ? 0 : arc.next, arc.next == 3, 0.1, 0.9);
  }
  double mdp_err = 0.0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) mdp_err = std::max(mdp_err, std::abs(tab(s, a) - qs[s][a]));

  const bool ok = grad_ok && shift_ok && target_ok && mdp_err < 1e-2;
  return {ok, "gradient max relative error " + fmt(worst_grad) + "; shift invariance " + (shift_ok ? "exact" : "broken") +
                  "; double-DQN target " + fmt(y[0]) + "; toy MDP max error " + fmt(mdp_err)};
}

// ---------------------------------------------------------------------------

Outcome chain_integrity() {
  using namespace chain;
  Account admin = new_account(70);
  Account md = new_account(71);
  Account stranger = new_account(72);
  PolicyTable table;
  table.admin_pk = admin.public_key;
  table = apply_registration(build_registration_tx(admin, RegistrationOp::AddMd, md.public_key, "md-a"), table);
  const bool granted = verify_request(build_offload_tx(md, "md-a", sha256("x")), table).verdict == Verdict::Granted;
  const bool by_pk = verify_request(build_offload_tx(stranger, "md-a", sha256("x")), table).reason == DenialReason::UnknownKey;
  const bool by_id = verify_request(build_offload_tx(md, "md-b", sha256("x")), table).reason == DenialReason::UnknownDevice;

  Ledger ledger({"m0", "m1", "m2"});
  TxPool pool;
  AccessControl gate(admin);
  for (int round = 0; round < 4; ++round) {
    pool.submit(build_offload_tx(md, "md-a", sha256(std::to_string(round))));
    const auto out = gate.process(build_offload_tx(stranger, "md-z", sha256("y")).serialize(), table);
    pool.submit(*out.penalty);
    mine_block(pool, ledger);
  }
  const Bytes clean = encode_ledger(ledger);
  Rng rng(10);
  std::size_t caught = 0;
  for (int i = 0; i < 100; ++i) {
    Bytes bad = clean;
    const std::size_t bit = 64 + uniform_index(rng, (bad.size() - 8) * 8);
    bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      caught += !verify_chain(decode_ledger(bad, ledger.miners()));
    } catch (const DecodeError&) {
      ++caught;
    }
  }

  PolicyTable t2;
  t2.admin_pk = admin.public_key;
  std::vector<Account> users;
  for (int i = 0; i < 5; ++i) users.push_back(new_account(80 + i));
  const std::vector<std::string> ids{"a", "b", "c"};
  std::set<std::pair<PublicKey, std::string>> model;
  std::size_t mismatches = 0;
  for (int step = 0; step < 10000; ++step) {
    Account& u = users[uniform_index(rng, users.size())];
    const std::string& id = ids[uniform_index(rng, ids.size())];
    const std::size_t op = uniform_index(rng, 3);
    if (op == 0) {
      t2 = apply_registration(build_registration_tx(admin, RegistrationOp::AddMd, u.public_key, id), t2);
      model.insert({u.public_key, id});
    } else if (op == 1) {
      t2 = apply_registration(build_registration_tx(admin, RegistrationOp::DeleteMd, u.public_key, ""), t2);
      std::erase_if(model, [&](const auto& p) { return p.first == u.public_key; });
    } else {
      const bool g = verify_request(build_offload_tx(u, id, sha256("r")), t2).verdict == Verdict::Granted;
      mismatches += g != model.contains({u.public_key, id});
    }
  }
  const bool ok = granted && by_pk && by_id && verify_chain(ledger) && caught == 100 && mismatches == 0;
  return {ok, std::string("granted/denied-by-key/denied-by-device branches: ") + (granted && by_pk && by_id ? "ok" : "wrong") +
                  "; mutations rejected " + std::to_string(caught) + "/100; soundness mismatches " +
                  std::to_string(mismatches) + "/10000 steps"};
}

Outcome pipeline_run() {
  const RunConfig cfg = parse_config("n_devices = 6\nchain.unregistered = 1,4\n");
  const PipelineRun run = run_pipeline(cfg, 3, [](const OffloadEnv&) { return Policy(PolicyKind::EO); });
  const std::vector<std::size_t> expected{0, 2, 3, 5};
  const auto stats = chain::ledger_stats(run.ledger);
  const bool ok = run.authorized == expected && run.offload && run.offload->per_device.size() == 4 &&
                  run.penalties == 2 && stats.denied == 2 && run.chain_valid;
  return {ok, std::to_string(run.authorized.size()) + " of 6 authorised, " + std::to_string(stats.denied) +
                  " penalty transactions committed, verify_chain " + (run.chain_valid ? "true" : "false")};
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& cli, const fs::path& dir, const std::string& args, const std::string& stdout_name) {
  const std::string cmd =
      "cd '" + dir.string() + "' && '" + cli + "' " + args + " > " + stdout_name + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "mecco_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"train --config small.cfg --seed 3 --out model.txt --trace trace.csv", "train.out"},
      {"eval --config small.cfg --policy ADRLO --policy EO --policy CO --model model.txt --seeds-per-point 5 --out eval.csv",
       "eval.out"},
      {"sweep --preset fig9b --config small.cfg --seeds-per-point 2 --shared-model --out sweep.csv", "sweep.out"},
      {"oracle --config tiny.cfg --seed 4 --out oracle.csv", "oracle.out"},
      {"pipeline --config small.cfg --policy ADRLO --out pipeline.ledger --report pipeline.csv", "pipeline.out"},
      {"chain init --out chain.ledger", "init.out"},
      {"chain register --ledger chain.ledger --seed 5 --device md-5", "register.out"},
      {"chain request --ledger chain.ledger --seed 5 --device md-5", "request1.out"},
      {"chain request --ledger chain.ledger --seed 6 --device md-6", "request2.out"},
      {"chain audit --ledger chain.ledger", "audit.out"}};
  std::string failures;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    std::ofstream(dir / "small.cfg") << "n_devices = 4\nagent.episodes = 150\nchain.unregistered = 1\n";
    std::ofstream(dir / "tiny.cfg") << "n_devices = 2\ngrid.edge_levels = 4\ngrid.bw_levels = 4\n";
    for (const auto& [args, out] : commands) {
      const int code = run_cli(cli, dir, args, out);
      if (code != 0) failures += " [" + args.substr(0, args.find(" --")) + " exit " + std::to_string(code) + "]";
    }
  }
  std::size_t compared = 0;
  std::string diffs;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    ++compared;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) diffs += " " + entry.path().filename().string();
  }
  const bool ok = failures.empty() && diffs.empty() && compared > 10;
  std::string detail = std::to_string(compared) + " artifacts compared across two runs";
  detail += diffs.empty() ? ", all byte-identical" : "; differing:" + diffs;
  if (!failures.empty()) detail += "; failed commands:" + failures;
  if (ok) fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: mecco_acceptance PATH_TO_MECCO_CLI\n";
    return 2;
  }
  const std::string cli = fs::absolute(argv[1]).string();

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, formula_fidelity},   {2, constraint_oracle}, {3, oracle_equivalence}, {4, fig8a_trend},
      {5, fig8b_crossover},    {6, fig9a_identities},  {7, fig9b_direction},    {8, fig10_ablations},
      {9, agent_numerics},     {10, chain_integrity},  {11, pipeline_run},      {12, [&] { return determinism(cli); }}};

  int failed = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  std::cout << (12 - failed) << "/12 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
