#include "mecco/sweep.hpp"

#include <charconv>
#include <memory>
#include <optional>
#include <ostream>

namespace mecco {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<double> range(double from, double to, double step) {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = from + i * step;
    if (v > to + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

const std::vector<PolicyKind> kMainPolicies = {PolicyKind::ADRLO, PolicyKind::DRLO, PolicyKind::EO, PolicyKind::CO};

constexpr std::uint64_t kTrainSalt = 0x7a11;

}  // namespace

const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::NDevices: return "n_devices";
    case SweepVar::TaskSizeMb: return "task_size_mb";
    case SweepVar::EdgeCapacityGhz: return "edge_capacity_ghz";
    case SweepVar::BandwidthMhz: return "bandwidth_mhz";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
  if (policies.empty()) throw ConfigError("sweep needs at least one policy");
  if (seeds_per_point < 1) throw ConfigError("sweep needs at least one seed per point");
}

SweepSpec preset(const std::string& name) {
  SweepSpec s;
  s.name = name;
  s.policies = kMainPolicies;
  if (name == "fig8a") {
    s.var = SweepVar::NDevices;
    s.grid = range(2, 12, 2);
    s.overrides = {{"task_min_mb", "0.1"}, {"task_max_mb", "1"}};
  } else if (name == "fig8b") {
    s.var = SweepVar::TaskSizeMb;
    s.grid = range(2, 12, 1);
    s.fixed_task_size = true;
    s.overrides = {{"n_devices", "1"}};
  } else if (name == "fig9a") {
    s.var = SweepVar::EdgeCapacityGhz;
    s.grid = range(0.5, 5, 0.5);
  } else if (name == "fig9b") {
    s.var = SweepVar::BandwidthMhz;
    s.grid = range(1, 10, 1);
  } else if (name == "fig10") {
    s.var = SweepVar::TaskSizeMb;
    s.grid = range(2, 12, 2);
    s.policies = {PolicyKind::ADRLO, PolicyKind::NoEdgeAlloc, PolicyKind::NoBwAlloc};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected fig8a, fig8b, fig9a, fig9b or fig10)");
  }
  return s;
}

std::vector<std::uint64_t> sweep_seeds(std::uint64_t base_seed, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = base_seed + i;
  return out;
}

RunConfig sweep_point_config(const SweepSpec& spec, const RunConfig& base, double value) {
  ConfigValues v = base.values;
  for (const auto& [k, val] : spec.overrides) set_config_value(v, k, val);
  switch (spec.var) {
    case SweepVar::NDevices:
      if (value < 0 || value != static_cast<double>(static_cast<std::size_t>(value)))
        throw ConfigError("device count must be a non-negative integer");
      v.n_devices = static_cast<std::size_t>(value);
      break;
    case SweepVar::TaskSizeMb:
      if (spec.fixed_task_size) v.task_min_mb = value;
      v.task_max_mb = value;
      break;
    case SweepVar::EdgeCapacityGhz: v.edge_capacity_ghz = value; break;
    case SweepVar::BandwidthMhz: v.bandwidth_mhz = value; break;
  }
  return resolve(v);
}

SweepResult run_sweep(const SweepSpec& spec, const RunConfig& base, std::ostream* progress) {
  spec.validate();
  SweepResult res;
  res.spec = spec;
  res.config_echo = echo_config(base.values);
  res.config_hash = config_hash(base.values);
  res.seeds = sweep_seeds(base.seed, spec.seeds_per_point);

  struct Point {
    double value;
    std::optional<OffloadEnv> env;
    std::string skip_reason;
  };
  std::vector<Point> points;
  for (double value : spec.grid) {
    Point p{value, std::nullopt, {}};
    try {
      const RunConfig rc = sweep_point_config(spec, base, value);
      p.env.emplace(rc.scenario, rc.workload, rc.grid);
    } catch (const AdmissionError& e) {
      p.skip_reason = e.what();
    }
    points.push_back(std::move(p));
  }

  bool need_adrlo = false;
  bool need_drlo = false;
  for (PolicyKind k : spec.policies) {
    if (k == PolicyKind::DRLO) need_drlo = true;
    else if (is_learned(k)) need_adrlo = true;
  }

  auto train_model = [&](std::span<const OffloadEnv> envs, bool dueling, std::uint64_t salt) {
    const AgentConfig cfg = dueling ? base.agent : base.agent.as_plain_dqn();
    return std::make_shared<const TrainedModel>(train(envs, cfg, mix_seed(base.seed ^ kTrainSalt, salt)).model);
  };

  std::shared_ptr<const TrainedModel> shared_adrlo;
  std::shared_ptr<const TrainedModel> shared_drlo;
  if (spec.shared_model && (need_adrlo || need_drlo)) {
    std::vector<OffloadEnv> envs;
    for (const auto& p : points)
      if (p.env) envs.push_back(*p.env);
    if (!envs.empty()) {
      if (progress) *progress << "training shared models over " << envs.size() << " points\n";
      if (need_adrlo) shared_adrlo = train_model(envs, true, 0);
      if (need_drlo) shared_drlo = train_model(envs, false, 1);
    }
  }

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& p = points[pi];
    if (!p.env) {
      for (PolicyKind k : spec.policies)
        for (std::uint64_t s : res.seeds) {
          SweepRow r;
          r.sweep_value = p.value;
          r.policy = std::string(policy_name(k));
          r.seed = s;
          r.skipped = true;
          r.reason = p.skip_reason;
          res.rows.push_back(std::move(r));
        }
      continue;
    }
    std::shared_ptr<const TrainedModel> adrlo = shared_adrlo;
    std::shared_ptr<const TrainedModel> drlo = shared_drlo;
    if (!spec.shared_model) {
      const std::span<const OffloadEnv> one(&*p.env, 1);
      if (progress && (need_adrlo || need_drlo))
        *progress << "training models for " << to_string(spec.var) << " = " << fmt(p.value) << "\n";
      if (need_adrlo) adrlo = train_model(one, true, 2 * pi + 2);
      if (need_drlo) drlo = train_model(one, false, 2 * pi + 3);
    }

    for (PolicyKind k : spec.policies) {
      const std::string name(policy_name(k));
      std::vector<SweepRow> rows;
      try {
        const Policy policy(k, k == PolicyKind::DRLO ? drlo : (is_learned(k) ? adrlo : nullptr));
        const EvalReport rep = evaluate_policy(policy, *p.env, res.seeds);
        for (const auto& e : rep.episodes) {
          SweepRow r;
          r.sweep_value = p.value;
          r.policy = name;
          r.seed = e.seed;
          r.total_cost = e.total_cost;
          r.mean_latency_s = e.mean_latency_s;
          r.mean_energy_j = e.mean_energy_j;
          rows.push_back(std::move(r));
        }
        SweepRow agg;
        agg.sweep_value = p.value;
        agg.policy = name;
        agg.aggregate = true;
        agg.total_cost = rep.mean_total_cost;
        agg.mean_latency_s = rep.mean_latency_s;
        agg.mean_energy_j = rep.mean_energy_j;
        rows.push_back(std::move(agg));
      } catch (const AdmissionError& e) {
        rows.clear();
        for (std::uint64_t s : res.seeds) {
          SweepRow r;
          r.sweep_value = p.value;
          r.policy = name;
          r.seed = s;
          r.skipped = true;
          r.reason = e.what();
          rows.push_back(std::move(r));
        }
      }
      res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    }
    if (progress) *progress << "done " << to_string(spec.var) << " = " << fmt(p.value) << "\n";
  }
  return res;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "# config_hash " << result.config_hash << "\n";
  out << "# seeds ";
  for (std::size_t i = 0; i < result.seeds.size(); ++i) out << (i ? "," : "") << result.seeds[i];
  out << "\n";
  out << "# preset " << (result.spec.name.empty() ? "custom" : result.spec.name) << "\n";
  out << "# model " << (result.spec.shared_model ? "shared" : "per-point") << "\n";
  std::size_t pos = 0;
  while (pos < result.config_echo.size()) {
    const std::size_t nl = result.config_echo.find('\n', pos);
    out << "# config " << result.config_echo.substr(pos, nl - pos) << "\n";
    pos = nl + 1;
  }
  out << "sweep_var,sweep_value,policy,seed,total_cost,mean_latency_s,mean_energy_j,skipped,reason\n";
  const char* var = to_string(result.spec.var);
  for (const auto& r : result.rows) {
    out << var << ',' << fmt(r.sweep_value) << ',' << r.policy << ',';
    if (r.aggregate) out << "aggregate";
    else out << r.seed;
    out << ',';
    if (r.skipped) {
      out << ",,,1,\"";
      for (char c : r.reason) out << (c == '"' ? '\'' : c);
      out << "\"\n";
    } else {
      out << fmt(r.total_cost) << ',' << fmt(r.mean_latency_s) << ',' << fmt(r.mean_energy_j) << ",0,\n";
    }
  }
}

}  // namespace mecco
