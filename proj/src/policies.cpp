#include "mecco/policies.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace mecco {

namespace {

struct NamedKind {
  PolicyKind kind;
  std::string_view name;
};

constexpr std::array<NamedKind, 10> kPolicyNames{{
    {PolicyKind::ADRLO, "ADRLO"},
    {PolicyKind::DRLO, "DRLO"},
    {PolicyKind::EO, "EO"},
    {PolicyKind::CO, "CO"},
    {PolicyKind::EOEqual, "EO-equal"},
    {PolicyKind::COEqual, "CO-equal"},
    {PolicyKind::NoEdgeAlloc, "no-edge-alloc"},
    {PolicyKind::NoBwAlloc, "no-bw-alloc"},
    {PolicyKind::Oracle, "ORACLE"},
    {PolicyKind::Random, "RANDOM"},
}};

bool needs_model(PolicyKind k) {
  return k == PolicyKind::ADRLO || k == PolicyKind::DRLO || k == PolicyKind::NoEdgeAlloc ||
         k == PolicyKind::NoBwAlloc;
}

std::size_t remaining_devices(const SystemState& s) { return s.n_devices() - s.cursor; }

// Candidate with the smallest immediate cost increase.
template <class Pred>
std::optional<std::size_t> greedy_among(const SystemState& state, const ActionMask& mask, Pred&& allowed) {
  const ActionGrid& grid = state.episode->grid;
  std::optional<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i] || !allowed(grid.action_at(i))) continue;
    const double c = step(state, i).step_cost;
    if (!best || c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return best;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  for (const auto& p : kPolicyNames)
    if (p.kind == kind) return p.name;
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (const auto& p : kPolicyNames)
    if (p.name == name) return p.kind;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

bool is_learned(PolicyKind kind) { return needs_model(kind); }

int equal_share_level(int levels, std::size_t n_devices) {
  if (n_devices == 0) return levels;
  if (n_devices > static_cast<std::size_t>(levels))
    throw AdmissionError("equal share needs N <= " + std::to_string(levels) + " levels, got N = " +
                         std::to_string(n_devices));
  return levels / static_cast<int>(n_devices);
}

Decision co_decision(const SystemState& state) {
  const ActionMask mask = feasible_actions(state);
  const auto best = greedy_among(state, mask, [](const DiscreteAction& a) { return a.platform == Platform::Cloud; });
  if (!best) throw ValidationError("no feasible cloud action");
  return {*best, false};
}

Decision eo_decision(const SystemState& state) {
  const ActionMask mask = feasible_actions(state);
  // Keep one edge quantum for every later device so the whole set fits.
  const int max_f = state.edge_quanta_left - static_cast<int>(remaining_devices(state)) + 1;
  const auto best = greedy_among(state, mask, [&](const DiscreteAction& a) {
    return a.platform == Platform::Edge && a.f_level <= max_f;
  });
  if (best) return {*best, false};
  Decision d = co_decision(state);
  d.fallback = true;
  return d;
}

Policy::Policy(PolicyKind kind, std::shared_ptr<const TrainedModel> model)
    : kind_(kind), model_(std::move(model)) {
  if (needs_model(kind_) && !model_)
    throw ConfigError(std::string("policy ") + std::string(policy_name(kind_)) + " requires a trained model");
}

Decision Policy::choose(const SystemState& state, Rng& rng) const {
  if (state.terminal()) throw ValidationError("no decision to make in a terminal state");
  const ActionGrid& grid = state.episode->grid;
  const std::size_t n = state.n_devices();

  switch (kind_) {
    case PolicyKind::EO:
      return eo_decision(state);
    case PolicyKind::CO:
      return co_decision(state);
    case PolicyKind::EOEqual:
    case PolicyKind::COEqual: {
      const int w = equal_share_level(grid.bw_levels, n);
      DiscreteAction a{Platform::Cloud, 0, w};
      if (kind_ == PolicyKind::EOEqual) {
        const int f = equal_share_level(grid.edge_levels, n);
        a = {Platform::Edge, f, w};
      }
      return {grid.index_of(a), false};
    }
    case PolicyKind::Random: {
      const ActionMask mask = feasible_actions(state);
      std::vector<std::size_t> feasible;
      for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) feasible.push_back(i);
      return {feasible[uniform_index(rng, feasible.size())], false};
    }
    case PolicyKind::Oracle: {
      // Holding the episode keeps its address from being reused by a later one.
      if (oracle_episode_ != state.episode) {
        const Episode& ep = *state.episode;
        oracle_actions_ = brute_force_oracle(ep.scenario, ep.grid, ep.tasks, ep.devices).actions;
        oracle_episode_ = state.episode;
      }
      return {oracle_actions_.at(state.cursor), false};
    }
    case PolicyKind::ADRLO:
    case PolicyKind::DRLO:
    case PolicyKind::NoEdgeAlloc:
    case PolicyKind::NoBwAlloc: {
      ActionMask mask = feasible_actions(state);
      if (kind_ == PolicyKind::NoEdgeAlloc) {
        const int f = equal_share_level(grid.edge_levels, n);
        for (std::size_t i = 0; i < mask.size(); ++i) {
          const DiscreteAction a = grid.action_at(i);
          if (a.platform == Platform::Edge && a.f_level != f) mask[i] = 0;
        }
      } else if (kind_ == PolicyKind::NoBwAlloc) {
        const int w = equal_share_level(grid.bw_levels, n);
        for (std::size_t i = 0; i < mask.size(); ++i)
          if (grid.action_at(i).w_level != w) mask[i] = 0;
      }
      return {greedy_action(model_->params, state, mask), false};
    }
  }
  throw ValidationError("unhandled policy kind");
}

// ---------------------------------------------------------------------------

namespace {

struct OracleSearch {
  const ScenarioConfig& cfg;
  const ActionGrid& grid;
  std::span<const Task> tasks;
  std::span<const DeviceProfile> devices;
  std::vector<DiscreteAction> actions;

  AllocationPlan plan;
  std::vector<std::size_t> path;
  OracleResult best;
  bool found = false;

  void visit(std::size_t depth, int f_left, int w_left) {
    const std::size_t n = tasks.size();
    if (depth == n) {
      try {
        const double c = system_cost(plan, tasks, devices, cfg).total;
        if (!found || c < best.total_cost) {
          best.total_cost = c;
          best.actions = path;
          best.plan = plan;
          found = true;
        }
      } catch (const ConstraintError&) {
        // deadline miss under enforcement: not a candidate
      }
      return;
    }
    const int later = static_cast<int>(n - depth - 1);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const DiscreteAction& a = actions[i];
      const bool edge = a.platform == Platform::Edge;
      if (a.w_level > w_left - later) continue;
      if (edge && a.f_level > f_left) continue;
      plan.push_back(edge ? OffloadDecision::to_edge() : OffloadDecision::to_cloud(),
                     edge ? grid.edge_alloc(a.f_level, cfg.edge_capacity) : 0.0, grid.bw_share(a.w_level));
      path.push_back(i);
      visit(depth + 1, f_left - (edge ? a.f_level : 0), w_left - a.w_level);
      path.pop_back();
      plan.decisions.pop_back();
      plan.edge_alloc.pop_back();
      plan.bw_alloc.pop_back();
    }
  }
};

}  // namespace

OracleResult brute_force_oracle(const ScenarioConfig& scenario, const ActionGrid& grid,
                                std::span<const Task> tasks, std::span<const DeviceProfile> devices) {
  if (tasks.size() != devices.size()) throw std::invalid_argument("one device profile per task is required");
  const double space = std::pow(static_cast<double>(grid.size()), static_cast<double>(tasks.size()));
  if (space > kOracleSearchLimit)
    throw SizeError("oracle search space " + std::to_string(grid.size()) + "^" + std::to_string(tasks.size()) +
                    " exceeds 1e7 plans; reduce the number of devices or the grid levels");
  if (tasks.empty()) return {};

  OracleSearch s{scenario, grid, tasks, devices, {}, {}, {}, {}, false};
  for (std::size_t i = 0; i < grid.size(); ++i) s.actions.push_back(grid.action_at(i));
  s.visit(0, grid.edge_levels, grid.bw_levels);
  if (!s.found) throw AdmissionError("no feasible plan exists on this action grid");
  return s.best;
}

OracleResult brute_force_oracle(const SystemState& initial) {
  const Episode& ep = *initial.episode;
  return brute_force_oracle(ep.scenario, ep.grid, ep.tasks, ep.devices);
}

// ---------------------------------------------------------------------------

EpisodeResult run_episode(const Policy& policy, const SystemState& initial, std::uint64_t seed) {
  EpisodeResult r;
  r.seed = seed;
  Rng rng(mix_seed(seed, 0x5eed));
  SystemState state = initial;
  while (!state.terminal()) {
    const Decision d = policy.choose(state, rng);
    if (d.fallback) ++r.fallback_count;
    r.actions.push_back(d.action);
    state = step(state, d.action).next_state;
  }
  const Episode& ep = *state.episode;
  const std::size_t n = ep.tasks.size();
  if (n == 0) return r;

  ScenarioConfig cfg = ep.scenario;
  cfg.enforce_deadline = false;
  const SystemCost cost = system_cost(state.plan, ep.tasks, ep.devices, cfg);
  r.total_cost = cost.total;
  r.per_device = cost.per_device;
  std::size_t edge = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r.mean_latency_s += cost.per_device[i].latency;
    r.mean_energy_j += cost.per_device[i].energy;
    if (state.plan.decisions[i].is_edge()) ++edge;
  }
  r.mean_latency_s /= static_cast<double>(n);
  r.mean_energy_j /= static_cast<double>(n);
  r.edge_fraction = static_cast<double>(edge) / static_cast<double>(n);
  return r;
}

EvalReport evaluate_policy(const Policy& policy, const OffloadEnv& env, std::span<const std::uint64_t> seeds) {
  EvalReport rep;
  rep.policy = std::string(policy.name());
  for (std::uint64_t s : seeds) rep.episodes.push_back(run_episode(policy, env.reset(s), s));
  if (rep.episodes.empty()) return rep;
  for (const auto& e : rep.episodes) {
    rep.mean_total_cost += e.total_cost;
    rep.mean_latency_s += e.mean_latency_s;
    rep.mean_energy_j += e.mean_energy_j;
  }
  const double k = static_cast<double>(rep.episodes.size());
  rep.mean_total_cost /= k;
  rep.mean_latency_s /= k;
  rep.mean_energy_j /= k;
  return rep;
}

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "policy,seed,total_cost,mean_latency_s,mean_energy_j,edge_fraction,fallback_count\n";
  const auto old = out.precision(17);
  for (const auto& rep : reports)
    for (const auto& e : rep.episodes)
      out << rep.policy << ',' << e.seed << ',' << e.total_cost << ',' << e.mean_latency_s << ','
          << e.mean_energy_j << ',' << e.edge_fraction << ',' << e.fallback_count << '\n';
  out.precision(old);
}

}  // namespace mecco
