#include "mecco/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mecco {

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::C1: return "C1";
    case Constraint::C2: return "C2";
    case Constraint::C3: return "C3";
    case Constraint::C4: return "C4";
    case Constraint::C5: return "C5";
    case Constraint::C6: return "C6";
    case Constraint::Deadline: return "deadline";
  }
  return "?";
}

double dbm_per_hz_to_watts_per_hz(double dbm_per_hz) {
  return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0);
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(positive_finite(bandwidth_hz), "bandwidth must be positive");
  require(positive_finite(noise_psd), "noise power spectral density must be positive");
  require(positive_finite(edge_capacity), "edge capacity must be positive");
  require(positive_finite(cloud_capacity), "cloud capacity must be positive");
  require(positive_finite(wired_rate), "wired rate must be positive");
  require(beta_t >= 0.0 && beta_t <= 1.0, "beta_t must lie in [0, 1]");
  require(beta_e >= 0.0 && beta_e <= 1.0, "beta_e must lie in [0, 1]");
}

void DeviceProfile::validate() const {
  require(positive_finite(tx_power), "tx power must be positive");
  require(std::isfinite(idle_power) && idle_power >= 0.0, "idle power must be non-negative");
  require(positive_finite(channel_gain), "channel gain must be positive");
}

void Task::validate() const {
  if (!positive_finite(data_bits)) throw DomainError("task data size must be positive");
  if (!positive_finite(cycles)) throw DomainError("task cycle count must be positive");
  if (!positive_finite(deadline_s)) throw DomainError("task deadline must be positive");
}

Task make_task(double data_bits, double cycles_per_bit, double deadline_s) {
  Task t{data_bits, data_bits * cycles_per_bit, deadline_s};
  t.validate();
  return t;
}

double transmission_rate(double w, const DeviceProfile& dev, const ScenarioConfig& cfg) {
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("bandwidth fraction must lie in (0, 1]");
  const double band = w * cfg.bandwidth_hz;
  const double snr = dev.tx_power * dev.channel_gain / (band * cfg.noise_psd);
  // log1p keeps precision in the low-SNR regime.
  return band * std::log1p(snr) / std::numbers::ln2;
}

LatencyEnergy edge_cost(const Task& task, const DeviceProfile& dev, double f_e, double w,
                        const ScenarioConfig& cfg) {
  if (!(f_e > 0.0)) throw DomainError("edge allocation must be positive");
  const double r = transmission_rate(w, dev, cfg);
  const double upload = task.data_bits / r;
  const double exec = task.cycles / f_e;
  return {upload + exec, dev.tx_power * upload + dev.idle_power * exec};
}

LatencyEnergy cloud_cost(const Task& task, const DeviceProfile& dev, double w, double f_c,
                         const ScenarioConfig& cfg) {
  if (!(f_c > 0.0)) throw DomainError("cloud allocation must be positive");
  if (!(cfg.wired_rate > 0.0)) throw DomainError("wired rate must be positive");
  const double r = transmission_rate(w, dev, cfg);
  const double upload = task.data_bits / r;
  const double forward = task.data_bits / cfg.wired_rate;
  const double exec = task.cycles / f_c;
  return {upload + forward + exec, dev.tx_power * upload + dev.idle_power * (forward + exec)};
}

CostBreakdown device_cost(const Task& task, const DeviceProfile& dev, OffloadDecision decision,
                          double f_e, double f_c, double w, const ScenarioConfig& cfg) {
  LatencyEnergy le;
  if (decision.is_edge()) {
    le = edge_cost(task, dev, f_e, w, cfg);
  } else if (decision.is_cloud()) {
    le = cloud_cost(task, dev, w, f_c, cfg);
  } else {
    throw ConstraintError(Constraint::C2, "exactly one of the edge/cloud flags must be set");
  }
  return {le.latency, le.energy, cfg.beta_t * le.latency + cfg.beta_e * le.energy};
}

double cloud_share(const AllocationPlan& plan, const ScenarioConfig& cfg) {
  if (cfg.cloud_share_mode == CloudShareMode::Full) return cfg.cloud_capacity;
  std::size_t k = 0;
  for (const auto& d : plan.decisions) k += d.is_cloud() ? 1 : 0;
  return k == 0 ? cfg.cloud_capacity : cfg.cloud_capacity / static_cast<double>(k);
}

std::optional<Constraint> validate_plan(const AllocationPlan& plan, const ScenarioConfig& cfg) {
  const std::size_t n = plan.decisions.size();
  if (plan.edge_alloc.size() != n || plan.bw_alloc.size() != n)
    throw std::invalid_argument("allocation plan vectors differ in length");

  for (const auto& d : plan.decisions) {
    const bool binary = (d.edge == 0 || d.edge == 1) && (d.cloud == 0 || d.cloud == 1);
    if (!binary) return Constraint::C1;
  }
  for (const auto& d : plan.decisions) {
    if (d.edge + d.cloud != 1) return Constraint::C2;
  }
  double f_sum = 0.0;
  for (double f : plan.edge_alloc) f_sum += f;
  if (!(f_sum <= cfg.edge_capacity * (1.0 + kFeasibilityTolerance))) return Constraint::C3;
  for (double f : plan.edge_alloc) {
    if (!(f >= 0.0)) return Constraint::C4;
  }
  for (double w : plan.bw_alloc) {
    if (!(w > 0.0 && w <= 1.0)) return Constraint::C5;
  }
  double w_sum = 0.0;
  for (double w : plan.bw_alloc) w_sum += w;
  if (!(w_sum <= 1.0 + kFeasibilityTolerance)) return Constraint::C6;
  return std::nullopt;
}

SystemCost system_cost(const AllocationPlan& plan, std::span<const Task> tasks,
                       std::span<const DeviceProfile> devs, const ScenarioConfig& cfg) {
  if (tasks.size() != plan.size() || devs.size() != plan.size())
    throw std::invalid_argument("tasks/devices do not match the plan length");
  if (auto violated = validate_plan(plan, cfg))
    throw ConstraintError(*violated, "allocation plan is infeasible");

  const double f_c = cloud_share(plan, cfg);
  SystemCost out;
  out.per_device.reserve(plan.size());
  for (std::size_t n = 0; n < plan.size(); ++n) {
    const CostBreakdown c = device_cost(tasks[n], devs[n], plan.decisions[n], plan.edge_alloc[n],
                                        f_c, plan.bw_alloc[n], cfg);
    if (cfg.enforce_deadline && c.latency > tasks[n].deadline_s)
      throw ConstraintError(Constraint::Deadline,
                            "device " + std::to_string(n) + " misses its deadline");
    out.total += c.cost;
    out.per_device.push_back(c);
  }
  return out;
}

}  // namespace mecco
