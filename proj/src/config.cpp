#include "mecco/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mecco/chain.hpp"

namespace mecco {

namespace {

enum class Range { Any, Positive, NonNegative, Unit, Fraction };

struct KeySpec {
  std::string name;
  std::function<void(ConfigValues&, std::string_view)> set;  // throws std::string on bad value
  std::function<std::string(const ConfigValues&)> get;
};

std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::string("'" + std::string(s) + "' is not a number");
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::string("'" + std::string(s) + "' is not a non-negative integer");
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::string("'" + std::string(s) + "' is not a boolean (true/false)");
}

void check(double v, Range r) {
  switch (r) {
    case Range::Any: return;
    case Range::Positive:
      if (!(v > 0.0)) throw std::string("must be positive");
      return;
    case Range::NonNegative:
      if (!(v >= 0.0)) throw std::string("must be non-negative");
      return;
    case Range::Unit:
      if (!(v >= 0.0 && v <= 1.0)) throw std::string("must lie in [0, 1]");
      return;
    case Range::Fraction:
      if (!(v > 0.0 && v <= 1.0)) throw std::string("must lie in (0, 1]");
      return;
  }
}

template <class Access>
KeySpec real_key(std::string name, Access access, Range r) {
  return {std::move(name),
          [access, r](ConfigValues& c, std::string_view s) {
            const double v = parse_double(s);
            check(v, r);
            access(c) = v;
          },
          [access](const ConfigValues& c) { return fmt_double(access(const_cast<ConfigValues&>(c))); }};
}

template <class T, class Access>
KeySpec int_key(std::string name, Access access, std::uint64_t min) {
  return {std::move(name),
          [access, min](ConfigValues& c, std::string_view s) {
            const std::uint64_t v = parse_u64(s);
            if (v < min) throw std::string("must be at least " + std::to_string(min));
            access(c) = static_cast<T>(v);
          },
          [access](const ConfigValues& c) { return std::to_string(access(const_cast<ConfigValues&>(c))); }};
}

template <class Access>
KeySpec bool_key(std::string name, Access access) {
  return {std::move(name), [access](ConfigValues& c, std::string_view s) { access(c) = parse_bool(s); },
          [access](const ConfigValues& c) {
            return std::string(access(const_cast<ConfigValues&>(c)) ? "true" : "false");
          }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> keys = [] {
    std::vector<KeySpec> k;
    k.push_back(real_key("bandwidth_mhz", [](ConfigValues& c) -> double& { return c.bandwidth_mhz; }, Range::Positive));
    k.push_back(real_key("noise_dbm_hz", [](ConfigValues& c) -> double& { return c.noise_dbm_hz; }, Range::Any));
    k.push_back(real_key("edge_capacity_ghz", [](ConfigValues& c) -> double& { return c.edge_capacity_ghz; }, Range::Positive));
    k.push_back(real_key("cloud_capacity_ghz", [](ConfigValues& c) -> double& { return c.cloud_capacity_ghz; }, Range::Positive));
    k.push_back(real_key("wired_rate_mbps", [](ConfigValues& c) -> double& { return c.wired_rate_mbps; }, Range::Positive));
    k.push_back(real_key("beta_t", [](ConfigValues& c) -> double& { return c.beta_t; }, Range::Unit));
    k.push_back(real_key("beta_e", [](ConfigValues& c) -> double& { return c.beta_e; }, Range::Unit));
    k.push_back({"cloud_share_mode",
                 [](ConfigValues& c, std::string_view s) {
                   if (s == "full") c.cloud_share_mode = CloudShareMode::Full;
                   else if (s == "equal-split") c.cloud_share_mode = CloudShareMode::EqualSplit;
                   else throw std::string("'" + std::string(s) + "' is not one of full, equal-split");
                 },
                 [](const ConfigValues& c) {
                   return std::string(c.cloud_share_mode == CloudShareMode::Full ? "full" : "equal-split");
                 }});
    k.push_back(int_key<std::size_t>("n_devices", [](ConfigValues& c) -> std::size_t& { return c.n_devices; }, 0));
    k.push_back(real_key("tx_power_w", [](ConfigValues& c) -> double& { return c.tx_power_w; }, Range::Positive));
    k.push_back(real_key("idle_power_w", [](ConfigValues& c) -> double& { return c.idle_power_w; }, Range::NonNegative));
    k.push_back(real_key("channel_gain", [](ConfigValues& c) -> double& { return c.channel_gain; }, Range::Positive));
    k.push_back(real_key("cycles_per_bit", [](ConfigValues& c) -> double& { return c.cycles_per_bit; }, Range::Positive));
    k.push_back(real_key("task_min_mb", [](ConfigValues& c) -> double& { return c.task_min_mb; }, Range::Positive));
    k.push_back(real_key("task_max_mb", [](ConfigValues& c) -> double& { return c.task_max_mb; }, Range::Positive));
    k.push_back(bool_key("enforce_deadline", [](ConfigValues& c) -> bool& { return c.enforce_deadline; }));
    k.push_back(int_key<std::uint64_t>("seed", [](ConfigValues& c) -> std::uint64_t& { return c.seed; }, 0));

    k.push_back(int_key<int>("grid.edge_levels", [](ConfigValues& c) -> int& { return c.edge_levels; }, 1));
    k.push_back(int_key<int>("grid.bw_levels", [](ConfigValues& c) -> int& { return c.bw_levels; }, 1));

    k.push_back(real_key("agent.gamma", [](ConfigValues& c) -> double& { return c.agent.gamma; }, Range::Fraction));
    k.push_back(real_key("agent.epsilon_start", [](ConfigValues& c) -> double& { return c.agent.epsilon_start; }, Range::Unit));
    k.push_back(real_key("agent.epsilon_end", [](ConfigValues& c) -> double& { return c.agent.epsilon_end; }, Range::Unit));
    k.push_back(real_key("agent.epsilon_decay_fraction",
                         [](ConfigValues& c) -> double& { return c.agent.epsilon_decay_fraction; }, Range::Unit));
    k.push_back(real_key("agent.learning_rate", [](ConfigValues& c) -> double& { return c.agent.adam.learning_rate; }, Range::Positive));
    k.push_back(real_key("agent.adam_beta1", [](ConfigValues& c) -> double& { return c.agent.adam.beta1; }, Range::Unit));
    k.push_back(real_key("agent.adam_beta2", [](ConfigValues& c) -> double& { return c.agent.adam.beta2; }, Range::Unit));
    k.push_back(real_key("agent.adam_epsilon", [](ConfigValues& c) -> double& { return c.agent.adam.epsilon; }, Range::Positive));
    k.push_back(int_key<std::size_t>("agent.batch_size", [](ConfigValues& c) -> std::size_t& { return c.agent.batch_size; }, 1));
    k.push_back(int_key<std::uint64_t>("agent.target_sync_period",
                                       [](ConfigValues& c) -> std::uint64_t& { return c.agent.target_sync_period; }, 1));
    k.push_back(int_key<std::size_t>("agent.episodes", [](ConfigValues& c) -> std::size_t& { return c.agent.episodes; }, 0));
    k.push_back(int_key<std::size_t>("agent.replay_capacity",
                                     [](ConfigValues& c) -> std::size_t& { return c.agent.replay_capacity; }, 1));
    k.push_back(int_key<std::size_t>("agent.hidden", [](ConfigValues& c) -> std::size_t& { return c.agent.hidden; }, 1));
    k.push_back(int_key<std::size_t>("agent.updates_per_step",
                                     [](ConfigValues& c) -> std::size_t& { return c.agent.updates_per_step; }, 1));

    k.push_back(int_key<std::uint64_t>("chain.admin_seed", [](ConfigValues& c) -> std::uint64_t& { return c.chain.admin_seed; }, 0));
    k.push_back(int_key<std::size_t>("chain.miners", [](ConfigValues& c) -> std::size_t& { return c.chain.miners; }, 1));
    k.push_back({"chain.unregistered",
                 [](ConfigValues& c, std::string_view s) {
                   std::vector<std::size_t> out;
                   std::size_t i = 0;
                   while (i < s.size()) {
                     std::size_t j = s.find(',', i);
                     if (j == std::string_view::npos) j = s.size();
                     std::string_view tok = s.substr(i, j - i);
                     while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
                     while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
                     out.push_back(static_cast<std::size_t>(parse_u64(tok)));
                     i = j + 1;
                   }
                   c.chain.unregistered = std::move(out);
                 },
                 [](const ConfigValues& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.chain.unregistered.size(); ++i) {
                     if (i) s += ',';
                     s += std::to_string(c.chain.unregistered[i]);
                   }
                   return s;
                 }});
    return k;
  }();
  return keys;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void set_config_value(ConfigValues& values, std::string_view key, std::string_view value) {
  for (const auto& k : key_table()) {
    if (k.name != key) continue;
    try {
      k.set(values, value);
    } catch (const std::string& msg) {
      throw ConfigError(k.name + ": " + msg);
    }
    return;
  }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

bool operator==(const ConfigValues& a, const ConfigValues& b) { return echo_config(a) == echo_config(b); }

RunConfig resolve(const ConfigValues& v) {
  RunConfig r;
  r.values = v;
  r.scenario.bandwidth_hz = v.bandwidth_mhz * 1e6;
  r.scenario.noise_psd = dbm_per_hz_to_watts_per_hz(v.noise_dbm_hz);
  r.scenario.edge_capacity = v.edge_capacity_ghz * 1e9;
  r.scenario.cloud_capacity = v.cloud_capacity_ghz * 1e9;
  r.scenario.wired_rate = v.wired_rate_mbps * 1e6;
  r.scenario.beta_t = v.beta_t;
  r.scenario.beta_e = v.beta_e;
  r.scenario.cloud_share_mode = v.cloud_share_mode;
  r.scenario.n_devices = v.n_devices;
  r.scenario.enforce_deadline = v.enforce_deadline;
  r.workload.device.tx_power = v.tx_power_w;
  r.workload.device.idle_power = v.idle_power_w;
  r.workload.device.channel_gain = v.channel_gain;
  r.workload.cycles_per_bit = v.cycles_per_bit;
  r.workload.task_min_bits = v.task_min_mb * kBitsPerMegabyte;
  r.workload.task_max_bits = v.task_max_mb * kBitsPerMegabyte;
  r.grid = {v.edge_levels, v.bw_levels};
  r.agent = v.agent;
  r.chain = v.chain;
  r.seed = v.seed;

  r.scenario.validate();
  r.workload.validate();
  r.grid.validate();
  r.agent.validate();
  return r;
}

RunConfig default_config() { return resolve(ConfigValues{}); }

RunConfig parse_config(std::string_view text) {
  ConfigValues v;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);

    const KeySpec* spec = nullptr;
    for (const auto& k : key_table())
      if (k.name == key) spec = &k;
    if (!spec) throw ConfigError("unknown key '" + key + "'", line_no);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    if (value.empty() && key != "chain.unregistered") throw ConfigError("missing value for '" + key + "'", line_no);
    try {
      spec->set(v, value);
    } catch (const std::string& msg) {
      throw ConfigError(key + ": " + msg, line_no);
    }
  }
  return resolve(v);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const ConfigValues& values) {
  std::string out;
  for (const auto& k : key_table()) out += k.name + " = " + k.get(values) + "\n";
  return out;
}

std::string config_hash(const ConfigValues& values) {
  const chain::Digest d = chain::sha256(echo_config(values));
  return chain::to_hex(d);
}

}  // namespace mecco
