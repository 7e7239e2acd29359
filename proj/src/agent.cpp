#include "mecco/agent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mecco {

using Eigen::Index;
using Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Parameters

void QNetworkParams::for_each_tensor(const std::function<void(const std::string&, MatrixXd&)>& fn) {
  fn("trunk.0.weight", trunk1.weight);
  fn("trunk.0.bias", trunk1.bias);
  fn("trunk.1.weight", trunk2.weight);
  fn("trunk.1.bias", trunk2.bias);
  if (dueling) {
    fn("value.weight", value.weight);
    fn("value.bias", value.bias);
  }
  fn("advantage.weight", advantage.weight);
  fn("advantage.bias", advantage.bias);
}

void QNetworkParams::for_each_tensor(
    const std::function<void(const std::string&, const MatrixXd&)>& fn) const {
  const_cast<QNetworkParams*>(this)->for_each_tensor(
      [&](const std::string& name, MatrixXd& t) { fn(name, t); });
}

bool QNetworkParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](const std::string&, const MatrixXd& t) { ok = ok && t.allFinite(); });
  return ok;
}

QNetworkParams QNetworkParams::zeros_like() const {
  QNetworkParams z = *this;
  z.for_each_tensor([](const std::string&, MatrixXd& t) { t.setZero(); });
  return z;
}

bool operator==(const QNetworkParams& a, const QNetworkParams& b) {
  if (a.dueling != b.dueling) return false;
  std::vector<const MatrixXd*> lhs;
  std::vector<const MatrixXd*> rhs;
  a.for_each_tensor([&](const std::string&, const MatrixXd& t) { lhs.push_back(&t); });
  b.for_each_tensor([&](const std::string&, const MatrixXd& t) { rhs.push_back(&t); });
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i]->rows() != rhs[i]->rows() || lhs[i]->cols() != rhs[i]->cols()) return false;
    if (*lhs[i] != *rhs[i]) return false;
  }
  return true;
}

namespace {

DenseLayer make_layer(std::size_t in, std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  DenseLayer l{MatrixXd(static_cast<Index>(out), static_cast<Index>(in)),
               MatrixXd(static_cast<Index>(out), 1)};
  for (Index r = 0; r < l.weight.rows(); ++r)
    for (Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = uniform_real(rng, -bound, bound);
  for (Index r = 0; r < l.bias.rows(); ++r) l.bias(r, 0) = uniform_real(rng, -bound, bound);
  return l;
}

}  // namespace

QNetworkParams init_params(std::size_t inputs, std::size_t hidden, std::size_t actions, bool dueling,
                           Rng& rng) {
  QNetworkParams p;
  p.dueling = dueling;
  p.trunk1 = make_layer(inputs, hidden, rng);
  p.trunk2 = make_layer(hidden, hidden, rng);
  if (dueling) p.value = make_layer(hidden, 1, rng);
  p.advantage = make_layer(hidden, actions, rng);
  return p;
}

// ---------------------------------------------------------------------------
// Forward pass

namespace {

struct Activations {
  MatrixXd z1, h1, z2, h2;
};

// Q for every action of every column of x. Masked-out actions keep whatever
// value the heads produce; callers apply the mask.
MatrixXd q_batch(const QNetworkParams& p, const MatrixXd& x, const MatrixXd& masks, Activations* act) {
  MatrixXd z1 = p.trunk1.weight * x;
  z1.colwise() += p.trunk1.bias.col(0);
  MatrixXd h1 = z1.cwiseMax(0.0);
  MatrixXd z2 = p.trunk2.weight * h1;
  z2.colwise() += p.trunk2.bias.col(0);
  MatrixXd h2 = z2.cwiseMax(0.0);

  MatrixXd q = p.advantage.weight * h2;
  q.colwise() += p.advantage.bias.col(0);
  if (p.dueling) {
    MatrixXd v = p.value.weight * h2;
    v.array() += p.value.bias(0, 0);
    for (Index j = 0; j < q.cols(); ++j) {
      const double count = masks.col(j).sum();
      const double mean = count > 0.0 ? q.col(j).dot(masks.col(j)) / count : 0.0;
      q.col(j).array() -= mean;
      q.col(j).array() += v(0, j);
    }
  }
  if (act) *act = {std::move(z1), std::move(h1), std::move(z2), std::move(h2)};
  return q;
}

MatrixXd mask_column(const ActionMask& mask) {
  MatrixXd m(static_cast<Index>(mask.size()), 1);
  for (std::size_t i = 0; i < mask.size(); ++i) m(static_cast<Index>(i), 0) = mask[i] ? 1.0 : 0.0;
  return m;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// argmin over feasible rows of one column; ties to the lowest index.
Index masked_argmin(const MatrixXd& q, const MatrixXd& masks, Index col) {
  Index best = -1;
  double best_q = kInf;
  for (Index a = 0; a < q.rows(); ++a) {
    if (masks(a, col) == 0.0) continue;
    if (best < 0 || q(a, col) < best_q) {
      best = a;
      best_q = q(a, col);
    }
  }
  return best;
}

}  // namespace

std::vector<double> forward(const QNetworkParams& params, std::span<const double> features,
                            const ActionMask& mask) {
  if (features.size() != params.input_size())
    throw std::invalid_argument("feature vector has " + std::to_string(features.size()) +
                                " entries, network expects " + std::to_string(params.input_size()));
  if (mask.size() != params.action_count())
    throw std::invalid_argument("mask has " + std::to_string(mask.size()) + " entries, network has " +
                                std::to_string(params.action_count()) + " actions");
  MatrixXd x(static_cast<Index>(features.size()), 1);
  for (std::size_t i = 0; i < features.size(); ++i) x(static_cast<Index>(i), 0) = features[i];
  const MatrixXd q = q_batch(params, x, mask_column(mask), nullptr);
  std::vector<double> out(mask.size());
  for (std::size_t a = 0; a < mask.size(); ++a) out[a] = mask[a] ? q(static_cast<Index>(a), 0) : kInf;
  return out;
}

std::size_t select_action(std::span<const double> qvals, const ActionMask& mask, double epsilon, Rng& rng) {
  if (qvals.size() != mask.size()) throw std::invalid_argument("q/mask size mismatch");
  std::vector<std::size_t> feasible;
  for (std::size_t a = 0; a < mask.size(); ++a)
    if (mask[a]) feasible.push_back(a);
  if (feasible.empty()) throw ValidationError("no feasible action to select");

  if (epsilon > 0.0 && uniform01(rng) < epsilon) return feasible[uniform_index(rng, feasible.size())];
  std::size_t best = feasible.front();
  for (std::size_t a : feasible)
    if (qvals[a] < qvals[best]) best = a;
  return best;
}

// ---------------------------------------------------------------------------
// Replay

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Experience e) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(e));
  } else {
    data_[next_] = std::move(e);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (data_.empty()) throw ValidationError("cannot sample from an empty replay buffer");
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = uniform_index(rng, data_.size());
  return idx;
}

namespace {

template <class Get>
Batch assemble(std::size_t n, Get&& get) {
  Batch b;
  if (n == 0) return b;
  const Experience& first = get(0);
  const auto feats = static_cast<Index>(kFeatureCount);
  const auto acts = static_cast<Index>(first.mask.size());
  b.states.resize(feats, static_cast<Index>(n));
  b.next_states.resize(feats, static_cast<Index>(n));
  b.masks.setZero(acts, static_cast<Index>(n));
  b.next_masks.setZero(acts, static_cast<Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const Experience& e = get(j);
    const auto col = static_cast<Index>(j);
    for (Index f = 0; f < feats; ++f) {
      b.states(f, col) = e.s[static_cast<std::size_t>(f)];
      b.next_states(f, col) = e.s_next[static_cast<std::size_t>(f)];
    }
    for (Index a = 0; a < acts; ++a) {
      b.masks(a, col) = e.mask[static_cast<std::size_t>(a)] ? 1.0 : 0.0;
      if (!e.next_mask.empty()) b.next_masks(a, col) = e.next_mask[static_cast<std::size_t>(a)] ? 1.0 : 0.0;
    }
    b.actions.push_back(e.a);
    b.costs.push_back(e.c);
    b.done.push_back(e.done);
  }
  return b;
}

}  // namespace

Batch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices) {
  return assemble(indices.size(), [&](std::size_t j) -> const Experience& { return buffer[indices[j]]; });
}

Batch make_batch(std::span<const Experience> experiences) {
  return assemble(experiences.size(), [&](std::size_t j) -> const Experience& { return experiences[j]; });
}

// ---------------------------------------------------------------------------
// Targets, loss, optimisation

std::vector<double> dqn_targets(const Batch& batch, const QNetworkParams& online,
                                const QNetworkParams& target, double gamma, bool double_q) {
  const std::size_t n = batch.size();
  std::vector<double> y(batch.costs.begin(), batch.costs.end());
  if (n == 0) return y;
  const MatrixXd q_target = q_batch(target, batch.next_states, batch.next_masks, nullptr);
  MatrixXd q_select;
  if (double_q) q_select = q_batch(online, batch.next_states, batch.next_masks, nullptr);
  for (std::size_t j = 0; j < n; ++j) {
    if (batch.done[j]) continue;
    const auto col = static_cast<Index>(j);
    const Index a = masked_argmin(double_q ? q_select : q_target, batch.next_masks, col);
    if (a < 0) continue;  // no successor action: treated as terminal
    y[j] += gamma * q_target(a, col);
  }
  return y;
}

double loss_and_gradient(const QNetworkParams& params, const Batch& batch, std::span<const double> targets,
                         QNetworkParams& grad) {
  const std::size_t n = batch.size();
  if (targets.size() != n) throw std::invalid_argument("one target per sample is required");
  grad = params.zeros_like();
  if (n == 0) return 0.0;

  Activations act;
  const MatrixXd q = q_batch(params, batch.states, batch.masks, &act);
  const double inv_n = 1.0 / static_cast<double>(n);

  MatrixXd d_adv = MatrixXd::Zero(q.rows(), q.cols());
  MatrixXd d_v = MatrixXd::Zero(1, q.cols());
  double loss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = static_cast<Index>(j);
    const auto a = static_cast<Index>(batch.actions[j]);
    const double residual = q(a, col) - targets[j];
    loss += residual * residual;
    const double g = 2.0 * residual * inv_n;
    d_adv(a, col) += g;
    if (params.dueling) {
      const double count = batch.masks.col(col).sum();
      if (count > 0.0) d_adv.col(col) -= (g / count) * batch.masks.col(col);
      d_v(0, col) = g;
    }
  }
  loss *= inv_n;

  grad.advantage.weight = d_adv * act.h2.transpose();
  grad.advantage.bias = d_adv.rowwise().sum();
  MatrixXd d_h2 = params.advantage.weight.transpose() * d_adv;
  if (params.dueling) {
    grad.value.weight = d_v * act.h2.transpose();
    grad.value.bias = d_v.rowwise().sum();
    d_h2 += params.value.weight.transpose() * d_v;
  }
  const MatrixXd d_z2 = d_h2.cwiseProduct((act.z2.array() > 0.0).cast<double>().matrix());
  grad.trunk2.weight = d_z2 * act.h1.transpose();
  grad.trunk2.bias = d_z2.rowwise().sum();
  const MatrixXd d_h1 = params.trunk2.weight.transpose() * d_z2;
  const MatrixXd d_z1 = d_h1.cwiseProduct((act.z1.array() > 0.0).cast<double>().matrix());
  grad.trunk1.weight = d_z1 * batch.states.transpose();
  grad.trunk1.bias = d_z1.rowwise().sum();
  return loss;
}

double train_step(QNetworkParams& params, AdamState& adam, const Batch& batch,
                  std::span<const double> targets, const AdamConfig& cfg) {
  QNetworkParams grad;
  const double loss = loss_and_gradient(params, batch, targets, grad);
  if (!std::isfinite(loss) || !grad.all_finite())
    throw TrainingError("non-finite loss or gradient (loss = " + std::to_string(loss) + ")");

  adam.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.t));
  std::vector<MatrixXd*> p, g, m, v;
  params.for_each_tensor([&](const std::string&, MatrixXd& t) { p.push_back(&t); });
  grad.for_each_tensor([&](const std::string&, MatrixXd& t) { g.push_back(&t); });
  adam.m.for_each_tensor([&](const std::string&, MatrixXd& t) { m.push_back(&t); });
  adam.v.for_each_tensor([&](const std::string&, MatrixXd& t) { v.push_back(&t); });
  for (std::size_t i = 0; i < p.size(); ++i) {
    *m[i] = cfg.beta1 * *m[i] + (1.0 - cfg.beta1) * *g[i];
    *v[i] = cfg.beta2 * *v[i] + (1.0 - cfg.beta2) * g[i]->cwiseProduct(*g[i]);
    p[i]->array() -= cfg.learning_rate * (m[i]->array() / bc1) /
                     ((v[i]->array() / bc2).sqrt() + cfg.epsilon);
  }
  if (!params.all_finite()) throw TrainingError("parameters became non-finite after an Adam step");
  return loss;
}

bool sync_target(const QNetworkParams& online, QNetworkParams& target, std::uint64_t step,
                 std::uint64_t period) {
  if (period == 0 || step % period != 0) return false;
  target = online;
  return true;
}

// ---------------------------------------------------------------------------
// Training loop

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) throw ConfigError("epsilon_start must lie in [0, 1]");
  if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) throw ConfigError("epsilon_end must lie in [0, 1]");
  if (!(epsilon_decay_fraction >= 0.0 && epsilon_decay_fraction <= 1.0))
    throw ConfigError("epsilon decay fraction must lie in [0, 1]");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw ConfigError("Adam moment decay rates must lie in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (replay_capacity < batch_size) throw ConfigError("batch size exceeds replay capacity");
  if (hidden == 0) throw ConfigError("hidden width must be positive");
  if (updates_per_step == 0) throw ConfigError("updates per step must be positive");
}

double epsilon_at(const AgentConfig& cfg, std::size_t episode) {
  const double horizon = cfg.epsilon_decay_fraction * static_cast<double>(cfg.episodes);
  if (horizon <= 0.0) return cfg.epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(episode) / horizon);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

double reference_cost_unit(const OffloadEnv& env) {
  const WorkloadConfig& w = env.workload();
  const Task mid = make_task(0.5 * (w.task_min_bits + w.task_max_bits), w.cycles_per_bit, w.deadline_s);
  return env.all_cloud_cost({mid});
}

std::size_t greedy_action(const QNetworkParams& params, const SystemState& state, const ActionMask& mask) {
  const Features f = encode_state(state);
  const std::vector<double> q = forward(params, f, mask);
  Rng unused(0);
  return select_action(q, mask, 0.0, unused);
}

TrainResult train(std::span<const OffloadEnv> envs, const AgentConfig& cfg, std::uint64_t seed,
                  std::ostream* trajectory) {
  cfg.validate();
  if (envs.empty()) throw ConfigError("training needs at least one environment");
  const std::size_t actions = envs.front().action_count();
  for (const auto& e : envs)
    if (e.action_count() != actions) throw ConfigError("training environments use different action grids");

  Rng rng(seed);
  TrainResult result;
  double unit = 0.0;
  for (const auto& e : envs) unit += reference_cost_unit(e);
  result.model.cost_unit = unit / static_cast<double>(envs.size());
  QNetworkParams& online = result.model.params;
  online = init_params(kFeatureCount, cfg.hidden, actions, cfg.dueling, rng);
  QNetworkParams target = online;
  AdamState adam = AdamState::for_params(online);
  ReplayBuffer replay(cfg.replay_capacity);
  std::uint64_t train_steps = 0;

  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    const OffloadEnv& env = envs[episode % envs.size()];
    const double eps = epsilon_at(cfg, episode);
    SystemState state = env.reset(mix_seed(seed, episode));
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    std::size_t t = 0;

    while (!state.terminal()) {
      const ActionMask mask = feasible_actions(state);
      const Features f = encode_state(state);
      const std::vector<double> q = forward(online, f, mask);
      const std::size_t a = select_action(q, mask, eps, rng);
      StepOutcome out = step(state, a);
      if (trajectory)
        write_trajectory_row(*trajectory, episode, t, a, env.grid(), env.scenario().edge_capacity,
                             out.step_cost);

      Experience e;
      e.s = f;
      e.a = a;
      e.c = out.step_cost / result.model.cost_unit;
      e.s_next = encode_state(out.next_state);
      e.done = out.done;
      e.mask = mask;
      if (!out.done) e.next_mask = feasible_actions(out.next_state);
      replay.push(std::move(e));

      if (replay.size() >= cfg.batch_size) {
        for (std::size_t u = 0; u < cfg.updates_per_step; ++u) {
          const auto idx = replay.sample(cfg.batch_size, rng);
          const Batch batch = make_batch(replay, idx);
          const auto y = dqn_targets(batch, online, target, cfg.gamma, cfg.double_q);
          loss_sum += train_step(online, adam, batch, y, cfg.adam);
          ++loss_count;
          ++train_steps;
          sync_target(online, target, train_steps, cfg.target_sync_period);
        }
      }
      state = std::move(out.next_state);
      ++t;
    }
    result.trace.push_back({episode, eps, state.tc, loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0});
  }
  return result;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "episode,epsilon,episode_cost,mean_loss\n";
  for (const auto& r : trace)
    out << r.episode << ',' << r.epsilon << ',' << r.episode_cost << ',' << r.mean_loss << '\n';
}

// ---------------------------------------------------------------------------
// Model files

namespace {

constexpr std::string_view kModelMagic = "mecco-qnetwork";
constexpr int kModelVersion = 1;

void put_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next(const char* expecting) {
    if (pos_ >= text_.size()) fail(std::string("unexpected end of file, expecting ") + expecting);
    line_start_ = pos_;
    ++line_no_;
    const std::size_t nl = text_.find('\n', pos_);
    const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    return line;
  }
  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw DecodeError("model line " + std::to_string(line_no_) + ": " + what, line_start_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

template <class T>
T parse_number(const LineReader& lr, std::string_view tok) {
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) lr.fail("bad number '" + std::string(tok) + "'");
  return v;
}

std::string_view expect_key(LineReader& lr, std::string_view key) {
  const auto toks = split_ws(lr.next(std::string(key).c_str()));
  if (toks.size() != 2 || toks[0] != key) lr.fail("expected '" + std::string(key) + " <value>'");
  return toks[1];
}

}  // namespace

std::string encode_model(const TrainedModel& model) {
  const QNetworkParams& p = model.params;
  std::string out;
  out += std::string(kModelMagic) + " " + std::to_string(kModelVersion) + "\n";
  out += "dueling " + std::to_string(p.dueling ? 1 : 0) + "\n";
  out += "inputs " + std::to_string(p.input_size()) + "\n";
  out += "hidden " + std::to_string(p.hidden_size()) + "\n";
  out += "actions " + std::to_string(p.action_count()) + "\n";
  out += "cost_unit ";
  put_double(out, model.cost_unit);
  out += "\n";
  p.for_each_tensor([&](const std::string& name, const MatrixXd& t) {
    out += "tensor " + name + " " + std::to_string(t.rows()) + " " + std::to_string(t.cols()) + "\n";
    for (Index r = 0; r < t.rows(); ++r) {
      for (Index c = 0; c < t.cols(); ++c) {
        if (c) out += ' ';
        put_double(out, t(r, c));
      }
      out += '\n';
    }
  });
  out += "end\n";
  return out;
}

TrainedModel decode_model(std::string_view text) {
  LineReader lr(text);
  {
    const auto toks = split_ws(lr.next("header"));
    if (toks.size() != 2 || toks[0] != kModelMagic) lr.fail("not a model file");
    if (parse_number<int>(lr, toks[1]) != kModelVersion) lr.fail("unsupported model version");
  }
  TrainedModel model;
  const int dueling = parse_number<int>(lr, expect_key(lr, "dueling"));
  const auto inputs = parse_number<std::size_t>(lr, expect_key(lr, "inputs"));
  const auto hidden = parse_number<std::size_t>(lr, expect_key(lr, "hidden"));
  const auto actions = parse_number<std::size_t>(lr, expect_key(lr, "actions"));
  model.cost_unit = parse_number<double>(lr, expect_key(lr, "cost_unit"));
  if (dueling != 0 && dueling != 1) lr.fail("dueling flag must be 0 or 1");

  Rng shape_only(0);
  model.params = init_params(inputs, hidden, actions, dueling == 1, shape_only);
  model.params.for_each_tensor([&](const std::string& name, MatrixXd& t) {
    const auto toks = split_ws(lr.next("tensor header"));
    if (toks.size() != 4 || toks[0] != "tensor" || toks[1] != name)
      lr.fail("expected tensor '" + name + "'");
    if (parse_number<Index>(lr, toks[2]) != t.rows() || parse_number<Index>(lr, toks[3]) != t.cols())
      lr.fail("tensor '" + name + "' has the wrong shape");
    for (Index r = 0; r < t.rows(); ++r) {
      const auto vals = split_ws(lr.next("tensor row"));
      if (static_cast<Index>(vals.size()) != t.cols()) lr.fail("row of '" + name + "' has the wrong length");
      for (Index c = 0; c < t.cols(); ++c) t(r, c) = parse_number<double>(lr, vals[static_cast<std::size_t>(c)]);
    }
  });
  if (lr.next("end marker") != "end") lr.fail("missing end marker");
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << encode_model(model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_model(ss.str());
}

// ---------------------------------------------------------------------------

void TabularQ::update(std::size_t s, std::size_t a, double cost, std::size_t s_next, bool done, double alpha,
                      double gamma) {
  const double bootstrap = done ? 0.0 : table_.row(static_cast<Index>(s_next)).minCoeff();
  double& q = table_(static_cast<Index>(s), static_cast<Index>(a));
  q += alpha * (cost + gamma * bootstrap - q);
}

}  // namespace mecco
