#pragma once

// Cost-minimising deep Q-learning agent with dueling heads, double-DQN
// targets, experience replay and Adam.
//
// Q values are expected discounted COSTS: greedy actions are argmin, and the
// bootstrapped targets use min over feasible next actions.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mecco/env.hpp"
#include "mecco/random.hpp"

namespace mecco {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::MatrixXd bias;    // out x 1
};

// Trunk input -> hidden -> hidden with ReLU, then a value head (1 output) and
// an advantage head (one output per action). Without dueling the advantage
// head is read directly as Q and the value head is empty.
struct QNetworkParams {
  DenseLayer trunk1;
  DenseLayer trunk2;
  DenseLayer value;
  DenseLayer advantage;
  bool dueling = true;

  std::size_t input_size() const { return static_cast<std::size_t>(trunk1.weight.cols()); }
  std::size_t hidden_size() const { return static_cast<std::size_t>(trunk1.weight.rows()); }
  std::size_t action_count() const { return static_cast<std::size_t>(advantage.weight.rows()); }

  // Visits every tensor with a stable name, in serialization order.
  void for_each_tensor(const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn);
  void for_each_tensor(const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) const;

  bool all_finite() const;
  QNetworkParams zeros_like() const;
  friend bool operator==(const QNetworkParams& a, const QNetworkParams& b);
};

// Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
QNetworkParams init_params(std::size_t inputs, std::size_t hidden, std::size_t actions, bool dueling,
                           Rng& rng);

// Per-action Q values of one state. Infeasible actions hold +infinity.
// With dueling, Q = V + A - mean of A over the feasible actions.
// Throws std::invalid_argument on a feature/mask dimension mismatch.
std::vector<double> forward(const QNetworkParams& params, std::span<const double> features,
                            const ActionMask& mask);

// Epsilon-greedy over the feasible set: uniform with probability epsilon,
// otherwise argmin with ties going to the lowest index. Throws
// ValidationError when nothing is feasible.
std::size_t select_action(std::span<const double> qvals, const ActionMask& mask, double epsilon, Rng& rng);

struct Experience {
  Features s{};
  std::size_t a = 0;
  double c = 0.0;
  Features s_next{};
  bool done = false;
  ActionMask mask;       // feasible actions of s (needed by the dueling mean)
  ActionMask next_mask;  // feasible actions of s_next
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Experience e);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& operator[](std::size_t i) const { return data_[i]; }
  // Uniform with replacement.
  std::vector<std::size_t> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Experience> data_;
};

// Column-major batch view used by the training routines.
struct Batch {
  Eigen::MatrixXd states;       // features x B
  Eigen::MatrixXd next_states;  // features x B
  Eigen::MatrixXd masks;        // actions x B, 0/1
  Eigen::MatrixXd next_masks;   // actions x B, 0/1
  std::vector<std::size_t> actions;
  std::vector<double> costs;
  std::vector<bool> done;

  std::size_t size() const { return actions.size(); }
};

Batch make_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices);
Batch make_batch(std::span<const Experience> experiences);

// y = c                                            if done
// y = c + gamma * Q_target(s', argmin_a Q_online(s', a))   with double_q
// y = c + gamma * min_a Q_target(s', a)                     without
std::vector<double> dqn_targets(const Batch& batch, const QNetworkParams& online,
                                const QNetworkParams& target, double gamma, bool double_q);

inline std::vector<double> double_dqn_target(const Batch& batch, const QNetworkParams& online,
                                             const QNetworkParams& target, double gamma) {
  return dqn_targets(batch, online, target, gamma, true);
}

// Mean squared error between targets and Q(s_j, a_j); fills grad (same shape
// as params) with its exact gradient.
double loss_and_gradient(const QNetworkParams& params, const Batch& batch, std::span<const double> targets,
                         QNetworkParams& grad);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  QNetworkParams m;
  QNetworkParams v;
  std::uint64_t t = 0;

  static AdamState for_params(const QNetworkParams& p) { return {p.zeros_like(), p.zeros_like(), 0}; }
};

// One Adam step on the squared TD loss. Targets are constants: nothing flows
// into the target network. Throws TrainingError on a non-finite gradient.
double train_step(QNetworkParams& params, AdamState& adam, const Batch& batch,
                  std::span<const double> targets, const AdamConfig& cfg);

// Hard copy of the online weights every `period` training steps.
bool sync_target(const QNetworkParams& online, QNetworkParams& target, std::uint64_t step,
                 std::uint64_t period);

struct AgentConfig {
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.8;  // of the episodes
  AdamConfig adam;
  std::size_t batch_size = 64;
  std::uint64_t target_sync_period = 100;
  std::size_t episodes = 3000;
  std::size_t replay_capacity = 10000;
  std::size_t hidden = 64;
  std::size_t updates_per_step = 1;
  bool dueling = true;
  bool double_q = true;

  void validate() const;
  // Plain DQN: single head, target network evaluates its own argmin.
  AgentConfig as_plain_dqn() const {
    AgentConfig c = *this;
    c.dueling = false;
    c.double_q = false;
    return c;
  }
};

double epsilon_at(const AgentConfig& cfg, std::size_t episode);

struct TraceRow {
  std::size_t episode = 0;
  double epsilon = 0.0;
  double episode_cost = 0.0;
  double mean_loss = 0.0;
};

struct TrainedModel {
  QNetworkParams params;
  // Step costs are divided by this before entering the replay buffer so that
  // Q values stay of order one.
  double cost_unit = 1.0;
};

struct TrainResult {
  TrainedModel model;
  std::vector<TraceRow> trace;
};

// Cost of serving one mid-size task in the cloud with the whole band.
double reference_cost_unit(const OffloadEnv& env);

// Runs cfg.episodes episodes. With several environments (same action grid)
// episode e is played in envs[e % envs.size()]. Deterministic per seed.
TrainResult train(std::span<const OffloadEnv> envs, const AgentConfig& cfg, std::uint64_t seed,
                  std::ostream* trajectory = nullptr);
inline TrainResult train(const OffloadEnv& env, const AgentConfig& cfg, std::uint64_t seed,
                         std::ostream* trajectory = nullptr) {
  return train(std::span<const OffloadEnv>(&env, 1), cfg, seed, trajectory);
}

std::size_t greedy_action(const QNetworkParams& params, const SystemState& state, const ActionMask& mask);

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

// Versioned text format: named tensors with shape and row-major values at
// round-trip precision.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
std::string encode_model(const TrainedModel& model);
TrainedModel decode_model(std::string_view text);

// Tabular Q-learning on a finite MDP with costs, used to check the update
// rule against value iteration.
class TabularQ {
 public:
  TabularQ(std::size_t states, std::size_t actions, double init = 0.0)
      : table_(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(states),
                                         static_cast<Eigen::Index>(actions), init)) {}

  // Q(s,a) += alpha (c + gamma min_a' Q(s',a') - Q(s,a)); no bootstrap when done.
  void update(std::size_t s, std::size_t a, double cost, std::size_t s_next, bool done, double alpha,
              double gamma);
  double operator()(std::size_t s, std::size_t a) const {
    return table_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }
  const Eigen::MatrixXd& table() const { return table_; }

 private:
  Eigen::MatrixXd table_;
};

}  // namespace mecco
