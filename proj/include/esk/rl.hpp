#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "esk/envs.hpp"
#include "esk/esa.hpp"
#include "esk/mlp.hpp"

namespace esk {

enum class LogpMode { applied, sampled };

struct Transition {
  std::vector<double> s;
  std::vector<double> a;       // action actually applied to the environment
  std::vector<double> a_pi;    // action the surrogate is evaluated at (per LogpMode)
  double logp = 0.0;           // behavior log-probability of a_pi at collection time
  double r = 0.0;
  std::vector<double> s_next;
  bool done = false;
};

// lambda = 0 gives one-step TD residuals; lambda = 1 gives Monte-Carlo
// advantages. value_last bootstraps a rollout truncated mid-episode.
std::pair<std::vector<double>, std::vector<double>> gae(
    std::span<const double> rewards, std::span<const double> values,
    double value_last, double gamma, double lambda);

// Clipped surrogate, to be minimized.
double ppo_clip_loss(double ratio, double advantage, double epsilon);

struct RolloutBuffer {
  std::vector<Transition> data;
  std::vector<double> values;     // V(s_t) at collection time
  std::vector<double> bootstraps; // V(s_next) at each episode end (time limit)
  std::vector<double> advantages;
  std::vector<double> returns;
  bool closed = false;

  void add(Transition t, double value);
  // Records V(s_next) of a just-finished episode. Episodes end only by time
  // limit, so their tails are bootstrapped like any other truncation.
  void end_episode(double value_next);
  // Computes per-episode GAE (value_last bootstraps a truncated tail) and
  // normalizes advantages to mean 0, std 1 over the buffer.
  void close(double value_last, double gamma, double lambda);
  size_t size() const { return data.size(); }
};

struct AlgoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_eps = 0.2;
  int epochs = 10;
  int minibatch = 64;
  int rollout_len = 2048;
  long total_steps = 150000;
  double lr = 3e-4;
  std::vector<int> hidden = {64, 64};
  // The Q-net gets its own (smaller) topology: it is probed once per
  // environment step by ESA, so its forward cost bounds the rollout overhead,
  // and the probing only needs the local slope of Q in the action.
  std::vector<int> q_hidden = {64};
  double log_std_init = -0.5;
  double final_layer_scale = 0.01;
  double entropy_coef = 0.0;
  // Stabilizers: per-net global gradient-norm clip, and early termination of
  // the epoch loop once the approximate KL to the behavior policy exceeds
  // 1.5 * target_kl (0 disables either). The KL stop is off by default: on
  // the point-mass tracker it throttles learning enough that the policy
  // drifts instead of improving.
  double max_grad_norm = 0.5;
  double target_kl = 0.0;
  // Observation / reward normalization (see RunningStat and train()). Off by
  // default; both measurably hurt the benchmark environments.
  bool normalize_obs = false;
  bool normalize_reward = false;
  LogpMode logp_mode = LogpMode::applied;
  // Threshold on the trailing-episode mean return; used for the
  // steps-to-threshold metric and (optionally) early stopping.
  std::optional<double> threshold;
  bool stop_at_threshold = false;
  int trailing_episodes = 10;
};

// Welford running mean/variance over observations. Networks are fed
// normalized observations clipped to [-10, 10]; without this, tracking tasks
// with unbounded state put most of the data in regions where the tanh layers
// saturate and the advantage signal from moderate states is buried.
struct RunningStat {
  std::vector<double> mean;
  std::vector<double> m2;
  long count = 0;
  void update(std::span<const double> x);
  // Identity until two samples have been seen.
  std::vector<double> normalize(std::span<const double> x) const;
};

struct Agent {
  GaussianPolicyHead policy;
  MlpParams value_net;
  MlpParams q_net;  // input: observation ++ action
  Adam policy_opt;
  Adam log_std_opt;
  Adam value_opt;
  Adam q_opt;
  // Return standardization for the critics: both nets regress standardized
  // targets (G - ret_loc) / ret_scale so learning happens at O(1) magnitude
  // regardless of the environment's return scale. When the statistics move,
  // the final layers are re-projected so the de-normalized outputs are
  // preserved exactly (PopArt).
  double ret_loc = 0.0;
  double ret_scale = 1.0;
  bool ret_init = false;
  RunningStat obs_stats;
};

Agent make_agent(int obs_dim, int action_dim, const AlgoConfig& cfg, std::mt19937_64& rng);

// De-normalized critic evaluations: ret_loc + ret_scale * net(...).
double agent_value(const Agent& agent, std::span<const double> s);
double agent_q(const Agent& agent, std::span<const double> s,
               std::span<const double> a);

Checkpoint agent_checkpoint(const Agent& agent);
void agent_restore(Agent& agent, const Checkpoint& ckpt);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double q_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// E epochs of shuffled minibatch steps: policy on the clipped surrogate,
// value net on squared error to returns, Q-net on squared error of
// Q(s, a_applied) to the same returns.
UpdateStats update(Agent& agent, const RolloutBuffer& buffer, const AlgoConfig& cfg,
                   std::mt19937_64& rng);

struct TrainDiverged : std::runtime_error {
  long iteration;
  TrainDiverged(long iter, const std::string& what)
      : std::runtime_error(what), iteration(iter) {}
};

struct IterRow {
  int iteration = 0;
  long env_steps = 0;
  double mean_return = 0.0;    // episodes completed during this iteration
  double std_return = 0.0;
  double trailing_return = 0.0;
  double mean_abs_v = 0.0;     // ESA diagnostics (0 when ESA is off)
  double mean_filtered_q = 0.0;
  double rollout_seconds = 0.0;
  double update_seconds = 0.0;
  UpdateStats stats;
};

struct TrainResult {
  std::vector<IterRow> curve;
  long env_steps = 0;
  long esa_q_queries = 0;
  std::optional<long> steps_to_threshold;  // env steps at first crossing
  double final_trailing_return = 0.0;
  // Fingerprint of the action trajectory, for determinism/degeneracy checks.
  uint64_t action_hash = 0;
};

TrainResult train(Env& env, const AlgoConfig& algo,
                  const std::optional<EsaConfig>& esa, uint64_t seed,
                  std::unique_ptr<Agent>* agent_out = nullptr);

}  // namespace esk
