#include "esk/rl.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace esk {

std::pair<std::vector<double>, std::vector<double>> gae(
    std::span<const double> rewards, std::span<const double> values,
    double value_last, double gamma, double lambda) {
  if (rewards.size() != values.size())
    throw std::invalid_argument("gae: rewards/values size mismatch");
  const size_t n = rewards.size();
  std::vector<double> adv(n, 0.0), ret(n, 0.0);
  double running = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double v_next = (i + 1 < n) ? values[i + 1] : value_last;
    const double delta = rewards[i] + gamma * v_next - values[i];
    running = delta + gamma * lambda * running;
    adv[i] = running;
    ret[i] = adv[i] + values[i];
  }
  return {adv, ret};
}

double ppo_clip_loss(double ratio, double advantage, double epsilon) {
  if (!(ratio > 0.0)) throw std::invalid_argument("ppo_clip_loss: ratio must be > 0");
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return -std::min(ratio * advantage, clipped * advantage);
}

void RolloutBuffer::add(Transition t, double value) {
  if (closed) throw std::logic_error("RolloutBuffer: add after close");
  data.push_back(std::move(t));
  values.push_back(value);
}

void RolloutBuffer::end_episode(double value_next) {
  if (closed) throw std::logic_error("RolloutBuffer: end_episode after close");
  if (data.empty() || !data.back().done)
    throw std::logic_error("RolloutBuffer: end_episode without a done transition");
  bootstraps.push_back(value_next);
}

void RolloutBuffer::close(double value_last, double gamma, double lambda) {
  if (closed) throw std::logic_error("RolloutBuffer: already closed");
  if (data.empty()) throw std::logic_error("RolloutBuffer: close on empty buffer");
  const size_t n = data.size();
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);

  size_t start = 0, episode = 0;
  for (size_t i = 0; i < n; ++i) {
    const bool segment_end = data[i].done || i + 1 == n;
    if (!segment_end) continue;
    const size_t len = i - start + 1;
    std::vector<double> rs(len), vs(len);
    for (size_t k = 0; k < len; ++k) {
      rs[k] = data[start + k].r;
      vs[k] = values[start + k];
    }
    double boot = value_last;
    if (data[i].done) {
      if (episode >= bootstraps.size())
        throw std::logic_error("RolloutBuffer: missing end_episode bootstrap");
      boot = bootstraps[episode++];
    }
    auto [a, ret] = gae(rs, vs, boot, gamma, lambda);
    for (size_t k = 0; k < len; ++k) {
      advantages[start + k] = a[k];
      returns[start + k] = ret[k];
    }
    start = i + 1;
  }

  double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n) + 1e-8;
  for (double& a : advantages) a = (a - mean) / sd;
  closed = true;
}

Agent make_agent(int obs_dim, int action_dim, const AlgoConfig& cfg, std::mt19937_64& rng) {
  std::vector<int> policy_sizes{obs_dim};
  std::vector<int> value_sizes{obs_dim};
  std::vector<int> q_sizes{obs_dim + action_dim};
  for (int h : cfg.hidden) {
    policy_sizes.push_back(h);
    value_sizes.push_back(h);
  }
  for (int h : cfg.q_hidden) q_sizes.push_back(h);
  policy_sizes.push_back(action_dim);
  value_sizes.push_back(1);
  q_sizes.push_back(1);

  MlpParams mean_net = make_mlp(policy_sizes, rng, cfg.final_layer_scale);
  MlpParams value_net = make_mlp(value_sizes, rng);
  MlpParams q_net = make_mlp(q_sizes, rng);
  const size_t np = mean_net.params.size();
  const size_t nv = value_net.params.size();
  const size_t nq = q_net.params.size();
  return Agent{
      GaussianPolicyHead{std::move(mean_net),
                         std::vector<double>(action_dim, cfg.log_std_init)},
      std::move(value_net),
      std::move(q_net),
      Adam(np, cfg.lr),
      Adam(static_cast<size_t>(action_dim), cfg.lr),
      Adam(nv, cfg.lr),
      Adam(nq, cfg.lr),
  };
}

void RunningStat::update(std::span<const double> x) {
  if (mean.empty()) {
    mean.assign(x.size(), 0.0);
    m2.assign(x.size(), 0.0);
  }
  if (x.size() != mean.size())
    throw std::invalid_argument("RunningStat: dimension mismatch");
  count += 1;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean[i];
    mean[i] += d / static_cast<double>(count);
    m2[i] += d * (x[i] - mean[i]);
  }
}

std::vector<double> RunningStat::normalize(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  if (count < 2) return out;
  for (size_t i = 0; i < out.size(); ++i) {
    const double var = m2[i] / static_cast<double>(count);
    out[i] = std::clamp((out[i] - mean[i]) / std::sqrt(var + 1e-8), -10.0, 10.0);
  }
  return out;
}

Checkpoint agent_checkpoint(const Agent& agent) {
  Checkpoint ckpt;
  ckpt.nets.emplace_back("policy_mean", agent.policy.mean_net);
  ckpt.nets.emplace_back("value", agent.value_net);
  ckpt.nets.emplace_back("q", agent.q_net);
  ckpt.vectors.emplace_back("log_std", agent.policy.log_std);
  ckpt.vectors.emplace_back(
      "ret_stats",
      std::vector<double>{agent.ret_loc, agent.ret_scale, agent.ret_init ? 1.0 : 0.0});
  std::vector<double> obs{static_cast<double>(agent.obs_stats.count)};
  obs.insert(obs.end(), agent.obs_stats.mean.begin(), agent.obs_stats.mean.end());
  obs.insert(obs.end(), agent.obs_stats.m2.begin(), agent.obs_stats.m2.end());
  ckpt.vectors.emplace_back("obs_stats", std::move(obs));
  return ckpt;
}

void agent_restore(Agent& agent, const Checkpoint& ckpt) {
  for (const auto& [name, net] : ckpt.nets) {
    if (name == "policy_mean") agent.policy.mean_net = net;
    else if (name == "value") agent.value_net = net;
    else if (name == "q") agent.q_net = net;
    else throw std::runtime_error("agent_restore: unknown net " + name);
  }
  for (const auto& [name, vec] : ckpt.vectors) {
    if (name == "log_std") {
      agent.policy.log_std = vec;
    } else if (name == "ret_stats") {
      if (vec.size() != 3)
        throw std::runtime_error("agent_restore: malformed ret_stats");
      agent.ret_loc = vec[0];
      agent.ret_scale = vec[1];
      agent.ret_init = vec[2] != 0.0;
    } else if (name == "obs_stats") {
      if (vec.empty() || (vec.size() - 1) % 2 != 0)
        throw std::runtime_error("agent_restore: malformed obs_stats");
      const size_t d = (vec.size() - 1) / 2;
      agent.obs_stats.count = static_cast<long>(vec[0]);
      agent.obs_stats.mean.assign(vec.begin() + 1, vec.begin() + 1 + d);
      agent.obs_stats.m2.assign(vec.begin() + 1 + d, vec.end());
    } else {
      throw std::runtime_error("agent_restore: unknown vector " + name);
    }
  }
}

namespace {

// Allocation-free forward for single-output critics; agent_q sits on the
// per-environment-step hot path, where heap traffic is measurable.
double scalar_forward(const MlpParams& p, std::span<const double> x) {
  thread_local std::vector<double> cur, next;
  cur.assign(x.begin(), x.end());
  size_t off = 0;
  for (size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const bool last = (l + 2 == p.layer_sizes.size());
    next.assign(static_cast<size_t>(n_out), 0.0);
    const double* W = p.params.data() + off;
    const double* b = W + static_cast<size_t>(n_out) * n_in;
    for (int o = 0; o < n_out; ++o) {
      double acc = b[o];
      const double* row = W + static_cast<size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) acc += row[i] * cur[i];
      next[o] = last ? acc : std::tanh(acc);
    }
    cur.swap(next);
    off += static_cast<size_t>(n_out) * (n_in + 1);
  }
  return cur[0];
}

}  // namespace

double agent_value(const Agent& agent, std::span<const double> s) {
  return agent.ret_loc + agent.ret_scale * scalar_forward(agent.value_net, s);
}

double agent_q(const Agent& agent, std::span<const double> s,
               std::span<const double> a) {
  thread_local std::vector<double> sa;
  sa.assign(s.begin(), s.end());
  sa.insert(sa.end(), a.begin(), a.end());
  return agent.ret_loc + agent.ret_scale * scalar_forward(agent.q_net, sa);
}

namespace {

// Rewrites the (single-output) final layer so the de-normalized output under
// the new statistics equals the one under the old statistics.
void popart_reproject(MlpParams& net, double old_loc, double old_scale,
                      double new_loc, double new_scale) {
  const size_t in = static_cast<size_t>(net.layer_sizes[net.layer_sizes.size() - 2]);
  const size_t tail = in + 1;  // weights + bias of the 1-output layer
  const size_t base = net.params.size() - tail;
  const double r = old_scale / new_scale;
  for (size_t i = 0; i < in; ++i) net.params[base + i] *= r;
  double& b = net.params[base + in];
  b = (old_scale * b + old_loc - new_loc) / new_scale;
}

// Global L2-norm clipping over one net's gradients (optionally jointly with a
// second block, e.g. the policy mean net together with log_std).
void clip_grad_norm(std::vector<double>& g, double max_norm) {
  double sq = 0.0;
  for (double x : g) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double r = max_norm / norm;
  for (double& x : g) x *= r;
}

void clip_grad_norm(std::vector<double>& g1, std::vector<double>& g2,
                    double max_norm) {
  double sq = 0.0;
  for (double x : g1) sq += x * x;
  for (double x : g2) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double r = max_norm / norm;
  for (double& x : g1) x *= r;
  for (double& x : g2) x *= r;
}

}  // namespace

UpdateStats update(Agent& agent, const RolloutBuffer& buffer, const AlgoConfig& cfg,
                   std::mt19937_64& rng) {
  if (buffer.data.empty()) throw std::invalid_argument("update: empty buffer");
  if (!buffer.closed) throw std::logic_error("update: buffer must be closed first");
  const size_t n = buffer.size();
  const std::vector<double> sd = policy_std(agent.policy);

  // Track the return statistics and standardize the critic targets.
  {
    double m = 0.0;
    for (double g : buffer.returns) m += g;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double g : buffer.returns) var += (g - m) * (g - m);
    const double s = std::max(std::sqrt(var / static_cast<double>(n)), 1e-6);
    double new_loc, new_scale;
    if (!agent.ret_init) {
      new_loc = m;
      new_scale = s;
      agent.ret_init = true;
    } else {
      new_loc = 0.9 * agent.ret_loc + 0.1 * m;
      new_scale = std::max(0.9 * agent.ret_scale + 0.1 * s, 1e-6);
    }
    if (std::isfinite(new_loc) && std::isfinite(new_scale)) {
      popart_reproject(agent.value_net, agent.ret_loc, agent.ret_scale, new_loc,
                       new_scale);
      popart_reproject(agent.q_net, agent.ret_loc, agent.ret_scale, new_loc,
                       new_scale);
      agent.ret_loc = new_loc;
      agent.ret_scale = new_scale;
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> policy_grads(agent.policy.mean_net.params.size());
  std::vector<double> log_std_grads(agent.policy.log_std.size());
  std::vector<double> value_grads(agent.value_net.params.size());
  std::vector<double> q_grads(agent.q_net.params.size());
  std::vector<double> sa;  // scratch for q-net input

  UpdateStats stats;
  long batches = 0, clip_hits = 0, samples_seen = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t b0 = 0; b0 < n; b0 += cfg.minibatch) {
      const size_t b1 = std::min(n, b0 + cfg.minibatch);
      const double inv = 1.0 / static_cast<double>(b1 - b0);
      std::fill(policy_grads.begin(), policy_grads.end(), 0.0);
      std::fill(log_std_grads.begin(), log_std_grads.end(), 0.0);
      std::fill(value_grads.begin(), value_grads.end(), 0.0);
      std::fill(q_grads.begin(), q_grads.end(), 0.0);
      double pl = 0.0, vl = 0.0, ql = 0.0, kl = 0.0;

      for (size_t k = b0; k < b1; ++k) {
        const size_t idx = order[k];
        const Transition& tr = buffer.data[idx];
        const double adv = buffer.advantages[idx];
        const double ret = buffer.returns[idx];

        // Policy: clipped surrogate.
        const std::vector<double> mean = mlp_forward(agent.policy.mean_net, tr.s);
        const double logp_new = gaussian_logprob_at(mean, sd, tr.a_pi);
        // Clamp the log-ratio so extreme outlier samples cannot underflow the
        // ratio to exactly 0 (their gradient is clipped away regardless).
        const double ratio = std::exp(std::clamp(logp_new - tr.logp, -30.0, 30.0));
        pl += ppo_clip_loss(ratio, adv, cfg.clip_eps);
        // Non-negative low-variance KL estimator (ratio - 1) - log(ratio);
        // the naive logp difference is too noisy over a minibatch to gate
        // the early stop on.
        kl += (ratio - 1.0) - (logp_new - tr.logp);
        const double surr1 = ratio * adv;
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
        const double surr2 = clipped * adv;
        double dl_dlogp = 0.0;
        if (surr1 <= surr2) {
          dl_dlogp = -adv * ratio;  // unclipped branch is the min
        } else if (ratio > 1.0 - cfg.clip_eps && ratio < 1.0 + cfg.clip_eps) {
          dl_dlogp = -adv * ratio;  // clip inactive inside the band
        }
        if (ratio < 1.0 - cfg.clip_eps || ratio > 1.0 + cfg.clip_eps) ++clip_hits;
        ++samples_seen;
        if (dl_dlogp != 0.0)
          gaussian_logprob_backward(agent.policy, tr.s, tr.a_pi, dl_dlogp * inv,
                                    policy_grads, log_std_grads);
        if (cfg.entropy_coef > 0.0)
          for (double& g : log_std_grads) g -= cfg.entropy_coef * inv;

        // Critics regress the standardized return.
        const double ret_z = (ret - agent.ret_loc) / agent.ret_scale;

        // Value net: 0.5 * (V - ret_z)^2.
        const double v = mlp_forward(agent.value_net, tr.s)[0];
        vl += 0.5 * (v - ret_z) * (v - ret_z);
        const double v_up[1] = {(v - ret_z) * inv};
        mlp_backward(agent.value_net, tr.s, v_up, value_grads);

        // Q-net: 0.5 * (Q(s, a_applied) - ret_z)^2.
        sa.assign(tr.s.begin(), tr.s.end());
        sa.insert(sa.end(), tr.a.begin(), tr.a.end());
        const double qv = mlp_forward(agent.q_net, sa)[0];
        ql += 0.5 * (qv - ret_z) * (qv - ret_z);
        const double q_up[1] = {(qv - ret_z) * inv};
        mlp_backward(agent.q_net, sa, q_up, q_grads);
      }

      if (!std::isfinite(pl) || !std::isfinite(vl) || !std::isfinite(ql))
        throw TrainDiverged(0, "update: non-finite loss");

      // Stop optimizing once the policy has drifted too far from the behavior
      // policy; the offending batch is discarded rather than applied.
      if (cfg.target_kl > 0.0 && kl * inv > 1.5 * cfg.target_kl) {
        stats.policy_loss /= std::max(batches, 1L);
        stats.value_loss /= std::max(batches, 1L);
        stats.q_loss /= std::max(batches, 1L);
        stats.approx_kl /= std::max(batches, 1L);
        stats.clip_fraction =
            static_cast<double>(clip_hits) / std::max(samples_seen, 1L);
        return stats;
      }

      if (cfg.max_grad_norm > 0.0) {
        clip_grad_norm(policy_grads, log_std_grads, cfg.max_grad_norm);
        clip_grad_norm(value_grads, cfg.max_grad_norm);
        clip_grad_norm(q_grads, cfg.max_grad_norm);
      }

      agent.policy_opt.update(agent.policy.mean_net.params, policy_grads);
      agent.log_std_opt.update(agent.policy.log_std, log_std_grads);
      agent.value_opt.update(agent.value_net.params, value_grads);
      agent.q_opt.update(agent.q_net.params, q_grads);

      stats.policy_loss += pl * inv;
      stats.value_loss += vl * inv;
      stats.q_loss += ql * inv;
      stats.approx_kl += kl * inv;
      ++batches;
    }
  }
  stats.policy_loss /= batches;
  stats.value_loss /= batches;
  stats.q_loss /= batches;
  stats.approx_kl /= batches;
  stats.clip_fraction = static_cast<double>(clip_hits) / samples_seen;
  return stats;
}

namespace {

// Order-sensitive FNV-1a over double bit patterns.
struct ActionHasher {
  uint64_t h = 1469598103934665603ull;
  void add(double x) {
    uint64_t bits = std::bit_cast<uint64_t>(x);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
};

}  // namespace

TrainResult train(Env& env, const AlgoConfig& algo,
                  const std::optional<EsaConfig>& esa, uint64_t seed,
                  std::unique_ptr<Agent>* agent_out) {
  using clock = std::chrono::steady_clock;
  std::mt19937_64 rng(seed);
  const EnvSpec& spec = env.spec();
  Agent agent = make_agent(spec.obs_dim, spec.action_dim, algo, rng);

  QScale q_scale;
  EsaEpisodeState esa_state;
  const bool use_esa = esa.has_value();

  QFunction qfun = [&agent](std::span<const double> s, std::span<const double> a) {
    return agent_q(agent, s, a);
  };

  // Reward normalization for the learning signal only: rewards fed to GAE
  // are divided by the running std of the discounted return and clipped to
  // [-10, 10]. The clip keeps occasional catastrophic episodes (unbounded
  // tracking error) from dominating the advantage scale and burying the
  // signal from moderate episodes. Reported returns stay raw.
  RunningStat rew_stats;
  double disc_ret = 0.0;
  auto scale_reward = [&](double r) {
    if (!algo.normalize_reward) return r;
    disc_ret = algo.gamma * disc_ret + r;
    rew_stats.update(std::span<const double>(&disc_ret, 1));
    if (rew_stats.count < 2) return r;
    const double sd_r =
        std::sqrt(rew_stats.m2[0] / static_cast<double>(rew_stats.count) + 1e-8);
    return std::clamp(r / sd_r, -10.0, 10.0);
  };

  auto observe_norm = [&](std::vector<double>& o) {
    if (!algo.normalize_obs) return;
    agent.obs_stats.update(o);
    o = agent.obs_stats.normalize(o);
  };

  TrainResult result;
  ActionHasher hasher;
  std::vector<double> obs = env.reset(rng());
  observe_norm(obs);
  if (use_esa) esa_state = esa_episode_start(*esa, 0);
  double episode_return = 0.0;
  std::deque<double> trailing;
  const size_t trailing_cap = static_cast<size_t>(algo.trailing_episodes);

  long env_steps = 0;
  int iteration = 0;
  while (env_steps < algo.total_steps) {
    const auto t_rollout = clock::now();
    RolloutBuffer buffer;
    std::vector<double> iter_returns;
    double abs_v_sum = 0.0, abs_filt_sum = 0.0;
    long esa_steps = 0;

    const std::vector<double> sd = policy_std(agent.policy);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int step = 0; step < algo.rollout_len; ++step) {
      const std::vector<double> mean = mlp_forward(agent.policy.mean_net, obs);
      std::vector<double> a_sampled = mean;
      for (size_t i = 0; i < a_sampled.size(); ++i) a_sampled[i] += sd[i] * gauss(rng);
      std::vector<double> a_applied;
      if (use_esa) {
        const double av0 = esa_state.abs_v_sum, af0 = esa_state.abs_filtered_sum;
        a_applied = esa_select(esa_state, obs, a_sampled, qfun, *esa,
                               spec.action_low, spec.action_high, &q_scale);
        abs_v_sum += esa_state.abs_v_sum - av0;
        abs_filt_sum += esa_state.abs_filtered_sum - af0;
        ++esa_steps;
      } else {
        a_applied.resize(a_sampled.size());
        for (size_t i = 0; i < a_sampled.size(); ++i)
          a_applied[i] = std::clamp(a_sampled[i], spec.action_low[i], spec.action_high[i]);
      }
      for (double x : a_applied) hasher.add(x);

      const double value = agent_value(agent, obs);
      StepResult sr = env.step(a_applied);
      episode_return += sr.reward;
      ++env_steps;
      observe_norm(sr.obs);

      Transition tr;
      tr.s = obs;
      tr.a = a_applied;
      // "applied" evaluates the surrogate at the ESA-corrected action
      // a_t + v(t), before the action-bound clip: the clip is part of the
      // environment, and evaluating the Gaussian at clipped actions puts a
      // probability atom on the bound that drags the mean into saturation.
      if (algo.logp_mode == LogpMode::applied && use_esa) {
        tr.a_pi = a_sampled;
        for (size_t i = 0; i < tr.a_pi.size(); ++i) tr.a_pi[i] += esa_state.v[i];
      } else {
        tr.a_pi = a_sampled;
      }
      tr.logp = gaussian_logprob_at(mean, sd, tr.a_pi);
      tr.r = scale_reward(sr.reward);
      tr.s_next = sr.obs;
      tr.done = sr.done;
      buffer.add(std::move(tr), value);

      if (sr.done)
        buffer.end_episode(agent_value(agent, sr.obs));
      obs = std::move(sr.obs);
      if (sr.done) {
        iter_returns.push_back(episode_return);
        trailing.push_back(episode_return);
        if (trailing.size() > trailing_cap) trailing.pop_front();
        episode_return = 0.0;
        disc_ret = 0.0;
        obs = env.reset(rng());
        observe_norm(obs);
        if (use_esa) esa_state = esa_episode_start(*esa, iteration + 1);
      }
    }
    result.esa_q_queries += esa_steps;
    if (use_esa && esa_steps != algo.rollout_len)
      throw std::logic_error("train: ESA step accounting mismatch");

    const double value_last = agent_value(agent, obs);
    buffer.close(value_last, algo.gamma, algo.lambda);
    const auto t_update = clock::now();

    UpdateStats stats;
    try {
      stats = update(agent, buffer, algo, rng);
    } catch (const TrainDiverged&) {
      throw TrainDiverged(iteration, "training diverged at iteration " +
                                         std::to_string(iteration));
    }
    const auto t_done = clock::now();

    IterRow row;
    row.iteration = iteration;
    row.env_steps = env_steps;
    if (!iter_returns.empty()) {
      double mean = std::accumulate(iter_returns.begin(), iter_returns.end(), 0.0) /
                    iter_returns.size();
      double var = 0.0;
      for (double r : iter_returns) var += (r - mean) * (r - mean);
      row.mean_return = mean;
      row.std_return = std::sqrt(var / iter_returns.size());
    }
    row.trailing_return = trailing.empty()
                              ? 0.0
                              : std::accumulate(trailing.begin(), trailing.end(), 0.0) /
                                    trailing.size();
    if (use_esa && algo.rollout_len > 0) {
      row.mean_abs_v = abs_v_sum / (algo.rollout_len * spec.action_dim);
      row.mean_filtered_q = abs_filt_sum / (algo.rollout_len * spec.action_dim);
    }
    row.rollout_seconds = std::chrono::duration<double>(t_update - t_rollout).count();
    row.update_seconds = std::chrono::duration<double>(t_done - t_update).count();
    row.stats = stats;
    result.curve.push_back(row);

    if (algo.threshold && !result.steps_to_threshold &&
        trailing.size() == trailing_cap && row.trailing_return >= *algo.threshold) {
      result.steps_to_threshold = env_steps;
      if (algo.stop_at_threshold) {
        ++iteration;
        break;
      }
    }
    ++iteration;
  }

  result.env_steps = env_steps;
  result.final_trailing_return =
      trailing.empty() ? 0.0
                       : std::accumulate(trailing.begin(), trailing.end(), 0.0) /
                             trailing.size();
  result.action_hash = hasher.h;
  if (agent_out) *agent_out = std::make_unique<Agent>(std::move(agent));
  return result;
}

}  // namespace esk
