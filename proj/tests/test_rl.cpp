#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "esk/rl.hpp"

using namespace esk;

namespace {

// O(T^2) brute-force GAE: A_t = sum_l (gamma*lambda)^l delta_{t+l}.
std::vector<double> gae_brute(const std::vector<double>& r, const std::vector<double>& v,
                              double v_last, double gamma, double lambda) {
  const size_t n = r.size();
  std::vector<double> delta(n);
  for (size_t t = 0; t < n; ++t) {
    const double v_next = (t + 1 < n) ? v[t + 1] : v_last;
    delta[t] = r[t] + gamma * v_next - v[t];
  }
  std::vector<double> adv(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (size_t l = t; l < n; ++l) {
      adv[t] += w * delta[l];
      w *= gamma * lambda;
    }
  }
  return adv;
}

RolloutBuffer random_buffer(int steps, int obs_dim, int act_dim, std::mt19937_64& rng,
                            int episode_len = 0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RolloutBuffer buf;
  for (int k = 0; k < steps; ++k) {
    Transition t;
    t.s.resize(obs_dim);
    t.a.resize(act_dim);
    for (auto& x : t.s) x = gauss(rng);
    for (auto& x : t.a) x = gauss(rng);
    t.a_pi = t.a;
    t.logp = gauss(rng);
    t.r = gauss(rng);
    t.s_next = t.s;
    t.done = episode_len > 0 && (k + 1) % episode_len == 0;
    buf.add(std::move(t), gauss(rng));
    if (buf.data.back().done) buf.end_episode(gauss(rng));
  }
  return buf;
}

}  // namespace

TEST_SUITE_BEGIN("rl");

TEST_CASE("gae single step with zero values returns the reward") {
  const auto [adv, ret] = gae(std::vector<double>{1.7}, std::vector<double>{0.0},
                              0.0, 0.9, 0.95);
  CHECK(adv[0] == doctest::Approx(1.7));
  CHECK(ret[0] == doctest::Approx(1.7));
}

TEST_CASE("gae with lambda 0 reduces to one-step TD residuals") {
  const std::vector<double> r{1.0, -1.0, 0.5};
  const std::vector<double> v{0.2, 0.4, -0.1};
  const double gamma = 0.9, v_last = 2.0;
  const auto [adv, ret] = gae(r, v, v_last, gamma, 0.0);
  CHECK(adv[0] == doctest::Approx(r[0] + gamma * v[1] - v[0]));
  CHECK(adv[1] == doctest::Approx(r[1] + gamma * v[2] - v[1]));
  CHECK(adv[2] == doctest::Approx(r[2] + gamma * v_last - v[2]));
}

TEST_CASE("gae matches the brute-force double sum within 1e-10") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> r(50), v(50);
  for (auto& x : r) x = gauss(rng);
  for (auto& x : v) x = gauss(rng);
  const double v_last = gauss(rng);
  const auto [adv, ret] = gae(r, v, v_last, 0.99, 0.95);
  const auto brute = gae_brute(r, v, v_last, 0.99, 0.95);
  for (size_t t = 0; t < r.size(); ++t) {
    CHECK(std::abs(adv[t] - brute[t]) < 1e-10);
    CHECK(ret[t] == doctest::Approx(adv[t] + v[t]));
  }
}

TEST_CASE("ppo clip loss arithmetic") {
  CHECK(ppo_clip_loss(1.0, 2.5, 0.2) == doctest::Approx(-2.5));
  CHECK(ppo_clip_loss(1.5, 1.0, 0.2) == doctest::Approx(-1.2));
  CHECK(ppo_clip_loss(0.5, -1.0, 0.2) == doctest::Approx(0.8));
  CHECK_THROWS_AS(ppo_clip_loss(0.0, 1.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(ppo_clip_loss(-0.5, 1.0, 0.2), std::invalid_argument);
}

TEST_CASE("buffer close normalizes advantages and splits episodes") {
  std::mt19937_64 rng(5);
  RolloutBuffer buf = random_buffer(200, 3, 1, rng, 50);
  buf.close(0.0, 0.99, 0.95);
  double mean = 0.0;
  for (double a : buf.advantages) mean += a;
  mean /= buf.advantages.size();
  double var = 0.0;
  for (double a : buf.advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / buf.advantages.size());
  CHECK(std::abs(mean) < 1e-8);
  CHECK(std::abs(sd - 1.0) < 1e-6);
}

TEST_CASE("buffer close bootstraps episode ends with the recorded values") {
  // Two 2-step episodes with hand-checkable GAE.
  const double gamma = 0.5, lambda = 1.0;
  RolloutBuffer buf;
  auto push = [&](double r, double v, bool done) {
    Transition t;
    t.s = {0.0};
    t.a = t.a_pi = {0.0};
    t.r = r;
    t.done = done;
    buf.add(std::move(t), v);
  };
  push(1.0, 0.0, false);
  push(2.0, 0.0, true);
  buf.end_episode(4.0);  // V(s_next) at the first episode's time limit
  push(0.5, 0.0, false);
  push(0.5, 0.0, true);
  buf.end_episode(0.0);
  buf.close(0.0, gamma, lambda);

  // Episode 1 raw advantages: delta = (1, 2 + 0.5*4) = (1, 4); A = (1 + 0.5*4, 4).
  // Episode 2 raw advantages: delta = (0.5, 0.5); A = (0.75, 0.5).
  const std::vector<double> raw{3.0, 4.0, 0.75, 0.5};
  double mean = 0.0;
  for (double a : raw) mean += a;
  mean /= 4.0;
  double var = 0.0;
  for (double a : raw) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / 4.0) + 1e-8;
  for (int i = 0; i < 4; ++i)
    CHECK(buf.advantages[i] == doctest::Approx((raw[i] - mean) / sd));
  // Returns are un-normalized advantage + value.
  for (int i = 0; i < 4; ++i) CHECK(buf.returns[i] == doctest::Approx(raw[i]));
}

TEST_CASE("close without the episode bootstrap throws") {
  std::mt19937_64 rng(6);
  RolloutBuffer buf = random_buffer(10, 2, 1, rng);
  buf.data[4].done = true;  // done inserted without end_episode
  CHECK_THROWS_AS(buf.close(0.0, 0.99, 0.95), std::logic_error);
}

TEST_CASE("zero-advantage buffer leaves the policy unchanged") {
  std::mt19937_64 rng(9);
  AlgoConfig cfg;
  cfg.epochs = 3;
  Agent agent = make_agent(3, 1, cfg, rng);
  RolloutBuffer buf = random_buffer(128, 3, 1, rng);
  buf.close(0.0, cfg.gamma, cfg.lambda);
  std::fill(buf.advantages.begin(), buf.advantages.end(), 0.0);
  // Make stored logp consistent so ratios are finite.
  for (auto& t : buf.data) t.logp = gaussian_logprob(agent.policy, t.s, t.a_pi);

  const std::vector<double> before = agent.policy.mean_net.params;
  const std::vector<double> ls_before = agent.policy.log_std;
  update(agent, buf, cfg, rng);
  CHECK(agent.policy.mean_net.params == before);
  CHECK(agent.policy.log_std == ls_before);
}

TEST_CASE("after one update the clip fraction at the data is below 0.5") {
  std::mt19937_64 rng(13);
  AlgoConfig cfg;
  Agent agent = make_agent(3, 1, cfg, rng);
  RolloutBuffer buf = random_buffer(256, 3, 1, rng);
  buf.close(0.0, cfg.gamma, cfg.lambda);
  for (auto& t : buf.data) t.logp = gaussian_logprob(agent.policy, t.s, t.a_pi);
  update(agent, buf, cfg, rng);
  int clipped = 0;
  for (const auto& t : buf.data) {
    const double ratio = std::exp(gaussian_logprob(agent.policy, t.s, t.a_pi) - t.logp);
    if (ratio < 1.0 - cfg.clip_eps || ratio > 1.0 + cfg.clip_eps) ++clipped;
  }
  CHECK(static_cast<double>(clipped) / buf.size() < 0.5);
}

TEST_CASE("q-net fits a synthetic target -|a|^2 to MSE below 1e-3") {
  std::mt19937_64 rng(21);
  AlgoConfig cfg;
  cfg.lr = 3e-3;
  cfg.epochs = 10;
  Agent agent = make_agent(2, 2, cfg, rng);

  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  RolloutBuffer buf;
  for (int k = 0; k < 256; ++k) {
    Transition t;
    t.s = {uni(rng), uni(rng)};
    t.a = t.a_pi = {uni(rng), uni(rng)};
    t.r = 0.0;
    buf.add(std::move(t), 0.0);
  }
  buf.close(0.0, cfg.gamma, cfg.lambda);
  std::fill(buf.advantages.begin(), buf.advantages.end(), 0.0);
  for (size_t k = 0; k < buf.size(); ++k) {
    const auto& a = buf.data[k].a;
    buf.returns[k] = -(a[0] * a[0] + a[1] * a[1]);
  }
  for (auto& t : buf.data) t.logp = gaussian_logprob(agent.policy, t.s, t.a_pi);

  for (int round = 0; round < 80; ++round) update(agent, buf, cfg, rng);

  double mse = 0.0;
  for (size_t k = 0; k < buf.size(); ++k) {
    const double q = agent_q(agent, buf.data[k].s, buf.data[k].a);
    mse += (q - buf.returns[k]) * (q - buf.returns[k]);
  }
  mse /= buf.size();
  CHECK(mse < 1e-3);
}

TEST_CASE("update throws TrainDiverged on non-finite data") {
  std::mt19937_64 rng(31);
  AlgoConfig cfg;
  Agent agent = make_agent(2, 1, cfg, rng);
  RolloutBuffer buf = random_buffer(64, 2, 1, rng);
  buf.close(0.0, cfg.gamma, cfg.lambda);
  for (auto& t : buf.data) t.logp = gaussian_logprob(agent.policy, t.s, t.a_pi);
  buf.returns[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(update(agent, buf, cfg, rng), TrainDiverged);
}

TEST_CASE("update rejects empty or unclosed buffers") {
  std::mt19937_64 rng(33);
  AlgoConfig cfg;
  Agent agent = make_agent(2, 1, cfg, rng);
  RolloutBuffer empty;
  CHECK_THROWS_AS(update(agent, empty, cfg, rng), std::invalid_argument);
  RolloutBuffer open = random_buffer(8, 2, 1, rng);
  CHECK_THROWS_AS(update(agent, open, cfg, rng), std::logic_error);
}

TEST_CASE("importance ratio equals 1 at collection time without ESA") {
  // The rollout stores logp of the applied (clipped) action under the same
  // mean/std used for sampling, so recomputing it must give ratio 1.
  std::mt19937_64 rng(17);
  AlgoConfig cfg;
  Agent agent = make_agent(3, 1, cfg, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::vector<double> sd = policy_std(agent.policy);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> s{gauss(rng), gauss(rng), gauss(rng)};
    const auto mean = mlp_forward(agent.policy.mean_net, s);
    std::vector<double> a{std::clamp(mean[0] + sd[0] * gauss(rng), -2.0, 2.0)};
    const double logp = gaussian_logprob_at(mean, sd, a);
    const double ratio = std::exp(gaussian_logprob(agent.policy, s, a) - logp);
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("train is deterministic given the seed") {
  auto env_a = make_env("pendulum");
  auto env_b = make_env("pendulum");
  AlgoConfig cfg;
  cfg.rollout_len = 512;
  cfg.total_steps = 1024;
  const TrainResult a = train(*env_a, cfg, std::nullopt, 7);
  const TrainResult b = train(*env_b, cfg, std::nullopt, 7);
  REQUIRE(a.curve.size() == b.curve.size());
  for (size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].mean_return == b.curve[i].mean_return);
    CHECK(a.curve[i].trailing_return == b.curve[i].trailing_return);
  }
  CHECK(a.action_hash == b.action_hash);
  const TrainResult c = train(*env_a, cfg, std::nullopt, 8);
  CHECK(a.action_hash != c.action_hash);
}

TEST_CASE("agent checkpoint restores the exact parameters") {
  std::mt19937_64 rng(71);
  AlgoConfig cfg;
  Agent a = make_agent(3, 2, cfg, rng);
  Agent b = make_agent(3, 2, cfg, rng);  // different draw
  agent_restore(b, agent_checkpoint(a));
  CHECK(a.policy.mean_net.params == b.policy.mean_net.params);
  CHECK(a.policy.log_std == b.policy.log_std);
  CHECK(a.value_net.params == b.value_net.params);
  CHECK(a.q_net.params == b.q_net.params);
}

TEST_SUITE_END();
