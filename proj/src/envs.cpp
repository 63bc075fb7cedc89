#include "esk/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace esk {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x - kPi;
}

void check_action(std::span<const double> a, int dim) {
  if (static_cast<int>(a.size()) != dim)
    throw std::invalid_argument("env: action dimension mismatch");
  for (double v : a)
    if (!std::isfinite(v)) throw std::domain_error("env: non-finite action");
}

}  // namespace

PendulumEnv::PendulumEnv() {
  spec_.state_dim = 2;
  spec_.obs_dim = 3;
  spec_.action_dim = 1;
  spec_.action_low = {-2.0};
  spec_.action_high = {2.0};
  spec_.dt = 0.05;
  spec_.max_episode_steps = 200;
  spec_.gamma = 0.99;
}

std::vector<double> PendulumEnv::observe() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

std::vector<double> PendulumEnv::reset(uint64_t seed) {
  rng_.seed(seed);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> vel(-1.0, 1.0);
  theta_ = ang(rng_);
  theta_dot_ = vel(rng_);
  counter_ = 0;
  return observe();
}

StepResult PendulumEnv::step(std::span<const double> action) {
  check_action(action, 1);
  constexpr double g = 10.0, m = 1.0, l = 1.0;
  const double u = std::clamp(action[0], spec_.action_low[0], spec_.action_high[0]);
  const double th = wrap_angle(theta_);
  const double reward = -(th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);

  // Semi-implicit Euler.
  const double acc = (3.0 * g / (2.0 * l)) * std::sin(theta_) + 3.0 * u / (m * l * l);
  theta_dot_ = std::clamp(theta_dot_ + acc * spec_.dt, -8.0, 8.0);
  theta_ += theta_dot_ * spec_.dt;
  counter_ += 1;
  return {observe(), reward, counter_ >= spec_.max_episode_steps};
}

std::unique_ptr<Env> PendulumEnv::clone_fresh() const {
  return std::make_unique<PendulumEnv>();
}

PointMassEnv::PointMassEnv(PathKind path) : path_(path) {
  spec_.state_dim = 4;
  spec_.obs_dim = 6;
  spec_.action_dim = 2;
  spec_.action_low = {-1.0, -1.0};
  spec_.action_high = {1.0, 1.0};
  spec_.dt = 0.05;
  spec_.max_episode_steps = 400;
  spec_.gamma = 0.99;
}

void PointMassEnv::target(double t, double* pos, double* vel, double* acc) const {
  constexpr double rate = 0.5, radius = 1.0;
  switch (path_) {
    case PathKind::circle: {
      const double c = std::cos(rate * t), s = std::sin(rate * t);
      pos[0] = radius * c;
      pos[1] = radius * s;
      vel[0] = -radius * rate * s;
      vel[1] = radius * rate * c;
      acc[0] = -radius * rate * rate * c;
      acc[1] = -radius * rate * rate * s;
      return;
    }
    case PathKind::eight: {
      // Gerono lemniscate: x = cos(w t), y = sin(2 w t) / 2.
      const double w = rate;
      pos[0] = radius * std::cos(w * t);
      pos[1] = radius * 0.5 * std::sin(2.0 * w * t);
      vel[0] = -radius * w * std::sin(w * t);
      vel[1] = radius * w * std::cos(2.0 * w * t);
      acc[0] = -radius * w * w * std::cos(w * t);
      acc[1] = -radius * 2.0 * w * w * std::sin(2.0 * w * t);
      return;
    }
    case PathKind::fixed:
      pos[0] = pos[1] = 0.0;
      vel[0] = vel[1] = 0.0;
      acc[0] = acc[1] = 0.0;
      return;
  }
  throw std::logic_error("point-mass: unknown path kind");
}

std::vector<double> PointMassEnv::observe() const {
  double p[2], v[2], a[2];
  target(counter_ * spec_.dt, p, v, a);
  return {px_ - p[0], py_ - p[1], vx_ - v[0], vy_ - v[1], a[0], a[1]};
}

std::vector<double> PointMassEnv::reset(uint64_t seed) {
  rng_.seed(seed);
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  px_ = uni(rng_);
  py_ = uni(rng_);
  vx_ = vy_ = 0.0;
  counter_ = 0;
  return observe();
}

StepResult PointMassEnv::step(std::span<const double> action) {
  check_action(action, 2);
  double a[2];
  for (int i = 0; i < 2; ++i)
    a[i] = std::clamp(action[i], spec_.action_low[i], spec_.action_high[i]);

  double p[2], tv[2], ta[2];
  target(counter_ * spec_.dt, p, tv, ta);
  const double ex = px_ - p[0], ey = py_ - p[1];
  const double reward = -(ex * ex + ey * ey + 0.01 * (a[0] * a[0] + a[1] * a[1]));

  px_ += vx_ * spec_.dt;
  py_ += vy_ * spec_.dt;
  vx_ += a[0] * spec_.dt;
  vy_ += a[1] * spec_.dt;
  counter_ += 1;
  return {observe(), reward, counter_ >= spec_.max_episode_steps};
}

std::unique_ptr<Env> PointMassEnv::clone_fresh() const {
  return std::make_unique<PointMassEnv>(path_);
}

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "pendulum") return std::make_unique<PendulumEnv>();
  if (name == "pointmass_circle") return std::make_unique<PointMassEnv>(PathKind::circle);
  if (name == "pointmass_eight") return std::make_unique<PointMassEnv>(PathKind::eight);
  if (name == "pointmass_fixed") return std::make_unique<PointMassEnv>(PathKind::fixed);
  throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace esk
