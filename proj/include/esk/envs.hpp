#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace esk {

struct EnvSpec {
  int state_dim = 0;
  int obs_dim = 0;
  int action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
  double dt = 0.05;
  int max_episode_steps = 200;
  double gamma = 0.99;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::vector<double> state() const = 0;
  virtual std::unique_ptr<Env> clone_fresh() const = 0;  // same config, unseeded
};

// Swing-up pendulum. State (theta, theta_dot); theta = 0 is upright.
// Observation (cos theta, sin theta, theta_dot); torque in [-2, 2].
// Reward -(wrap(theta)^2 + 0.1 theta_dot^2 + 0.001 u^2).
class PendulumEnv final : public Env {
 public:
  PendulumEnv();
  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> state() const override { return {theta_, theta_dot_}; }
  std::unique_ptr<Env> clone_fresh() const override;

 private:
  std::vector<double> observe() const;
  EnvSpec spec_;
  double theta_ = 0.0, theta_dot_ = 0.0;
  int counter_ = 0;
  std::mt19937_64 rng_;
};

enum class PathKind { circle, eight, fixed };

// 2-D double-integrator tracking a moving target point.
// State (px, py, vx, vy); acceleration command in [-1, 1]^2.
// Observation: position/velocity error to the target plus the target's
// current acceleration (feedforward term).
// Reward -(|p - p*|^2 + 0.01 |a|^2).
class PointMassEnv final : public Env {
 public:
  explicit PointMassEnv(PathKind path = PathKind::circle);
  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> state() const override { return {px_, py_, vx_, vy_}; }
  std::unique_ptr<Env> clone_fresh() const override;

  // Target position / velocity / acceleration at wall time t.
  void target(double t, double* pos, double* vel, double* acc) const;

 private:
  std::vector<double> observe() const;
  EnvSpec spec_;
  PathKind path_;
  double px_ = 0.0, py_ = 0.0, vx_ = 0.0, vy_ = 0.0;
  int counter_ = 0;
  std::mt19937_64 rng_;
};

std::unique_ptr<Env> make_env(const std::string& name);

}  // namespace esk
