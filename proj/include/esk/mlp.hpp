#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace esk {

// Feed-forward net, tanh hidden layers, identity output.
// Parameters live in one flat vector: for each layer, the out x in weight
// matrix (row-major) followed by the bias vector.
struct MlpParams {
  std::vector<int> layer_sizes;  // input ... output
  std::vector<double> params;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  size_t num_layers() const { return layer_sizes.size() - 1; }
};

size_t mlp_param_count(const std::vector<int>& layer_sizes);

MlpParams make_mlp(std::vector<int> layer_sizes);  // zero init

// Xavier-uniform init; the last layer is additionally scaled by final_scale.
MlpParams make_mlp(std::vector<int> layer_sizes, std::mt19937_64& rng,
                   double final_scale = 1.0);

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x);

// Gradients of upstream . forward(p, x) w.r.t. params (accumulated into
// grads, which must have params.size()) and w.r.t. x (returned).
std::vector<double> mlp_backward(const MlpParams& p, std::span<const double> x,
                                 std::span<const double> upstream,
                                 std::span<double> grads);

// Adaptive moment estimation over a flat parameter vector.
struct Adam {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m, v;

  explicit Adam(size_t n, double lr_ = 3e-4) : lr(lr_), m(n, 0.0), v(n, 0.0) {}
  void update(std::span<double> params, std::span<const double> grads);
};

// Diagonal-Gaussian policy: state-dependent mean, state-independent log-std.
struct GaussianPolicyHead {
  MlpParams mean_net;
  std::vector<double> log_std;

  int action_dim() const { return mean_net.output_size(); }
};

// exp(log_std) clamped to [1e-3, 10].
std::vector<double> policy_std(const GaussianPolicyHead& head);

std::vector<double> gaussian_sample(const GaussianPolicyHead& head,
                                    std::span<const double> s, std::mt19937_64& rng);

double gaussian_logprob(const GaussianPolicyHead& head, std::span<const double> s,
                        std::span<const double> a);

// Log-prob at a fixed mean (avoids re-running the mean net).
double gaussian_logprob_at(std::span<const double> mean,
                           std::span<const double> std_dev,
                           std::span<const double> a);

// Accumulates upstream * d logp / d params into mean_grads / log_std_grads.
void gaussian_logprob_backward(const GaussianPolicyHead& head,
                               std::span<const double> s, std::span<const double> a,
                               double upstream, std::span<double> mean_grads,
                               std::span<double> log_std_grads);

// Checkpoint: named flat vectors, doubles stored as hex bit patterns so a
// round trip is bit-exact.
struct Checkpoint {
  std::vector<std::pair<std::string, MlpParams>> nets;
  std::vector<std::pair<std::string, std::vector<double>>> vectors;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace esk
