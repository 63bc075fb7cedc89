#include "esk/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace esk {

size_t mlp_param_count(const std::vector<int>& layer_sizes) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("mlp: need at least 2 layer sizes");
  size_t n = 0;
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    if (layer_sizes[l] <= 0 || layer_sizes[l + 1] <= 0)
      throw std::invalid_argument("mlp: layer sizes must be positive");
    n += static_cast<size_t>(layer_sizes[l + 1]) * (layer_sizes[l] + 1);
  }
  return n;
}

MlpParams make_mlp(std::vector<int> layer_sizes) {
  MlpParams p;
  p.params.assign(mlp_param_count(layer_sizes), 0.0);
  p.layer_sizes = std::move(layer_sizes);
  return p;
}

MlpParams make_mlp(std::vector<int> layer_sizes, std::mt19937_64& rng, double final_scale) {
  MlpParams p = make_mlp(layer_sizes);
  size_t off = 0;
  for (size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const bool last = (l + 2 == p.layer_sizes.size());
    const double limit = std::sqrt(6.0 / (n_in + n_out)) * (last ? final_scale : 1.0);
    std::uniform_real_distribution<double> uni(-limit, limit);
    for (int k = 0; k < n_out * n_in; ++k) p.params[off + k] = uni(rng);
    off += static_cast<size_t>(n_out) * (n_in + 1);  // biases stay zero
  }
  return p;
}

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.input_size())
    throw std::invalid_argument("mlp_forward: input size mismatch");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  size_t off = 0;
  for (size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const bool last = (l + 2 == p.layer_sizes.size());
    next.assign(n_out, 0.0);
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
  return cur;
}

std::vector<double> mlp_backward(const MlpParams& p, std::span<const double> x,
                                 std::span<const double> upstream,
                                 std::span<double> grads) {
  if (static_cast<int>(x.size()) != p.input_size())
    throw std::invalid_argument("mlp_backward: input size mismatch");
  if (static_cast<int>(upstream.size()) != p.output_size())
    throw std::invalid_argument("mlp_backward: upstream size mismatch");
  if (grads.size() != p.params.size())
    throw std::invalid_argument("mlp_backward: grads size mismatch");

  const size_t L = p.num_layers();
  // Forward pass, keeping every layer's post-activation output.
  std::vector<std::vector<double>> acts(L + 1);
  acts[0].assign(x.begin(), x.end());
  std::vector<size_t> offs(L);
  size_t off = 0;
  for (size_t l = 0; l < L; ++l) {
    offs[l] = off;
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const bool last = (l + 1 == L);
    acts[l + 1].assign(n_out, 0.0);
    const double* W = p.params.data() + off;
    const double* b = W + static_cast<size_t>(n_out) * n_in;
    for (int o = 0; o < n_out; ++o) {
      double acc = b[o];
      const double* row = W + static_cast<size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) acc += row[i] * acts[l][i];
      acts[l + 1][o] = last ? acc : std::tanh(acc);
    }
    off += static_cast<size_t>(n_out) * (n_in + 1);
  }

  std::vector<double> delta(upstream.begin(), upstream.end());
  std::vector<double> delta_prev;
  for (size_t l = L; l-- > 0;) {
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const bool last = (l + 1 == L);
    if (!last) {
      // delta currently holds d/d(post-activation); fold in tanh'.
      for (int o = 0; o < n_out; ++o) {
        const double y = acts[l + 1][o];
        delta[o] *= 1.0 - y * y;
      }
    }
    const double* W = p.params.data() + offs[l];
    double* gW = grads.data() + offs[l];
    double* gb = gW + static_cast<size_t>(n_out) * n_in;
    delta_prev.assign(n_in, 0.0);
    for (int o = 0; o < n_out; ++o) {
      const double d = delta[o];
      const double* row = W + static_cast<size_t>(o) * n_in;
      double* grow = gW + static_cast<size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) {
        grow[i] += d * acts[l][i];
        delta_prev[i] += d * row[i];
      }
      gb[o] += d;
    }
    delta.swap(delta_prev);
  }
  return delta;
}

void Adam::update(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m.size() || grads.size() != m.size())
    throw std::invalid_argument("adam: size mismatch");
  step += 1;
  const double bc1 = 1.0 - std::pow(beta1, step);
  const double bc2 = 1.0 - std::pow(beta2, step);
  for (size_t i = 0; i < m.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

std::vector<double> policy_std(const GaussianPolicyHead& head) {
  std::vector<double> out(head.log_std.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = std::clamp(std::exp(head.log_std[i]), 1e-3, 10.0);
  return out;
}

std::vector<double> gaussian_sample(const GaussianPolicyHead& head,
                                    std::span<const double> s, std::mt19937_64& rng) {
  std::vector<double> a = mlp_forward(head.mean_net, s);
  const std::vector<double> sd = policy_std(head);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (size_t i = 0; i < a.size(); ++i) a[i] += sd[i] * gauss(rng);
  return a;
}

double gaussian_logprob_at(std::span<const double> mean, std::span<const double> std_dev,
                           std::span<const double> a) {
  double lp = 0.0;
  for (size_t i = 0; i < mean.size(); ++i) {
    const double z = (a[i] - mean[i]) / std_dev[i];
    lp += -0.5 * z * z - std::log(std_dev[i]) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

double gaussian_logprob(const GaussianPolicyHead& head, std::span<const double> s,
                        std::span<const double> a) {
  const std::vector<double> mean = mlp_forward(head.mean_net, s);
  const std::vector<double> sd = policy_std(head);
  return gaussian_logprob_at(mean, sd, a);
}

void gaussian_logprob_backward(const GaussianPolicyHead& head,
                               std::span<const double> s, std::span<const double> a,
                               double upstream, std::span<double> mean_grads,
                               std::span<double> log_std_grads) {
  const std::vector<double> mean = mlp_forward(head.mean_net, s);
  const std::vector<double> sd = policy_std(head);
  const int n = head.action_dim();
  std::vector<double> dmean(n);
  for (int i = 0; i < n; ++i) {
    const double z = (a[i] - mean[i]) / sd[i];
    dmean[i] = upstream * z / sd[i];
    // d logp / d log_std = z^2 - 1; zero where the std clamp is active.
    const double raw = std::exp(head.log_std[i]);
    const double clamped = (raw < 1e-3 || raw > 10.0);
    log_std_grads[i] += clamped ? 0.0 : upstream * (z * z - 1.0);
  }
  mlp_backward(head.mean_net, s, dmean, mean_grads);
}

static void write_flat(std::ostream& os, const std::string& name,
                       const std::vector<int>& sizes, const std::vector<double>& data) {
  os << name << " " << sizes.size();
  for (int v : sizes) os << " " << v;
  os << " " << data.size() << "\n";
  char buf[20];
  for (size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(std::bit_cast<uint64_t>(data[i])));
    os << buf << (i + 1 == data.size() ? "\n" : (i % 8 == 7 ? "\n" : " "));
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
  os << "esk-checkpoint 1\n";
  os << ckpt.nets.size() << " " << ckpt.vectors.size() << "\n";
  for (const auto& [name, net] : ckpt.nets)
    write_flat(os, name, net.layer_sizes, net.params);
  for (const auto& [name, vec] : ckpt.vectors)
    write_flat(os, name, {}, vec);
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

static void read_flat(std::istream& is, std::string& name, std::vector<int>& sizes,
                      std::vector<double>& data) {
  size_t n_sizes = 0, n_data = 0;
  if (!(is >> name >> n_sizes)) throw std::runtime_error("checkpoint: truncated header");
  sizes.resize(n_sizes);
  for (auto& v : sizes) is >> v;
  is >> n_data;
  data.resize(n_data);
  std::string tok;
  for (auto& d : data) {
    if (!(is >> tok)) throw std::runtime_error("checkpoint: truncated data");
    d = std::bit_cast<double>(static_cast<uint64_t>(std::stoull(tok, nullptr, 16)));
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "esk-checkpoint" || version != 1)
    throw std::runtime_error("load_checkpoint: unrecognized format in " + path);
  size_t n_nets = 0, n_vecs = 0;
  is >> n_nets >> n_vecs;
  Checkpoint ckpt;
  for (size_t k = 0; k < n_nets; ++k) {
    std::string name;
    MlpParams net;
    read_flat(is, name, net.layer_sizes, net.params);
    if (net.params.size() != mlp_param_count(net.layer_sizes))
      throw std::runtime_error("load_checkpoint: inconsistent net shape for " + name);
    ckpt.nets.emplace_back(std::move(name), std::move(net));
  }
  for (size_t k = 0; k < n_vecs; ++k) {
    std::string name;
    std::vector<int> sizes;
    std::vector<double> vec;
    read_flat(is, name, sizes, vec);
    ckpt.vectors.emplace_back(std::move(name), std::move(vec));
  }
  return ckpt;
}

}  // namespace esk
