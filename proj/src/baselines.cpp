#include "esk/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace esk {

SearchDist search_gradient_step(const SearchDist& d, const Objective& obj,
                                int batch, double lr, std::mt19937_64& rng,
                                double time, long* query_counter) {
  if (batch < 1) throw std::invalid_argument("search_gradient_step: batch must be >= 1");
  const int n = static_cast<int>(d.mu.size());
  if (d.sigma.size() != d.mu.size())
    throw std::invalid_argument("search_gradient_step: mu/sigma size mismatch");
  for (double s : d.sigma)
    if (!(s > 0.0)) throw std::invalid_argument("search_gradient_step: sigma must be > 0");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> samples(batch);
  std::vector<double> values(batch);
  for (int b = 0; b < batch; ++b) {
    samples[b].resize(n);
    for (int i = 0; i < n; ++i) samples[b][i] = d.mu[i] + d.sigma[i] * gauss(rng);
    values[b] = obj.eval(samples[b], time);
    if (query_counter) ++*query_counter;
    if (!std::isfinite(values[b]))
      throw std::domain_error("search_gradient_step: non-finite objective value");
  }
  double sum = 0.0;
  for (double v : values) sum += v;

  std::vector<double> grad(n, 0.0);
  for (int b = 0; b < batch; ++b) {
    // Leave-one-out batch mean: keeps the estimator exactly unbiased and
    // degenerates to no baseline at batch 1.
    const double baseline = batch > 1 ? (sum - values[b]) / (batch - 1) : 0.0;
    for (int i = 0; i < n; ++i) {
      const double score = (samples[b][i] - d.mu[i]) / (d.sigma[i] * d.sigma[i]);
      grad[i] += (values[b] - baseline) * score;
    }
  }
  for (int i = 0; i < n; ++i) grad[i] /= batch;

  SearchDist out = d;
  for (int i = 0; i < n; ++i) out.mu[i] -= lr * grad[i];
  return out;
}

std::vector<double> analytic_gd_step(std::span<const double> u,
                                     std::span<const double> grad, double lr) {
  if (u.size() != grad.size())
    throw std::invalid_argument("analytic_gd_step: size mismatch");
  std::vector<double> out(u.begin(), u.end());
  for (size_t i = 0; i < out.size(); ++i) out[i] -= lr * grad[i];
  return out;
}

}  // namespace esk
