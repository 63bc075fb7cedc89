#pragma once

#include <random>
#include <span>
#include <vector>

#include "esk/esc.hpp"

namespace esk {

// Gaussian search distribution with mean-only adaptation (sigma held fixed).
struct SearchDist {
  std::vector<double> mu;
  std::vector<double> sigma;
};

// One search-gradient step: draws `batch` samples u ~ N(mu, diag(sigma^2)),
// estimates grad_mu E[J] by the score-function estimator with the batch-mean
// of J subtracted as baseline, then mu <- mu - lr * grad (minimization).
SearchDist search_gradient_step(const SearchDist& d, const Objective& obj,
                                int batch, double lr, std::mt19937_64& rng,
                                double time = 0.0, long* query_counter = nullptr);

std::vector<double> analytic_gd_step(std::span<const double> u,
                                     std::span<const double> grad, double lr);

}  // namespace esk
