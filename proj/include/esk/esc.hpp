#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "esk/filters.hpp"

namespace esk {

// Multi-dimensional extremum-seeking loop.
//
// Probe:   u_i(t) = v_i + K_i * sin(omega_i * t * dt)
// Update:  h = highpass(J),  m_i = sin(omega_i * t * dt) * h,
//          l_i = lowpass(m_i),
//          v_i += sign * alpha_i * K_i * l_i * dt
// with sign = -1 for minimization, +1 for maximization.
struct EscParams {
  int dim = 1;
  std::vector<double> amplitude;      // K, one per dimension, > 0
  std::vector<double> frequency;      // omega, rad per unit time, pairwise distinct
  std::vector<double> learning_rate;  // alpha, signed
  double dt = 0.01;
  bool maximize = false;
  // Filter cutoffs; empty means the omega/5 default.
  std::vector<double> hp_cutoff;
  std::vector<double> lp_cutoff;
};

struct EscState {
  EscParams params;
  std::vector<double> v;
  long t = 0;
  std::vector<FilterState> hp;
  std::vector<FilterState> lp;
};

struct Objective {
  std::function<double(std::span<const double> u, double time)> eval;
  // Test-only ground truth; not consulted by any algorithm.
  std::function<std::vector<double>(double time)> known_optimum;
};

// Validates invariants (throws std::invalid_argument on violation).
EscState make_esc(const EscParams& params, std::span<const double> v0);

std::vector<double> esc_probe(const EscState& state);

// j_value must be J(esc_probe(state), t*dt) as supplied by the caller.
void esc_update(EscState& state, double j_value);

struct EscTraceRow {
  long step;
  double time;
  std::vector<double> u;
  std::vector<double> v;
  double j;
};

struct EscRunResult {
  std::vector<EscTraceRow> trace;
  long objective_queries = 0;
};

EscRunResult esc_run(const EscParams& params, const Objective& obj,
                     std::span<const double> v0, long steps);

}  // namespace esk
