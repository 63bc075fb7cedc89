#include "esk/esc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace esk {

static void validate(const EscParams& p) {
  if (p.dim <= 0) throw std::invalid_argument("esc: dim must be positive");
  auto need = [&](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != p.dim)
      throw std::invalid_argument(std::string("esc: ") + name + " size != dim");
  };
  need(p.amplitude, "amplitude");
  need(p.frequency, "frequency");
  need(p.learning_rate, "learning_rate");
  if (!(p.dt > 0.0)) throw std::invalid_argument("esc: dt must be > 0");
  for (int i = 0; i < p.dim; ++i) {
    // Zero is allowed as the degenerate "no perturbation" case.
    if (!(p.amplitude[i] >= 0.0)) throw std::invalid_argument("esc: amplitudes must be >= 0");
    if (!(p.frequency[i] > 0.0)) throw std::invalid_argument("esc: frequencies must be > 0");
    for (int k = 0; k < i; ++k)
      if (p.frequency[i] == p.frequency[k])
        throw std::invalid_argument("esc: frequencies must be pairwise distinct");
  }
  if (!p.hp_cutoff.empty()) need(p.hp_cutoff, "hp_cutoff");
  if (!p.lp_cutoff.empty()) need(p.lp_cutoff, "lp_cutoff");
}

EscState make_esc(const EscParams& params, std::span<const double> v0) {
  validate(params);
  if (static_cast<int>(v0.size()) != params.dim)
    throw std::invalid_argument("esc: v0 size != dim");
  EscState s;
  s.params = params;
  s.v.assign(v0.begin(), v0.end());
  s.t = 0;
  for (int i = 0; i < params.dim; ++i) {
    const double hp_c = params.hp_cutoff.empty() ? params.frequency[i] / 5.0 : params.hp_cutoff[i];
    const double lp_c = params.lp_cutoff.empty() ? params.frequency[i] / 5.0 : params.lp_cutoff[i];
    s.hp.push_back(make_highpass(hp_c, params.dt));
    s.lp.push_back(make_lowpass(lp_c, params.dt));
  }
  return s;
}

std::vector<double> esc_probe(const EscState& state) {
  const auto& p = state.params;
  const double time = static_cast<double>(state.t) * p.dt;
  std::vector<double> u(p.dim);
  for (int i = 0; i < p.dim; ++i)
    u[i] = state.v[i] + p.amplitude[i] * std::sin(p.frequency[i] * time);
  return u;
}

void esc_update(EscState& state, double j_value) {
  if (!std::isfinite(j_value))
    throw std::domain_error("esc: non-finite objective value at step " + std::to_string(state.t));
  const auto& p = state.params;
  const double time = static_cast<double>(state.t) * p.dt;
  const double sign = p.maximize ? 1.0 : -1.0;
  for (int i = 0; i < p.dim; ++i) {
    const double h = highpass_step(state.hp[i], j_value);
    const double m = std::sin(p.frequency[i] * time) * h;
    const double l = lowpass_step(state.lp[i], m);
    state.v[i] += sign * p.learning_rate[i] * p.amplitude[i] * l * p.dt;
  }
  state.t += 1;
}

EscRunResult esc_run(const EscParams& params, const Objective& obj,
                     std::span<const double> v0, long steps) {
  if (steps <= 0) throw std::invalid_argument("esc_run: steps must be > 0");
  EscState state = make_esc(params, v0);
  EscRunResult result;
  result.trace.reserve(steps);
  for (long k = 0; k < steps; ++k) {
    const double time = static_cast<double>(state.t) * params.dt;
    std::vector<double> u = esc_probe(state);
    const double j = obj.eval(u, time);
    result.objective_queries += 1;
    if (!std::isfinite(j))
      throw std::domain_error("esc_run: non-finite objective at step " + std::to_string(k));
    result.trace.push_back({state.t, time, u, state.v, j});
    esc_update(state, j);
  }
  return result;
}

}  // namespace esk
