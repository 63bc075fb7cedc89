#include "esk/esa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace esk {

EsaConfig default_esa_config(int action_dim, std::span<const double> action_low,
                             std::span<const double> action_high, double dt) {
  if (action_dim <= 0) throw std::invalid_argument("esa: action_dim must be positive");
  EsaConfig cfg;
  const double omega_base = 10.0 * std::numbers::pi;
  double min_half_range = 1e300;
  for (int i = 0; i < action_dim; ++i) {
    cfg.amplitude.push_back(0.2);
    cfg.frequency.push_back(omega_base * (1.0 + static_cast<double>(i) / action_dim));
    cfg.learning_rate.push_back(1.0);
    cfg.hp_cutoff.push_back(cfg.frequency.back() / 5.0);
    min_half_range = std::min(min_half_range, 0.5 * (action_high[i] - action_low[i]));
  }
  cfg.dt = dt;
  cfg.v_clip = 0.25 * min_half_range;
  return cfg;
}

void QScale::observe(double q) {
  if (!std::isfinite(q)) return;
  if (window.size() < kWindow) {
    window.push_back(q);
  } else {
    window[static_cast<size_t>(count) % kWindow] = q;
  }
  count += 1;
  // Recompute the exact window quartiles every 64 inserts (and while the
  // window is still filling). nth_element keeps the cost linear.
  if (count % 64 == 0 || window.size() < 128) {
    scratch = window;
    const size_t n = scratch.size();
    const size_t i25 = n / 4;
    const size_t i75 = std::min((3 * n) / 4, n - 1);
    std::nth_element(scratch.begin(), scratch.begin() + i25, scratch.end());
    q25 = scratch[i25];
    std::nth_element(scratch.begin() + i25, scratch.begin() + i75, scratch.end());
    q75 = scratch[i75];
  }
}

double QScale::scale() const {
  if (count < 100) return 1.0;
  return std::max(q75 - q25, 1e-6);
}

std::vector<double> decayed_alpha(const EsaConfig& cfg, long iteration) {
  std::vector<double> a = cfg.learning_rate;
  double f = 1.0;
  switch (cfg.decay) {
    case DecayKind::none:
      break;
    case DecayKind::linear:
      f = std::max(0.0, 1.0 - static_cast<double>(iteration) / cfg.decay_end_iter);
      break;
    case DecayKind::exponential:
      f = std::pow(cfg.decay_rate, static_cast<double>(iteration));
      break;
  }
  for (double& x : a) x *= f;
  return a;
}

EsaEpisodeState esa_episode_start(const EsaConfig& cfg, long iteration) {
  const size_t n = cfg.amplitude.size();
  if (cfg.frequency.size() != n || cfg.learning_rate.size() != n || cfg.hp_cutoff.size() != n)
    throw std::invalid_argument("esa: config vector size mismatch");
  for (size_t i = 0; i < n; ++i) {
    if (!(cfg.amplitude[i] > 0.0)) throw std::invalid_argument("esa: amplitudes must be > 0");
    for (size_t k = 0; k < i; ++k)
      if (cfg.frequency[i] == cfg.frequency[k])
        throw std::invalid_argument("esa: frequencies must be pairwise distinct");
  }
  if (!(cfg.v_clip > 0.0)) throw std::invalid_argument("esa: v_clip must be > 0");
  EsaEpisodeState st;
  st.v.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) st.hp.push_back(make_highpass(cfg.hp_cutoff[i], cfg.dt));
  st.alpha = decayed_alpha(cfg, iteration);
  return st;
}

std::vector<double> esa_select(EsaEpisodeState& state, std::span<const double> s,
                               std::span<const double> a_sampled, const QFunction& q,
                               const EsaConfig& cfg,
                               std::span<const double> action_low,
                               std::span<const double> action_high, QScale* scale) {
  const size_t n = state.v.size();
  if (a_sampled.size() != n) throw std::invalid_argument("esa_select: action size mismatch");
  const double time = static_cast<double>(state.t) * cfg.dt;

  std::vector<double> probe(n);
  for (size_t i = 0; i < n; ++i)
    probe[i] = a_sampled[i] + state.v[i] + cfg.amplitude[i] * std::sin(cfg.frequency[i] * time);

  // Exactly one Q evaluation per environment step. The probe is fed to the
  // network unclipped.
  const double q_raw = q(s, probe);
  state.q_queries += 1;

  if (std::isfinite(q_raw)) {
    double qval = q_raw;
    if (cfg.normalize_q && scale != nullptr) {
      scale->observe(q_raw);
      qval = q_raw / scale->scale();
    }
    for (size_t i = 0; i < n; ++i) {
      const double h = highpass_step(state.hp[i], qval);
      state.v[i] += state.alpha[i] * cfg.amplitude[i] *
                    std::sin(cfg.frequency[i] * time) * h;
      state.v[i] = std::clamp(state.v[i], -cfg.v_clip, cfg.v_clip);
      state.abs_filtered_sum += std::abs(h);
    }
  } else {
    state.skipped += 1;
  }
  state.t += 1;

  std::vector<double> applied(n);
  for (size_t i = 0; i < n; ++i) {
    applied[i] = std::clamp(a_sampled[i] + state.v[i], action_low[i], action_high[i]);
    state.abs_v_sum += std::abs(state.v[i]);
  }
  return applied;
}

std::vector<ScanRow> scan_filtered_q(const QFunction& q, std::span<const double> s,
                                     std::span<const double> a_center, int dim,
                                     double half_width, int steps, double hp_cutoff) {
  if (steps < 2) throw std::invalid_argument("scan_filtered_q: steps must be >= 2");
  if (dim < 0 || dim >= static_cast<int>(a_center.size()))
    throw std::invalid_argument("scan_filtered_q: dim out of range");
  FilterState hp = make_highpass(hp_cutoff, 1.0);
  std::vector<double> a(a_center.begin(), a_center.end());
  std::vector<ScanRow> rows;
  rows.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const double x = a_center[dim] - half_width +
                     2.0 * half_width * static_cast<double>(k) / (steps - 1);
    a[dim] = x;
    const double raw = q(s, a);
    rows.push_back({x, raw, highpass_step(hp, raw)});
  }
  return rows;
}

}  // namespace esk
