#pragma once

#include <functional>
#include <span>
#include <vector>

#include "esk/filters.hpp"

namespace esk {

enum class DecayKind { none, linear, exponential };

// Per-step sinusoidal probing of the Q-network and high-pass-filtered
// update of the action-improvement estimate v(t). No low-pass stage: the
// residual high-frequency content doubles as exploration.
struct EsaConfig {
  std::vector<double> amplitude;      // K, action units
  std::vector<double> frequency;      // omega, rad per (step * dt)
  std::vector<double> learning_rate;  // alpha
  std::vector<double> hp_cutoff;
  double dt = 0.05;                   // sinusoid argument step
  DecayKind decay = DecayKind::none;
  double decay_end_iter = 100.0;      // linear schedule
  double decay_rate = 0.99;           // exponential schedule
  double v_clip = 0.5;                // max |v_i|, action units
  bool normalize_q = true;
};

// K = 0.2, omega_base = 10*pi with per-dimension spread omega_i =
// omega_base * (1 + i/n), cutoffs omega/5, v_clip = 0.25 * half-range.
EsaConfig default_esa_config(int action_dim, std::span<const double> action_low,
                             std::span<const double> action_high, double dt);

// Running interquartile-range estimate used to normalize Q values before
// filtering, so the ESA learning rate transfers across reward scales.
// Exact IQR over a sliding window of recent finite values, recomputed every
// few inserts; returns 1 until 100 values have been seen.
struct QScale {
  double q25 = 0.0, q75 = 0.0;
  long count = 0;
  std::vector<double> window;   // ring buffer, capacity kWindow
  std::vector<double> scratch;  // reused by the quartile recomputation
  static constexpr size_t kWindow = 512;
  void observe(double q);
  double scale() const;  // max(q75 - q25, 1e-6); 1 until warmed up
};

struct EsaEpisodeState {
  std::vector<double> v;
  long t = 0;
  std::vector<FilterState> hp;
  std::vector<double> alpha;  // decayed copy for this episode
  long q_queries = 0;
  long skipped = 0;            // non-finite Q values seen
  double abs_v_sum = 0.0;      // diagnostics accumulators
  double abs_filtered_sum = 0.0;
};

// Fresh per-episode state: v = 0, t = 0, filters cleared.
EsaEpisodeState esa_episode_start(const EsaConfig& cfg, long iteration);

std::vector<double> decayed_alpha(const EsaConfig& cfg, long iteration);

using QFunction = std::function<double(std::span<const double> s, std::span<const double> a)>;

// One ESA step: probe Q at a_sampled + v + K sin(omega t dt), push the value
// through the high-pass filter, demodulate, update and clamp v, and return
// the action to apply (a_sampled + v clipped to bounds).
std::vector<double> esa_select(EsaEpisodeState& state, std::span<const double> s,
                               std::span<const double> a_sampled, const QFunction& q,
                               const EsaConfig& cfg,
                               std::span<const double> action_low,
                               std::span<const double> action_high,
                               QScale* scale = nullptr);

struct ScanRow {
  double a;
  double q_raw;
  double q_filtered;
};

// Sweeps one action dimension through a fresh high-pass filter; the other
// dimensions stay at a_center.
std::vector<ScanRow> scan_filtered_q(const QFunction& q, std::span<const double> s,
                                     std::span<const double> a_center, int dim,
                                     double half_width, int steps, double hp_cutoff);

}  // namespace esk
