#pragma once

#include <stdexcept>

namespace esk {

enum class FilterKind { high_pass, low_pass };

// First-order discrete filter (backward-Euler realization).
// High-pass: y_t = a * (y_{t-1} + x_t - x_{t-1}),   a = 1 / (1 + cutoff*dt)
// Low-pass:  y_t = y_{t-1} + g * (x_t - y_{t-1}),   g = cutoff*dt / (1 + cutoff*dt)
struct FilterState {
  FilterKind kind = FilterKind::high_pass;
  double cutoff = 1.0;  // rad per unit time
  double dt = 1.0;
  double prev_input = 0.0;
  double prev_output = 0.0;
  bool initialized = false;
};

FilterState make_highpass(double cutoff, double dt);
FilterState make_lowpass(double cutoff, double dt);

// First call: records the input and returns 0 (no startup transient).
double highpass_step(FilterState& f, double x);

// First call: passes the input through unchanged.
double lowpass_step(FilterState& f, double x);

}  // namespace esk
