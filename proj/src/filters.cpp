#include "esk/filters.hpp"

#include <cmath>

namespace esk {

static void check_params(double cutoff, double dt) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("filter cutoff must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("filter dt must be > 0");
}

FilterState make_highpass(double cutoff, double dt) {
  check_params(cutoff, dt);
  return FilterState{FilterKind::high_pass, cutoff, dt, 0.0, 0.0, false};
}

FilterState make_lowpass(double cutoff, double dt) {
  check_params(cutoff, dt);
  return FilterState{FilterKind::low_pass, cutoff, dt, 0.0, 0.0, false};
}

double highpass_step(FilterState& f, double x) {
  if (f.kind != FilterKind::high_pass) throw std::logic_error("highpass_step on a low-pass filter");
  if (!std::isfinite(x)) throw std::domain_error("non-finite input to high-pass filter");
  if (!f.initialized) {
    f.prev_input = x;
    f.prev_output = 0.0;
    f.initialized = true;
    return 0.0;
  }
  const double a = 1.0 / (1.0 + f.cutoff * f.dt);
  const double y = a * (f.prev_output + x - f.prev_input);
  f.prev_input = x;
  f.prev_output = y;
  return y;
}

double lowpass_step(FilterState& f, double x) {
  if (f.kind != FilterKind::low_pass) throw std::logic_error("lowpass_step on a high-pass filter");
  if (!std::isfinite(x)) throw std::domain_error("non-finite input to low-pass filter");
  if (!f.initialized) {
    f.prev_input = x;
    f.prev_output = x;
    f.initialized = true;
    return x;
  }
  const double g = f.cutoff * f.dt / (1.0 + f.cutoff * f.dt);
  const double y = f.prev_output + g * (x - f.prev_output);
  f.prev_input = x;
  f.prev_output = y;
  return y;
}

}  // namespace esk
