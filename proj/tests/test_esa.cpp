#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "esk/esa.hpp"

using namespace esk;

namespace {

constexpr double kPi = std::numbers::pi;

EsaConfig config_1d(double K, double omega, double alpha, double dt,
                    double v_clip = 1.0) {
  EsaConfig cfg;
  cfg.amplitude = {K};
  cfg.frequency = {omega};
  cfg.learning_rate = {alpha};
  cfg.hp_cutoff = {omega / 5.0};
  cfg.dt = dt;
  cfg.v_clip = v_clip;
  cfg.normalize_q = false;
  return cfg;
}

const std::vector<double> kLow{-2.0};
const std::vector<double> kHigh{2.0};

}  // namespace

TEST_SUITE_BEGIN("esa");

TEST_CASE("default config uses the paper anchors") {
  const std::vector<double> low{-2.0, -1.0}, high{2.0, 1.0};
  const EsaConfig cfg = default_esa_config(2, low, high, 0.05);
  CHECK(cfg.amplitude == std::vector<double>{0.2, 0.2});
  CHECK(cfg.frequency[0] == doctest::Approx(10.0 * kPi));
  CHECK(cfg.frequency[1] == doctest::Approx(15.0 * kPi));
  CHECK(cfg.hp_cutoff[0] == doctest::Approx(2.0 * kPi));
  // v_clip = 0.25 * min half-range = 0.25 * 1.
  CHECK(cfg.v_clip == doctest::Approx(0.25));
  CHECK(cfg.dt == 0.05);
}

TEST_CASE("first step of an episode applies the sampled action unchanged") {
  const EsaConfig cfg = config_1d(0.2, 10.0 * kPi, 1.0, 0.05);
  EsaEpisodeState st = esa_episode_start(cfg, 0);
  long queries = 0;
  QFunction q = [&](std::span<const double>, std::span<const double>) {
    ++queries;
    return -1.25;
  };
  const std::vector<double> s{0.0}, a{0.7};
  const auto applied = esa_select(st, s, a, q, cfg, kLow, kHigh);
  CHECK(applied[0] == 0.7);  // exactly: v = 0 and filtered output 0 at t = 0
  CHECK(queries == 1);
  CHECK(st.t == 1);
}

TEST_CASE("constant q is rejected: v stays below 1e-9") {
  const EsaConfig cfg = config_1d(0.2, 10.0 * kPi, 1.0, 0.05);
  EsaEpisodeState st = esa_episode_start(cfg, 0);
  QFunction q = [](std::span<const double>, std::span<const double>) { return 42.0; };
  const std::vector<double> s{0.0}, a{0.3};
  for (int k = 0; k < 300; ++k) {
    const auto applied = esa_select(st, s, a, q, cfg, kLow, kHigh);
    CHECK(std::abs(st.v[0]) < 1e-9);
    CHECK(applied[0] == doctest::Approx(0.3).epsilon(1e-9));
  }
}

TEST_CASE("stationary quadratic: v finds the argmax within 200 steps") {
  // q(s, a) = -(a - 0.5)^2 with a_sampled fixed at 0; ESA maximizes q, so v
  // should settle near a* = 0.5 and stay within a* +/- 2K.
  const double K = 0.2, omega = 10.0 * kPi, alpha = 0.6, dt = 0.05;
  const EsaConfig cfg = config_1d(K, omega, alpha, dt);
  EsaEpisodeState st = esa_episode_start(cfg, 0);
  QFunction q = [](std::span<const double>, std::span<const double> a) {
    return -(a[0] - 0.5) * (a[0] - 0.5);
  };
  const std::vector<double> s{0.0}, a{0.0};
  bool entered = false;
  for (int k = 0; k < 600; ++k) {
    esa_select(st, s, a, q, cfg, kLow, kHigh);
    if (k < 200) {
      entered = entered || (st.v[0] >= 0.4 && st.v[0] <= 0.6);
    } else {
      CHECK(st.v[0] >= 0.5 - 2.0 * K);
      CHECK(st.v[0] <= 0.5 + 2.0 * K);
    }
  }
  CHECK(entered);
}

TEST_CASE("decay schedules follow the stated arithmetic") {
  EsaConfig cfg = config_1d(0.2, 10.0 * kPi, 2.0, 0.05);
  cfg.decay = DecayKind::none;
  CHECK(decayed_alpha(cfg, 1000)[0] == doctest::Approx(2.0));

  cfg.decay = DecayKind::linear;
  cfg.decay_end_iter = 100.0;
  CHECK(decayed_alpha(cfg, 0)[0] == doctest::Approx(2.0));
  CHECK(decayed_alpha(cfg, 50)[0] == doctest::Approx(1.0));
  CHECK(decayed_alpha(cfg, 100)[0] == doctest::Approx(0.0));
  CHECK(decayed_alpha(cfg, 250)[0] == doctest::Approx(0.0));  // clamped at 0

  cfg.decay = DecayKind::exponential;
  cfg.decay_rate = 0.99;
  CHECK(decayed_alpha(cfg, 100)[0] == doctest::Approx(2.0 * std::pow(0.99, 100)));
  CHECK(decayed_alpha(cfg, 100)[0] == doctest::Approx(2.0 * 0.366).epsilon(1e-3));

  // Episode state snapshots the decayed alpha.
  cfg.decay = DecayKind::linear;
  const EsaEpisodeState st = esa_episode_start(cfg, 75);
  CHECK(st.alpha[0] == doctest::Approx(0.5));
}

TEST_CASE("exactly one q query per step, non-finite q skips the update") {
  const EsaConfig cfg = config_1d(0.2, 10.0 * kPi, 0.6, 0.05);
  EsaEpisodeState st = esa_episode_start(cfg, 0);
  long queries = 0;
  bool poison = false;
  QFunction q = [&](std::span<const double>, std::span<const double> a) {
    ++queries;
    return poison ? std::nan("") : -(a[0] - 0.5) * (a[0] - 0.5);
  };
  const std::vector<double> s{0.0}, a{0.0};
  for (int k = 0; k < 50; ++k) esa_select(st, s, a, q, cfg, kLow, kHigh);
  CHECK(queries == 50);
  CHECK(st.q_queries == 50);
  CHECK(st.skipped == 0);

  poison = true;
  const double v_before = st.v[0];
  const long t_before = st.t;
  esa_select(st, s, a, q, cfg, kLow, kHigh);
  CHECK(st.v[0] == v_before);
  CHECK(st.t == t_before + 1);
  CHECK(st.skipped == 1);
  CHECK(queries == 51);
}

TEST_CASE("v stays inside v_clip and applied actions inside the bounds") {
  const EsaConfig cfg = config_1d(0.2, 10.0 * kPi, 50.0, 0.05, 0.3);
  EsaEpisodeState st = esa_episode_start(cfg, 0);
  // Steep ramp: pushes v hard toward +v_clip.
  QFunction q = [](std::span<const double>, std::span<const double> a) {
    return 100.0 * a[0];
  };
  const std::vector<double> s{0.0}, a{1.9};
  for (int k = 0; k < 400; ++k) {
    const auto applied = esa_select(st, s, a, q, cfg, kLow, kHigh);
    CHECK(std::abs(st.v[0]) <= 0.3);
    CHECK(applied[0] >= kLow[0]);
    CHECK(applied[0] <= kHigh[0]);
  }
  CHECK(st.v[0] == doctest::Approx(0.3));  // saturated at the clip
}

TEST_CASE("q normalization makes the update scale-invariant across reward scales") {
  // Same q shape at two wildly different scales: after the QScale warm-up the
  // trajectories of v should roughly agree.
  auto run = [&](double scale_factor) {
    const EsaConfig base = config_1d(0.2, 10.0 * kPi, 0.6, 0.05);
    EsaConfig cfg = base;
    cfg.normalize_q = true;
    EsaEpisodeState st = esa_episode_start(cfg, 0);
    QScale qs;
    QFunction q = [scale_factor](std::span<const double>, std::span<const double> a) {
      return scale_factor * -(a[0] - 0.5) * (a[0] - 0.5);
    };
    const std::vector<double> s{0.0}, a{0.0};
    for (int k = 0; k < 2000; ++k) esa_select(st, s, a, q, cfg, kLow, kHigh, &qs);
    return st.v[0];
  };
  const double v_small = run(1.0);
  const double v_large = run(1000.0);
  CHECK(std::abs(v_small - 0.5) < 0.2);
  CHECK(std::abs(v_large - 0.5) < 0.2);
}

TEST_CASE("qscale warms up at 100 samples and tracks the interquartile range") {
  QScale qs;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 99; ++k) {
    qs.observe(uni(rng));
    CHECK(qs.scale() == 1.0);
  }
  for (int k = 0; k < 20000; ++k) qs.observe(uni(rng));
  CHECK(qs.scale() > 0.3);  // true IQR = 0.5
  CHECK(qs.scale() < 0.7);
  QScale fresh;
  fresh.observe(std::nan(""));
  CHECK(fresh.count == 0);
}

TEST_CASE("scan: constant q gives an all-zero filtered column") {
  QFunction q = [](std::span<const double>, std::span<const double>) { return 5.0; };
  const std::vector<double> s{0.0}, center{0.0};
  const auto rows = scan_filtered_q(q, s, center, 0, 2.0, 100, 1.0);
  REQUIRE(rows.size() == 100);
  for (const auto& r : rows) {
    CHECK(r.q_raw == 5.0);
    CHECK(std::abs(r.q_filtered) < 1e-12);
  }
}

TEST_CASE("scan: linear ramp filtered column converges to the closed form") {
  // q = c * a sampled at spacing da is a ramp with per-step increment c*da.
  // Backward-Euler high-pass with gain g = 1/(1 + wc*dt): y* = g*c*da/(1-g)
  // = c*da/(wc*dt); the scan uses dt = 1.
  const double c = 3.0, half_width = 2.0, wc = 1.0;
  const int steps = 200;
  QFunction q = [c](std::span<const double>, std::span<const double> a) {
    return c * a[0];
  };
  const std::vector<double> s{0.0}, center{0.0};
  const auto rows = scan_filtered_q(q, s, center, 0, half_width, steps, wc);
  const double da = 2.0 * half_width / (steps - 1);
  const double want = c * da / wc;
  CHECK(rows.back().q_filtered == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("scan: filtered peak sits at the bump's maximum-slope region") {
  // Gaussian bump centered at 0.3; max slope at 0.3 - sigma on the rising side.
  const double sigma = 0.4;
  QFunction q = [sigma](std::span<const double>, std::span<const double> a) {
    const double d = a[0] - 0.3;
    return std::exp(-d * d / (2.0 * sigma * sigma));
  };
  const std::vector<double> s{0.0}, center{0.0};
  const int steps = 200;
  const auto rows = scan_filtered_q(q, s, center, 0, 2.0, steps, 2.0);

  // Numerical oracle: locations of the steepest rise and steepest fall of
  // q_raw. The bump is symmetric, so the filtered extremum may sit on either
  // edge; it must land within 2 sweep steps of one of them.
  size_t rise_idx = 1, fall_idx = 1;
  double best_rise = 0.0, best_fall = 0.0;
  size_t filt_idx = 0;
  double best_filt = 0.0;
  for (size_t k = 1; k < rows.size(); ++k) {
    const double slope = rows[k].q_raw - rows[k - 1].q_raw;
    if (slope > best_rise) {
      best_rise = slope;
      rise_idx = k;
    }
    if (slope < best_fall) {
      best_fall = slope;
      fall_idx = k;
    }
    if (std::abs(rows[k].q_filtered) > best_filt) {
      best_filt = std::abs(rows[k].q_filtered);
      filt_idx = k;
    }
  }
  const long d_rise = std::abs(static_cast<long>(filt_idx) - static_cast<long>(rise_idx));
  const long d_fall = std::abs(static_cast<long>(filt_idx) - static_cast<long>(fall_idx));
  CHECK(std::min(d_rise, d_fall) <= 2);
}

TEST_CASE("scan input validation") {
  QFunction q = [](std::span<const double>, std::span<const double>) { return 0.0; };
  const std::vector<double> s{0.0}, center{0.0, 0.0};
  CHECK_THROWS_AS(scan_filtered_q(q, s, center, 0, 1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scan_filtered_q(q, s, center, 2, 1.0, 10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scan_filtered_q(q, s, center, -1, 1.0, 10, 1.0), std::invalid_argument);
}

TEST_CASE("episode-start validation") {
  EsaConfig cfg = config_1d(0.2, 10.0 * kPi, 1.0, 0.05);
  cfg.amplitude = {0.2, 0.2};
  cfg.frequency = {10.0, 10.0};
  cfg.learning_rate = {1.0, 1.0};
  cfg.hp_cutoff = {2.0, 2.0};
  CHECK_THROWS_AS(esa_episode_start(cfg, 0), std::invalid_argument);
  cfg = config_1d(0.2, 10.0 * kPi, 1.0, 0.05, 0.0);
  CHECK_THROWS_AS(esa_episode_start(cfg, 0), std::invalid_argument);
}

TEST_SUITE_END();
