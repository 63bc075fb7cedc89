#include "esk/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <thread>

#include "esk/csv.hpp"
#include "esk/svg.hpp"

namespace esk {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

int max_threads() {
  if (const char* e = std::getenv("ESA_THREADS")) {
    const int n = std::atoi(e);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return kInf;
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

Objective example1_static() {
  Objective obj;
  obj.eval = [](std::span<const double> u, double) {
    return (u[0] - 0.1) * (u[0] - 0.1) + (u[1] - 0.5) * (u[1] - 0.5);
  };
  obj.known_optimum = [](double) { return std::vector<double>{0.1, 0.5}; };
  return obj;
}

Objective example1_dynamic() {
  Objective obj;
  obj.eval = [](std::span<const double> u, double t) {
    return (u[0] - 0.1 * t) * (u[0] - 0.1 * t) + (u[1] - 0.5 * t) * (u[1] - 0.5 * t);
  };
  obj.known_optimum = [](double t) { return std::vector<double>{0.1 * t, 0.5 * t}; };
  return obj;
}

EscParams demo_static_esc_params() {
  EscParams p;
  p.dim = 2;
  p.amplitude = {0.2, 0.2};
  p.frequency = {10.0 * kPi, 15.0 * kPi};
  p.learning_rate = {25.0, 25.0};
  p.dt = 0.01;
  return p;
}

EscParams demo_dynamic_esc_params() {
  EscParams p;
  p.dim = 2;
  p.amplitude = {0.4, 0.4};
  p.frequency = {30.0 * kPi, 40.0 * kPi};
  p.learning_rate = {100.0, 100.0};
  p.dt = 0.01;
  return p;
}

long sustained_queries_to_level(const std::vector<long>& queries,
                                const std::vector<double>& j, double level,
                                long cap) {
  long ans = cap;
  for (size_t i = j.size(); i-- > 0;) {
    if (j[i] >= level) break;
    ans = queries[i];
  }
  return ans;
}

// ---------------------------------------------------------------------------
// esc-demo

// Static setting: time frozen at 0. Dynamic setting: each objective query
// advances wall time by dt, so methods pay for samples in time as well.
SgTrace run_search_gradient(const Objective& obj, const DemoSettings& demo, int batch,
                            uint64_t seed, bool dynamic, double dt, double t_end) {
  SgTrace trace;
  SearchDist d{{2.0, 2.0}, {demo.sg_sigma, demo.sg_sigma}};
  std::mt19937_64 rng(seed);
  long q = 0;
  while (true) {
    const double t = dynamic ? static_cast<double>(q) * dt : 0.0;
    if (dynamic ? (t > t_end) : (q >= demo.query_cap)) break;
    d = search_gradient_step(d, obj, batch, demo.sg_lr, rng, t, &q);
    const double t_after = dynamic ? static_cast<double>(q) * dt : 0.0;
    trace.queries.push_back(q);
    trace.time.push_back(t_after);
    trace.mu.push_back(d.mu);
    trace.j_of_mu.push_back(obj.eval(d.mu, t_after));
  }
  return trace;
}

namespace {

double tracking_error(const Objective& obj, std::span<const double> v, double t) {
  const std::vector<double> opt = obj.known_optimum(t);
  double s = 0.0;
  for (size_t i = 0; i < opt.size(); ++i) s += (v[i] - opt[i]) * (v[i] - opt[i]);
  return std::sqrt(s);
}

}  // namespace

int cmd_esc_demo(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const Objective stat = example1_static();
  const Objective dyn = example1_dynamic();
  const DemoSettings& demo = cfg.demo;

  CsvWriter summary(cfg.out_dir + "/summary.csv", cfg.hash,
                    {"section", "method", "seed", "queries_to_level", "final_j",
                     "max_err_4_10"});
  SvgPanel panel_a{"static objective", "objective queries", "J", true, {}};
  SvgPanel panel_b{"time-varying objective", "time", "tracking error", true, {}};

  // --- ESC, static ---
  {
    const EscParams p = demo_static_esc_params();
    const std::vector<double> v0{2.0, 2.0};
    const EscRunResult run = esc_run(p, stat, v0, demo.esc_static_steps);
    CsvWriter csv(cfg.out_dir + "/curves_static_esc_0.csv", cfg.hash,
                  {"step", "time", "u_1", "u_2", "v_1", "v_2", "j", "j_of_v",
                   "queries"});
    std::vector<long> qs;
    std::vector<double> jv;
    SvgSeries s{"esc", kPalette[0], false, {}, {}};
    for (const auto& row : run.trace) {
      const double j_of_v = stat.eval(row.v, row.time);
      qs.push_back(row.step + 1);
      jv.push_back(j_of_v);
      csv.row({static_cast<double>(row.step), row.time, row.u[0], row.u[1],
               row.v[0], row.v[1], row.j, j_of_v,
               static_cast<double>(row.step + 1)});
      s.x.push_back(static_cast<double>(row.step + 1));
      s.y.push_back(j_of_v);
    }
    panel_a.series.push_back(std::move(s));
    const long q2l = sustained_queries_to_level(qs, jv, demo.level, demo.query_cap);
    summary.raw_row({"static", "esc", "0", std::to_string(q2l),
                     format_double(jv.back()), ""});
  }

  // --- search gradient, static ---
  for (size_t bi = 0; bi < demo.sg_batches.size(); ++bi) {
    const int batch = demo.sg_batches[bi];
    const std::string method = "sg" + std::to_string(batch);
    for (size_t si = 0; si < cfg.seeds.size(); ++si) {
      const SgTrace tr = run_search_gradient(stat, demo, batch, cfg.seeds[si],
                                             false, 0.0, 0.0);
      CsvWriter csv(cfg.out_dir + "/curves_static_" + method + "_" +
                        std::to_string(cfg.seeds[si]) + ".csv",
                    cfg.hash, {"iteration", "queries", "mu_1", "mu_2", "j_of_mu"});
      for (size_t i = 0; i < tr.queries.size(); ++i)
        csv.row({static_cast<double>(i), static_cast<double>(tr.queries[i]),
                 tr.mu[i][0], tr.mu[i][1], tr.j_of_mu[i]});
      const long q2l = sustained_queries_to_level(tr.queries, tr.j_of_mu,
                                                  demo.level, demo.query_cap);
      summary.raw_row({"static", method, std::to_string(cfg.seeds[si]),
                       std::to_string(q2l), format_double(tr.j_of_mu.back()), ""});
      if (si == 0) {
        SvgSeries s{method, kPalette[1 + bi], false, {}, {}};
        for (size_t i = 0; i < tr.queries.size(); ++i) {
          s.x.push_back(static_cast<double>(tr.queries[i]));
          s.y.push_back(tr.j_of_mu[i]);
        }
        panel_a.series.push_back(std::move(s));
      }
    }
  }

  // --- analytic gradient descent, static ---
  {
    std::vector<double> u{2.0, 2.0};
    CsvWriter csv(cfg.out_dir + "/curves_static_gd_0.csv", cfg.hash,
                  {"iteration", "u_1", "u_2", "j"});
    SvgSeries s{"gd", kPalette[4], true, {}, {}};
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> grad{2.0 * (u[0] - 0.1), 2.0 * (u[1] - 0.5)};
      u = analytic_gd_step(u, grad, demo.gd_lr);
      const double j = stat.eval(u, 0.0);
      csv.row({static_cast<double>(k), u[0], u[1], j});
      s.x.push_back(static_cast<double>(k + 1));
      s.y.push_back(j);
    }
    panel_a.series.push_back(std::move(s));
    summary.raw_row({"static", "gd", "0", "", format_double(stat.eval(u, 0.0)), ""});
  }

  // --- ESC, dynamic ---
  {
    const EscParams p = demo_dynamic_esc_params();
    const std::vector<double> v0{2.0, 2.0};
    const EscRunResult run = esc_run(p, dyn, v0, demo.esc_dynamic_steps);
    CsvWriter csv(cfg.out_dir + "/curves_dynamic_esc_0.csv", cfg.hash,
                  {"step", "time", "u_1", "u_2", "v_1", "v_2", "j", "track_err"});
    SvgSeries s{"esc", kPalette[0], false, {}, {}};
    double max_err = 0.0;
    for (const auto& row : run.trace) {
      const double err = tracking_error(dyn, row.v, row.time);
      if (row.time >= 4.0 && row.time <= 10.0) max_err = std::max(max_err, err);
      csv.row({static_cast<double>(row.step), row.time, row.u[0], row.u[1],
               row.v[0], row.v[1], row.j, err});
      s.x.push_back(row.time);
      s.y.push_back(err);
    }
    panel_b.series.push_back(std::move(s));
    summary.raw_row({"dynamic", "esc", "0", "", "", format_double(max_err)});
  }

  // --- search gradient, dynamic ---
  const double dyn_dt = demo_dynamic_esc_params().dt;
  const double t_end = static_cast<double>(demo.esc_dynamic_steps - 1) * dyn_dt;
  for (size_t bi = 0; bi < demo.sg_batches.size(); ++bi) {
    const int batch = demo.sg_batches[bi];
    const std::string method = "sg" + std::to_string(batch);
    for (size_t si = 0; si < cfg.seeds.size(); ++si) {
      const SgTrace tr = run_search_gradient(dyn, demo, batch, cfg.seeds[si],
                                             true, dyn_dt, t_end);
      CsvWriter csv(cfg.out_dir + "/curves_dynamic_" + method + "_" +
                        std::to_string(cfg.seeds[si]) + ".csv",
                    cfg.hash,
                    {"iteration", "time", "queries", "mu_1", "mu_2", "track_err"});
      double max_err = 0.0;
      SvgSeries s{method, kPalette[1 + bi], false, {}, {}};
      for (size_t i = 0; i < tr.queries.size(); ++i) {
        const double err = tracking_error(dyn, tr.mu[i], tr.time[i]);
        if (tr.time[i] >= 4.0 && tr.time[i] <= 10.0) max_err = std::max(max_err, err);
        csv.row({static_cast<double>(i), tr.time[i],
                 static_cast<double>(tr.queries[i]), tr.mu[i][0], tr.mu[i][1], err});
        s.x.push_back(tr.time[i]);
        s.y.push_back(err);
      }
      summary.raw_row({"dynamic", method, std::to_string(cfg.seeds[si]), "", "",
                       format_double(max_err)});
      if (si == 0) panel_b.series.push_back(std::move(s));
    }
  }

  // --- analytic gradient descent, dynamic ---
  {
    std::vector<double> u{2.0, 2.0};
    CsvWriter csv(cfg.out_dir + "/curves_dynamic_gd_0.csv", cfg.hash,
                  {"step", "time", "u_1", "u_2", "track_err"});
    SvgSeries s{"gd", kPalette[4], true, {}, {}};
    double max_err = 0.0;
    for (long k = 0; k < demo.esc_dynamic_steps; ++k) {
      const double t = static_cast<double>(k) * dyn_dt;
      const std::vector<double> grad{2.0 * (u[0] - 0.1 * t), 2.0 * (u[1] - 0.5 * t)};
      u = analytic_gd_step(u, grad, demo.gd_lr);
      const double err = tracking_error(dyn, u, t);
      if (t >= 4.0 && t <= 10.0) max_err = std::max(max_err, err);
      csv.row({static_cast<double>(k), t, u[0], u[1], err});
      s.x.push_back(t);
      s.y.push_back(err);
    }
    panel_b.series.push_back(std::move(s));
    summary.raw_row({"dynamic", "gd", "0", "", "", format_double(max_err)});
  }

  write_svg_plot(cfg.out_dir + "/plot_esc_demo.svg", {panel_a, panel_b});
  return 0;
}

// ---------------------------------------------------------------------------
// training matrix (train + ablation)

std::vector<SeedRun> run_training_matrix(const ExperimentConfig& cfg,
                                         const std::vector<TrainingVariant>& variants) {
  std::vector<SeedRun> runs;
  for (const auto& variant : variants)
    for (uint64_t seed : cfg.seeds) {
      SeedRun r;
      r.variant = variant.name;
      r.seed = seed;
      runs.push_back(std::move(r));
    }

  const long iters = (cfg.algo.total_steps + cfg.algo.rollout_len - 1) /
                     cfg.algo.rollout_len;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      SeedRun& r = runs[i];
      const TrainingVariant& variant = variants[i / cfg.seeds.size()];
      try {
        std::unique_ptr<Env> env = make_env(cfg.env);
        std::optional<EsaConfig> esa;
        if (variant.esa && variant.esa->enabled)
          esa = build_esa_config(*variant.esa, env->spec(), iters);
        r.result = train(*env, cfg.algo, esa, r.seed, &r.agent);
        r.completed = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };

  const int n_threads = std::min<int>(max_threads(), static_cast<int>(runs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return runs;
}

namespace {

void write_run_files(const ExperimentConfig& cfg, const SeedRun& r) {
  const std::string tag = r.variant + "_" + std::to_string(r.seed);
  CsvWriter curves(cfg.out_dir + "/curves_" + tag + ".csv", cfg.hash,
                   {"iteration", "env_steps", "mean_return", "std_return",
                    "trailing_return", "mean_abs_v", "mean_filtered_q"});
  CsvWriter timing(cfg.out_dir + "/timing_" + tag + ".csv", cfg.hash,
                   {"iteration", "rollout_seconds", "update_seconds"});
  for (const IterRow& row : r.result.curve) {
    curves.row({static_cast<double>(row.iteration), static_cast<double>(row.env_steps),
                row.mean_return, row.std_return, row.trailing_return, row.mean_abs_v,
                row.mean_filtered_q});
    timing.row({static_cast<double>(row.iteration), row.rollout_seconds,
                row.update_seconds});
  }
  if (r.agent)
    save_checkpoint(cfg.out_dir + "/checkpoint_" + tag + ".txt",
                    agent_checkpoint(*r.agent));
}

struct VariantSummary {
  std::string name;
  int completed = 0;
  int reached = 0;
  double median_steps_to_threshold = kInf;
  double median_final_return = -kInf;
  double mean_rollout_s = 0.0;
  double mean_update_s = 0.0;
};

VariantSummary summarize_variant(const std::string& name,
                                 const std::vector<const SeedRun*>& runs) {
  VariantSummary s;
  s.name = name;
  std::vector<double> steps, finals;
  double rollout_s = 0.0, update_s = 0.0;
  long iters = 0;
  for (const SeedRun* r : runs) {
    if (!r->completed) continue;
    s.completed += 1;
    if (r->result.steps_to_threshold) {
      s.reached += 1;
      steps.push_back(static_cast<double>(*r->result.steps_to_threshold));
    } else {
      steps.push_back(kInf);
    }
    finals.push_back(r->result.final_trailing_return);
    for (const IterRow& row : r->result.curve) {
      rollout_s += row.rollout_seconds;
      update_s += row.update_seconds;
      ++iters;
    }
  }
  s.median_steps_to_threshold = median(steps);
  s.median_final_return = median(finals);
  if (iters > 0) {
    s.mean_rollout_s = rollout_s / iters;
    s.mean_update_s = update_s / iters;
  }
  return s;
}

SvgSeries variant_band_series(const std::string& label, const std::string& color,
                              const std::vector<const SeedRun*>& runs) {
  SvgSeries s{label, color, false, {}, {}};
  size_t min_len = std::numeric_limits<size_t>::max();
  for (const SeedRun* r : runs)
    if (r->completed) min_len = std::min(min_len, r->result.curve.size());
  if (min_len == std::numeric_limits<size_t>::max()) return s;
  for (size_t i = 0; i < min_len; ++i) {
    std::vector<double> vals;
    long env_steps = 0;
    for (const SeedRun* r : runs)
      if (r->completed) {
        vals.push_back(r->result.curve[i].trailing_return);
        env_steps = r->result.curve[i].env_steps;
      }
    std::sort(vals.begin(), vals.end());
    s.x.push_back(static_cast<double>(env_steps));
    s.y.push_back(median(vals));
    s.y_low.push_back(vals[vals.size() / 4]);
    s.y_high.push_back(vals[(3 * vals.size()) / 4]);
  }
  return s;
}

std::vector<const SeedRun*> runs_of(const std::vector<SeedRun>& runs,
                                    const std::string& variant) {
  std::vector<const SeedRun*> out;
  for (const SeedRun& r : runs)
    if (r.variant == variant) out.push_back(&r);
  return out;
}

}  // namespace

int cmd_train(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::vector<TrainingVariant> variants{{"baseline", std::nullopt}};
  if (cfg.esa.enabled) variants.push_back({"esa", cfg.esa});

  const std::vector<SeedRun> runs = run_training_matrix(cfg, variants);
  for (const SeedRun& r : runs)
    if (r.completed) write_run_files(cfg, r);

  CsvWriter summary(cfg.out_dir + "/summary.csv", cfg.hash,
                    {"variant", "seeds_completed", "seeds_reached_threshold",
                     "median_steps_to_threshold", "median_final_return"});
  CsvWriter timing(cfg.out_dir + "/timing_summary.csv", cfg.hash,
                   {"variant", "mean_rollout_seconds_per_iter",
                    "mean_update_seconds_per_iter", "rollout_ratio_vs_baseline",
                    "iter_ratio_vs_baseline"});
  std::vector<VariantSummary> vs;
  for (const auto& variant : variants)
    vs.push_back(summarize_variant(variant.name, runs_of(runs, variant.name)));
  for (const VariantSummary& s : vs) {
    summary.raw_row({s.name, std::to_string(s.completed), std::to_string(s.reached),
                     std::isinf(s.median_steps_to_threshold)
                         ? "-1"
                         : format_double(s.median_steps_to_threshold),
                     format_double(s.median_final_return)});
    const VariantSummary& base = vs.front();
    const double rr = base.mean_rollout_s > 0 ? s.mean_rollout_s / base.mean_rollout_s : 0;
    const double ir = (base.mean_rollout_s + base.mean_update_s) > 0
                          ? (s.mean_rollout_s + s.mean_update_s) /
                                (base.mean_rollout_s + base.mean_update_s)
                          : 0;
    timing.raw_row({s.name, format_double(s.mean_rollout_s),
                    format_double(s.mean_update_s), format_double(rr),
                    format_double(ir)});
  }

  SvgPanel panel{cfg.name, "environment steps", "trailing return", false, {}};
  for (size_t i = 0; i < variants.size(); ++i)
    panel.series.push_back(variant_band_series(variants[i].name, kPalette[i],
                                               runs_of(runs, variants[i].name)));
  write_svg_plot(cfg.out_dir + "/plot_train.svg", {panel});

  int rc = 0;
  for (const SeedRun& r : runs)
    if (!r.completed) {
      std::cerr << "seed failed: variant=" << r.variant << " seed=" << r.seed
                << ": " << r.error << "\n";
      rc = 1;
    }
  return rc;
}

int cmd_ablation(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::vector<TrainingVariant> variants;
  const AblationSettings& ab = cfg.ablation;
  if (ab.parameter == "decay") {
    if (ab.decays.empty())
      throw std::runtime_error("ablation: decay sweep needs ablation.decays");
    for (const std::string& d : ab.decays) {
      EsaSettings e = cfg.esa;
      e.enabled = true;
      e.decay = d;
      variants.push_back({"decay_" + d, e});
    }
  } else {
    if (ab.values.empty())
      throw std::runtime_error("ablation: sweep needs ablation.values");
    for (double v : ab.values) {
      EsaSettings e = cfg.esa;
      e.enabled = true;
      if (ab.parameter == "amplitude") e.amplitude = v;
      else e.omega_base = v;
      variants.push_back({(ab.parameter == "amplitude" ? "K" : "w") + fmt_g(v), e});
    }
  }

  const std::vector<SeedRun> runs = run_training_matrix(cfg, variants);
  for (const SeedRun& r : runs)
    if (r.completed) write_run_files(cfg, r);

  CsvWriter summary(cfg.out_dir + "/summary.csv", cfg.hash,
                    {"variant", "seeds_completed", "seeds_reached_threshold",
                     "median_steps_to_threshold", "median_final_return"});
  SvgPanel panel{cfg.name, "environment steps", "trailing return", false, {}};
  for (size_t i = 0; i < variants.size(); ++i) {
    const auto vruns = runs_of(runs, variants[i].name);
    const VariantSummary s = summarize_variant(variants[i].name, vruns);
    summary.raw_row({s.name, std::to_string(s.completed), std::to_string(s.reached),
                     std::isinf(s.median_steps_to_threshold)
                         ? "-1"
                         : format_double(s.median_steps_to_threshold),
                     format_double(s.median_final_return)});
    panel.series.push_back(
        variant_band_series(variants[i].name, kPalette[i % 8], vruns));
  }
  write_svg_plot(cfg.out_dir + "/plot_ablation.svg", {panel});

  for (const SeedRun& r : runs)
    if (!r.completed) return 1;
  return 0;
}

int cmd_scan_q(const ExperimentConfig& cfg) {
  if (cfg.scan.checkpoint.empty() || !fs::exists(cfg.scan.checkpoint))
    throw std::runtime_error("scan-q: checkpoint not found: " + cfg.scan.checkpoint);
  const Checkpoint ckpt = load_checkpoint(cfg.scan.checkpoint);

  const MlpParams* q_net = nullptr;
  const MlpParams* policy_mean = nullptr;
  for (const auto& [name, net] : ckpt.nets) {
    if (name == "q") q_net = &net;
    if (name == "policy_mean") policy_mean = &net;
  }
  if (!q_net) throw std::runtime_error("scan-q: checkpoint has no q net");

  std::unique_ptr<Env> env = make_env(cfg.env);
  std::vector<double> state = cfg.scan.state;
  if (state.empty()) state = env->reset(cfg.seeds.front());
  if (static_cast<int>(state.size()) != env->spec().obs_dim)
    throw std::runtime_error("scan-q: state size does not match the environment");

  // The networks were trained on normalized observations; apply the
  // checkpoint's observation statistics to the raw state.
  for (const auto& [name, vec] : ckpt.vectors) {
    if (name == "obs_stats" && vec.size() == 1 + 2 * state.size()) {
      RunningStat stats;
      stats.count = static_cast<long>(vec[0]);
      stats.mean.assign(vec.begin() + 1, vec.begin() + 1 + state.size());
      stats.m2.assign(vec.begin() + 1 + state.size(), vec.end());
      state = stats.normalize(state);
    }
  }

  std::vector<double> center = cfg.scan.center;
  if (center.empty()) {
    if (!policy_mean) throw std::runtime_error("scan-q: no center and no policy net");
    center = mlp_forward(*policy_mean, state);
  }
  if (static_cast<int>(center.size()) != env->spec().action_dim)
    throw std::runtime_error("scan-q: center size does not match the action space");

  // De-normalize through the checkpoint's return statistics when present.
  double ret_loc = 0.0, ret_scale = 1.0;
  for (const auto& [name, vec] : ckpt.vectors) {
    if (name == "ret_stats" && vec.size() >= 2) {
      ret_loc = vec[0];
      ret_scale = vec[1];
    }
  }
  QFunction q = [&](std::span<const double> s, std::span<const double> a) {
    std::vector<double> sa(s.begin(), s.end());
    sa.insert(sa.end(), a.begin(), a.end());
    return ret_loc + ret_scale * mlp_forward(*q_net, sa)[0];
  };

  fs::create_directories(cfg.out_dir);
  const std::vector<ScanRow> rows =
      scan_filtered_q(q, state, center, cfg.scan.dim, cfg.scan.half_width,
                      cfg.scan.steps, cfg.scan.hp_cutoff);
  CsvWriter csv(cfg.out_dir + "/scan_q.csv", cfg.hash, {"a", "q_raw", "q_filtered"});
  SvgSeries raw{"q raw", kPalette[0], false, {}, {}};
  SvgSeries filt{"q filtered", kPalette[1], false, {}, {}};
  for (const ScanRow& r : rows) {
    csv.row({r.a, r.q_raw, r.q_filtered});
    raw.x.push_back(r.a);
    raw.y.push_back(r.q_raw);
    filt.x.push_back(r.a);
    filt.y.push_back(r.q_filtered);
  }
  SvgPanel panel{"Q landscape along action dim " + std::to_string(cfg.scan.dim),
                 "action", "Q", false, {raw, filt}};
  write_svg_plot(cfg.out_dir + "/plot_scan_q.svg", {panel});
  return 0;
}

int run_experiment(const ExperimentConfig& cfg) {
  if (cfg.mode == "esc_demo") return cmd_esc_demo(cfg);
  if (cfg.mode == "train") return cmd_train(cfg);
  if (cfg.mode == "ablation") return cmd_ablation(cfg);
  if (cfg.mode == "scan_q") return cmd_scan_q(cfg);
  throw std::runtime_error("unknown mode: " + cfg.mode);
}

}  // namespace esk
