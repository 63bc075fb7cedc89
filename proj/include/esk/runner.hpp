#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "esk/baselines.hpp"
#include "esk/config.hpp"
#include "esk/esc.hpp"
#include "esk/rl.hpp"

namespace esk {

// Static and time-varying two-dimensional quadratics used by the esc-demo
// command and the acceptance suite.
Objective example1_static();   // (u1 - 0.1)^2 + (u2 - 0.5)^2
Objective example1_dynamic();  // (u1 - 0.1 t)^2 + (u2 - 0.5 t)^2

EscParams demo_static_esc_params();
EscParams demo_dynamic_esc_params();

// Queries-to-level for a (queries, objective) sequence: query count of the
// first entry into {j < level} after which the level is never left again
// within the budget. Returns cap if the level is not (stably) reached.
long sustained_queries_to_level(const std::vector<long>& queries,
                                const std::vector<double>& j, double level,
                                long cap);

// Search-gradient baseline trace on a demo objective.
struct SgTrace {
  std::vector<long> queries;
  std::vector<double> time;
  std::vector<std::vector<double>> mu;
  std::vector<double> j_of_mu;
};

SgTrace run_search_gradient(const Objective& obj, const DemoSettings& demo, int batch,
                            uint64_t seed, bool dynamic, double dt, double t_end);

struct SeedRun {
  std::string variant;
  uint64_t seed = 0;
  bool completed = false;
  std::string error;
  TrainResult result;
  std::unique_ptr<Agent> agent;
};

struct TrainingVariant {
  std::string name;
  std::optional<EsaSettings> esa;
};

// Runs every (variant, seed) job; parallel seeds capped by ESA_THREADS.
std::vector<SeedRun> run_training_matrix(const ExperimentConfig& cfg,
                                         const std::vector<TrainingVariant>& variants);

int cmd_esc_demo(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_ablation(const ExperimentConfig& cfg);
int cmd_scan_q(const ExperimentConfig& cfg);

int run_experiment(const ExperimentConfig& cfg);

}  // namespace esk
