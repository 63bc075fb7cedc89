#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "esk/envs.hpp"
#include "esk/esa.hpp"
#include "esk/rl.hpp"

namespace esk {

struct EsaSettings {
  bool enabled = false;
  double amplitude = 0.2;
  double omega_base = 31.41592653589793;  // 10*pi
  double learning_rate = 1.0;
  std::string decay = "linear";           // none | linear | exponential
  double decay_end_iter = 0.0;            // 0 = derive from the step budget
  double decay_rate = 0.99;
  std::optional<double> v_clip;           // default: 0.25 * half action range
  bool normalize_q = true;
};

struct AblationSettings {
  std::string parameter = "amplitude";  // amplitude | omega_base | decay
  std::vector<double> values;
  std::vector<std::string> decays;      // when parameter == "decay"
};

struct ScanSettings {
  std::string checkpoint;
  int dim = 0;
  double half_width = 2.0;
  int steps = 200;
  double hp_cutoff = 1.0;
  std::vector<double> state;   // empty: sample one via env reset
  std::vector<double> center;  // empty: policy mean at the state
};

struct DemoSettings {
  long esc_static_steps = 3000;
  long esc_dynamic_steps = 1001;
  double sg_sigma = 0.2;
  double sg_lr = 0.1;
  std::vector<int> sg_batches = {1, 10, 100};
  long query_cap = 20000;
  double gd_lr = 0.1;
  double level = 1e-2;  // target J(v) for queries-to-level
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string mode;  // esc_demo | train | ablation | scan_q
  std::string env = "pendulum";
  std::string out_dir = "out";
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  AlgoConfig algo;
  EsaSettings esa;
  AblationSettings ablation;
  ScanSettings scan;
  DemoSettings demo;
  uint64_t hash = 0;
};

uint64_t fnv1a64(const std::string& s);

nlohmann::json load_config_file(const std::string& path);

// "a.b.c=value"; the value is parsed as JSON when possible, else as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

ExperimentConfig parse_config(const nlohmann::json& j);

// Expands the scalar ESA knobs to per-dimension vectors for a given env.
EsaConfig build_esa_config(const EsaSettings& s, const EnvSpec& spec,
                           long total_iterations);

}  // namespace esk
