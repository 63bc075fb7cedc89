#include "esk/config.hpp"

#include <fstream>
#include <stdexcept>

namespace esk {

using nlohmann::json;

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config: parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
  return j;
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("override must look like key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &cfg;
  size_t pos = 0;
  while (true) {
    const size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (key.empty()) throw std::runtime_error("override: empty key in " + assignment);
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

LogpMode parse_logp_mode(const std::string& s) {
  if (s == "applied") return LogpMode::applied;
  if (s == "sampled") return LogpMode::sampled;
  throw std::runtime_error("config: logp_mode must be applied or sampled, got " + s);
}

AlgoConfig parse_algo(const json& j) {
  AlgoConfig a;
  a.gamma = get_or(j, "gamma", a.gamma);
  a.lambda = get_or(j, "lambda", a.lambda);
  a.clip_eps = get_or(j, "clip_eps", a.clip_eps);
  a.epochs = get_or(j, "epochs", a.epochs);
  a.minibatch = get_or(j, "minibatch", a.minibatch);
  a.rollout_len = get_or(j, "rollout_len", a.rollout_len);
  a.total_steps = get_or(j, "total_steps", a.total_steps);
  a.lr = get_or(j, "lr", a.lr);
  a.hidden = get_or(j, "hidden", a.hidden);
  a.q_hidden = get_or(j, "q_hidden", a.q_hidden);
  a.max_grad_norm = get_or(j, "max_grad_norm", a.max_grad_norm);
  a.target_kl = get_or(j, "target_kl", a.target_kl);
  a.normalize_obs = get_or(j, "normalize_obs", a.normalize_obs);
  a.normalize_reward = get_or(j, "normalize_reward", a.normalize_reward);
  a.log_std_init = get_or(j, "log_std_init", a.log_std_init);
  a.final_layer_scale = get_or(j, "final_layer_scale", a.final_layer_scale);
  a.entropy_coef = get_or(j, "entropy_coef", a.entropy_coef);
  a.logp_mode = parse_logp_mode(get_or<std::string>(j, "logp_mode", "applied"));
  if (j.contains("threshold") && !j.at("threshold").is_null())
    a.threshold = j.at("threshold").get<double>();
  a.stop_at_threshold = get_or(j, "stop_at_threshold", a.stop_at_threshold);
  a.trailing_episodes = get_or(j, "trailing_episodes", a.trailing_episodes);
  if (!(a.gamma >= 0.0 && a.gamma < 1.0))
    throw std::runtime_error("config: gamma must lie in [0, 1)");
  if (a.epochs < 1 || a.minibatch < 1 || a.rollout_len < 1 || a.total_steps < 1)
    throw std::runtime_error("config: budgets must be positive");
  return a;
}

EsaSettings parse_esa(const json& j) {
  EsaSettings e;
  e.enabled = get_or(j, "enabled", true);
  e.amplitude = get_or(j, "amplitude", e.amplitude);
  e.omega_base = get_or(j, "omega_base", e.omega_base);
  e.learning_rate = get_or(j, "learning_rate", e.learning_rate);
  e.decay = get_or<std::string>(j, "decay", e.decay);
  e.decay_end_iter = get_or(j, "decay_end_iter", e.decay_end_iter);
  e.decay_rate = get_or(j, "decay_rate", e.decay_rate);
  if (j.contains("v_clip") && !j.at("v_clip").is_null())
    e.v_clip = j.at("v_clip").get<double>();
  e.normalize_q = get_or(j, "normalize_q", e.normalize_q);
  if (!(e.amplitude > 0.0)) throw std::runtime_error("config: esa.amplitude must be > 0");
  if (!(e.omega_base > 0.0)) throw std::runtime_error("config: esa.omega_base must be > 0");
  if (e.decay != "none" && e.decay != "linear" && e.decay != "exponential")
    throw std::runtime_error("config: esa.decay must be none, linear or exponential");
  return e;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  if (!j.contains("mode")) throw std::runtime_error("config: missing mode");
  c.mode = j.at("mode").get<std::string>();
  if (c.mode != "esc_demo" && c.mode != "train" && c.mode != "ablation" &&
      c.mode != "scan_q")
    throw std::runtime_error("config: unknown mode " + c.mode);
  c.env = get_or<std::string>(j, "env", c.env);
  c.out_dir = get_or<std::string>(j, "out_dir", c.out_dir);
  c.seeds = get_or(j, "seeds", c.seeds);
  if (c.seeds.empty()) throw std::runtime_error("config: seeds must be non-empty");

  if (j.contains("algo")) c.algo = parse_algo(j.at("algo"));
  if (j.contains("esa")) c.esa = parse_esa(j.at("esa"));

  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    c.ablation.parameter = get_or<std::string>(a, "parameter", c.ablation.parameter);
    c.ablation.values = get_or(a, "values", c.ablation.values);
    c.ablation.decays = get_or(a, "decays", c.ablation.decays);
    if (c.ablation.parameter != "amplitude" && c.ablation.parameter != "omega_base" &&
        c.ablation.parameter != "decay")
      throw std::runtime_error("config: ablation.parameter must be amplitude, omega_base or decay");
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    c.scan.checkpoint = get_or<std::string>(s, "checkpoint", c.scan.checkpoint);
    c.scan.dim = get_or(s, "dim", c.scan.dim);
    c.scan.half_width = get_or(s, "half_width", c.scan.half_width);
    c.scan.steps = get_or(s, "steps", c.scan.steps);
    c.scan.hp_cutoff = get_or(s, "hp_cutoff", c.scan.hp_cutoff);
    c.scan.state = get_or(s, "state", c.scan.state);
    c.scan.center = get_or(s, "center", c.scan.center);
  }
  if (j.contains("demo")) {
    const json& d = j.at("demo");
    c.demo.esc_static_steps = get_or(d, "esc_static_steps", c.demo.esc_static_steps);
    c.demo.esc_dynamic_steps = get_or(d, "esc_dynamic_steps", c.demo.esc_dynamic_steps);
    c.demo.sg_sigma = get_or(d, "sg_sigma", c.demo.sg_sigma);
    c.demo.sg_lr = get_or(d, "sg_lr", c.demo.sg_lr);
    c.demo.sg_batches = get_or(d, "sg_batches", c.demo.sg_batches);
    c.demo.query_cap = get_or(d, "query_cap", c.demo.query_cap);
    c.demo.gd_lr = get_or(d, "gd_lr", c.demo.gd_lr);
    c.demo.level = get_or(d, "level", c.demo.level);
  }

  // The hash identifies the experiment; where the artifacts land is not part
  // of it, so reruns into different directories stay byte-comparable.
  json hashed = j;
  hashed.erase("out_dir");
  c.hash = fnv1a64(hashed.dump());
  return c;
}

EsaConfig build_esa_config(const EsaSettings& s, const EnvSpec& spec,
                           long total_iterations) {
  EsaConfig cfg = default_esa_config(spec.action_dim, spec.action_low,
                                     spec.action_high, spec.dt);
  const int n = spec.action_dim;
  for (int i = 0; i < n; ++i) {
    cfg.amplitude[i] = s.amplitude;
    cfg.frequency[i] = s.omega_base * (1.0 + static_cast<double>(i) / n);
    cfg.learning_rate[i] = s.learning_rate;
    cfg.hp_cutoff[i] = cfg.frequency[i] / 5.0;
  }
  if (s.decay == "none") cfg.decay = DecayKind::none;
  else if (s.decay == "linear") cfg.decay = DecayKind::linear;
  else cfg.decay = DecayKind::exponential;
  cfg.decay_end_iter = s.decay_end_iter > 0.0 ? s.decay_end_iter
                                              : static_cast<double>(total_iterations);
  cfg.decay_rate = s.decay_rate;
  if (s.v_clip) cfg.v_clip = *s.v_clip;
  cfg.normalize_q = s.normalize_q;
  return cfg;
}

}  // namespace esk
