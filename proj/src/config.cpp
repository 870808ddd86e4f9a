#include "catlock/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "catlock/errors.hpp"

namespace catlock {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> PhysicalParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(std::string(name) + " must be positive and finite");
  };
  positive(nu, "nu");
  positive(k, "k");
  positive(mu, "mu");
  positive(gamma, "gamma");
  positive(g, "g");
  positive(dt, "dt");
  positive(corr_interval, "corr_period");
  if (!(std::isfinite(n_T) && n_T >= 0.0)) throw ConfigError("n_T must be non-negative");
  if (corr_interval <= tau_corr()) throw ConfigError("corr_period must exceed the correlation window pi/g");

  std::vector<std::string> warnings;
  if (n_T > 0.0 && k < 10.0 * gamma * n_T) {
    std::ostringstream msg;
    msg << "k = " << k << " is not much larger than gamma*n_T = " << gamma * n_T;
    warnings.push_back(msg.str());
  }
  if (k > nu) warnings.push_back("k exceeds nu; the x^2 measurement will heat strongly");
  if (dt * g > 0.1) warnings.push_back("dt is coarse relative to the correlation window");
  return warnings;
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> warnings = physics.validate();
  if (dim_osc < 8) throw ConfigError("dim_osc must be at least 8");
  if (!(periods > 0.0)) throw ConfigError("periods must be positive");
  if (samples_per_period < 1) throw ConfigError("samples_per_period must be at least 1");
  if (n_traj < 1) throw ConfigError("n_traj must be at least 1");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (initial.parity != "random" && initial.parity != "even" && initial.parity != "odd") {
    throw ConfigError("initial_parity must be one of random, even, odd");
  }
  if (!(initial.est_P >= 0.0 && initial.est_P <= 1.0)) throw ConfigError("est_P must lie in [0, 1]");
  const double alpha2 = 0.5 * (initial.x0 * initial.x0 + initial.p0 * initial.p0);
  if (!(alpha2 < dim_osc / 3.0)) throw ConfigError("initial packet too far out for dim_osc (need |alpha|^2 < dim_osc/3)");
  if (!(chi_cut >= 0.0 && chi_cut < 1.0)) throw ConfigError("chi_cut must lie in [0, 1)");
  if (!(controller.epsilon >= 0.0 && controller.epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  if (!(controller.lookback > 0.0)) throw ConfigError("lookback must be positive");
  if (!(controller.smoothing_width >= 0.0)) throw ConfigError("smoothing must be non-negative");
  if (!(controller.n_low <= controller.n_dormant_high && controller.n_dormant_high <= controller.n_high)) {
    throw ConfigError("need n_low <= n_dormant_high <= n_high");
  }
  const double steps = duration() / physics.dt;
  if (std::abs(steps - std::round(steps)) > 1e-6 * steps) warnings.push_back("duration is not a multiple of dt");
  return warnings;
}

std::vector<std::uint64_t> RunConfig::ensemble_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n_traj; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
  return out;
}

std::vector<std::string> preset_names() { return {"fig1a", "fig1d"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "fig1a") {
    c.physics.gamma = 1.0 / 200.0;
    c.physics.n_T = 0.0;
    c.physics.mu = 1.0;
  } else if (name == "fig1d") {
    c.physics.gamma = 1.0 / 500.0;
    c.physics.n_T = 12.0;
    c.physics.mu = 0.5;
  } else {
    throw ConfigError("unknown preset '" + name + "' (available: fig1a, fig1d)");
  }
  return c;
}

namespace {

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' expects a number");
  return v.get<double>();
}

int as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) throw ConfigError("key '" + key + "' expects an integer");
  return v.get<int>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError("key '" + key + "' expects true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError("key '" + key + "' expects a string");
  return v.get<std::string>();
}

std::optional<double> as_optional_number(const std::string& key, const json& v) {
  if (v.is_null()) return std::nullopt;
  return as_number(key, v);
}

std::uint64_t as_seed(const std::string& key, const json& v) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError("key '" + key + "' expects a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

using Setter = std::function<void(RunConfig&, const std::string&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"k", [](RunConfig& c, const std::string& k, const json& v) { c.physics.k = as_number(k, v); }},
      {"mu", [](RunConfig& c, const std::string& k, const json& v) { c.physics.mu = as_number(k, v); }},
      {"gamma", [](RunConfig& c, const std::string& k, const json& v) { c.physics.gamma = as_number(k, v); }},
      {"Q",
       [](RunConfig& c, const std::string& k, const json& v) {
         const double q = as_number(k, v);
         if (!(q > 0.0)) throw ConfigError("key 'Q' must be positive");
         c.physics.gamma = c.physics.nu / q;
       }},
      {"n_T", [](RunConfig& c, const std::string& k, const json& v) { c.physics.n_T = as_number(k, v); }},
      {"g", [](RunConfig& c, const std::string& k, const json& v) { c.physics.g = as_number(k, v); }},
      {"tau_corr",
       [](RunConfig& c, const std::string& k, const json& v) {
         const double tau = as_number(k, v) * kTwoPi;
         if (!(tau > 0.0)) throw ConfigError("key 'tau_corr' must be positive");
         c.physics.g = std::numbers::pi / tau;
       }},
      {"dt", [](RunConfig& c, const std::string& k, const json& v) { c.physics.dt = as_number(k, v) * kTwoPi; }},
      {"corr_period",
       [](RunConfig& c, const std::string& k, const json& v) { c.physics.corr_interval = as_number(k, v) * kTwoPi; }},
      {"periods", [](RunConfig& c, const std::string& k, const json& v) { c.periods = as_number(k, v); }},
      {"dim_osc", [](RunConfig& c, const std::string& k, const json& v) { c.dim_osc = as_int(k, v); }},
      {"samples_per_period",
       [](RunConfig& c, const std::string& k, const json& v) { c.samples_per_period = as_int(k, v); }},
      {"chi_cut", [](RunConfig& c, const std::string& k, const json& v) { c.chi_cut = as_number(k, v); }},
      {"feedback", [](RunConfig& c, const std::string& k, const json& v) { c.switches.feedback = as_bool(k, v); }},
      {"x2_channel", [](RunConfig& c, const std::string& k, const json& v) { c.switches.x2_channel = as_bool(k, v); }},
      {"qubit_channel",
       [](RunConfig& c, const std::string& k, const json& v) { c.switches.qubit_channel = as_bool(k, v); }},
      {"damping", [](RunConfig& c, const std::string& k, const json& v) { c.switches.damping = as_bool(k, v); }},
      {"epsilon", [](RunConfig& c, const std::string& k, const json& v) { c.controller.epsilon = as_number(k, v); }},
      {"smoothing",
       [](RunConfig& c, const std::string& k, const json& v) { c.controller.smoothing_width = as_number(k, v) * kTwoPi; }},
      {"lookback",
       [](RunConfig& c, const std::string& k, const json& v) { c.controller.lookback = as_number(k, v) * kTwoPi; }},
      {"refractory",
       [](RunConfig& c, const std::string& k, const json& v) { c.controller.refractory = as_number(k, v) * kTwoPi; }},
      {"curvature_floor",
       [](RunConfig& c, const std::string& k, const json& v) { c.controller.curvature_floor = as_number(k, v); }},
      {"n_high", [](RunConfig& c, const std::string& k, const json& v) { c.controller.n_high = as_number(k, v); }},
      {"n_low", [](RunConfig& c, const std::string& k, const json& v) { c.controller.n_low = as_number(k, v); }},
      {"n_dormant_high",
       [](RunConfig& c, const std::string& k, const json& v) { c.controller.n_dormant_high = as_number(k, v); }},
      {"x0", [](RunConfig& c, const std::string& k, const json& v) { c.initial.x0 = as_number(k, v); }},
      {"p0", [](RunConfig& c, const std::string& k, const json& v) { c.initial.p0 = as_number(k, v); }},
      {"initial_parity", [](RunConfig& c, const std::string& k, const json& v) { c.initial.parity = as_string(k, v); }},
      {"est_x0", [](RunConfig& c, const std::string& k, const json& v) { c.initial.est_x0 = as_optional_number(k, v); }},
      {"est_p0", [](RunConfig& c, const std::string& k, const json& v) { c.initial.est_p0 = as_optional_number(k, v); }},
      {"est_P", [](RunConfig& c, const std::string& k, const json& v) { c.initial.est_P = as_number(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, const json& v) { c.seed = as_seed(k, v); }},
      {"seeds",
       [](RunConfig& c, const std::string& k, const json& v) {
         if (!v.is_array()) throw ConfigError("key 'seeds' expects an array of integers");
         c.seeds.clear();
         for (const json& s : v) c.seeds.push_back(as_seed(k, s));
       }},
      {"n_traj", [](RunConfig& c, const std::string& k, const json& v) { c.n_traj = as_int(k, v); }},
      {"parallelism", [](RunConfig& c, const std::string& k, const json& v) { c.parallelism = as_int(k, v); }},
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const json& value) {
  if (key == "preset") throw ConfigError("key 'preset' must be given before any other setting");
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  apply_setting(config, key, value);
}

RunConfig parse_config(const std::optional<std::string>& preset_name, const std::optional<std::string>& config_path,
                       const std::vector<std::string>& overrides) {
  json file_settings = json::object();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file '" + *config_path + "'");
    file_settings = json::parse(in, nullptr, false);
    if (file_settings.is_discarded() || !file_settings.is_object()) {
      throw ConfigError("config file '" + *config_path + "' is not a JSON object");
    }
  }
  std::string name = "fig1a";
  if (file_settings.contains("preset")) name = as_string("preset", file_settings["preset"]);
  if (preset_name) name = *preset_name;

  RunConfig config = preset(name);
  for (const auto& [key, value] : file_settings.items()) {
    if (key != "preset") apply_setting(config, key, value);
  }
  for (const std::string& o : overrides) apply_override(config, o);
  config.validate();
  return config;
}

ordered_json config_to_json(const RunConfig& c) {
  auto optional_value = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["preset"] = c.preset;
  j["k"] = c.physics.k;
  j["mu"] = c.physics.mu;
  j["gamma"] = c.physics.gamma;
  j["n_T"] = c.physics.n_T;
  j["g"] = c.physics.g;
  j["dt"] = c.physics.dt / kTwoPi;
  j["corr_period"] = c.physics.corr_interval / kTwoPi;
  j["periods"] = c.periods;
  j["dim_osc"] = c.dim_osc;
  j["samples_per_period"] = c.samples_per_period;
  j["chi_cut"] = c.chi_cut;
  j["feedback"] = c.switches.feedback;
  j["x2_channel"] = c.switches.x2_channel;
  j["qubit_channel"] = c.switches.qubit_channel;
  j["damping"] = c.switches.damping;
  j["epsilon"] = c.controller.epsilon;
  j["smoothing"] = c.controller.smoothing_width / kTwoPi;
  j["lookback"] = c.controller.lookback / kTwoPi;
  j["refractory"] = c.controller.refractory / kTwoPi;
  j["curvature_floor"] = c.controller.curvature_floor;
  j["n_high"] = c.controller.n_high;
  j["n_low"] = c.controller.n_low;
  j["n_dormant_high"] = c.controller.n_dormant_high;
  j["x0"] = c.initial.x0;
  j["p0"] = c.initial.p0;
  j["initial_parity"] = c.initial.parity;
  j["est_x0"] = optional_value(c.initial.est_x0);
  j["est_p0"] = optional_value(c.initial.est_p0);
  j["est_P"] = c.initial.est_P;
  return j;
}

RunConfig config_from_json(const json& snapshot) {
  if (!snapshot.is_object()) throw ConfigError("config snapshot must be a JSON object");
  RunConfig config = preset(snapshot.contains("preset") ? as_string("preset", snapshot["preset"]) : "fig1a");
  for (const auto& [key, value] : snapshot.items()) {
    if (key != "preset") apply_setting(config, key, value);
  }
  return config;
}

}  // namespace catlock
