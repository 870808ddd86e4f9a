#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "catlock/controller.hpp"
#include "catlock/params.hpp"

namespace catlock {

struct SimulationSwitches {
  bool x2_channel = true;
  bool qubit_channel = true;
  bool damping = true;
  bool feedback = true;
};

struct InitialConditions {
  double x0 = 6.0;  // packet centre, x̃ units
  double p0 = 0.0;
  std::string parity = "random";  // random | even | odd
  std::optional<double> est_x0;   // defaults to x0
  std::optional<double> est_p0;   // defaults to p0
  double est_P = 0.5;
};

/// Everything needed to reproduce a run. Times are stored in units of 1/nu;
/// the user-facing keys take effective periods.
struct RunConfig {
  std::string preset = "fig1a";
  PhysicalParams physics;
  ControllerConfig controller;
  SimulationSwitches switches;
  InitialConditions initial;
  double chi_cut = 1e-8;
  int dim_osc = 128;
  double periods = 30.0;
  int samples_per_period = 100;

  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // explicit ensemble seed list
  int n_traj = 1;
  int parallelism = 1;

  /// Throws ConfigError on violations; returns regime warnings.
  std::vector<std::string> validate() const;

  double duration() const { return periods * kTwoPi; }
  double estimator_x0() const { return initial.est_x0.value_or(initial.x0); }
  double estimator_p0() const { return initial.est_p0.value_or(initial.p0); }
  std::vector<std::uint64_t> ensemble_seeds() const;
};

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

/// Applies one user-facing key. Throws ConfigError naming the key when it is
/// unknown or the value has the wrong type.
void apply_setting(RunConfig& config, const std::string& key, const nlohmann::json& value);

/// Parses "key=value"; the value is read as JSON when possible, else as a string.
void apply_override(RunConfig& config, const std::string& assignment);

/// Preset defaults < config file < CLI overrides. The file may name a preset.
RunConfig parse_config(const std::optional<std::string>& preset_name, const std::optional<std::string>& config_path,
                       const std::vector<std::string>& overrides);

/// Canonical snapshot (user-facing units, fixed key order).
nlohmann::ordered_json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& snapshot);

}  // namespace catlock
