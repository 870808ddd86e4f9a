#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "catlock/config.hpp"
#include "catlock/errors.hpp"
#include "catlock/orchestrator.hpp"
#include "catlock/record_io.hpp"

namespace fs = std::filesystem;
using namespace catlock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;  // file, or an existing directory
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--preset", o.preset, "Preset name (fig1a, fig1d)");
  cmd->add_option("--config", o.config_path, "JSON config file with flat keys")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override a key, e.g. --set gamma=0.01 (repeatable)");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--out", o.out, "Output file or existing directory");
}

RunConfig load(const CommonOptions& o, std::vector<std::string> extra = {}) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  return parse_config(o.preset.empty() ? std::nullopt : std::optional<std::string>(o.preset),
                      o.config_path.empty() ? std::nullopt : std::optional<std::string>(o.config_path), overrides);
}

fs::path output_dir() {
  const char* env = std::getenv("CATLOCK_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::current_path();
}

fs::path resolve_output(const std::string& requested, const std::string& fallback_name) {
  if (!requested.empty()) {
    // an existing directory takes the default file name
    return fs::is_directory(requested) ? fs::path(requested) / fallback_name : fs::path(requested);
  }
  fs::path dir = output_dir();
  fs::create_directories(dir);
  return dir / fallback_name;
}

void print_warnings(const RunConfig& c) {
  for (const std::string& w : c.validate()) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const CommonOptions& o) {
  RunConfig config = load(o);
  print_warnings(config);
  TrajectoryRecord record = run_trajectory(config, config.seed);
  const fs::path path = resolve_output(o.out, config.preset + "_seed" + std::to_string(config.seed) + ".ndjson");
  write_records(record, path.string());
  const TrajectoryMetrics m = compute_metrics(record);
  std::cout << path.string() << "\n";
  std::cerr << "rows " << record.rows.size() << ", x2 rms ratio " << m.x2_rms_ratio << ", parity agreement "
            << m.parity_agreement << ", mean purity " << m.mean_purity << ", emissions " << m.emissions
            << ", filter resets " << record.filter_resets << "\n";
  return kExitOk;
}

std::vector<std::string> split_seeds(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_ensemble(const CommonOptions& o, std::optional<int> n_traj, std::optional<int> parallel,
                 const std::string& seeds, const std::string& records_dir) {
  std::vector<std::string> extra;
  if (n_traj) extra.push_back("n_traj=" + std::to_string(*n_traj));
  if (parallel) extra.push_back("parallelism=" + std::to_string(*parallel));
  if (!seeds.empty()) {
    std::string list = "[";
    for (const std::string& s : split_seeds(seeds)) list += (list.size() > 1 ? "," : "") + s;
    extra.push_back("seeds=" + list + "]");
  }
  RunConfig config = load(o, extra);
  print_warnings(config);

  std::function<void(const TrajectoryRecord&)> sink;
  if (!records_dir.empty()) {
    fs::create_directories(records_dir);
    sink = [&](const TrajectoryRecord& r) {
      write_records(r, (fs::path(records_dir) / (config.preset + "_seed" + std::to_string(r.seed) + ".ndjson")).string());
    };
  }
  const EnsembleSummary summary = ensemble_run(config, sink);
  nlohmann::ordered_json j = summary_to_json(summary);
  j["config"] = config_to_json(config);

  const fs::path path = resolve_output(o.out, config.preset + "_ensemble.json");
  std::ofstream out(path);
  if (!out) throw RecordIoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << "\n";
  std::cout << path.string() << "\n";
  for (const SeedFailure& f : summary.failures) std::cerr << "seed " << f.seed << " failed: " << f.error << "\n";
  return summary.failures.empty() ? kExitOk : kExitNumerical;
}

int cmd_presets() {
  for (const std::string& name : preset_names()) {
    std::cout << config_to_json(preset(name)).dump() << "\n";
  }
  return kExitOk;
}

int cmd_validate(const CommonOptions& o) {
  RunConfig config = load(o);
  for (const std::string& w : config.validate()) std::cout << "warning: " << w << "\n";
  std::cout << config_to_json(config).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop simulation of parity tracking and feedback on a measured oscillator"};
  app.require_subcommand(1);

  CommonOptions run_opts, ens_opts, val_opts;
  CLI::App* run = app.add_subcommand("run", "Simulate one trajectory and write an NDJSON record");
  add_common(run, run_opts);

  CLI::App* ens = app.add_subcommand("ensemble", "Simulate many seeds and write summary statistics");
  add_common(ens, ens_opts);
  std::optional<int> n_traj, parallel;
  std::string seeds, records_dir;
  ens->add_option("--n-traj", n_traj, "Number of trajectories (seeds seed..seed+n-1)");
  ens->add_option("--parallel", parallel, "Worker threads");
  ens->add_option("--seeds", seeds, "Comma-separated explicit seed list");
  ens->add_option("--records-dir", records_dir, "Also write one NDJSON record per seed here");

  app.add_subcommand("presets", "List presets as JSON lines");
  CLI::App* val = app.add_subcommand("validate-config", "Resolve and check a configuration");
  add_common(val, val_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (ens->parsed()) return cmd_ensemble(ens_opts, n_traj, parallel, seeds, records_dir);
    if (val->parsed()) return cmd_validate(val_opts);
    return cmd_presets();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
