#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "catlock/config.hpp"
#include "catlock/engine.hpp"
#include "catlock/fock.hpp"
#include "catlock/observer.hpp"

namespace catlock {

/// One decimated sample. Times are in effective periods.
struct TrajectoryRow {
  double t = 0.0;
  double x_true = 0.0;       // <|x̃|>
  double x_est = 0.0;        // |x̄|
  double parity_true = 0.0;  // <Π>
  double parity_est = 0.0;   // 2P - 1
  double n_true = 0.0;
  double n_est = 0.0;
  std::string mode = "dormant";
  double mult = 1.0;
  double x2_true = 0.0;
  double x2_est = 0.0;
  double purity = 1.0;
  bool window = false;  // inside a correlation window (truth entangled with the qubit)

  bool operator==(const TrajectoryRow&) const = default;
};

struct TrajectoryEvent {
  std::string kind;  // emission | absorption | recorrelation
  double t = 0.0;    // periods

  bool operator==(const TrajectoryEvent&) const = default;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string initial_parity;  // as realized
  int filter_resets = 0;
  std::vector<TrajectoryEvent> events;
  std::vector<TrajectoryRow> rows;
};

/// Optional per-step capture for tests: everything the observer saw.
struct TrajectoryDetail {
  MeasurementRecord record;
  std::vector<double> multipliers;  // multiplier in force for each record sample
};

/// Seeds the engine and the initial-parity draw independently from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Filter initialization for a config: (est_x0, est_p0, 1/2, 1/2, 0), P = P_plus = est_P.
EstimatorState initial_estimate(const RunConfig& config);
ObserverSettings observer_settings(const RunConfig& config);

/// Runs the closed-loop duty cycle for one trajectory. `ops` may be null, in
/// which case the operators are built for config.dim_osc. Engine numerical
/// failures propagate as NumericalError with the seed in the message.
TrajectoryRecord run_trajectory(const RunConfig& config, std::uint64_t seed,
                                std::shared_ptr<const OperatorSet> ops = nullptr, TrajectoryDetail* detail = nullptr);

/// Feeds a captured measurement record to a fresh observer, returning the
/// estimate after every sample. A window closes (recorrelate) after its last
/// correlating sample. Used to check that the filter depends on the
/// record alone.
std::vector<EstimatorState> replay_observer(const RunConfig& config, const MeasurementRecord& record);

/// Computed over rows outside correlation windows: there the oscillator is
/// transiently entangled with the qubit, and the filter does not model it.
struct TrajectoryMetrics {
  double x2_rms_ratio = 0.0;       // RMS(<x²>_e - <x̃²>) / mean <x̃²>
  double x_rms_ratio = 0.0;        // RMS(|x̄| - <|x̃|>) / mean <|x̃|>
  double parity_agreement = 0.0;   // fraction of rows with sign(2P-1) = sign<Π>
  double mean_purity = 0.0;
  double band_occupancy = 0.0;     // fraction of rows after the transient with n_e in [10, 30]
  std::size_t emissions = 0;
};

/// `transient` is in periods and only affects band_occupancy.
TrajectoryMetrics compute_metrics(const TrajectoryRecord& record, double transient = 5.0);

struct Quantiles {
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

Quantiles quantiles(std::vector<double> values);

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string error;
};

struct EnsembleSummary {
  std::vector<std::uint64_t> seeds;  // successful seeds, in input order
  std::vector<TrajectoryMetrics> metrics;
  std::vector<SeedFailure> failures;
  Quantiles x2_rms_ratio;
  Quantiles x_rms_ratio;
  Quantiles parity_agreement;
  Quantiles mean_purity;
  Quantiles band_occupancy;
};

/// Runs config.ensemble_seeds() on config.parallelism threads. Each finished
/// record is handed to `sink` on the calling thread, in seed order. Failed
/// seeds are reported and the ensemble continues.
EnsembleSummary ensemble_run(const RunConfig& config,
                             const std::function<void(const TrajectoryRecord&)>& sink = nullptr);

nlohmann::ordered_json summary_to_json(const EnsembleSummary& summary);

}  // namespace catlock
