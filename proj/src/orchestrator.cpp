#include "catlock/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include "catlock/errors.hpp"

namespace catlock {

using nlohmann::ordered_json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return rng();
}

EstimatorState initial_estimate(const RunConfig& config) {
  EstimatorState est;
  est.x = config.estimator_x0();
  est.p = config.estimator_p0();
  est.Vx = 0.5;
  est.Vp = 0.5;
  est.C = 0.0;
  est.P = config.initial.est_P;
  est.P_plus = config.initial.est_P;
  est.beta = 0.0;
  return est;
}

ObserverSettings observer_settings(const RunConfig& config) {
  ObserverSettings s;
  s.physics = config.physics;
  if (!config.switches.damping) s.physics.gamma = 0.0;
  s.controller = config.controller;
  s.filter.chi_cut = config.chi_cut;
  s.feedback = config.switches.feedback;
  s.qubit_tracking = config.switches.qubit_channel;
  return s;
}

namespace {

TrajectoryRow make_row(const TrueObservables& truth, const Observer& observer, bool window = false) {
  const EstimatorState& est = observer.estimate();
  TrajectoryRow row;
  row.t = truth.t / kTwoPi;
  row.x_true = truth.abs_x;
  row.x_est = std::abs(est.x);
  row.parity_true = truth.parity;
  row.parity_est = est.parity();
  row.n_true = truth.number;
  row.n_est = observer.number_estimate();
  row.mode = to_string(observer.controller().mode());
  row.mult = observer.multiplier();
  row.x2_true = truth.x2;
  row.x2_est = observer.x2_estimate();
  row.purity = truth.purity;
  row.window = window;
  return row;
}

std::vector<TrajectoryEvent> collect_events(const TrajectoryEngine& engine) {
  std::vector<TrajectoryEvent> events;
  for (double t : engine.recorrelations()) events.push_back({"recorrelation", t / kTwoPi});
  for (const JumpEvent& j : engine.jumps()) {
    events.push_back({j.kind == JumpKind::emission ? "emission" : "absorption", j.t / kTwoPi});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const TrajectoryEvent& a, const TrajectoryEvent& b) { return a.t < b.t; });
  return events;
}

long count_steps(double span, double dt) { return std::max(1L, std::lround(span / dt)); }

}  // namespace

TrajectoryRecord run_trajectory(const RunConfig& config, std::uint64_t seed, std::shared_ptr<const OperatorSet> ops,
                                TrajectoryDetail* detail) {
  config.validate();
  if (!ops) ops = std::make_shared<const OperatorSet>(build_operators(config.dim_osc));
  if (ops->dim_osc != config.dim_osc) throw UsageError("run_trajectory: operator set does not match dim_osc");
  const PhysicalParams& ph = config.physics;

  TrajectoryRecord out;
  out.seed = seed;
  out.config = config_to_json(config);

  CatParity parity = CatParity::even;
  if (config.initial.parity == "odd") {
    parity = CatParity::odd;
  } else if (config.initial.parity == "random") {
    CounterRng parity_rng(derive_seed(seed, 2));
    parity = parity_rng.uniform() < 0.5 ? CatParity::even : CatParity::odd;
  }
  out.initial_parity = parity == CatParity::even ? "even" : "odd";

  const cplx alpha{config.initial.x0 / std::sqrt(2.0), config.initial.p0 / std::sqrt(2.0)};
  TruncatedState initial = TruncatedState::product(cat_state(alpha, parity, config.dim_osc), qubit_plus());

  EngineSwitches switches{config.switches.x2_channel, config.switches.qubit_channel, config.switches.damping};
  TrajectoryEngine engine(ops, ph, std::move(initial), derive_seed(seed, 1), switches);
  Observer observer(observer_settings(config), initial_estimate(config));

  const long total = count_steps(config.duration(), ph.dt);
  const long per_cycle = count_steps(ph.corr_interval, ph.dt);
  const long per_period = count_steps(kTwoPi, ph.dt);
  const long decimation = std::max(1L, per_period / config.samples_per_period);
  const bool windows = config.switches.qubit_channel;
  const long window_steps = count_steps(ph.tau_corr(), ph.dt);
  const double h = ph.tau_corr() / static_cast<double>(window_steps);

  auto feed = [&](const RecordSample& sample, double mult) {
    if (detail) {
      detail->record.samples.push_back(sample);
      detail->multipliers.push_back(mult);
    }
    observer.observe(sample);
  };

  out.rows.push_back(make_row(engine.observe(), observer));
  try {
    long i = 0;
    while (i < total) {
      if (windows && i % per_cycle == 0 && i + window_steps <= total) {
        engine.begin_correlation();
        for (long w = 0; w < window_steps; ++w) {
          const double mult = observer.multiplier();
          feed(engine.correlation_substep(mult, h), mult);
          ++i;
          if (w + 1 == window_steps) observer.recorrelate(ph.tau_corr());
          if (i % decimation == 0) out.rows.push_back(make_row(engine.observe(), observer, w + 1 < window_steps));
        }
        continue;
      }
      const double mult = observer.multiplier();
      feed(engine.step(mult), mult);
      ++i;
      if (i % decimation == 0) out.rows.push_back(make_row(engine.observe(), observer));
    }
  } catch (const NumericalError& e) {
    throw NumericalError("trajectory seed " + std::to_string(seed) + ": " + e.what());
  }

  out.events = collect_events(engine);
  out.filter_resets = observer.resets();
  if (detail) {
    detail->record.jumps = engine.jumps();
    detail->record.recorrelations = engine.recorrelations();
  }
  return out;
}

std::vector<EstimatorState> replay_observer(const RunConfig& config, const MeasurementRecord& record) {
  Observer observer(observer_settings(config), initial_estimate(config));
  std::vector<EstimatorState> out;
  out.reserve(record.samples.size());
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    const RecordSample& s = record.samples[i];
    observer.observe(s);
    const bool closes = s.correlating && (i + 1 == record.samples.size() || !record.samples[i + 1].correlating);
    if (closes) observer.recorrelate(config.physics.tau_corr());
    out.push_back(observer.estimate());
  }
  return out;
}

TrajectoryMetrics compute_metrics(const TrajectoryRecord& record, double transient) {
  TrajectoryMetrics m;
  std::vector<TrajectoryRow> rows;
  for (const TrajectoryRow& r : record.rows) {
    if (!r.window) rows.push_back(r);
  }
  if (rows.empty()) return m;
  double se_x2 = 0.0, sum_x2 = 0.0, se_x = 0.0, sum_x = 0.0, purity = 0.0;
  std::size_t agree = 0, late = 0, in_band = 0;
  for (const TrajectoryRow& r : rows) {
    se_x2 += (r.x2_est - r.x2_true) * (r.x2_est - r.x2_true);
    sum_x2 += r.x2_true;
    se_x += (r.x_est - r.x_true) * (r.x_est - r.x_true);
    sum_x += r.x_true;
    purity += r.purity;
    if (r.parity_est * r.parity_true > 0.0) ++agree;
    if (r.t >= transient) {
      ++late;
      if (r.n_est >= 10.0 && r.n_est <= 30.0) ++in_band;
    }
  }
  const double n = static_cast<double>(rows.size());
  m.x2_rms_ratio = std::sqrt(se_x2 / n) / (sum_x2 / n);
  m.x_rms_ratio = std::sqrt(se_x / n) / (sum_x / n);
  m.parity_agreement = static_cast<double>(agree) / n;
  m.mean_purity = purity / n;
  m.band_occupancy = late ? static_cast<double>(in_band) / static_cast<double>(late) : 0.0;
  m.emissions = static_cast<std::size_t>(
      std::count_if(record.events.begin(), record.events.end(), [](const TrajectoryEvent& e) { return e.kind == "emission"; }));
  return m;
}

Quantiles quantiles(std::vector<double> v) {
  Quantiles q;
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  auto at = [&](double f) {
    const double pos = f * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  double sum = 0.0;
  for (double x : v) sum += x;
  q.mean = sum / static_cast<double>(v.size());
  q.median = at(0.5);
  q.q10 = at(0.1);
  q.q90 = at(0.9);
  return q;
}

EnsembleSummary ensemble_run(const RunConfig& config, const std::function<void(const TrajectoryRecord&)>& sink) {
  config.validate();
  const std::vector<std::uint64_t> seeds = config.ensemble_seeds();
  auto ops = std::make_shared<const OperatorSet>(build_operators(config.dim_osc));

  std::vector<std::optional<TrajectoryRecord>> records(seeds.size());
  std::vector<std::string> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        records[i] = run_trajectory(config, seeds[i], ops);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.parallelism, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  EnsembleSummary summary;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!records[i]) {
      summary.failures.push_back({seeds[i], errors[i]});
      continue;
    }
    summary.seeds.push_back(seeds[i]);
    summary.metrics.push_back(compute_metrics(*records[i]));
    if (sink) sink(*records[i]);
    records[i].reset();
  }
  auto column = [&](double TrajectoryMetrics::*field) {
    std::vector<double> v;
    for (const TrajectoryMetrics& m : summary.metrics) v.push_back(m.*field);
    return quantiles(std::move(v));
  };
  summary.x2_rms_ratio = column(&TrajectoryMetrics::x2_rms_ratio);
  summary.x_rms_ratio = column(&TrajectoryMetrics::x_rms_ratio);
  summary.parity_agreement = column(&TrajectoryMetrics::parity_agreement);
  summary.mean_purity = column(&TrajectoryMetrics::mean_purity);
  summary.band_occupancy = column(&TrajectoryMetrics::band_occupancy);
  return summary;
}

ordered_json summary_to_json(const EnsembleSummary& s) {
  auto q = [](const Quantiles& v) {
    ordered_json j;
    j["mean"] = v.mean;
    j["median"] = v.median;
    j["q10"] = v.q10;
    j["q90"] = v.q90;
    return j;
  };
  ordered_json j;
  j["schema"] = "catlock.ensemble";
  j["schema_version"] = 1;
  j["n_ok"] = s.seeds.size();
  j["n_failed"] = s.failures.size();
  j["x2_rms_ratio"] = q(s.x2_rms_ratio);
  j["x_rms_ratio"] = q(s.x_rms_ratio);
  j["parity_agreement"] = q(s.parity_agreement);
  j["mean_purity"] = q(s.mean_purity);
  j["band_occupancy"] = q(s.band_occupancy);
  ordered_json per_seed = ordered_json::array();
  for (std::size_t i = 0; i < s.seeds.size(); ++i) {
    const TrajectoryMetrics& m = s.metrics[i];
    ordered_json e;
    e["seed"] = s.seeds[i];
    e["x2_rms_ratio"] = m.x2_rms_ratio;
    e["x_rms_ratio"] = m.x_rms_ratio;
    e["parity_agreement"] = m.parity_agreement;
    e["mean_purity"] = m.mean_purity;
    e["band_occupancy"] = m.band_occupancy;
    e["emissions"] = m.emissions;
    per_seed.push_back(e);
  }
  j["trajectories"] = per_seed;
  ordered_json failures = ordered_json::array();
  for (const SeedFailure& f : s.failures) failures.push_back({{"seed", f.seed}, {"error", f.error}});
  j["failures"] = failures;
  return j;
}

}  // namespace catlock
