#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/config.hpp"
#include "fairalloc/engine.hpp"
#include "fairalloc/metrics.hpp"

namespace fairalloc {

/// epsilon-greedy revenue ranking with no fairness regularizer: with
/// probability epsilon display a uniformly random item, otherwise the
/// argmax of p * chat. Uses the same estimator machinery and outcome
/// accounting as the engine so comparisons are like for like.
EpisodeResult run_benchmark(const RunConfig& config, const Environment& env,
                            Estimator& estimator, const EpisodeOptions& options = {});

/// One above-target spec per multiplier with beta_j = multiplier * mean item
/// price of seller j.
std::vector<RegularizerSpec> beta_multipliers_to_spec(const Catalog& catalog,
                                                      std::span<const double> multipliers,
                                                      std::span<const double> alpha,
                                                      OutcomeBasis basis);

struct SweepPoint {
  double multiplier = 0.0;
  double gmv_mean = 0.0;
  double gmv_stderr = 0.0;
  double rel_gmv_mean = 0.0;  // paired (gmv_alg - gmv_bench) / gmv_bench
  double rel_gmv_stderr = 0.0;
  double at_target_mean = 0.0;
  double at_target_stderr = 0.0;
  double objective_mean = 0.0;
  double objective_stderr = 0.0;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

/// Aggregated beta/p sweep against the paired benchmark baseline. Raw
/// per-run metrics are kept so the aggregate rows can be reproduced from
/// them alone.
struct SweepReport {
  std::string baseline;
  double benchmark_gmv_mean = 0.0;
  double benchmark_gmv_stderr = 0.0;
  double benchmark_at_target_mean = 0.0;
  double benchmark_at_target_stderr = 0.0;
  std::vector<SweepPoint> points;
  std::vector<RunMetrics> benchmark_runs;              // one per seed
  std::vector<std::vector<RunMetrics>> algorithm_runs; // [multiplier][seed]

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

/// Pure re-aggregation of raw run metrics into sweep rows.
std::vector<SweepPoint> aggregate_sweep(const std::vector<RunMetrics>& benchmark_runs,
                                        const std::vector<std::vector<RunMetrics>>& algorithm_runs,
                                        std::span<const double> multipliers);

/// Runs the engine for every (multiplier, seed) pair plus the benchmark per
/// seed on one shared environment, in parallel across runs.
SweepReport run_sweep(const SweepConfig& config);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;  // +inf on the overflow bin
  std::uint64_t count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Per-seller click-count histogram over the given bin edges, summed across
/// the runs; values at or above the last edge land in an overflow bin.
std::vector<HistogramBin> export_histogram(const std::vector<RunMetrics>& runs,
                                           std::span<const double> edges);

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);
void write_summary_json(std::ostream& out, const SweepReport& report);
std::string run_metrics_json(const RunMetrics& metrics, int indent = 2);

}  // namespace fairalloc
