#include "fairalloc/harness.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "fairalloc/text.hpp"
#include "episode_accounting.hpp"

namespace fairalloc {

using nlohmann::json;

EpisodeResult run_benchmark(const RunConfig& config, const Environment& env,
                            Estimator& estimator, const EpisodeOptions& options) {
  const Catalog& catalog = env.catalog();
  const std::size_t m = catalog.seller_count();
  const RegularizerSpec spec = bind_regularizer(config.regularizer, m);
  validate_or_throw(catalog, spec);
  const double eps = config.benchmark_epsilon;
  if (eps < 0.0 || eps > 1.0) {
    throw std::invalid_argument("run_benchmark: epsilon must be in [0, 1]");
  }

  RngStream rng(config.seed);
  detail::EpisodeAccumulator accounting(m, config.seed);
  EpisodeResult result;
  if (options.record_trace) result.trace.reserve(config.horizon);

  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const RateEstimate chat = estimator.predict(ContextToken{t}, catalog);
    // revenue ranking: argmax p * chat, ties to the lowest flat index
    std::size_t best_flat = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t flat = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const Seller& seller = catalog.sellers()[j];
      for (std::size_t k = 0; k < seller.prices.size(); ++k, ++flat) {
        const double f = seller.prices[k] * chat[flat];
        if (f > best_score) {
          best_score = f;
          best_flat = flat;
        }
      }
    }
    std::size_t displayed_flat = best_flat;
    if (eps > 0.0 && rng.bernoulli(eps)) {
      displayed_flat = rng.uniform_index(catalog.item_count());
    }
    const ItemRef displayed = catalog.item_at(displayed_flat);
    const OutcomeEvent event = env.sample_outcome(displayed, t, rng);
    estimator.observe(event);
    accounting.record(event, spec.basis);
    if (options.record_trace) {
      result.trace.push_back(
          TraceRow{t, displayed, event.clicked, event.purchased, event.revenue, 0.0});
    }
  }

  result.metrics = accounting.finish(spec, std::vector<double>(m, 0.0),
                                     std::vector<double>(m, 0.0), config.horizon);
  return result;
}

std::vector<RegularizerSpec> beta_multipliers_to_spec(const Catalog& catalog,
                                                      std::span<const double> multipliers,
                                                      std::span<const double> alpha,
                                                      OutcomeBasis basis) {
  if (alpha.size() != catalog.seller_count()) {
    throw std::invalid_argument("beta_multipliers_to_spec: alpha length != seller count");
  }
  std::vector<RegularizerSpec> specs;
  specs.reserve(multipliers.size());
  for (double multiplier : multipliers) {
    if (multiplier < 0.0) {
      throw std::invalid_argument("beta_multipliers_to_spec: negative multiplier");
    }
    RegularizerSpec spec;
    spec.kind = RegularizerKind::AboveTarget;
    spec.basis = basis;
    spec.alpha.assign(alpha.begin(), alpha.end());
    spec.beta.resize(catalog.seller_count());
    for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
      spec.beta[j] = multiplier * catalog.mean_price(j);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

namespace {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr result;
  const std::size_t n = values.size();
  if (n == 0) return result;
  double sum = 0.0;
  for (double v : values) sum += v;
  result.mean = sum / static_cast<double>(n);
  if (n < 2) return result;
  double sq = 0.0;
  for (double v : values) sq += (v - result.mean) * (v - result.mean);
  result.stderr_ = std::sqrt(sq / static_cast<double>(n - 1)) /
                   std::sqrt(static_cast<double>(n));
  return result;
}

// Fixed-size thread pool over an index range; results land by index so the
// output is independent of completion order.
void parallel_for(std::size_t count, std::size_t max_threads,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t workers = max_threads > 0 ? max_threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min(workers, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (std::thread& t : threads) t.join();
}

std::unique_ptr<Estimator> make_estimator(const RunConfig& config, const Environment& env) {
  if (config.predictor == PredictorKind::Oracle) {
    return std::make_unique<OracleEstimator>(env, config.regularizer.basis);
  }
  return std::make_unique<EmpiricalMeanEstimator>(env.catalog(), config.regularizer.basis,
                                                  config.prior_success, config.prior_failure,
                                                  config.retrain_cadence);
}

}  // namespace

std::vector<SweepPoint> aggregate_sweep(const std::vector<RunMetrics>& benchmark_runs,
                                        const std::vector<std::vector<RunMetrics>>& algorithm_runs,
                                        std::span<const double> multipliers) {
  if (algorithm_runs.size() != multipliers.size()) {
    throw std::invalid_argument("aggregate_sweep: one run list per multiplier expected");
  }
  std::vector<SweepPoint> points;
  points.reserve(multipliers.size());
  for (std::size_t p = 0; p < multipliers.size(); ++p) {
    const std::vector<RunMetrics>& runs = algorithm_runs[p];
    if (runs.size() != benchmark_runs.size()) {
      throw std::invalid_argument("aggregate_sweep: paired seed counts differ");
    }
    std::vector<double> gmv, rel, at_target, objective;
    gmv.reserve(runs.size());
    for (std::size_t s = 0; s < runs.size(); ++s) {
      gmv.push_back(runs[s].gmv);
      at_target.push_back(static_cast<double>(runs[s].sellers_at_target));
      objective.push_back(runs[s].objective);
      const double bench = benchmark_runs[s].gmv;
      rel.push_back(bench != 0.0 ? (runs[s].gmv - bench) / bench : 0.0);
    }
    SweepPoint point;
    point.multiplier = multipliers[p];
    const MeanStderr g = mean_stderr(gmv);
    point.gmv_mean = g.mean;
    point.gmv_stderr = g.stderr_;
    const MeanStderr r = mean_stderr(rel);
    point.rel_gmv_mean = r.mean;
    point.rel_gmv_stderr = r.stderr_;
    const MeanStderr a = mean_stderr(at_target);
    point.at_target_mean = a.mean;
    point.at_target_stderr = a.stderr_;
    const MeanStderr o = mean_stderr(objective);
    point.objective_mean = o.mean;
    point.objective_stderr = o.stderr_;
    points.push_back(point);
  }
  return points;
}

SweepReport run_sweep(const SweepConfig& config) {
  if (config.seeds.empty()) {
    throw std::invalid_argument("run_sweep: at least one seed required");
  }
  const Environment env = build_environment(config.base.environment);
  const Catalog& catalog = env.catalog();
  const std::size_t m = catalog.seller_count();

  const std::vector<double> alpha = config.base.regularizer.alpha.materialize(m);
  const std::vector<RegularizerSpec> specs =
      beta_multipliers_to_spec(catalog, config.multipliers, alpha,
                               config.base.regularizer.basis);

  SweepReport report;
  report.baseline =
      "benchmark(epsilon=" + format_double(config.base.benchmark_epsilon) + ")";
  report.benchmark_runs.resize(config.seeds.size());
  report.algorithm_runs.assign(config.multipliers.size(),
                               std::vector<RunMetrics>(config.seeds.size()));

  const std::size_t seeds = config.seeds.size();
  const std::size_t tasks = seeds * (1 + config.multipliers.size());
  const EpisodeOptions options{.record_trace = false, .observer = nullptr};

  parallel_for(tasks, config.max_threads, [&](std::size_t task) {
    const std::size_t s = task % seeds;
    const std::size_t p = task / seeds;  // 0 = benchmark, else multiplier p-1
    RunConfig run = config.base;
    run.seed = config.seeds[s];
    if (p == 0) {
      // paired baseline: accounting spec carries alpha with beta pinned to 0
      run.regularizer.kind = RegularizerKind::AboveTarget;
      run.regularizer.alpha.value = alpha;
      run.regularizer.beta.value = 0.0;
      run.regularizer.target_rate.reset();
      std::unique_ptr<Estimator> estimator = make_estimator(run, env);
      report.benchmark_runs[s] = run_benchmark(run, env, *estimator, options).metrics;
    } else {
      const RegularizerSpec& spec = specs[p - 1];
      run.regularizer.kind = spec.kind;
      run.regularizer.alpha.value = spec.alpha;
      run.regularizer.beta.value = spec.beta;
      std::unique_ptr<Estimator> estimator = make_estimator(run, env);
      report.algorithm_runs[p - 1][s] = run_episode(run, env, *estimator, options).metrics;
    }
  });

  report.points = aggregate_sweep(report.benchmark_runs, report.algorithm_runs,
                                  config.multipliers);
  std::vector<double> bench_gmv, bench_at_target;
  for (const RunMetrics& metrics : report.benchmark_runs) {
    bench_gmv.push_back(metrics.gmv);
    bench_at_target.push_back(static_cast<double>(metrics.sellers_at_target));
  }
  const MeanStderr g = mean_stderr(bench_gmv);
  report.benchmark_gmv_mean = g.mean;
  report.benchmark_gmv_stderr = g.stderr_;
  const MeanStderr a = mean_stderr(bench_at_target);
  report.benchmark_at_target_mean = a.mean;
  report.benchmark_at_target_stderr = a.stderr_;
  return report;
}

std::vector<HistogramBin> export_histogram(const std::vector<RunMetrics>& runs,
                                           std::span<const double> edges) {
  if (edges.size() < 2) {
    throw std::invalid_argument("export_histogram: need at least two bin edges");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw std::invalid_argument("export_histogram: edges must be strictly increasing");
    }
  }
  std::vector<HistogramBin> bins;
  bins.reserve(edges.size());
  for (std::size_t i = 1; i < edges.size(); ++i) {
    bins.push_back(HistogramBin{edges[i - 1], edges[i], 0});
  }
  bins.push_back(
      HistogramBin{edges[edges.size() - 1], std::numeric_limits<double>::infinity(), 0});

  for (const RunMetrics& run : runs) {
    for (std::uint64_t clicks : run.clicks) {
      const double v = static_cast<double>(clicks);
      if (v < edges[0]) continue;
      for (HistogramBin& bin : bins) {
        if (v >= bin.lo && v < bin.hi) {
          bin.count += 1;
          break;
        }
      }
    }
  }
  return bins;
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_lo,bin_hi,count\n";
  for (const HistogramBin& bin : bins) {
    out << format_double(bin.lo) << ',' << format_double(bin.hi) << ',' << bin.count << '\n';
  }
}

namespace {

json metrics_to_json(const RunMetrics& metrics) {
  return json{{"gmv", metrics.gmv},
              {"objective", metrics.objective},
              {"clicks", metrics.clicks},
              {"purchases", metrics.purchases},
              {"revenue", metrics.revenue},
              {"aggregate", metrics.aggregate},
              {"sellers_at_target", metrics.sellers_at_target},
              {"lambda_final", metrics.lambda_final},
              {"lambda_mean", metrics.lambda_mean},
              {"seed", metrics.seed}};
}

}  // namespace

void write_summary_json(std::ostream& out, const SweepReport& report) {
  json points = json::array();
  for (const SweepPoint& point : report.points) {
    points.push_back(json{{"multiplier", point.multiplier},
                          {"gmv_mean", point.gmv_mean},
                          {"gmv_stderr", point.gmv_stderr},
                          {"rel_gmv_mean", point.rel_gmv_mean},
                          {"rel_gmv_stderr", point.rel_gmv_stderr},
                          {"at_target_mean", point.at_target_mean},
                          {"at_target_stderr", point.at_target_stderr},
                          {"objective_mean", point.objective_mean},
                          {"objective_stderr", point.objective_stderr}});
  }
  json benchmark_runs = json::array();
  for (const RunMetrics& metrics : report.benchmark_runs) {
    benchmark_runs.push_back(metrics_to_json(metrics));
  }
  json algorithm_runs = json::array();
  for (const std::vector<RunMetrics>& runs : report.algorithm_runs) {
    json list = json::array();
    for (const RunMetrics& metrics : runs) list.push_back(metrics_to_json(metrics));
    algorithm_runs.push_back(std::move(list));
  }
  const json j{{"baseline", report.baseline},
               {"benchmark_gmv_mean", report.benchmark_gmv_mean},
               {"benchmark_gmv_stderr", report.benchmark_gmv_stderr},
               {"benchmark_at_target_mean", report.benchmark_at_target_mean},
               {"benchmark_at_target_stderr", report.benchmark_at_target_stderr},
               {"points", points},
               {"benchmark_runs", benchmark_runs},
               {"algorithm_runs", algorithm_runs}};
  out << j.dump(2) << '\n';
}

std::string run_metrics_json(const RunMetrics& metrics, int indent) {
  return metrics_to_json(metrics).dump(indent);
}

}  // namespace fairalloc
