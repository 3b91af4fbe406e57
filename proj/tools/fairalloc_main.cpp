// fairalloc CLI: single runs, beta/p sweeps, clickstream ingestion, hindsight
// oracle solves and environment calibration, driven by a JSON config file
// with flag overrides.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairalloc/config.hpp"
#include "fairalloc/engine.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/oracle.hpp"
#include "fairalloc/text.hpp"

namespace fs = std::filesystem;
using namespace fairalloc;

namespace {

struct Overrides {
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<double> gamma0;
  std::optional<std::string> schedule;
  std::optional<bool> exploration;
  std::optional<std::string> predictor;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> cadence;
};

void add_override_flags(CLI::App* cmd, Overrides& over) {
  cmd->add_option("--horizon", over.horizon, "Override the round count T");
  cmd->add_option("--seed", over.seed, "Override the run seed");
  cmd->add_option("--eta", over.eta, "Override the dual step size");
  cmd->add_option("--gamma0", over.gamma0, "Override the exploration rate gamma0");
  cmd->add_option("--schedule", over.schedule,
                  "Override the gamma schedule (constant|sqrt|linear)");
  cmd->add_option("--exploration", over.exploration,
                  "Enable or disable inverse-gap exploration");
  cmd->add_option("--predictor", over.predictor,
                  "Override the predictor (oracle|empirical_mean)");
  cmd->add_option("--epsilon", over.epsilon, "Override the benchmark epsilon");
  cmd->add_option("--cadence", over.cadence, "Override the retrain cadence");
}

void apply_overrides(RunConfig& config, const Overrides& over) {
  if (over.horizon) config.horizon = *over.horizon;
  if (over.seed) config.seed = *over.seed;
  if (over.eta) config.eta = *over.eta;
  if (over.gamma0) config.gamma0 = *over.gamma0;
  if (over.schedule) {
    RunConfig parsed = run_config_from_json_text("{\"gamma_schedule\": \"" +
                                                 *over.schedule + "\"}");
    config.gamma_schedule = parsed.gamma_schedule;
  }
  if (over.exploration) config.exploration = *over.exploration;
  if (over.predictor) {
    RunConfig parsed =
        run_config_from_json_text("{\"predictor\": \"" + *over.predictor + "\"}");
    config.predictor = parsed.predictor;
  }
  if (over.epsilon) config.benchmark_epsilon = *over.epsilon;
  if (over.cadence) config.retrain_cadence = *over.cadence;
}

void require_valid(const RunConfig& config) {
  const std::string problem = check_run_config(config);
  if (!problem.empty()) {
    throw std::invalid_argument("invalid config: " + problem);
  }
}

std::unique_ptr<Estimator> make_estimator(const RunConfig& config, const Environment& env) {
  if (config.predictor == PredictorKind::Oracle) {
    return std::make_unique<OracleEstimator>(env, config.regularizer.basis);
  }
  return std::make_unique<EmpiricalMeanEstimator>(env.catalog(), config.regularizer.basis,
                                                  config.prior_success, config.prior_failure,
                                                  config.retrain_cadence);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string multiplier_label(double multiplier) {
  std::string label = format_double(multiplier);
  for (char& c : label) {
    if (c == '.') c = '_';
  }
  return label;
}

int cmd_run(const std::string& config_path, const Overrides& over,
            const std::string& out_dir) {
  RunConfig config = load_run_config(config_path);
  apply_overrides(config, over);
  require_valid(config);

  const Environment env = build_environment(config.environment);
  std::unique_ptr<Estimator> estimator = make_estimator(config, env);
  const EpisodeResult result = run_episode(config, env, *estimator);

  const fs::path dir(out_dir);
  {
    std::ofstream trace = open_output(dir / "trace.csv");
    write_trace_csv(trace, result.trace);
  }
  {
    std::ofstream summary = open_output(dir / "summary.json");
    summary << run_metrics_json(result.metrics) << '\n';
  }
  std::cout << "rounds " << config.horizon << "  gmv " << format_double(result.metrics.gmv)
            << "  objective " << format_double(result.metrics.objective)
            << "  sellers_at_target " << result.metrics.sellers_at_target << '\n'
            << "wrote " << (dir / "trace.csv").string() << " and "
            << (dir / "summary.json").string() << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const Overrides& over,
              const std::string& out_dir, std::vector<double> multipliers,
              std::vector<std::uint64_t> seeds, std::size_t threads) {
  SweepConfig sweep = load_sweep_config(config_path);
  apply_overrides(sweep.base, over);
  require_valid(sweep.base);
  if (!multipliers.empty()) sweep.multipliers = std::move(multipliers);
  if (!seeds.empty()) sweep.seeds = std::move(seeds);
  if (threads > 0) sweep.max_threads = threads;

  const SweepReport report = run_sweep(sweep);

  const fs::path dir(out_dir);
  {
    std::ofstream summary = open_output(dir / "summary.json");
    write_summary_json(summary, report);
  }
  const std::vector<double> edges{0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  {
    std::ofstream hist = open_output(dir / "hist_benchmark.csv");
    write_histogram_csv(hist, export_histogram(report.benchmark_runs, edges));
  }
  for (std::size_t p = 0; p < sweep.multipliers.size(); ++p) {
    const fs::path path =
        dir / ("hist_beta_" + multiplier_label(sweep.multipliers[p]) + ".csv");
    std::ofstream hist = open_output(path);
    write_histogram_csv(hist, export_histogram(report.algorithm_runs[p], edges));
  }

  std::cout << "baseline " << report.baseline << ": gmv "
            << format_double(report.benchmark_gmv_mean) << ", at-target "
            << format_double(report.benchmark_at_target_mean) << '\n';
  for (const SweepPoint& point : report.points) {
    std::cout << "beta/p " << format_double(point.multiplier) << ": gmv "
              << format_double(point.gmv_mean) << " (" << format_double(point.rel_gmv_mean * 100)
              << "% vs benchmark), at-target " << format_double(point.at_target_mean)
              << " +- " << format_double(point.at_target_stderr) << '\n';
  }
  std::cout << "wrote " << (dir / "summary.json").string() << " and histograms\n";
  return 0;
}

int cmd_ingest(const std::string& input, const std::string& output,
               std::uint64_t min_views) {
  BrandTable table;
  if (input == "-") {
    table = ingest_evs(std::cin, min_views);
  } else {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open event log: " + input);
    table = ingest_evs(in, min_views);
  }
  std::ofstream out = open_output(output);
  write_brands_csv(out, table);
  std::cout << table.brands.size() << " brands retained (>= " << min_views
            << " views), " << table.malformed_rows << " malformed rows skipped; wrote "
            << output << '\n';
  return 0;
}

int cmd_oracle(const std::string& config_path, const Overrides& over,
               std::size_t iterations, bool brute_force, const std::string& out_path) {
  RunConfig config = load_run_config(config_path);
  apply_overrides(config, over);
  require_valid(config);

  const Environment env = build_environment(config.environment);
  const std::size_t m = env.catalog().seller_count();
  const RegularizerSpec spec = bind_regularizer(config.regularizer, m);
  validate_or_throw(env.catalog(), spec);
  const HindsightInstance instance = instance_from_environment(env, spec, config.horizon);

  const HindsightSolution dual = dual_solve_offline(instance, iterations);

  std::unique_ptr<Estimator> estimator = make_estimator(config, env);
  const EpisodeResult episode = run_episode(config, env, *estimator);
  std::vector<ItemRef> assignment;
  assignment.reserve(episode.trace.size());
  for (const TraceRow& row : episode.trace) assignment.push_back(row.displayed);
  const double engine_value = primal_value(instance, assignment);
  const double regret = average_regret(dual.dual_value, engine_value, config.horizon);

  nlohmann::json j{{"dual_value", dual.dual_value},
                   {"induced_primal_value", dual.objective},
                   {"lambda_star", dual.lambda_star},
                   {"engine_expected_objective", engine_value},
                   {"engine_realized_objective", episode.metrics.objective},
                   {"average_regret", regret},
                   {"iterations", iterations}};
  if (brute_force) {
    const HindsightSolution exact = brute_force_opt(instance);
    j["brute_force_value"] = exact.objective;
  }
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out = open_output(out_path);
    out << j.dump(2) << '\n';
    std::cout << "wrote " << out_path << '\n';
  }
  return 0;
}

int cmd_calibrate(const std::string& config_path, std::uint64_t draws,
                  std::uint64_t seed, const std::string& out_path) {
  const RunConfig config = load_run_config(config_path);
  const Environment env = build_environment(config.environment);
  RngStream rng(seed);
  const std::vector<CalibrationRow> rows = calibration_report(env, draws, rng);
  std::size_t within = 0;
  for (const CalibrationRow& row : rows) {
    if (std::abs(row.z) <= 3.0) ++within;
  }
  if (out_path.empty()) {
    write_calibration_csv(std::cout, rows);
  } else {
    std::ofstream out = open_output(out_path);
    write_calibration_csv(out, rows);
  }
  std::cerr << within << '/' << rows.size() << " items within 3 sigma over " << draws
            << " draws\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outcome-fair online allocation: dual gradient descent engine, "
               "marketplace simulator and hindsight oracle"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string input_path;
  std::string output_path;
  std::uint64_t min_views = 10000;
  std::size_t iterations = 5000;
  bool brute_force = false;
  std::uint64_t draws = 100000;
  std::uint64_t calib_seed = 0;
  std::vector<double> multipliers;
  std::vector<std::uint64_t> seeds;
  std::size_t threads = 0;
  Overrides over;

  CLI::App* run = app.add_subcommand("run", "Run one engine episode");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory");
  add_override_flags(run, over);

  CLI::App* sweep = app.add_subcommand("sweep", "Run the beta/p x seeds grid");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--multipliers", multipliers, "Override the beta/p multipliers");
  sweep->add_option("--seeds", seeds, "Override the seed list");
  sweep->add_option("--threads", threads, "Max concurrent runs (0 = hardware)");
  add_override_flags(sweep, over);

  CLI::App* ingest = app.add_subcommand("ingest-evs", "Aggregate an event log into a brand table");
  ingest->add_option("--input", input_path, "Event log CSV ('-' for stdin)")->required();
  ingest->add_option("--out", output_path, "Brand table CSV path")->required();
  ingest->add_option("--min-views", min_views, "View threshold for retaining a brand");

  CLI::App* oracle = app.add_subcommand("oracle", "Hindsight dual solve and engine regret");
  oracle->add_option("--config", config_path, "JSON config file")->required();
  oracle->add_option("--iterations", iterations, "Dual solver iterations");
  oracle->add_flag("--brute-force", brute_force, "Also enumerate (tiny instances only)");
  oracle->add_option("--out", output_path, "Write the report JSON here instead of stdout");
  add_override_flags(oracle, over);

  CLI::App* calibrate = app.add_subcommand("calibrate", "Empirical rate check of an environment");
  calibrate->add_option("--config", config_path, "JSON config file")->required();
  calibrate->add_option("--draws", draws, "Forced displays per item");
  calibrate->add_option("--seed", calib_seed, "Calibration RNG seed");
  calibrate->add_option("--out", output_path, "Calibration CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, over, out_dir);
    if (sweep->parsed()) {
      return cmd_sweep(config_path, over, out_dir, std::move(multipliers),
                       std::move(seeds), threads);
    }
    if (ingest->parsed()) return cmd_ingest(input_path, output_path, min_views);
    if (oracle->parsed()) {
      return cmd_oracle(config_path, over, iterations, brute_force, output_path);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(config_path, draws, calib_seed, output_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
