#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fairalloc/domain.hpp"
#include "fairalloc/environment.hpp"

namespace fairalloc {

enum class PredictorKind { Oracle, EmpiricalMean };
enum class GammaScheduleKind { Constant, Sqrt, Linear };

/// Per-seller parameter that may be written as one scalar (broadcast to all
/// sellers) or as an explicit per-seller list.
struct PerSellerParam {
  std::variant<double, std::vector<double>> value = 0.0;

  std::vector<double> materialize(std::size_t seller_count) const;

  friend bool operator==(const PerSellerParam&, const PerSellerParam&) = default;
};

struct RegularizerConfig {
  RegularizerKind kind = RegularizerKind::AboveTarget;
  OutcomeBasis basis = OutcomeBasis::Click;
  PerSellerParam alpha;
  PerSellerParam beta;
  // Optional direct per-round rate rho_j; when set it replaces alpha/T in
  // the dual update (horizon-free runs).
  std::optional<PerSellerParam> target_rate;

  friend bool operator==(const RegularizerConfig&, const RegularizerConfig&) = default;
};

struct BrandsEnvConfig {
  std::string path;

  friend bool operator==(const BrandsEnvConfig&, const BrandsEnvConfig&) = default;
};

using EnvironmentConfig = std::variant<SynthSpec, BrandsEnvConfig>;

/// One episode's full configuration; all fields are top-level keys of the
/// JSON config file (see README for the schema).
struct RunConfig {
  std::uint64_t horizon = 1;
  std::uint64_t seed = 0;
  std::optional<double> eta;  // dual step size; defaults to 1/sqrt(horizon)
  double gamma0 = 1.0;
  GammaScheduleKind gamma_schedule = GammaScheduleKind::Sqrt;
  std::optional<std::uint64_t> h_override;  // >= catalog item count
  bool exploration = true;
  PredictorKind predictor = PredictorKind::EmpiricalMean;
  double prior_success = 1.0;
  double prior_failure = 1.0;
  std::uint64_t retrain_cadence = 1;
  double benchmark_epsilon = 0.05;
  RegularizerConfig regularizer;
  EnvironmentConfig environment = SynthSpec{};

  double effective_eta() const {
    if (eta) return *eta;
    return horizon > 0 ? 1.0 / std::sqrt(static_cast<double>(horizon)) : 0.0;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Sweep grid: the base episode config plus the beta/p multipliers and the
/// seed list. Parsed from the same file (optional top-level keys
/// "multipliers" and "seeds").
struct SweepConfig {
  RunConfig base;
  std::vector<double> multipliers{0.0, 0.1, 0.2, 0.5, 1.0, 2.0};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t max_threads = 0;  // 0 = hardware concurrency

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

std::string to_json_text(const RunConfig& config, int indent = 2);
RunConfig run_config_from_json_text(const std::string& text);
SweepConfig sweep_config_from_json_text(const std::string& text);

RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);

/// Materializes the regularizer parameters against a concrete catalog.
RegularizerSpec bind_regularizer(const RegularizerConfig& config, std::size_t seller_count);

/// Per-round target rates for the dual update: the explicit target_rate
/// override when present, otherwise alpha_j / horizon.
std::vector<double> bind_target_rate(const RegularizerConfig& config,
                                     std::size_t seller_count, std::uint64_t horizon);

/// Builds the environment named by the config (synthetic spec or an
/// ingested brand table path).
Environment build_environment(const EnvironmentConfig& config);

/// Structural checks on the config itself (horizon, step sizes, h_override).
/// Returns an error message, or empty when fine.
std::string check_run_config(const RunConfig& config);

}  // namespace fairalloc
