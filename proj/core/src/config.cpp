#include "fairalloc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fairalloc {

using nlohmann::json;

std::vector<double> PerSellerParam::materialize(std::size_t seller_count) const {
  if (const double* scalar = std::get_if<double>(&value)) {
    return std::vector<double>(seller_count, *scalar);
  }
  return std::get<std::vector<double>>(value);
}

namespace {

std::string kind_name(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::None: return "none";
    case RegularizerKind::AboveTarget: return "above_target";
    case RegularizerKind::MaxMin: return "max_min";
  }
  throw std::logic_error("unreachable regularizer kind");
}

RegularizerKind kind_from_name(const std::string& name) {
  if (name == "none") return RegularizerKind::None;
  if (name == "above_target") return RegularizerKind::AboveTarget;
  if (name == "max_min") return RegularizerKind::MaxMin;
  throw std::invalid_argument("unknown regularizer kind: " + name);
}

std::string basis_name(OutcomeBasis basis) {
  switch (basis) {
    case OutcomeBasis::Click: return "click";
    case OutcomeBasis::Purchase: return "purchase";
    case OutcomeBasis::Revenue: return "revenue";
  }
  throw std::logic_error("unreachable outcome basis");
}

OutcomeBasis basis_from_name(const std::string& name) {
  if (name == "click") return OutcomeBasis::Click;
  if (name == "purchase") return OutcomeBasis::Purchase;
  if (name == "revenue") return OutcomeBasis::Revenue;
  throw std::invalid_argument("unknown outcome basis: " + name);
}

std::string predictor_name(PredictorKind kind) {
  return kind == PredictorKind::Oracle ? "oracle" : "empirical_mean";
}

PredictorKind predictor_from_name(const std::string& name) {
  if (name == "oracle") return PredictorKind::Oracle;
  if (name == "empirical_mean") return PredictorKind::EmpiricalMean;
  throw std::invalid_argument("unknown predictor kind: " + name);
}

std::string schedule_name(GammaScheduleKind kind) {
  switch (kind) {
    case GammaScheduleKind::Constant: return "constant";
    case GammaScheduleKind::Sqrt: return "sqrt";
    case GammaScheduleKind::Linear: return "linear";
  }
  throw std::logic_error("unreachable gamma schedule");
}

GammaScheduleKind schedule_from_name(const std::string& name) {
  if (name == "constant") return GammaScheduleKind::Constant;
  if (name == "sqrt") return GammaScheduleKind::Sqrt;
  if (name == "linear") return GammaScheduleKind::Linear;
  throw std::invalid_argument("unknown gamma schedule: " + name);
}

json param_to_json(const PerSellerParam& param) {
  if (const double* scalar = std::get_if<double>(&param.value)) return json(*scalar);
  return json(std::get<std::vector<double>>(param.value));
}

PerSellerParam param_from_json(const json& j) {
  PerSellerParam param;
  if (j.is_array()) {
    param.value = j.get<std::vector<double>>();
  } else {
    param.value = j.get<double>();
  }
  return param;
}

json environment_to_json(const EnvironmentConfig& config) {
  if (const SynthSpec* synth = std::get_if<SynthSpec>(&config)) {
    return json{{"type", "synthetic"},
                {"sellers", synth->sellers},
                {"items_min", synth->items_min},
                {"items_max", synth->items_max},
                {"pareto_shape", synth->pareto_shape},
                {"price_mu", synth->price_mu},
                {"price_sigma", synth->price_sigma},
                {"rate_scale", synth->rate_scale},
                {"cvr_scale", synth->cvr_scale},
                {"noise_sigma", synth->noise_sigma},
                {"seed", synth->seed}};
  }
  return json{{"type", "brands"}, {"path", std::get<BrandsEnvConfig>(config).path}};
}

EnvironmentConfig environment_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "synthetic") {
    SynthSpec synth;
    synth.sellers = j.value("sellers", synth.sellers);
    synth.items_min = j.value("items_min", synth.items_min);
    synth.items_max = j.value("items_max", synth.items_max);
    synth.pareto_shape = j.value("pareto_shape", synth.pareto_shape);
    synth.price_mu = j.value("price_mu", synth.price_mu);
    synth.price_sigma = j.value("price_sigma", synth.price_sigma);
    synth.rate_scale = j.value("rate_scale", synth.rate_scale);
    synth.cvr_scale = j.value("cvr_scale", synth.cvr_scale);
    synth.noise_sigma = j.value("noise_sigma", synth.noise_sigma);
    synth.seed = j.value("seed", synth.seed);
    return synth;
  }
  if (type == "brands") {
    return BrandsEnvConfig{j.at("path").get<std::string>()};
  }
  throw std::invalid_argument("unknown environment type: " + type);
}

json config_to_json(const RunConfig& config) {
  json j;
  j["horizon"] = config.horizon;
  j["seed"] = config.seed;
  if (config.eta) j["eta"] = *config.eta;
  j["gamma0"] = config.gamma0;
  j["gamma_schedule"] = schedule_name(config.gamma_schedule);
  if (config.h_override) j["h_override"] = *config.h_override;
  j["exploration"] = config.exploration;
  j["predictor"] = predictor_name(config.predictor);
  j["prior_success"] = config.prior_success;
  j["prior_failure"] = config.prior_failure;
  j["retrain_cadence"] = config.retrain_cadence;
  j["benchmark_epsilon"] = config.benchmark_epsilon;
  json reg;
  reg["kind"] = kind_name(config.regularizer.kind);
  reg["outcome_basis"] = basis_name(config.regularizer.basis);
  reg["alpha"] = param_to_json(config.regularizer.alpha);
  reg["beta"] = param_to_json(config.regularizer.beta);
  if (config.regularizer.target_rate) {
    reg["target_rate"] = param_to_json(*config.regularizer.target_rate);
  }
  j["regularizer"] = std::move(reg);
  j["environment"] = environment_to_json(config.environment);
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig config;
  config.horizon = j.value("horizon", config.horizon);
  config.seed = j.value("seed", config.seed);
  if (j.contains("eta") && !j.at("eta").is_null()) {
    config.eta = j.at("eta").get<double>();
  }
  config.gamma0 = j.value("gamma0", config.gamma0);
  if (j.contains("gamma_schedule")) {
    config.gamma_schedule = schedule_from_name(j.at("gamma_schedule").get<std::string>());
  }
  if (j.contains("h_override") && !j.at("h_override").is_null()) {
    config.h_override = j.at("h_override").get<std::uint64_t>();
  }
  config.exploration = j.value("exploration", config.exploration);
  if (j.contains("predictor")) {
    config.predictor = predictor_from_name(j.at("predictor").get<std::string>());
  }
  config.prior_success = j.value("prior_success", config.prior_success);
  config.prior_failure = j.value("prior_failure", config.prior_failure);
  config.retrain_cadence = j.value("retrain_cadence", config.retrain_cadence);
  config.benchmark_epsilon = j.value("benchmark_epsilon", config.benchmark_epsilon);
  if (j.contains("regularizer")) {
    const json& reg = j.at("regularizer");
    config.regularizer.kind = kind_from_name(reg.value("kind", std::string("above_target")));
    config.regularizer.basis =
        basis_from_name(reg.value("outcome_basis", std::string("click")));
    if (reg.contains("alpha")) config.regularizer.alpha = param_from_json(reg.at("alpha"));
    if (reg.contains("beta")) config.regularizer.beta = param_from_json(reg.at("beta"));
    if (reg.contains("target_rate") && !reg.at("target_rate").is_null()) {
      config.regularizer.target_rate = param_from_json(reg.at("target_rate"));
    }
  }
  if (j.contains("environment")) {
    config.environment = environment_from_json(j.at("environment"));
  }
  return config;
}

}  // namespace

std::string to_json_text(const RunConfig& config, int indent) {
  return config_to_json(config).dump(indent);
}

RunConfig run_config_from_json_text(const std::string& text) {
  return config_from_json(json::parse(text));
}

SweepConfig sweep_config_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  SweepConfig sweep;
  sweep.base = config_from_json(j);
  if (j.contains("multipliers")) {
    sweep.multipliers = j.at("multipliers").get<std::vector<double>>();
  }
  if (j.contains("seeds")) {
    sweep.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (j.contains("max_threads")) {
    sweep.max_threads = j.at("max_threads").get<std::size_t>();
  }
  return sweep;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json_text(read_file(path));
}

SweepConfig load_sweep_config(const std::string& path) {
  return sweep_config_from_json_text(read_file(path));
}

RegularizerSpec bind_regularizer(const RegularizerConfig& config,
                                 std::size_t seller_count) {
  RegularizerSpec spec;
  spec.kind = config.kind;
  spec.basis = config.basis;
  spec.alpha = config.alpha.materialize(seller_count);
  spec.beta = config.beta.materialize(seller_count);
  return spec;
}

std::vector<double> bind_target_rate(const RegularizerConfig& config,
                                     std::size_t seller_count, std::uint64_t horizon) {
  if (config.target_rate) {
    return config.target_rate->materialize(seller_count);
  }
  if (config.kind != RegularizerKind::AboveTarget) {
    return std::vector<double>(seller_count, 0.0);
  }
  std::vector<double> alpha = config.alpha.materialize(seller_count);
  const double rounds = horizon > 0 ? static_cast<double>(horizon) : 1.0;
  for (double& a : alpha) a /= rounds;
  return alpha;
}

Environment build_environment(const EnvironmentConfig& config) {
  if (const SynthSpec* synth = std::get_if<SynthSpec>(&config)) {
    return build_synth(*synth);
  }
  const std::string& path = std::get<BrandsEnvConfig>(config).path;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open brand table: " + path);
  return environment_from_brands(read_brands_csv(in));
}

std::string check_run_config(const RunConfig& config) {
  if (config.horizon < 1) return "horizon must be >= 1";
  if (config.eta && *config.eta < 0.0) return "eta must be >= 0";
  if (config.gamma0 < 0.0) return "gamma0 must be >= 0";
  if (config.retrain_cadence < 1) return "retrain_cadence must be >= 1";
  if (config.benchmark_epsilon < 0.0 || config.benchmark_epsilon > 1.0) {
    return "benchmark_epsilon must be in [0, 1]";
  }
  return "";
}

}  // namespace fairalloc
