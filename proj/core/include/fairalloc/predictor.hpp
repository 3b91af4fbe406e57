#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fairalloc/domain.hpp"

namespace fairalloc {

class Environment;

/// Estimated per-item rate of the target outcome, flat-indexed, all in [0,1].
using RateEstimate = std::vector<double>;

/// Opaque carrier for round context. Built-in estimators ignore it; the
/// parameter keeps context-aware models pluggable without engine changes.
struct ContextToken {
  std::uint64_t round = 0;
};

struct UnknownItemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pluggable outcome-rate estimator: predict before each selection, observe
/// after each display. One instance per episode; never mutated concurrently.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual RateEstimate predict(const ContextToken& context, const Catalog& catalog) const = 0;
  virtual void observe(const OutcomeEvent& event) = 0;
};

/// Returns the environment's true rates for the basis outcome. Test and
/// regret-benchmark wiring; ignores observations.
class OracleEstimator final : public Estimator {
 public:
  OracleEstimator(const Environment& env, OutcomeBasis basis);

  RateEstimate predict(const ContextToken& context, const Catalog& catalog) const override;
  void observe(const OutcomeEvent& event) override {}

 private:
  RateEstimate rates_;
};

/// Smoothed per-item success counts: (successes + prior_success) /
/// (displays + prior_success + prior_failure). The success signal is the
/// click or the purchase depending on the outcome basis. Observations are
/// staged and folded into the served counts every `cadence` rounds, so the
/// prediction model can be retrained periodically instead of per round.
class EmpiricalMeanEstimator final : public Estimator {
 public:
  EmpiricalMeanEstimator(const Catalog& catalog, OutcomeBasis basis,
                         double prior_success = 1.0, double prior_failure = 1.0,
                         std::uint64_t cadence = 1);

  RateEstimate predict(const ContextToken& context, const Catalog& catalog) const override;
  void observe(const OutcomeEvent& event) override;

  std::uint64_t displays(std::size_t flat) const { return active_displays_[flat]; }
  std::uint64_t successes(std::size_t flat) const { return active_successes_[flat]; }

 private:
  std::vector<std::size_t> offsets_;
  bool success_is_click_;
  double prior_success_;
  double prior_failure_;
  std::uint64_t cadence_;
  std::vector<std::uint64_t> active_displays_;
  std::vector<std::uint64_t> active_successes_;
  std::vector<std::uint64_t> staged_displays_;
  std::vector<std::uint64_t> staged_successes_;
  std::vector<std::size_t> touched_;  // flats with staged counts
};

}  // namespace fairalloc
