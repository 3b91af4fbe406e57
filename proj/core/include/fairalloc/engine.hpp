#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairalloc/config.hpp"
#include "fairalloc/domain.hpp"
#include "fairalloc/environment.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/predictor.hpp"
#include "fairalloc/regularizer.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

/// Fairness-aware rank scores f_jk = (p_jk + lambda_j) * chat_jk, flat-indexed,
/// with the argmax item (ties broken by lowest (seller, item) index).
struct ScoreBoard {
  std::vector<double> score;
  ItemRef best;
  std::size_t best_flat = 0;
};

ScoreBoard rank_scores(const Catalog& catalog, const DualState& lambda,
                       std::span<const double> chat);

struct InvalidHError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Inverse-gap selection probabilities: every non-best item jk gets
/// 1 / (H + gamma_t * (f_best - f_jk)) and the best item the residual mass,
/// which stays >= 1/H whenever H >= item count.
struct SelectionDistribution {
  std::vector<double> prob;
  std::size_t best_flat = 0;
};

SelectionDistribution selection_distribution(const ScoreBoard& scores, std::size_t total_items,
                                             double gamma_t);

/// One categorical draw from the selection distribution; returns a flat index.
std::size_t select(const SelectionDistribution& dist, RngStream& rng);

/// Projected subgradient step on the duals:
/// lambda_j' = clamp(lambda_j - eta * (outcome_j - rate_j), box_j).
DualState dual_step(const DualState& lambda, double eta, std::span<const double> outcome,
                    std::span<const double> rate, std::span<const Interval> boxes);

/// Exploration rate at round t (1-based).
double gamma_at(GammaScheduleKind schedule, double gamma0, std::uint64_t round);

/// Everything one round produced; spans and references stay valid only for
/// the duration of the observer callback.
struct RoundRecord {
  std::uint64_t round = 0;
  std::span<const double> chat;
  const ScoreBoard* scores = nullptr;
  const SelectionDistribution* distribution = nullptr;  // null when exploration is off
  ItemRef displayed;
  const OutcomeEvent* event = nullptr;
  std::span<const double> lambda_before;
  std::span<const double> lambda_after;
};

class RoundObserver {
 public:
  virtual ~RoundObserver() = default;
  virtual void on_round(const RoundRecord& record) = 0;
};

struct EpisodeOptions {
  bool record_trace = true;
  RoundObserver* observer = nullptr;
};

struct EpisodeResult {
  RunMetrics metrics;
  std::vector<TraceRow> trace;
};

/// Runs the full online loop for config.horizon rounds: predict, score,
/// explore/select, observe the outcome, dual-step, update the estimator.
/// Exploration off means the argmax item is displayed every round (pure
/// dual descent).
EpisodeResult run_episode(const RunConfig& config, const Environment& env,
                          Estimator& estimator, const EpisodeOptions& options = {});

}  // namespace fairalloc
