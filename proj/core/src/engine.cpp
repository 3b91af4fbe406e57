#include "fairalloc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fairalloc/text.hpp"
#include "episode_accounting.hpp"

namespace fairalloc {

ScoreBoard rank_scores(const Catalog& catalog, const DualState& lambda,
                       std::span<const double> chat) {
  if (lambda.lambda.size() != catalog.seller_count() ||
      chat.size() != catalog.item_count()) {
    throw std::invalid_argument("rank_scores: dimension mismatch");
  }
  ScoreBoard board;
  board.score.resize(catalog.item_count());
  std::size_t flat = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
    const Seller& seller = catalog.sellers()[j];
    const double boost = lambda.lambda[j];
    for (std::size_t k = 0; k < seller.prices.size(); ++k, ++flat) {
      const double f = (seller.prices[k] + boost) * chat[flat];
      board.score[flat] = f;
      if (f > best_score) {  // strict: ties keep the lowest (seller, item)
        best_score = f;
        board.best_flat = flat;
        board.best = ItemRef{static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)};
      }
    }
  }
  return board;
}

SelectionDistribution selection_distribution(const ScoreBoard& scores,
                                             std::size_t total_items, double gamma_t) {
  const std::size_t n = scores.score.size();
  if (total_items < n) {
    throw InvalidHError("selection_distribution: H must be >= item count");
  }
  if (gamma_t < 0.0) {
    throw std::invalid_argument("selection_distribution: gamma_t must be >= 0");
  }
  SelectionDistribution dist;
  dist.best_flat = scores.best_flat;
  dist.prob.resize(n);
  const double h = static_cast<double>(total_items);
  const double best_score = scores.score[scores.best_flat];
  double others = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == scores.best_flat) continue;
    const double gap = best_score - scores.score[i];
    dist.prob[i] = 1.0 / (h + gamma_t * gap);
    others += dist.prob[i];
  }
  dist.prob[scores.best_flat] = 1.0 - others;
  return dist;
}

std::size_t select(const SelectionDistribution& dist, RngStream& rng) {
  return rng.categorical(dist.prob);
}

DualState dual_step(const DualState& lambda, double eta, std::span<const double> outcome,
                    std::span<const double> rate, std::span<const Interval> boxes) {
  DualState next = lambda;
  for (std::size_t j = 0; j < next.lambda.size(); ++j) {
    const double moved = next.lambda[j] - eta * (outcome[j] - rate[j]);
    next.lambda[j] = std::clamp(moved, boxes[j].lo, boxes[j].hi);
  }
  return next;
}

double gamma_at(GammaScheduleKind schedule, double gamma0, std::uint64_t round) {
  switch (schedule) {
    case GammaScheduleKind::Constant: return gamma0;
    case GammaScheduleKind::Sqrt: return gamma0 * std::sqrt(static_cast<double>(round));
    case GammaScheduleKind::Linear: return gamma0 * static_cast<double>(round);
  }
  throw std::logic_error("unreachable gamma schedule");
}

EpisodeResult run_episode(const RunConfig& config, const Environment& env,
                          Estimator& estimator, const EpisodeOptions& options) {
  const Catalog& catalog = env.catalog();
  const std::size_t m = catalog.seller_count();
  const RegularizerSpec spec = bind_regularizer(config.regularizer, m);
  validate_or_throw(catalog, spec);

  const std::vector<double> rate = bind_target_rate(config.regularizer, m, config.horizon);
  const std::vector<Interval> boxes = dual_box(spec);
  const std::size_t total_items = config.h_override
                                      ? static_cast<std::size_t>(*config.h_override)
                                      : catalog.item_count();
  if (total_items < catalog.item_count()) {
    throw InvalidHError("run_episode: h_override below catalog item count");
  }
  const double eta = config.effective_eta();

  RngStream rng(config.seed);
  DualState lambda{std::vector<double>(m, 0.0)};
  std::vector<double> lambda_sum(m, 0.0);
  detail::EpisodeAccumulator accounting(m, config.seed);

  EpisodeResult result;
  if (options.record_trace) result.trace.reserve(config.horizon);

  std::vector<double> outcome(m, 0.0);
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const RateEstimate chat = estimator.predict(ContextToken{t}, catalog);
    const ScoreBoard scores = rank_scores(catalog, lambda, chat);

    SelectionDistribution dist;
    std::size_t displayed_flat = scores.best_flat;
    if (config.exploration) {
      dist = selection_distribution(scores, total_items,
                                    gamma_at(config.gamma_schedule, config.gamma0, t));
      displayed_flat = select(dist, rng);
    }
    const ItemRef displayed = catalog.item_at(displayed_flat);

    const OutcomeEvent event = env.sample_outcome(displayed, t, rng);
    outcome[displayed.seller] = basis_outcome(event, spec.basis);
    const DualState next = dual_step(lambda, eta, outcome, rate, boxes);
    outcome[displayed.seller] = 0.0;

    if (options.observer) {
      RoundRecord record;
      record.round = t;
      record.chat = chat;
      record.scores = &scores;
      record.distribution = config.exploration ? &dist : nullptr;
      record.displayed = displayed;
      record.event = &event;
      record.lambda_before = lambda.lambda;
      record.lambda_after = next.lambda;
      options.observer->on_round(record);
    }

    estimator.observe(event);
    accounting.record(event, spec.basis);
    if (options.record_trace) {
      result.trace.push_back(TraceRow{t, displayed, event.clicked, event.purchased,
                                      event.revenue, lambda.lambda[displayed.seller]});
    }

    lambda = next;
    for (std::size_t j = 0; j < m; ++j) lambda_sum[j] += lambda.lambda[j];
  }

  result.metrics = accounting.finish(spec, std::move(lambda.lambda),
                                     std::move(lambda_sum), config.horizon);
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "round,seller,item,clicked,purchased,revenue,lambda\n";
  for (const TraceRow& row : trace) {
    out << row.round << ',' << row.displayed.seller << ',' << row.displayed.item << ','
        << (row.clicked ? 1 : 0) << ',' << (row.purchased ? 1 : 0) << ','
        << format_double(row.revenue) << ',' << format_double(row.lambda_seller) << '\n';
  }
}

}  // namespace fairalloc
