#include "fairalloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairalloc/regularizer.hpp"

namespace fairalloc {

HindsightInstance::HindsightInstance(Catalog catalog, RegularizerSpec spec,
                                     std::uint64_t horizon, std::vector<double> rates,
                                     std::size_t rate_rows)
    : catalog_(std::move(catalog)),
      spec_(std::move(spec)),
      horizon_(horizon),
      rates_(std::move(rates)),
      rate_rows_(rate_rows) {
  if (rate_rows_ != 1 && rate_rows_ != horizon_) {
    throw std::invalid_argument("HindsightInstance: rate rows must be 1 or horizon");
  }
  if (rates_.size() != rate_rows_ * catalog_.item_count()) {
    throw std::invalid_argument("HindsightInstance: rate matrix size mismatch");
  }
  for (double c : rates_) {
    if (c < 0.0 || c > 1.0) {
      throw std::invalid_argument("HindsightInstance: rates must lie in [0,1]");
    }
  }
  spec_ = normalize_spec(std::move(spec_), catalog_.seller_count());
  if (spec_.kind == RegularizerKind::None) {
    // no regularizer: drop any carried parameters so duals vanish
    spec_.alpha.assign(catalog_.seller_count(), 0.0);
    spec_.beta.assign(catalog_.seller_count(), 0.0);
  }
  validate_or_throw(catalog_, spec_);
}

HindsightInstance instance_from_environment(const Environment& env,
                                            const RegularizerSpec& spec,
                                            std::uint64_t horizon) {
  return HindsightInstance(env.catalog(), spec, horizon,
                           env.effective_rate(spec.basis), 1);
}

double primal_value(const HindsightInstance& instance,
                    std::span<const ItemRef> assignment) {
  if (assignment.size() != instance.horizon()) {
    throw std::invalid_argument("primal_value: assignment length must equal horizon");
  }
  const Catalog& catalog = instance.catalog();
  std::vector<double> aggregate(catalog.seller_count(), 0.0);
  double gmv = 0.0;
  for (std::uint64_t t = 0; t < instance.horizon(); ++t) {
    const ItemRef item = assignment[t];
    const double c = instance.rates_at(t)[catalog.flat_index(item)];
    gmv += catalog.price(item) * c;
    aggregate[item.seller] += c;
  }
  return gmv + regularizer_value(aggregate, instance.spec());
}

HindsightSolution brute_force_opt(const HindsightInstance& instance) {
  const Catalog& catalog = instance.catalog();
  const std::size_t h = catalog.item_count();
  const std::uint64_t horizon = instance.horizon();

  double combinations = 1.0;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    combinations *= static_cast<double>(h);
    if (combinations > 1e6) {
      throw TooLargeError("brute_force_opt: H^T exceeds 10^6 assignments");
    }
  }

  std::vector<ItemRef> items(h);
  for (std::size_t i = 0; i < h; ++i) items[i] = catalog.item_at(i);

  std::vector<std::size_t> digits(horizon, 0);
  std::vector<ItemRef> assignment(horizon, items.empty() ? ItemRef{} : items[0]);
  std::vector<ItemRef> best_assignment;
  double best_value = -std::numeric_limits<double>::infinity();

  while (true) {
    for (std::uint64_t t = 0; t < horizon; ++t) assignment[t] = items[digits[t]];
    const double value = primal_value(instance, assignment);
    if (value > best_value) {
      best_value = value;
      best_assignment = assignment;
    }
    // odometer increment
    std::uint64_t pos = 0;
    while (pos < horizon) {
      if (++digits[pos] < h) break;
      digits[pos] = 0;
      ++pos;
    }
    if (pos == horizon) break;
  }

  HindsightSolution solution;
  solution.assignment = std::move(best_assignment);
  solution.objective = primal_value(instance, solution.assignment);
  solution.dual_value = solution.objective;
  return solution;
}

namespace {

// Dual objective at lambda (including the sum_j alpha_j beta_j constant the
// primal regularizer saturates to) and its subgradient.
struct DualEvaluation {
  double value = 0.0;
  std::vector<double> gradient;
};

DualEvaluation evaluate_dual(const HindsightInstance& instance,
                             std::span<const double> lambda) {
  const Catalog& catalog = instance.catalog();
  const RegularizerSpec& spec = instance.spec();
  DualEvaluation eval;
  eval.gradient.assign(catalog.seller_count(), 0.0);

  const std::uint64_t distinct_rows = instance.rate_rows() == 1 ? 1 : instance.horizon();
  const double multiplicity =
      instance.rate_rows() == 1 ? static_cast<double>(instance.horizon()) : 1.0;

  for (std::uint64_t row = 0; row < distinct_rows; ++row) {
    const std::span<const double> rates = instance.rates_at(row);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_flat = 0;
    std::size_t best_seller = 0;
    std::size_t flat = 0;
    for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
      const Seller& seller = catalog.sellers()[j];
      for (std::size_t k = 0; k < seller.prices.size(); ++k, ++flat) {
        const double f = (seller.prices[k] + lambda[j]) * rates[flat];
        if (f > best) {
          best = f;
          best_flat = flat;
          best_seller = j;
        }
      }
    }
    eval.value += multiplicity * best;
    eval.gradient[best_seller] += multiplicity * rates[best_flat];
  }

  for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
    eval.value += spec.alpha[j] * (spec.beta[j] - lambda[j]);
    eval.gradient[j] -= spec.alpha[j];
  }
  return eval;
}

std::vector<ItemRef> induced_assignment(const HindsightInstance& instance,
                                        std::span<const double> lambda) {
  const Catalog& catalog = instance.catalog();
  std::vector<ItemRef> assignment(instance.horizon());
  for (std::uint64_t t = 0; t < instance.horizon(); ++t) {
    const std::span<const double> rates = instance.rates_at(t);
    double best = -std::numeric_limits<double>::infinity();
    ItemRef best_item;
    std::size_t flat = 0;
    for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
      const Seller& seller = catalog.sellers()[j];
      for (std::size_t k = 0; k < seller.prices.size(); ++k, ++flat) {
        const double f = (seller.prices[k] + lambda[j]) * rates[flat];
        if (f > best) {
          best = f;
          best_item = ItemRef{static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)};
        }
      }
    }
    assignment[t] = best_item;
  }
  return assignment;
}

}  // namespace

double dual_objective(const HindsightInstance& instance, std::span<const double> lambda) {
  if (lambda.size() != instance.catalog().seller_count()) {
    throw std::invalid_argument("dual_objective: lambda length != seller count");
  }
  return evaluate_dual(instance, lambda).value;
}

HindsightSolution dual_solve_offline(const HindsightInstance& instance,
                                     std::size_t iterations) {
  if (iterations < 1) {
    throw std::invalid_argument("dual_solve_offline: iterations must be >= 1");
  }
  const RegularizerSpec& spec = instance.spec();
  if (spec.kind == RegularizerKind::MaxMin) {
    throw std::invalid_argument(
        "dual_solve_offline: max-min duals live on a scaled simplex, not the "
        "per-seller box; only the above-target family is supported");
  }
  const std::size_t m = instance.catalog().seller_count();
  const std::vector<Interval> boxes = dual_box(spec);
  double diameter = 0.0;
  for (const Interval& box : boxes) diameter = std::max(diameter, box.hi);

  std::vector<double> lambda(m, 0.0);
  double best_dual = std::numeric_limits<double>::infinity();

  for (std::size_t i = 1; i <= iterations; ++i) {
    const DualEvaluation eval = evaluate_dual(instance, lambda);
    best_dual = std::min(best_dual, eval.value);
    if (diameter == 0.0) break;  // box is {0}: nothing to move
    double norm = 0.0;
    for (double g : eval.gradient) norm += g * g;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;  // interior minimizer reached
    // normalized step: subgradient magnitudes scale with the horizon, so the
    // raw D/sqrt(i) schedule would bounce between box corners on long instances
    const double step = diameter / (norm * std::sqrt(static_cast<double>(i)));
    for (std::size_t j = 0; j < m; ++j) {
      lambda[j] = std::clamp(lambda[j] - step * eval.gradient[j], boxes[j].lo, boxes[j].hi);
    }
  }
  best_dual = std::min(best_dual, evaluate_dual(instance, lambda).value);

  HindsightSolution solution;
  solution.assignment = induced_assignment(instance, lambda);
  solution.objective = primal_value(instance, solution.assignment);
  solution.lambda_star = std::move(lambda);
  solution.dual_value = best_dual;
  return solution;
}

double average_regret(double hindsight_value, double realized_objective,
                      std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("average_regret: horizon must be >= 1");
  return (hindsight_value - realized_objective) / static_cast<double>(horizon);
}

}  // namespace fairalloc
