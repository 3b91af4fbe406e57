#include "fairalloc/predictor.hpp"

#include "fairalloc/environment.hpp"

namespace fairalloc {

OracleEstimator::OracleEstimator(const Environment& env, OutcomeBasis basis)
    : rates_(env.effective_rate(basis)) {}

RateEstimate OracleEstimator::predict(const ContextToken&, const Catalog& catalog) const {
  if (catalog.item_count() != rates_.size()) {
    throw UnknownItemError("oracle estimator wired to a different catalog");
  }
  return rates_;
}

EmpiricalMeanEstimator::EmpiricalMeanEstimator(const Catalog& catalog, OutcomeBasis basis,
                                               double prior_success, double prior_failure,
                                               std::uint64_t cadence)
    : success_is_click_(basis == OutcomeBasis::Click),
      prior_success_(prior_success),
      prior_failure_(prior_failure),
      cadence_(cadence < 1 ? 1 : cadence),
      active_displays_(catalog.item_count(), 0),
      active_successes_(catalog.item_count(), 0),
      staged_displays_(catalog.item_count(), 0),
      staged_successes_(catalog.item_count(), 0) {
  if (prior_success_ < 0.0 || prior_failure_ < 0.0 ||
      prior_success_ + prior_failure_ <= 0.0) {
    throw std::invalid_argument("EmpiricalMeanEstimator: priors must be nonnegative "
                                "with a positive sum");
  }
  offsets_.reserve(catalog.seller_count());
  std::size_t offset = 0;
  for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
    offsets_.push_back(offset);
    offset += catalog.items_of(j);
  }
}

RateEstimate EmpiricalMeanEstimator::predict(const ContextToken&,
                                             const Catalog& catalog) const {
  if (catalog.item_count() != active_displays_.size()) {
    throw UnknownItemError("estimator counts sized for a different catalog");
  }
  RateEstimate chat(active_displays_.size());
  for (std::size_t i = 0; i < chat.size(); ++i) {
    chat[i] = (static_cast<double>(active_successes_[i]) + prior_success_) /
              (static_cast<double>(active_displays_[i]) + prior_success_ + prior_failure_);
  }
  return chat;
}

void EmpiricalMeanEstimator::observe(const OutcomeEvent& event) {
  if (event.displayed.seller >= offsets_.size()) {
    throw UnknownItemError("observe: seller index out of range");
  }
  const std::size_t flat = offsets_[event.displayed.seller] + event.displayed.item;
  if (flat >= staged_displays_.size()) {
    throw UnknownItemError("observe: item index out of range");
  }
  const bool success = success_is_click_ ? event.clicked : event.purchased;
  if (cadence_ == 1) {
    active_displays_[flat] += 1;
    if (success) active_successes_[flat] += 1;
    return;
  }

  if (staged_displays_[flat] == 0) touched_.push_back(flat);
  staged_displays_[flat] += 1;
  if (success) staged_successes_[flat] += 1;

  if (event.round % cadence_ == 0) {
    for (std::size_t i : touched_) {
      active_displays_[i] += staged_displays_[i];
      active_successes_[i] += staged_successes_[i];
      staged_displays_[i] = 0;
      staged_successes_[i] = 0;
    }
    touched_.clear();
  }
}

}  // namespace fairalloc
