#include "fairalloc/domain.hpp"

#include <numeric>

namespace fairalloc {

Catalog::Catalog(std::vector<Seller> sellers) : sellers_(std::move(sellers)) {
  offsets_.reserve(sellers_.size());
  for (const Seller& s : sellers_) {
    offsets_.push_back(total_items_);
    total_items_ += s.prices.size();
  }
}

double Catalog::mean_price(std::size_t seller) const {
  const std::vector<double>& prices = sellers_[seller].prices;
  if (prices.empty()) return 0.0;
  const double sum = std::accumulate(prices.begin(), prices.end(), 0.0);
  return sum / static_cast<double>(prices.size());
}

ItemRef Catalog::item_at(std::size_t flat) const {
  if (flat >= total_items_) {
    throw std::out_of_range("Catalog::item_at: flat index out of range");
  }
  std::size_t seller = 0;
  while (seller + 1 < offsets_.size() && offsets_[seller + 1] <= flat) {
    ++seller;
  }
  return ItemRef{static_cast<std::uint32_t>(seller),
                 static_cast<std::uint32_t>(flat - offsets_[seller])};
}

double basis_outcome(const OutcomeEvent& event, OutcomeBasis basis) {
  switch (basis) {
    case OutcomeBasis::Click: return event.clicked ? 1.0 : 0.0;
    case OutcomeBasis::Purchase: return event.purchased ? 1.0 : 0.0;
    case OutcomeBasis::Revenue: return event.revenue;
  }
  throw std::logic_error("unreachable outcome basis");
}

namespace {

ValidationResult fail(ValidationIssue issue, std::string detail) {
  return ValidationResult{issue, std::move(detail)};
}

}  // namespace

ValidationResult validate(const Catalog& catalog, const RegularizerSpec& spec) {
  const std::size_t m = catalog.seller_count();
  if (m < 1) {
    return fail(ValidationIssue::EmptyCatalog, "catalog has no sellers");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (catalog.items_of(j) < 1) {
      return fail(ValidationIssue::EmptyCatalog,
                  "seller " + std::to_string(j) + " has no items");
    }
    for (double p : catalog.sellers()[j].prices) {
      if (p < 0.0) {
        return fail(ValidationIssue::NegativeParameter,
                    "negative price for seller " + std::to_string(j));
      }
    }
  }
  if (catalog.item_count() < 2) {
    return fail(ValidationIssue::EmptyCatalog, "catalog needs at least 2 items");
  }

  if (spec.kind != RegularizerKind::None) {
    if (spec.alpha.size() != m) {
      return fail(ValidationIssue::DimensionMismatch,
                  "alpha length " + std::to_string(spec.alpha.size()) +
                      " != seller count " + std::to_string(m));
    }
    if (spec.beta.size() != m) {
      return fail(ValidationIssue::DimensionMismatch,
                  "beta length " + std::to_string(spec.beta.size()) +
                      " != seller count " + std::to_string(m));
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (spec.alpha[j] < 0.0) {
        return fail(ValidationIssue::NegativeParameter,
                    "alpha[" + std::to_string(j) + "] is negative");
      }
      if (spec.beta[j] < 0.0) {
        return fail(ValidationIssue::NegativeParameter,
                    "beta[" + std::to_string(j) + "] is negative");
      }
    }
    if (spec.kind == RegularizerKind::MaxMin) {
      for (std::size_t j = 1; j < m; ++j) {
        if (spec.beta[j] != spec.beta[0]) {
          return fail(ValidationIssue::MaxMinSharedBeta,
                      "max-min regularizer requires a single shared beta");
        }
      }
    }
  }
  return ValidationResult{};
}

void validate_or_throw(const Catalog& catalog, const RegularizerSpec& spec) {
  const ValidationResult result = validate(catalog, spec);
  if (!result.ok()) throw ValidationError(result);
}

}  // namespace fairalloc
