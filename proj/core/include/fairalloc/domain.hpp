#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairalloc {

/// Dense (seller, item) index into a Catalog. Sellers are numbered 0..m-1,
/// items 0..K_j-1 within their seller; external string ids map through a
/// dictionary built at ingestion time.
struct ItemRef {
  std::uint32_t seller = 0;
  std::uint32_t item = 0;

  friend auto operator<=>(const ItemRef&, const ItemRef&) = default;
};

struct Seller {
  std::vector<double> prices;  // unit revenue per item, one entry per item

  friend bool operator==(const Seller&, const Seller&) = default;
};

/// Immutable seller/item/price index space. Flat item indices run over
/// sellers in order, items within a seller in order.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Seller> sellers);

  std::size_t seller_count() const { return sellers_.size(); }
  std::size_t item_count() const { return total_items_; }
  std::size_t items_of(std::size_t seller) const {
    return sellers_[seller].prices.size();
  }
  double price(ItemRef ref) const {
    return sellers_[ref.seller].prices[ref.item];
  }
  double mean_price(std::size_t seller) const;

  std::size_t flat_index(ItemRef ref) const {
    return offsets_[ref.seller] + ref.item;
  }
  ItemRef item_at(std::size_t flat) const;

  const std::vector<Seller>& sellers() const { return sellers_; }

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  std::vector<Seller> sellers_;
  std::vector<std::size_t> offsets_;
  std::size_t total_items_ = 0;
};

enum class RegularizerKind { None, AboveTarget, MaxMin };
enum class OutcomeBasis { Click, Purchase, Revenue };

/// Which concave regularizer r(a) is active and its per-seller parameters.
/// alpha/beta must have one entry per seller (kind=None ignores both).
struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::None;
  OutcomeBasis basis = OutcomeBasis::Click;
  std::vector<double> alpha;  // per-seller outcome target
  std::vector<double> beta;   // per-seller weight; MaxMin requires one shared value

  friend bool operator==(const RegularizerSpec&, const RegularizerSpec&) = default;
};

/// Per-seller dual variables, box-constrained to [0, beta_j].
struct DualState {
  std::vector<double> lambda;

  friend bool operator==(const DualState&, const DualState&) = default;
};

/// Realized outcome of one display. purchased implies clicked; revenue is
/// the item price iff purchased, otherwise 0.
struct OutcomeEvent {
  std::uint64_t round = 0;
  ItemRef displayed;
  bool clicked = false;
  bool purchased = false;
  double revenue = 0.0;
};

/// The event's outcome measured in basis units: 0/1 click, 0/1 purchase,
/// or the realized revenue.
double basis_outcome(const OutcomeEvent& event, OutcomeBasis basis);

enum class ValidationIssue {
  None,
  EmptyCatalog,       // m < 1, some K_j < 1, or total item count < 2
  DimensionMismatch,  // alpha/beta length != m
  NegativeParameter,  // negative price, alpha or beta
  MaxMinSharedBeta,   // MaxMin requires all beta_j equal
};

struct ValidationResult {
  ValidationIssue issue = ValidationIssue::None;
  std::string detail;

  bool ok() const { return issue == ValidationIssue::None; }
};

/// Joint invariant check for a catalog and regularizer spec.
ValidationResult validate(const Catalog& catalog, const RegularizerSpec& spec);

struct ValidationError : std::invalid_argument {
  explicit ValidationError(const ValidationResult& result)
      : std::invalid_argument(result.detail), issue(result.issue) {}
  ValidationIssue issue;
};

/// Throwing form of validate() for entry points that cannot proceed.
void validate_or_throw(const Catalog& catalog, const RegularizerSpec& spec);

}  // namespace fairalloc
