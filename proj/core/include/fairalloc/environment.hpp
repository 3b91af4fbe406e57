#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairalloc/domain.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

/// Ground-truth outcome model. Purchases follow a two-stage funnel:
/// clicked ~ Bernoulli(click_rate), then purchased ~ Bernoulli(
/// purchase_rate_given_click) only if clicked, so one environment serves
/// click-based and purchase-based regularizers alike.
class Environment {
 public:
  Environment(Catalog catalog, std::vector<double> click_rate,
              std::vector<double> purchase_rate_given_click);

  const Catalog& catalog() const { return catalog_; }

  double click_rate(std::size_t flat) const { return click_rate_[flat]; }
  double purchase_rate_given_click(std::size_t flat) const {
    return purchase_rate_given_click_[flat];
  }

  /// True per-item rate of the basis outcome: click rate for Click, the
  /// unconditional purchase rate (ctr * cvr|click) for Purchase and Revenue.
  std::vector<double> effective_rate(OutcomeBasis basis) const;

  OutcomeEvent sample_outcome(ItemRef item, std::uint64_t round, RngStream& rng) const;

 private:
  Catalog catalog_;
  std::vector<double> click_rate_;
  std::vector<double> purchase_rate_given_click_;
};

/// Synthetic marketplace generator. Seller popularity is Pareto-distributed
/// (heavy tail: a small share of sellers holds most of the click mass),
/// prices are log-normal, and per-item rates get log-normal noise around the
/// seller popularity, clipped to [0, 1].
struct SynthSpec {
  std::size_t sellers = 50;
  std::size_t items_min = 1;
  std::size_t items_max = 3;
  double pareto_shape = 1.2;
  double price_mu = 0.0;     // log-space mean of item prices
  double price_sigma = 0.5;  // log-space stddev of item prices
  double rate_scale = 0.05;  // mean click rate
  double cvr_scale = 0.3;    // mean purchase rate given click
  double noise_sigma = 0.3;  // log-space stddev of per-item rate noise
  std::uint64_t seed = 0;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

Environment build_synth(const SynthSpec& spec);

struct BrandRecord {
  std::string brand;
  double price = 0.0;  // mean item price
  double cvr = 0.0;    // mean per-item purchases/views
  std::uint64_t views = 0;

  friend bool operator==(const BrandRecord&, const BrandRecord&) = default;
};

/// Aggregated clickstream table, one row per retained brand, sorted by
/// brand id so the output is independent of input row order.
struct BrandTable {
  std::vector<BrandRecord> brands;
  std::uint64_t malformed_rows = 0;

  friend bool operator==(const BrandTable&, const BrandTable&) = default;
};

struct EmptyAfterFilterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses a delimited event log (header row required, columns
/// event_type,product_id,brand_id,price,user_session; event_type one of
/// view/cart/purchase) and aggregates it per brand. Malformed rows are
/// skipped and counted. Brands with fewer than min_views total item views
/// are dropped; throws EmptyAfterFilterError if nothing survives.
BrandTable ingest_evs(std::istream& log, std::uint64_t min_views = 10000);

/// One representative item per brand: brand = seller, K_j = 1, the brand
/// CVR collapsed into the click stage (purchased iff clicked).
Environment environment_from_brands(const BrandTable& table);

void write_brands_csv(std::ostream& out, const BrandTable& table);
BrandTable read_brands_csv(std::istream& in);

struct CalibrationRow {
  ItemRef item;
  double true_rate = 0.0;
  double empirical_rate = 0.0;
  double z = 0.0;
};

/// Forces `draws` displays of every item and reports empirical click
/// frequencies with z-scores against the true rates.
std::vector<CalibrationRow> calibration_report(const Environment& env,
                                               std::uint64_t draws, RngStream& rng);

void write_calibration_csv(std::ostream& out,
                           const std::vector<CalibrationRow>& rows);

}  // namespace fairalloc
