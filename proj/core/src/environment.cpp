#include "fairalloc/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "fairalloc/text.hpp"

namespace fairalloc {

Environment::Environment(Catalog catalog, std::vector<double> click_rate,
                         std::vector<double> purchase_rate_given_click)
    : catalog_(std::move(catalog)),
      click_rate_(std::move(click_rate)),
      purchase_rate_given_click_(std::move(purchase_rate_given_click)) {
  if (click_rate_.size() != catalog_.item_count() ||
      purchase_rate_given_click_.size() != catalog_.item_count()) {
    throw std::invalid_argument("Environment: rate vectors must match catalog item count");
  }
  for (double r : click_rate_) {
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("Environment: click rate outside [0,1]");
  }
  for (double r : purchase_rate_given_click_) {
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("Environment: purchase rate outside [0,1]");
  }
}

std::vector<double> Environment::effective_rate(OutcomeBasis basis) const {
  if (basis == OutcomeBasis::Click) return click_rate_;
  std::vector<double> rate(click_rate_.size());
  for (std::size_t i = 0; i < rate.size(); ++i) {
    rate[i] = click_rate_[i] * purchase_rate_given_click_[i];
  }
  return rate;
}

OutcomeEvent Environment::sample_outcome(ItemRef item, std::uint64_t round,
                                         RngStream& rng) const {
  const std::size_t flat = catalog_.flat_index(item);
  OutcomeEvent event;
  event.round = round;
  event.displayed = item;
  event.clicked = rng.bernoulli(click_rate_[flat]);
  if (event.clicked) {
    event.purchased = rng.bernoulli(purchase_rate_given_click_[flat]);
  }
  event.revenue = event.purchased ? catalog_.price(item) : 0.0;
  return event;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// exp(sigma*N - sigma^2/2): log-normal noise with mean 1
double lognormal_noise(RngStream& rng, double sigma) {
  if (sigma <= 0.0) return 1.0;
  return std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
}

}  // namespace

Environment build_synth(const SynthSpec& spec) {
  if (spec.sellers < 1 || spec.items_min < 1 || spec.items_max < spec.items_min ||
      spec.pareto_shape <= 0.0 || spec.rate_scale <= 0.0 || spec.cvr_scale <= 0.0 ||
      spec.price_sigma < 0.0 || spec.noise_sigma < 0.0) {
    throw std::invalid_argument("build_synth: invalid synthetic spec");
  }
  RngStream rng(spec.seed);

  std::vector<std::size_t> items(spec.sellers);
  std::vector<double> popularity(spec.sellers);
  double popularity_sum = 0.0;
  for (std::size_t j = 0; j < spec.sellers; ++j) {
    items[j] = spec.items_min +
               (spec.items_max > spec.items_min
                    ? rng.uniform_index(spec.items_max - spec.items_min + 1)
                    : 0);
    // Pareto(shape) with scale 1: w = u^{-1/shape}, u in (0,1]
    const double u = 1.0 - rng.uniform();
    popularity[j] = std::pow(u, -1.0 / spec.pareto_shape);
    popularity_sum += popularity[j];
  }
  const double popularity_mean = popularity_sum / static_cast<double>(spec.sellers);

  std::vector<Seller> sellers(spec.sellers);
  std::vector<double> ctr;
  std::vector<double> cvr;
  for (std::size_t j = 0; j < spec.sellers; ++j) {
    sellers[j].prices.resize(items[j]);
    for (std::size_t k = 0; k < items[j]; ++k) {
      sellers[j].prices[k] = std::exp(spec.price_mu + spec.price_sigma * rng.normal());
      ctr.push_back(clamp01(spec.rate_scale * (popularity[j] / popularity_mean) *
                            lognormal_noise(rng, spec.noise_sigma)));
      cvr.push_back(clamp01(spec.cvr_scale * lognormal_noise(rng, spec.noise_sigma)));
    }
  }
  return Environment(Catalog(std::move(sellers)), std::move(ctr), std::move(cvr));
}

namespace {

struct ItemAccumulator {
  std::uint64_t views = 0;
  std::uint64_t purchases = 0;
  double price_sum = 0.0;
  std::uint64_t price_rows = 0;
};

constexpr std::string_view kEvsHeader = "event_type,product_id,brand_id,price,user_session";

}  // namespace

BrandTable ingest_evs(std::istream& log, std::uint64_t min_views) {
  std::string line;
  bool saw_header = false;
  // brand -> item -> counts; std::map keeps output order independent of input
  std::map<std::string, std::map<std::string, ItemAccumulator>, std::less<>> brands;
  std::uint64_t malformed = 0;

  while (std::getline(log, line)) {
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!saw_header) {
      if (row != kEvsHeader) {
        throw std::invalid_argument("ingest_evs: missing or unexpected header, want \"" +
                                    std::string(kEvsHeader) + "\"");
      }
      saw_header = true;
      continue;
    }

    const std::vector<std::string_view> fields = split(row, ',');
    if (fields.size() != 5) {
      ++malformed;
      continue;
    }
    const std::string_view event_type = trim(fields[0]);
    const std::string_view product = trim(fields[1]);
    const std::string_view brand = trim(fields[2]);
    const std::string_view price_text = trim(fields[3]);
    if (product.empty() || brand.empty() ||
        (event_type != "view" && event_type != "cart" && event_type != "purchase")) {
      ++malformed;
      continue;
    }
    double price = 0.0;
    const auto [end, ec] =
        std::from_chars(price_text.data(), price_text.data() + price_text.size(), price);
    if (ec != std::errc() || end != price_text.data() + price_text.size() || price < 0.0) {
      ++malformed;
      continue;
    }

    ItemAccumulator& item = brands[std::string(brand)][std::string(product)];
    item.price_sum += price;
    item.price_rows += 1;
    if (event_type == "view") item.views += 1;
    if (event_type == "purchase") item.purchases += 1;
  }

  BrandTable table;
  table.malformed_rows = malformed;
  for (const auto& [brand, items] : brands) {
    std::uint64_t views = 0;
    double cvr_sum = 0.0;
    std::size_t cvr_items = 0;
    double price_sum = 0.0;
    for (const auto& [product, acc] : items) {
      views += acc.views;
      price_sum += acc.price_sum / static_cast<double>(acc.price_rows);
      if (acc.views > 0) {
        cvr_sum += std::min(1.0, static_cast<double>(acc.purchases) /
                                     static_cast<double>(acc.views));
        ++cvr_items;
      }
    }
    if (views < min_views) continue;
    BrandRecord record;
    record.brand = brand;
    record.views = views;
    record.price = price_sum / static_cast<double>(items.size());
    record.cvr = cvr_items > 0 ? cvr_sum / static_cast<double>(cvr_items) : 0.0;
    table.brands.push_back(std::move(record));
  }

  if (table.brands.empty()) {
    throw EmptyAfterFilterError("ingest_evs: no brands meet the view threshold of " +
                                std::to_string(min_views));
  }
  return table;
}

Environment environment_from_brands(const BrandTable& table) {
  std::vector<Seller> sellers;
  std::vector<double> ctr;
  sellers.reserve(table.brands.size());
  for (const BrandRecord& record : table.brands) {
    sellers.push_back(Seller{{record.price}});
    ctr.push_back(clamp01(record.cvr));
  }
  std::vector<double> cvr(ctr.size(), 1.0);  // purchase collapses onto the click stage
  return Environment(Catalog(std::move(sellers)), std::move(ctr), std::move(cvr));
}

void write_brands_csv(std::ostream& out, const BrandTable& table) {
  out << "brand,price,cvr,views\n";
  for (const BrandRecord& record : table.brands) {
    out << record.brand << ',' << format_double(record.price) << ','
        << format_double(record.cvr) << ',' << record.views << '\n';
  }
}

BrandTable read_brands_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "brand,price,cvr,views") {
    throw std::invalid_argument("read_brands_csv: missing or unexpected header");
  }
  BrandTable table;
  while (std::getline(in, line)) {
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const std::vector<std::string_view> fields = split(row, ',');
    if (fields.size() != 4) {
      throw std::invalid_argument("read_brands_csv: malformed row: " + std::string(row));
    }
    BrandRecord record;
    record.brand = std::string(trim(fields[0]));
    record.price = std::stod(std::string(fields[1]));
    record.cvr = std::stod(std::string(fields[2]));
    record.views = std::stoull(std::string(fields[3]));
    table.brands.push_back(std::move(record));
  }
  return table;
}

std::vector<CalibrationRow> calibration_report(const Environment& env,
                                               std::uint64_t draws, RngStream& rng) {
  if (draws < 1) throw std::invalid_argument("calibration_report: draws must be >= 1");
  const Catalog& catalog = env.catalog();
  std::vector<CalibrationRow> rows;
  rows.reserve(catalog.item_count());
  for (std::size_t flat = 0; flat < catalog.item_count(); ++flat) {
    const ItemRef item = catalog.item_at(flat);
    std::uint64_t clicks = 0;
    for (std::uint64_t n = 0; n < draws; ++n) {
      if (env.sample_outcome(item, n, rng).clicked) ++clicks;
    }
    CalibrationRow row;
    row.item = item;
    row.true_rate = env.click_rate(flat);
    row.empirical_rate = static_cast<double>(clicks) / static_cast<double>(draws);
    const double sd =
        std::sqrt(row.true_rate * (1.0 - row.true_rate) / static_cast<double>(draws));
    row.z = sd > 0.0 ? (row.empirical_rate - row.true_rate) / sd : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void write_calibration_csv(std::ostream& out, const std::vector<CalibrationRow>& rows) {
  out << "seller,item,true_rate,empirical_rate,z\n";
  for (const CalibrationRow& row : rows) {
    out << row.item.seller << ',' << row.item.item << ','
        << format_double(row.true_rate) << ',' << format_double(row.empirical_rate)
        << ',' << format_double(row.z) << '\n';
  }
}

}  // namespace fairalloc
