#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "fairalloc/environment.hpp"
#include "test_util.hpp"

using namespace fairalloc;
using testutil::single_item_catalog;

TEST_CASE("build_synth degenerate single item sits at the rate scale") {
  SynthSpec spec;
  spec.sellers = 1;
  spec.items_min = 1;
  spec.items_max = 1;
  spec.rate_scale = 0.05;
  spec.noise_sigma = 0.0;  // no item noise: rate = scale * (w/mean w) = scale
  spec.seed = 5;
  const Environment env = build_synth(spec);
  CHECK(env.catalog().item_count() == 1);
  CHECK(env.click_rate(0) == doctest::Approx(0.05));
}

TEST_CASE("build_synth is deterministic in the seed") {
  SynthSpec spec;
  spec.sellers = 20;
  spec.seed = 31;
  const Environment a = build_synth(spec);
  const Environment b = build_synth(spec);
  REQUIRE(a.catalog().item_count() == b.catalog().item_count());
  for (std::size_t i = 0; i < a.catalog().item_count(); ++i) {
    CHECK(a.click_rate(i) == b.click_rate(i));
    CHECK(a.purchase_rate_given_click(i) == b.purchase_rate_given_click(i));
    CHECK(a.catalog().price(a.catalog().item_at(i)) ==
          b.catalog().price(b.catalog().item_at(i)));
  }
  spec.seed = 32;
  const Environment c = build_synth(spec);
  bool differs = c.catalog().item_count() != a.catalog().item_count();
  for (std::size_t i = 0; !differs && i < std::min(a.catalog().item_count(),
                                                   c.catalog().item_count());
       ++i) {
    differs = a.click_rate(i) != c.click_rate(i);
  }
  CHECK(differs);
}

TEST_CASE("build_synth rejects invalid specs") {
  SynthSpec spec;
  spec.pareto_shape = 0.0;
  CHECK_THROWS(build_synth(spec));
  spec = SynthSpec{};
  spec.items_min = 3;
  spec.items_max = 1;
  CHECK_THROWS(build_synth(spec));
}

TEST_CASE("pareto popularity concentrates click mass in the head") {
  // 200 environments x 50 sellers = 10k popularity samples; the top 20% of
  // sellers must hold more than half of the per-seller mean click rate mass
  std::vector<double> seller_mass;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SynthSpec spec;
    spec.sellers = 50;
    spec.pareto_shape = 1.2;
    spec.seed = seed;
    const Environment env = build_synth(spec);
    const Catalog& catalog = env.catalog();
    std::size_t flat = 0;
    for (std::size_t j = 0; j < catalog.seller_count(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < catalog.items_of(j); ++k, ++flat) {
        sum += env.click_rate(flat);
      }
      seller_mass.push_back(sum / static_cast<double>(catalog.items_of(j)));
    }
  }
  std::sort(seller_mass.begin(), seller_mass.end(), std::greater<>());
  const double total = std::accumulate(seller_mass.begin(), seller_mass.end(), 0.0);
  const std::size_t head = seller_mass.size() / 5;
  const double head_mass =
      std::accumulate(seller_mass.begin(), seller_mass.begin() + head, 0.0);
  CHECK(head_mass / total > 0.5);
}

TEST_CASE("sample_outcome respects degenerate rates") {
  const Catalog catalog = single_item_catalog({2.0, 1.0});
  const Environment never(catalog, {0.0, 0.0}, {1.0, 1.0});
  RngStream rng(1);
  for (int i = 0; i < 200; ++i) {
    const OutcomeEvent event = never.sample_outcome(ItemRef{0, 0}, i, rng);
    CHECK(!event.clicked);
    CHECK(!event.purchased);
    CHECK(event.revenue == 0.0);
  }
  const Environment always(catalog, {1.0, 1.0}, {1.0, 1.0});
  for (int i = 0; i < 200; ++i) {
    const OutcomeEvent event = always.sample_outcome(ItemRef{0, 0}, i, rng);
    CHECK(event.clicked);
    CHECK(event.purchased);
    CHECK(event.revenue == 2.0);
  }
}

TEST_CASE("sample_outcome click frequency concentrates") {
  const Catalog catalog = single_item_catalog({1.0, 1.0});
  const Environment env(catalog, {0.3, 0.5}, {0.5, 0.5});
  RngStream rng(17);
  const int draws = 100000;
  int clicks = 0;
  for (int i = 0; i < draws; ++i) {
    if (env.sample_outcome(ItemRef{0, 0}, i, rng).clicked) ++clicks;
  }
  const double freq = static_cast<double>(clicks) / draws;
  const double sigma = std::sqrt(0.3 * 0.7 / draws);
  CHECK(std::abs(freq - 0.3) <= 3.0 * sigma);
}

TEST_CASE("purchase funnel never fires without a click") {
  SynthSpec spec;
  spec.sellers = 10;
  spec.rate_scale = 0.5;
  spec.cvr_scale = 0.8;
  spec.seed = 9;
  const Environment env = build_synth(spec);
  RngStream rng(2);
  for (int i = 0; i < 20000; ++i) {
    const ItemRef item =
        env.catalog().item_at(rng.uniform_index(env.catalog().item_count()));
    const OutcomeEvent event = env.sample_outcome(item, i, rng);
    if (event.purchased) CHECK(event.clicked);
    if (!event.purchased) CHECK(event.revenue == 0.0);
  }
}

namespace {

std::string evs_header() {
  return "event_type,product_id,brand_id,price,user_session\n";
}

std::string repeated_rows(const std::string& row, int count) {
  std::string out;
  for (int i = 0; i < count; ++i) out += row;
  return out;
}

}  // namespace

TEST_CASE("ingest_evs applies the view threshold") {
  std::stringstream log;
  log << evs_header();
  log << repeated_rows("view,p1,brandA,10.0,s1\n", 9999);
  log << repeated_rows("view,p2,brandB,5.0,s2\n", 10000);
  const BrandTable table = ingest_evs(log, 10000);
  REQUIRE(table.brands.size() == 1);  // 9,999 views is excluded
  CHECK(table.brands[0].brand == "brandB");
  CHECK(table.brands[0].views == 10000);
}

TEST_CASE("ingest_evs computes the per-item CVR ratio") {
  std::stringstream log;
  log << evs_header();
  log << repeated_rows("view,p1,brandA,10.0,s1\n", 10000);
  log << repeated_rows("purchase,p1,brandA,10.0,s1\n", 50);
  const BrandTable table = ingest_evs(log, 10000);
  REQUIRE(table.brands.size() == 1);
  CHECK(table.brands[0].cvr == doctest::Approx(0.005));
  CHECK(table.brands[0].price == doctest::Approx(10.0));
}

TEST_CASE("ingest_evs raises EmptyAfterFilter on empty input") {
  std::stringstream empty;
  CHECK_THROWS_AS(ingest_evs(empty, 10000), EmptyAfterFilterError);
  std::stringstream header_only(evs_header());
  CHECK_THROWS_AS(ingest_evs(header_only, 10000), EmptyAfterFilterError);
}

TEST_CASE("ingest_evs counts and skips malformed rows") {
  std::stringstream log;
  log << evs_header();
  log << repeated_rows("view,p1,brandA,1.0,s1\n", 100);
  log << "view,p1,brandA\n";                 // missing columns
  log << "teleport,p1,brandA,1.0,s1\n";      // unknown event type
  log << "view,p1,brandA,notanumber,s1\n";   // bad price
  log << "view,p1,brandA,-2.0,s1\n";         // negative price
  const BrandTable table = ingest_evs(log, 10);
  CHECK(table.malformed_rows == 4);
  REQUIRE(table.brands.size() == 1);
  CHECK(table.brands[0].views == 100);
}

TEST_CASE("ingest_evs requires the header") {
  std::stringstream log("view,p1,brandA,1.0,s1\n");
  CHECK_THROWS_AS(ingest_evs(log, 1), std::invalid_argument);
}

TEST_CASE("ingest_evs output is independent of row order") {
  const std::vector<std::string> rows = {
      "view,p1,brandA,4.0,s1\n", "purchase,p1,brandA,4.0,s1\n",
      "view,p2,brandA,6.0,s2\n", "view,p3,brandB,2.0,s3\n",
      "cart,p3,brandB,2.0,s3\n", "purchase,p3,brandB,2.0,s4\n",
      "view,p3,brandB,2.0,s5\n"};
  std::stringstream forward;
  forward << evs_header();
  for (const std::string& row : rows) forward << row;
  std::stringstream backward;
  backward << evs_header();
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) backward << *it;

  const BrandTable a = ingest_evs(forward, 1);
  const BrandTable b = ingest_evs(backward, 1);
  CHECK(a == b);
  REQUIRE(a.brands.size() == 2);
  CHECK(a.brands[0].brand == "brandA");
  // brandA: p1 cvr 1/1, p2 cvr 0/1 -> mean 0.5; price mean(4,6) = 5
  CHECK(a.brands[0].cvr == doctest::Approx(0.5));
  CHECK(a.brands[0].price == doctest::Approx(5.0));
  CHECK(a.brands[0].views == 2);
  // brandB: one item, 2 views 1 purchase
  CHECK(a.brands[1].cvr == doctest::Approx(0.5));
  CHECK(a.brands[1].views == 2);
}

TEST_CASE("brand CVRs stay in [0,1] and thresholds hold exactly") {
  std::stringstream log;
  log << evs_header();
  // purchases exceed views (attribution windows): cvr clamps to 1
  log << repeated_rows("view,p1,brandA,1.0,s1\n", 20);
  log << repeated_rows("purchase,p1,brandA,1.0,s1\n", 30);
  const BrandTable table = ingest_evs(log, 20);
  REQUIRE(table.brands.size() == 1);
  CHECK(table.brands[0].cvr <= 1.0);
  CHECK(table.brands[0].views >= 20);
}

TEST_CASE("brands CSV round-trips through write and read") {
  BrandTable table;
  table.brands = {{"brandA", 5.25, 0.005, 12000}, {"brandB", 1.0, 0.25, 10000}};
  std::stringstream buffer;
  write_brands_csv(buffer, table);
  const BrandTable parsed = read_brands_csv(buffer);
  REQUIRE(parsed.brands.size() == 2);
  CHECK(parsed.brands[0] == table.brands[0]);
  CHECK(parsed.brands[1] == table.brands[1]);
}

TEST_CASE("environment_from_brands collapses purchases onto the click stage") {
  BrandTable table;
  table.brands = {{"a", 3.0, 0.01, 10000}, {"b", 7.0, 0.02, 10000}};
  const Environment env = environment_from_brands(table);
  CHECK(env.catalog().seller_count() == 2);
  CHECK(env.catalog().item_count() == 2);
  CHECK(env.click_rate(0) == doctest::Approx(0.01));
  CHECK(env.purchase_rate_given_click(0) == 1.0);
  CHECK(env.catalog().price(ItemRef{1, 0}) == doctest::Approx(7.0));
}

TEST_CASE("calibration_report flags nothing on deterministic environments") {
  const Catalog catalog = single_item_catalog({1.0, 1.0});
  const Environment env(catalog, {0.0, 1.0}, {1.0, 1.0});
  RngStream rng(4);
  const std::vector<CalibrationRow> rows = calibration_report(env, 1000, rng);
  REQUIRE(rows.size() == 2);
  for (const CalibrationRow& row : rows) {
    CHECK(row.z == 0.0);
    CHECK(row.empirical_rate == row.true_rate);
  }
  CHECK_THROWS(calibration_report(env, 0, rng));
}

TEST_CASE("calibration z-scores concentrate within 3 sigma") {
  // mild tail and a rate floor keep every item in the CLT regime at 100k draws
  SynthSpec spec;
  spec.sellers = 100;
  spec.items_min = 1;
  spec.items_max = 2;
  spec.pareto_shape = 2.0;
  spec.rate_scale = 0.1;
  spec.seed = 77;
  const Environment env = build_synth(spec);
  RngStream rng(8);
  const std::vector<CalibrationRow> rows = calibration_report(env, 100000, rng);
  std::size_t within = 0;
  for (const CalibrationRow& row : rows) {
    if (std::abs(row.z) <= 3.0) ++within;
  }
  CHECK(static_cast<double>(within) >=
        0.99 * static_cast<double>(rows.size()));
}
