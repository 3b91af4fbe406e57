#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fairalloc/engine.hpp"
#include "fairalloc/oracle.hpp"
#include "test_util.hpp"

using namespace fairalloc;
using testutil::single_item_catalog;

TEST_CASE("rank_scores evaluates (p + lambda) * chat") {
  const Catalog catalog = single_item_catalog({1.0, 2.0});
  const DualState zero{{0.0, 0.0}};
  const ScoreBoard plain = rank_scores(catalog, zero, std::vector<double>{0.5, 0.1});
  CHECK(plain.score[0] == doctest::Approx(0.5));
  CHECK(plain.score[1] == doctest::Approx(0.2));
  CHECK(plain.best == ItemRef{0, 0});

  const DualState boosted{{0.0, 0.5}};
  const ScoreBoard shifted = rank_scores(catalog, boosted, std::vector<double>{0.5, 0.1});
  CHECK(shifted.score[1] == doctest::Approx(0.25));
}

TEST_CASE("rank_scores breaks ties to the lowest (seller, item) index") {
  const Catalog catalog = single_item_catalog({0.3, 0.3});
  const ScoreBoard board =
      rank_scores(catalog, DualState{{0.0, 0.0}}, std::vector<double>{1.0, 1.0});
  CHECK(board.best == ItemRef{0, 0});
  CHECK(board.best_flat == 0);
}

TEST_CASE("rank_scores rejects mismatched dimensions") {
  const Catalog catalog = single_item_catalog({1.0, 2.0});
  CHECK_THROWS(rank_scores(catalog, DualState{{0.0}}, std::vector<double>{0.5, 0.1}));
  CHECK_THROWS(rank_scores(catalog, DualState{{0.0, 0.0}}, std::vector<double>{0.5}));
}

TEST_CASE("selection distribution matches the inverse-gap formula") {
  ScoreBoard board;
  board.score = {0.9, 0.7, 0.5};
  board.best = ItemRef{0, 0};
  board.best_flat = 0;
  const SelectionDistribution dist = selection_distribution(board, 3, 10.0);
  CHECK(dist.prob[1] == doctest::Approx(0.2));
  CHECK(dist.prob[2] == doctest::Approx(1.0 / 7.0));
  CHECK(dist.prob[0] == doctest::Approx(1.0 - 0.2 - 1.0 / 7.0));
}

TEST_CASE("zero gamma yields the uniform distribution") {
  ScoreBoard board;
  board.score = {0.9, 0.7, 0.5, 0.2};
  board.best_flat = 0;
  const SelectionDistribution dist = selection_distribution(board, 4, 0.0);
  for (double p : dist.prob) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("a zero-gap non-best item gets exactly 1/H") {
  ScoreBoard board;
  board.score = {0.3, 0.3, 0.1};
  board.best_flat = 0;
  const SelectionDistribution dist = selection_distribution(board, 5, 100.0);
  CHECK(dist.prob[1] == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("H below the item count is invalid") {
  ScoreBoard board;
  board.score = {0.9, 0.7, 0.5};
  board.best_flat = 0;
  CHECK_THROWS_AS(selection_distribution(board, 2, 1.0), InvalidHError);
}

TEST_CASE("selection distributions are valid over random boards") {
  RngStream rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(40);
    ScoreBoard board;
    board.score.resize(n);
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      board.score[i] = 3.0 * rng.uniform();
      if (board.score[i] > best) {
        best = board.score[i];
        board.best_flat = i;
      }
    }
    const std::size_t h = n + rng.uniform_index(50);
    const double gamma = 50.0 * rng.uniform();
    const SelectionDistribution dist = selection_distribution(board, h, gamma);

    double sum = 0.0;
    for (double p : dist.prob) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    // best item holds at least 1/H and at least every other probability
    CHECK(dist.prob[board.best_flat] >=
          1.0 / static_cast<double>(h) - 1e-15);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(dist.prob[board.best_flat] >= dist.prob[i] - 1e-15);
    }
    // gap monotonicity between non-best items
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = i + 1; k < n; ++k) {
        if (i == board.best_flat || k == board.best_flat) continue;
        if (board.score[i] > board.score[k]) {
          CHECK(dist.prob[i] >= dist.prob[k] - 1e-15);
        }
      }
    }
  }
}

TEST_CASE("select: point mass always returns the atom") {
  SelectionDistribution dist;
  dist.prob = {0.0, 1.0, 0.0};
  dist.best_flat = 1;
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) CHECK(select(dist, rng) == 1);
}

TEST_CASE("select matches frequencies on a fair coin") {
  SelectionDistribution dist;
  dist.prob = {0.5, 0.5};
  RngStream rng(5);
  const int draws = 100000;
  int first = 0;
  for (int i = 0; i < draws; ++i) {
    if (select(dist, rng) == 0) ++first;
  }
  const double freq = static_cast<double>(first) / draws;
  const double sigma = std::sqrt(0.25 / draws);
  CHECK(std::abs(freq - 0.5) <= 3.0 * sigma);
}

TEST_CASE("select is deterministic for a fixed seed") {
  SelectionDistribution dist;
  dist.prob = {0.25, 0.25, 0.5};
  std::vector<std::size_t> a, b;
  RngStream rng_a(11), rng_b(11);
  for (int i = 0; i < 500; ++i) {
    a.push_back(select(dist, rng_a));
    b.push_back(select(dist, rng_b));
  }
  CHECK(a == b);
}

TEST_CASE("dual_step follows the projected subgradient formula") {
  const std::vector<Interval> boxes{{0.0, 0.5}};
  DualState lambda{{0.2}};
  const DualState stepped = dual_step(lambda, 0.1, std::vector<double>{1.0},
                                      std::vector<double>{0.25}, boxes);
  CHECK(stepped.lambda[0] == doctest::Approx(0.125));

  DualState at_zero{{0.0}};
  const DualState raised = dual_step(at_zero, 0.1, std::vector<double>{0.0},
                                     std::vector<double>{0.25}, boxes);
  CHECK(raised.lambda[0] == doctest::Approx(0.025));

  const DualState frozen = dual_step(lambda, 0.0, std::vector<double>{1.0},
                                     std::vector<double>{0.25}, boxes);
  CHECK(frozen.lambda[0] == doctest::Approx(0.2));
}

TEST_CASE("dual_step clamps to the box") {
  const std::vector<Interval> boxes{{0.0, 0.5}};
  const DualState high = dual_step(DualState{{0.45}}, 1.0, std::vector<double>{0.0},
                                   std::vector<double>{0.25}, boxes);
  CHECK(high.lambda[0] == 0.5);
  const DualState low = dual_step(DualState{{0.05}}, 1.0, std::vector<double>{1.0},
                                  std::vector<double>{0.0}, boxes);
  CHECK(low.lambda[0] == 0.0);
}

TEST_CASE("gamma schedules") {
  CHECK(gamma_at(GammaScheduleKind::Constant, 2.0, 100) == 2.0);
  CHECK(gamma_at(GammaScheduleKind::Sqrt, 2.0, 100) == doctest::Approx(20.0));
  CHECK(gamma_at(GammaScheduleKind::Linear, 2.0, 100) == doctest::Approx(200.0));
}

namespace {

RunConfig engine_config(std::uint64_t horizon, std::uint64_t seed) {
  RunConfig config;
  config.horizon = horizon;
  config.seed = seed;
  config.gamma0 = 1.0;
  config.regularizer.kind = RegularizerKind::AboveTarget;
  config.regularizer.basis = OutcomeBasis::Click;
  config.regularizer.alpha.value = 2.0;
  config.regularizer.beta.value = 0.5;
  return config;
}

Environment three_seller_env() {
  const Catalog catalog = single_item_catalog({1.0, 0.8, 0.6});
  return Environment(catalog, {0.05, 0.2, 0.4}, {1.0, 1.0, 1.0});
}

struct Recorder : RoundObserver {
  std::function<void(const RoundRecord&)> fn;
  void on_round(const RoundRecord& record) override { fn(record); }
};

}  // namespace

TEST_CASE("zero-horizon episode yields an empty trace and zero duals") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(0, 1);
  OracleEstimator estimator(env, OutcomeBasis::Click);
  const EpisodeResult result = run_episode(config, env, estimator);
  CHECK(result.trace.empty());
  CHECK(result.metrics.gmv == 0.0);
  CHECK(result.metrics.lambda_final == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("beta = 0 with the oracle and no exploration is greedy revenue ranking") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(300, 7);
  config.regularizer.beta.value = 0.0;
  config.exploration = false;
  config.predictor = PredictorKind::Oracle;
  OracleEstimator estimator(env, OutcomeBasis::Click);

  // greedy argmax of p * c: scores 0.05, 0.16, 0.24 -> seller 2
  Recorder recorder;
  recorder.fn = [&](const RoundRecord& record) {
    CHECK(record.displayed == ItemRef{2, 0});
    for (double l : record.lambda_after) CHECK(l == 0.0);
  };
  EpisodeOptions options;
  options.observer = &recorder;
  const EpisodeResult result = run_episode(config, env, estimator, options);
  for (const TraceRow& row : result.trace) CHECK(row.displayed == ItemRef{2, 0});
}

TEST_CASE("kind None reduces to pure p*chat ranking with zero duals") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(500, 3);
  config.regularizer.kind = RegularizerKind::None;
  config.regularizer.alpha.value = 0.0;
  config.regularizer.beta.value = 0.0;

  EmpiricalMeanEstimator estimator(env.catalog(), OutcomeBasis::Click);
  Recorder recorder;
  recorder.fn = [&](const RoundRecord& record) {
    for (double l : record.lambda_after) CHECK(l == 0.0);
    // argmax of p * chat must equal the board's best
    const Catalog& catalog = env.catalog();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_flat = 0;
    for (std::size_t flat = 0; flat < catalog.item_count(); ++flat) {
      const double f = catalog.price(catalog.item_at(flat)) * record.chat[flat];
      if (f > best) {
        best = f;
        best_flat = flat;
      }
    }
    CHECK(record.scores->best_flat == best_flat);
  };
  EpisodeOptions options;
  options.observer = &recorder;
  run_episode(config, env, estimator, options);
}

TEST_CASE("lambda stays inside the dual box over a full episode") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(5000, 13);
  config.regularizer.alpha.value = std::vector<double>{3.0, 1.0, 0.5};
  config.regularizer.beta.value = std::vector<double>{0.4, 0.2, 0.1};

  EmpiricalMeanEstimator estimator(env.catalog(), OutcomeBasis::Click);
  const std::vector<double> beta{0.4, 0.2, 0.1};
  Recorder recorder;
  recorder.fn = [&](const RoundRecord& record) {
    for (std::size_t j = 0; j < beta.size(); ++j) {
      CHECK(record.lambda_after[j] >= 0.0);
      CHECK(record.lambda_after[j] <= beta[j]);
    }
  };
  EpisodeOptions options;
  options.observer = &recorder;
  run_episode(config, env, estimator, options);
}

TEST_CASE("a round skipping an under-target seller raises its dual") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(2000, 23);
  config.regularizer.alpha.value = 5.0;
  config.regularizer.beta.value = 0.5;

  EmpiricalMeanEstimator estimator(env.catalog(), OutcomeBasis::Click);
  Recorder recorder;
  recorder.fn = [&](const RoundRecord& record) {
    for (std::size_t j = 0; j < record.lambda_before.size(); ++j) {
      if (j == record.displayed.seller) continue;
      if (record.lambda_before[j] < 0.5 - 1e-12) {
        CHECK(record.lambda_after[j] > record.lambda_before[j]);
      }
    }
  };
  EpisodeOptions options;
  options.observer = &recorder;
  run_episode(config, env, estimator, options);
}

TEST_CASE("identical configs produce bit-identical traces") {
  const Environment env = three_seller_env();
  const RunConfig config = engine_config(2000, 99);
  EmpiricalMeanEstimator est_a(env.catalog(), OutcomeBasis::Click);
  EmpiricalMeanEstimator est_b(env.catalog(), OutcomeBasis::Click);
  const EpisodeResult a = run_episode(config, env, est_a);
  const EpisodeResult b = run_episode(config, env, est_b);
  CHECK(a.trace == b.trace);
  CHECK(a.metrics == b.metrics);
}

TEST_CASE("explicit target_rate replaces alpha/horizon in the dual update") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(1, 5);
  config.eta = 0.1;
  config.exploration = false;
  config.predictor = PredictorKind::Oracle;
  config.regularizer.alpha.value = 0.0;  // alpha/T would be zero
  config.regularizer.beta.value = 1.0;
  config.regularizer.target_rate = PerSellerParam{0.25};

  OracleEstimator estimator(env, OutcomeBasis::Click);
  const EpisodeResult result = run_episode(config, env, estimator);
  // greedy displays seller 2; the others see outcome 0 and rate 0.25, so
  // lambda moves by eta * 0.25 regardless of the horizon
  CHECK(result.metrics.lambda_final[0] == doctest::Approx(0.025));
  CHECK(result.metrics.lambda_final[1] == doctest::Approx(0.025));
}

TEST_CASE("h_override below the catalog size is rejected") {
  const Environment env = three_seller_env();
  RunConfig config = engine_config(10, 1);
  config.h_override = 2;
  OracleEstimator estimator(env, OutcomeBasis::Click);
  CHECK_THROWS_AS(run_episode(config, env, estimator), InvalidHError);
}

TEST_CASE("episode objective never beats the hindsight optimum") {
  const Catalog catalog = single_item_catalog({1.0, 1.0});
  const Environment env(catalog, {1.0, 1.0}, {1.0, 1.0});
  RunConfig config = engine_config(4, 17);
  config.regularizer.alpha.value = 1.0;
  config.regularizer.beta.value = 0.5;
  config.exploration = false;
  config.predictor = PredictorKind::Oracle;

  OracleEstimator estimator(env, OutcomeBasis::Click);
  const EpisodeResult result = run_episode(config, env, estimator);

  RegularizerSpec spec;
  spec.kind = RegularizerKind::AboveTarget;
  spec.basis = OutcomeBasis::Click;
  spec.alpha = {1.0, 1.0};
  spec.beta = {0.5, 0.5};
  const HindsightInstance instance = instance_from_environment(env, spec, 4);

  std::vector<ItemRef> assignment;
  for (const TraceRow& row : result.trace) assignment.push_back(row.displayed);
  CHECK(primal_value(instance, assignment) <=
        brute_force_opt(instance).objective + 1e-9);
}
