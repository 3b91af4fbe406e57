#pragma once

#include <cstdint>
#include <vector>

#include "fairalloc/domain.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/regularizer.hpp"

namespace fairalloc::detail {

// Outcome accounting shared by the engine and the benchmark policy so both
// report identically-defined metrics.
class EpisodeAccumulator {
 public:
  EpisodeAccumulator(std::size_t seller_count, std::uint64_t seed) {
    metrics_.clicks.assign(seller_count, 0);
    metrics_.purchases.assign(seller_count, 0);
    metrics_.revenue.assign(seller_count, 0.0);
    metrics_.aggregate.assign(seller_count, 0.0);
    metrics_.seed = seed;
  }

  void record(const OutcomeEvent& event, OutcomeBasis basis) {
    const std::size_t j = event.displayed.seller;
    if (event.clicked) metrics_.clicks[j] += 1;
    if (event.purchased) metrics_.purchases[j] += 1;
    metrics_.revenue[j] += event.revenue;
    metrics_.gmv += event.revenue;
    metrics_.aggregate[j] += basis_outcome(event, basis);
  }

  RunMetrics finish(const RegularizerSpec& spec, std::vector<double> lambda_final,
                    std::vector<double> lambda_sum, std::uint64_t rounds) {
    metrics_.objective = metrics_.gmv + regularizer_value(metrics_.aggregate, spec);
    metrics_.sellers_at_target = 0;
    for (std::size_t j = 0; j < metrics_.aggregate.size(); ++j) {
      const double target = j < spec.alpha.size() ? spec.alpha[j] : 0.0;
      if (metrics_.aggregate[j] >= target) metrics_.sellers_at_target += 1;
    }
    if (rounds > 0) {
      for (double& v : lambda_sum) v /= static_cast<double>(rounds);
    }
    metrics_.lambda_final = std::move(lambda_final);
    metrics_.lambda_mean = std::move(lambda_sum);
    return std::move(metrics_);
  }

 private:
  RunMetrics metrics_;
};

}  // namespace fairalloc::detail
