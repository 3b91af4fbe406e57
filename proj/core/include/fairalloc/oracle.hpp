#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairalloc/domain.hpp"
#include "fairalloc/environment.hpp"

namespace fairalloc {

/// Full-information benchmark instance: the catalog, the regularizer and the
/// per-round, per-item rates c_tjk. Rates are stored row-major with either
/// one row shared by every round (stationary environments) or one row per
/// round. The benchmark evaluates expected outcomes, so assignments are
/// scored on the rates, never on sampled realizations.
class HindsightInstance {
 public:
  HindsightInstance(Catalog catalog, RegularizerSpec spec, std::uint64_t horizon,
                    std::vector<double> rates, std::size_t rate_rows);

  const Catalog& catalog() const { return catalog_; }
  const RegularizerSpec& spec() const { return spec_; }
  std::uint64_t horizon() const { return horizon_; }
  std::size_t rate_rows() const { return rate_rows_; }

  std::span<const double> rates_at(std::uint64_t round) const {
    const std::size_t h = catalog_.item_count();
    const std::size_t row = rate_rows_ == 1 ? 0 : static_cast<std::size_t>(round);
    return std::span<const double>(rates_.data() + row * h, h);
  }

 private:
  Catalog catalog_;
  RegularizerSpec spec_;
  std::uint64_t horizon_ = 0;
  std::vector<double> rates_;
  std::size_t rate_rows_ = 1;
};

/// Stationary instance whose rates are the environment's effective rates for
/// the spec's outcome basis.
HindsightInstance instance_from_environment(const Environment& env,
                                            const RegularizerSpec& spec,
                                            std::uint64_t horizon);

/// Objective of a fixed per-round item choice: sum_t p * c of the displayed
/// items plus the regularizer on the expected per-seller aggregates.
double primal_value(const HindsightInstance& instance,
                    std::span<const ItemRef> assignment);

struct TooLargeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct HindsightSolution {
  double objective = 0.0;            // primal value of `assignment`
  std::vector<ItemRef> assignment;   // one item per round
  std::vector<double> lambda_star;   // empty for brute force
  double dual_value = 0.0;           // best dual seen; brute force echoes objective
};

/// Exhaustive search over all H^horizon assignments; throws TooLargeError
/// beyond 10^6 of them.
HindsightSolution brute_force_opt(const HindsightInstance& instance);

/// Lagrangian dual objective at a feasible lambda:
/// sum_t max_jk (p_jk + lambda_j) c_tjk - sum_j alpha_j lambda_j
///   + sum_j alpha_j beta_j.
/// The trailing constant is what the primal regularizer saturates to, so
/// every feasible lambda upper-bounds the primal optimum.
double dual_objective(const HindsightInstance& instance, std::span<const double> lambda);

/// Projected subgradient descent on the Lagrangian dual over the box
/// 0 <= lambda_j <= beta_j with steps max_j(beta_j)/sqrt(i). The reported
/// dual value includes the sum_j alpha_j beta_j constant so it upper-bounds
/// the primal optimum. Supports the above-target family (kind None is the
/// beta = 0 case); the max-min regularizer has a different dual domain and
/// is rejected.
HindsightSolution dual_solve_offline(const HindsightInstance& instance,
                                     std::size_t iterations = 5000);

/// Per-round average regret of a realized objective against a hindsight value.
double average_regret(double hindsight_value, double realized_objective,
                      std::uint64_t horizon);

}  // namespace fairalloc
