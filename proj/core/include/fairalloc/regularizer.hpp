#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairalloc/domain.hpp"

namespace fairalloc {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Per-seller aggregated outcome a_j (clicks, purchases or revenue,
/// depending on the spec's outcome basis).
using AggregateOutcome = std::vector<double>;

/// r(a): 0 for None, sum_j beta_j * min(a_j, alpha_j) for AboveTarget,
/// beta * min_j a_j for MaxMin.
double regularizer_value(std::span<const double> a, const RegularizerSpec& spec);

/// A supergradient of r at a. At above-target kinks (a_j == alpha_j) the
/// left slope beta_j is returned; MaxMin ties break to the lowest seller
/// index. Both choices are valid superdifferential elements and keep the
/// output deterministic.
std::vector<double> regularizer_supergradient(std::span<const double> a,
                                              const RegularizerSpec& spec);

/// Dual feasible box [0, beta_j] per seller; kind=None pins every
/// coordinate to [0, 0].
std::vector<Interval> dual_box(const RegularizerSpec& spec);

/// Per-round target rate alpha_j / T used by the dual update (zero vector
/// for kinds without a target).
std::vector<double> target_rate(const RegularizerSpec& spec, std::uint64_t horizon);

/// Pads absent alpha/beta vectors with zeros so they are always m long.
/// Mismatched non-empty lengths are left alone for validate() to flag.
RegularizerSpec normalize_spec(RegularizerSpec spec, std::size_t seller_count);

}  // namespace fairalloc
