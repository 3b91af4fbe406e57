#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fairalloc/domain.hpp"

namespace fairalloc {

/// Per-episode aggregates. `aggregate` holds a_j in the spec's outcome
/// basis units; `objective` is GMV plus the regularizer evaluated on the
/// realized aggregates.
struct RunMetrics {
  double gmv = 0.0;
  double objective = 0.0;
  std::vector<std::uint64_t> clicks;     // per seller
  std::vector<std::uint64_t> purchases;  // per seller
  std::vector<double> revenue;           // per seller
  std::vector<double> aggregate;         // a_j, basis units
  std::size_t sellers_at_target = 0;     // #{j : a_j >= alpha_j}
  std::vector<double> lambda_final;
  std::vector<double> lambda_mean;       // time average over rounds
  std::uint64_t seed = 0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Compact per-round trace entry; lambda_seller is the displayed seller's
/// dual value at decision time (before the round's update).
struct TraceRow {
  std::uint64_t round = 0;
  ItemRef displayed;
  bool clicked = false;
  bool purchased = false;
  double revenue = 0.0;
  double lambda_seller = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace fairalloc
