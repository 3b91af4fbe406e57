#include "fairalloc/regularizer.hpp"

#include <algorithm>
#include <stdexcept>

namespace fairalloc {

double regularizer_value(std::span<const double> a, const RegularizerSpec& spec) {
  switch (spec.kind) {
    case RegularizerKind::None:
      return 0.0;
    case RegularizerKind::AboveTarget: {
      double value = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        value += spec.beta[j] * std::min(a[j], spec.alpha[j]);
      }
      return value;
    }
    case RegularizerKind::MaxMin: {
      if (a.empty()) return 0.0;
      return spec.beta[0] * *std::min_element(a.begin(), a.end());
    }
  }
  throw std::logic_error("unreachable regularizer kind");
}

std::vector<double> regularizer_supergradient(std::span<const double> a,
                                              const RegularizerSpec& spec) {
  std::vector<double> g(a.size(), 0.0);
  switch (spec.kind) {
    case RegularizerKind::None:
      break;
    case RegularizerKind::AboveTarget:
      for (std::size_t j = 0; j < a.size(); ++j) {
        // left slope at the kink a_j == alpha_j
        g[j] = a[j] <= spec.alpha[j] ? spec.beta[j] : 0.0;
      }
      break;
    case RegularizerKind::MaxMin: {
      if (a.empty()) break;
      const std::size_t argmin =
          static_cast<std::size_t>(std::min_element(a.begin(), a.end()) - a.begin());
      g[argmin] = spec.beta[0];
      break;
    }
  }
  return g;
}

std::vector<Interval> dual_box(const RegularizerSpec& spec) {
  std::vector<Interval> boxes;
  if (spec.kind == RegularizerKind::None) {
    boxes.assign(spec.beta.size(), Interval{0.0, 0.0});
    return boxes;
  }
  boxes.reserve(spec.beta.size());
  for (double b : spec.beta) boxes.push_back(Interval{0.0, b});
  return boxes;
}

RegularizerSpec normalize_spec(RegularizerSpec spec, std::size_t seller_count) {
  if (spec.alpha.empty()) spec.alpha.assign(seller_count, 0.0);
  if (spec.beta.empty()) spec.beta.assign(seller_count, 0.0);
  return spec;
}

std::vector<double> target_rate(const RegularizerSpec& spec, std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("target_rate: horizon must be >= 1");
  if (spec.kind != RegularizerKind::AboveTarget) {
    return std::vector<double>(spec.alpha.size(), 0.0);
  }
  std::vector<double> rate;
  rate.reserve(spec.alpha.size());
  for (double alpha : spec.alpha) {
    rate.push_back(alpha / static_cast<double>(horizon));
  }
  return rate;
}

}  // namespace fairalloc
