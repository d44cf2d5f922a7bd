#include "robust_scale/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robust_scale {

namespace {

void require_nonempty(std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty sample");
}

}  // namespace

double select_kth(std::span<double> values, std::size_t k) {
  require_nonempty(values.size());
  if (k < 1 || k > values.size()) throw std::invalid_argument("rank out of range");
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double low_median(std::span<double> values) {
  return select_kth(values, (values.size() + 1) / 2);
}

double high_median(std::span<double> values) {
  return select_kth(values, values.size() / 2 + 1);
}

double weighted_high_median(std::span<WeightedValue> items) {
  require_nonempty(items.size());
  const std::size_t n = items.size();
  std::int64_t total = 0;
  std::vector<double> values(n);
  std::vector<std::int64_t> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (items[i].weight < 1) throw std::invalid_argument("nonpositive weight");
    if (!std::isfinite(items[i].value)) throw std::invalid_argument("non-finite value");
    values[i] = items[i].value;
    weights[i] = items[i].weight;
    total += items[i].weight;
  }

  // Find the smallest v with 2 * weight{value <= v} > total. Each round
  // puts the trial at the unweighted median of the surviving values, sums
  // the weights on either side, and compacts the half that can still hold
  // the answer, so the candidate count at least halves per round. `below`
  // is the weight already known to lie strictly left of the candidates.
  std::vector<double> scratch(n);
  std::int64_t below = 0;
  std::size_t count = n;
  for (;;) {
    if (count == 1) return values[0];

    scratch.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(count));
    const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((count - 1) / 2);
    std::nth_element(scratch.begin(), mid, scratch.begin() + static_cast<std::ptrdiff_t>(count));
    const double trial = *mid;

    std::int64_t w_lt = 0, w_eq = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (values[i] < trial) {
        w_lt += weights[i];
      } else if (values[i] == trial) {
        w_eq += weights[i];
      }
    }

    if (2 * (below + w_lt) > total) {
      std::size_t out = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (values[i] < trial) {
          values[out] = values[i];
          weights[out] = weights[i];
          ++out;
        }
      }
      count = out;
    } else if (2 * (below + w_lt + w_eq) > total) {
      return trial;
    } else {
      std::size_t out = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (values[i] > trial) {
          values[out] = values[i];
          weights[out] = weights[i];
          ++out;
        }
      }
      below += w_lt + w_eq;
      count = out;
    }
  }
}

}  // namespace robust_scale
