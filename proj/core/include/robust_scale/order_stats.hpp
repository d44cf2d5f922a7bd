#pragma once

#include <cstdint>
#include <span>

namespace robust_scale {

// k-th order statistic, 1-based: select_kth(v, 1) is the minimum and
// select_kth(v, v.size()) the maximum. Duplicates count with multiplicity.
// Partially reorders `values` in place.
double select_kth(std::span<double> values, std::size_t k);

// Low median: the floor((n+1)/2)-th order statistic.
double low_median(std::span<double> values);

// High median: the (floor(n/2)+1)-th order statistic. Equals low_median
// for odd n.
double high_median(std::span<double> values);

struct WeightedValue {
  double value;
  std::int64_t weight;  // multiplicity, must be >= 1
};

// High median of the multiset where each value appears `weight` times:
// the smallest value v whose cumulative weight (over items with value <= v)
// strictly exceeds half the total weight. Linear time.
double weighted_high_median(std::span<WeightedValue> items);

}  // namespace robust_scale
