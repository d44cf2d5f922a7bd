#include "robust_scale/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "robust_scale/correction.hpp"
#include "robust_scale/order_stats.hpp"

namespace robust_scale {

namespace {

void require_scale_input(const Sample& x) {
  if (x.size() < 2) throw std::invalid_argument("need at least 2 observations");
}

std::vector<double> sorted_copy(const Sample& x) {
  std::vector<double> sorted(x.values().begin(), x.values().end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

// k-th smallest (1-based) of the union of two implicitly sorted ascending
// arrays, by binary search over how many elements the prefix takes from A.
template <typename GetA, typename GetB>
double kth_of_two_sorted(GetA a, std::size_t na, GetB b, std::size_t nb, std::size_t k) {
  constexpr double kLowest = -std::numeric_limits<double>::infinity();
  std::size_t lo = (k > nb) ? k - nb : 0;
  std::size_t hi = std::min(k, na);
  for (;;) {
    const std::size_t ia = lo + (hi - lo) / 2;  // elements taken from A
    const std::size_t ib = k - ia;              // elements taken from B
    if (ia > 0 && ib < nb && a(ia - 1) > b(ib)) {
      hi = ia - 1;
    } else if (ib > 0 && ia < na && b(ib - 1) > a(ia)) {
      lo = ia + 1;
    } else {
      const double last_a = (ia > 0) ? a(ia - 1) : kLowest;
      const double last_b = (ib > 0) ? b(ib - 1) : kLowest;
      return std::max(last_a, last_b);
    }
  }
}

}  // namespace

double sn_raw_naive(const Sample& x) {
  require_scale_input(x);
  const auto values = x.values();
  const std::size_t n = values.size();
  const std::size_t himed_rank = n / 2 + 1;

  std::vector<double> row(n);
  std::vector<double> per_point(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = std::abs(values[i] - values[j]);
    per_point[i] = select_kth(row, himed_rank);
  }
  return select_kth(per_point, (n + 1) / 2);
}

double qn_raw_naive(const Sample& x) {
  require_scale_input(x);
  const auto values = x.values();
  const std::size_t n = values.size();
  const std::size_t h = n / 2 + 1;
  const std::size_t k = h * (h - 1) / 2;

  std::vector<double> diffs;
  diffs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) diffs.push_back(std::abs(values[i] - values[j]));
  return select_kth(diffs, k);
}

double sn_fast(const Sample& x) {
  require_scale_input(x);
  const std::vector<double> sorted = sorted_copy(x);
  const std::size_t n = sorted.size();
  // Rank of the high median inside each point's n distances; the self
  // distance is always zero, so it reduces to rank-1 selection over the
  // two sorted runs of differences against smaller and larger neighbours.
  const std::size_t k = n / 2;  // (n/2 + 1) - 1

  std::vector<double> per_point(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto left = [&](std::size_t r) { return sorted[i] - sorted[i - 1 - r]; };
    const auto right = [&](std::size_t r) { return sorted[i + 1 + r] - sorted[i]; };
    per_point[i] = kth_of_two_sorted(left, i, right, n - 1 - i, k);
  }
  return select_kth(per_point, (n + 1) / 2);
}

double qn_fast(const Sample& x) {
  require_scale_input(x);
  const std::vector<double> sorted = sorted_copy(x);
  const std::size_t n = sorted.size();
  const std::size_t h = n / 2 + 1;
  const std::size_t k = h * (h - 1) / 2;

  // Selection over the implicit matrix M(i, j) = sorted[i] - sorted[n - j]
  // (1-based j), whose rows and columns are sorted ascending. The strictly
  // positive pair differences occupy columns j > n - i of row i, and the
  // target is the knew-th smallest entry of the whole matrix.
  const std::size_t knew = k + n * (n + 1) / 2;
  const auto entry = [&](std::size_t i, std::size_t j) { return sorted[i] - sorted[n - j]; };

  // Candidate windows per row, as 1-based column bounds.
  std::vector<std::uint32_t> left(n), right(n);
  std::vector<std::uint32_t> active;
  active.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = static_cast<std::uint32_t>(n - i + 1);
    right[i] = static_cast<std::uint32_t>(n);
    if (left[i] <= right[i]) active.push_back(static_cast<std::uint32_t>(i));
  }
  std::size_t remaining = n * (n - 1) / 2;

  // The trial only steers convergence (correctness comes from the exact
  // counts below), so at large n a strided sample of the active rows is
  // enough for the weighted median and keeps the scratch cache-resident.
  constexpr std::size_t kMaxTrialRows = 1 << 16;
  std::vector<WeightedValue> mids;
  std::vector<std::uint32_t> less(n), less_eq(n);
  mids.reserve(std::min(n, kMaxTrialRows + 1));

  while (remaining > n) {
    mids.clear();
    const std::size_t stride = active.size() / kMaxTrialRows + 1;
    for (std::size_t a = 0; a < active.size(); a += stride) {
      const std::size_t i = active[a];
      const std::size_t mid = left[i] + (right[i] - left[i]) / 2;
      mids.push_back({entry(i, mid), static_cast<std::int64_t>(right[i] - left[i] + 1)});
    }
    const double trial = weighted_high_median(mids);

    // Full-matrix counts against the trial. Entry (i, j) is
    // sorted[i] - sorted[n - j], so row i has (n - m) entries below the
    // threshold when m is the first index with sorted[m] on or above
    // sorted[i] - trial; the boundary moves forward with i, giving an
    // O(n) two-pointer sweep. The <=-count is only needed when the
    // <-count fails to decide.
    std::uint64_t sum_less = 0;
    {
      std::size_t m = 0;  // first index with sorted[m] > sorted[i] - trial
      for (std::size_t i = 0; i < n; ++i) {
        const double bound = sorted[i] - trial;
        while (m < n && sorted[m] <= bound) ++m;
        less[i] = static_cast<std::uint32_t>(n - m);
        sum_less += n - m;
      }
    }

    if (knew <= sum_less) {
      for (const std::size_t i : active) right[i] = std::min(right[i], less[i]);
    } else {
      std::uint64_t sum_less_eq = 0;
      std::size_t m = 0;  // first index with sorted[m] >= sorted[i] - trial
      for (std::size_t i = 0; i < n; ++i) {
        const double bound = sorted[i] - trial;
        while (m < n && sorted[m] < bound) ++m;
        less_eq[i] = static_cast<std::uint32_t>(n - m);
        sum_less_eq += n - m;
      }
      if (knew > sum_less_eq) {
        for (const std::size_t i : active) {
          left[i] = std::max(left[i], less_eq[i] + 1);
        }
      } else {
        return trial;
      }
    }

    remaining = 0;
    std::size_t out = 0;
    for (const std::uint32_t i : active) {
      if (left[i] <= right[i]) {
        active[out++] = i;
        remaining += right[i] - left[i] + 1;
      }
    }
    active.resize(out);
  }

  std::vector<double> candidates;
  candidates.reserve(remaining);
  std::uint64_t excluded_left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    excluded_left += left[i] - 1;
    for (std::size_t j = left[i]; j <= right[i]; ++j) candidates.push_back(entry(i, j));
  }
  return select_kth(candidates, knew - excluded_left);
}

double mad_raw(const Sample& x) {
  require_scale_input(x);
  std::vector<double> work = sorted_copy(x);
  const std::size_t n = work.size();
  const double center = 0.5 * (work[(n - 1) / 2] + work[n / 2]);
  for (double& v : work) v = std::abs(v - center);
  // Median of deviations with the same mean-of-central-pair convention.
  const double upper = select_kth(work, n / 2 + 1);
  const double lower = *std::max_element(work.begin(), work.begin() + n / 2 + (n % 2));
  return 0.5 * (lower + upper);
}

double c4(std::size_t n) {
  if (n < 2) throw std::invalid_argument("need at least 2 observations");
  const double half = static_cast<double>(n) / 2.0;
  return std::sqrt(2.0 / (static_cast<double>(n) - 1.0)) *
         std::exp(std::lgamma(half) - std::lgamma(half - 0.5));
}

double sd_unbiased(const Sample& x) {
  return estimate_parts(x, EstimatorKind::sd, CorrectionModel::asymptotic_only).value;
}

EstimateParts estimate_parts(const Sample& x, EstimatorKind kind, CorrectionModel model) {
  require_scale_input(x);
  const std::size_t n = x.size();

  EstimateParts parts{};
  switch (kind) {
    case EstimatorKind::sd: {
      const auto values = x.values();
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                          static_cast<double>(n);
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      parts.raw = std::sqrt(ss / (static_cast<double>(n) - 1.0));
      parts.constant = 1.0;
      parts.factor = 1.0 / c4(n);
      break;
    }
    case EstimatorKind::mad: {
      parts.raw = mad_raw(x);
      parts.constant = kMadConsistencyConstant;
      switch (model) {
        case CorrectionModel::refined: parts.factor = mad_factor(n); break;
        case CorrectionModel::asymptotic_only: parts.factor = 1.0; break;
        default: throw std::invalid_argument("model not defined for estimator");
      }
      break;
    }
    case EstimatorKind::sn:
      parts.raw = sn_fast(x);
      parts.constant = kSnConsistencyConstant;
      parts.factor = factor(kind, n, model);
      break;
    case EstimatorKind::qn:
      parts.raw = qn_fast(x);
      parts.constant = kQnConsistencyConstant;
      parts.factor = factor(kind, n, model);
      break;
  }
  parts.value = parts.raw * parts.constant * parts.factor;
  return parts;
}

double estimate(const Sample& x, EstimatorKind kind, CorrectionModel model) {
  return estimate_parts(x, kind, model).value;
}

}  // namespace robust_scale
