#pragma once

#include <cstddef>

#include "robust_scale/sample.hpp"

namespace robust_scale {

// Uncorrected scale statistics: no consistency constant and no
// finite-sample factor applied. All require n >= 2.

// Low median over i of the high median over j of |x_i - x_j| (j = i
// included, contributing a zero). Quadratic time; reference definition.
double sn_raw_naive(const Sample& x);

// k-th smallest of the n(n-1)/2 pairwise absolute differences, where
// h = floor(n/2) + 1 and k = h(h-1)/2. Quadratic time and memory.
double qn_raw_naive(const Sample& x);

// Same results as the naive forms, computed by selection over the implicit
// matrix of pairwise differences of the sorted sample: O(n log n) time,
// O(n) extra space.
double sn_fast(const Sample& x);
double qn_fast(const Sample& x);

// Median absolute deviation around the median. Median convention: mean of
// the two central order statistics for even n, applied to both the inner
// and the outer median.
double mad_raw(const Sample& x);

// Expectation of the sample standard deviation of n standard-normal
// observations (divisor n-1), computed via log-gamma.
double c4(std::size_t n);

// Mean-unbiased standard deviation under normality:
// sqrt(sum (x_i - mean)^2 / (n-1)) / c4(n).
double sd_unbiased(const Sample& x);

struct EstimateParts {
  double raw;       // uncorrected statistic
  double constant;  // asymptotic consistency constant
  double factor;    // finite-sample bias-correction factor
  double value;     // raw * constant * factor
};

// Bias-corrected estimate under the chosen correction model. For
// EstimatorKind::sd the model is ignored and the c4-corrected standard
// deviation is returned (raw = sample sd, factor = 1/c4). Throws
// std::invalid_argument for model/kind combinations that are not defined.
EstimateParts estimate_parts(const Sample& x, EstimatorKind kind, CorrectionModel model);
double estimate(const Sample& x, EstimatorKind kind, CorrectionModel model);

}  // namespace robust_scale
