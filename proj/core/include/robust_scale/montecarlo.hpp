#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <vector>

#include "robust_scale/correction.hpp"
#include "robust_scale/rng.hpp"
#include "robust_scale/sample.hpp"

namespace robust_scale {

// Streaming mean/variance accumulator (Welford) with an exact pairwise
// merge, so shard results can be combined in a fixed order independently
// of how many workers produced them.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased, divisor count-1; requires count >= 2

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// n * variance / mean^2: scale-free variance of a scale estimator, so the
// result is invariant to any multiplicative constant applied to it.
// Throws std::invalid_argument when mean == 0.
double standardized_variance(double mean, double variance, std::size_t n);

struct SimulationConfig {
  std::vector<std::size_t> n_values;
  std::uint64_t repetitions = 100000;  // must be >= 100
  std::uint64_t seed = 0;
  std::vector<EstimatorKind> estimators;  // factor study only
  unsigned workers = 1;
};

// One (n, estimator) result of the factor-calibration study.
struct FactorRow {
  std::size_t n = 0;
  EstimatorKind kind = EstimatorKind::sd;
  double mean = 0.0;          // mean raw estimate
  double variance = 0.0;      // unbiased variance of the raw estimates
  double std_variance = 0.0;  // n * variance / mean^2
  double factor = 0.0;        // 1 / (mean * asymptotic constant)
  double se = 0.0;            // delta-method standard error of `factor`
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
};

struct EfficiencyRow {
  std::size_t n = 0;
  double e_mad = 0.0, e_sn = 0.0, e_qn = 0.0;
  double se_mad = 0.0, se_sn = 0.0, se_qn = 0.0;  // jackknife over shards
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
};

// n i.i.d. standard-normal deviates drawn from the stream.
Sample sample_normal(std::size_t n, RandomStream& stream);

struct CalibrationResult {
  double factor;
  double mc_standard_error;
};

// Monte-Carlo estimate of the finite-sample factor for (kind, n): runs
// `reps` independent samples, averages the raw estimates, and returns
// 1/(mean * constant) together with its delta-method standard error.
// Throws for kind == sd, which needs no calibration.
CalibrationResult calibrate_factor(EstimatorKind kind, std::size_t n, std::uint64_t reps,
                                   std::uint64_t seed, unsigned workers = 1);

// Multiplicative constants applied to the per-repetition estimates before
// the standardized variances are formed. They cancel in the efficiency
// ratios; the defaults mirror the consistency constants.
struct EfficiencyScales {
  double sd = 1.0;
  double mad = kMadConsistencyConstant;
  double sn = kSnConsistencyConstant;
  double qn = kQnConsistencyConstant;
};

// Gaussian-efficiency run at one sample size: every repetition evaluates
// the unbiased SD, MAD, Sn and Qn on the same sample, and the efficiencies
// are ratios of standardized variances against the SD baseline.
EfficiencyRow efficiency_run(std::size_t n, std::uint64_t reps, std::uint64_t seed,
                             unsigned workers = 1, const EfficiencyScales& scales = {});

// Streaming studies over config.n_values (ascending): `emit` is invoked
// once per finished row. Results are identical for any worker count.
// Returns false when `cancel` became true before all rows were produced.
bool run_factor_study(const SimulationConfig& config,
                      const std::function<void(const FactorRow&)>& emit,
                      const std::atomic<bool>* cancel = nullptr);
bool run_efficiency_study(const SimulationConfig& config,
                          const std::function<void(const EfficiencyRow&)>& emit,
                          const std::atomic<bool>* cancel = nullptr);

}  // namespace robust_scale
