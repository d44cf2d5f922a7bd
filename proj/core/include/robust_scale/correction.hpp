#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "robust_scale/sample.hpp"

namespace robust_scale {

// Asymptotic consistency constants: the multipliers that make the raw
// statistics converge to the standard deviation under normality.
//   MAD: 1 / Phi^-1(3/4)
//   Sn:  solution C of Phi(Phi^-1(3/4) + 1/C) - Phi(Phi^-1(3/4) - 1/C) = 1/2
//   Qn:  1 / (sqrt(2) Phi^-1(5/8))
inline constexpr double kMadConsistencyConstant = 1.4826022185056;
inline constexpr double kSnConsistencyConstant = 1.19259855312321;
inline constexpr double kQnConsistencyConstant = 2.21914446598508;

// Constant for the given estimator; 1.0 for EstimatorKind::sd.
double asymptotic_constant(EstimatorKind kind);

// Standard normal quantile function, absolute error <= 1e-10.
// Throws std::invalid_argument unless 0 < p < 1.
double normal_quantile(double p);

// Finite-sample bias-correction factor for (kind, n) under the given model:
// a tabulated value when n is inside the model's table range, the model's
// parity-dependent prediction equation otherwise. The refined tables hold
// n = 2..100 with an inverse-polynomial tail; croux1992 tabulates n <= 9
// (Sn and Qn), robustbase n <= 12 (Qn only). CorrectionModel::asymptotic_only
// is 1.0 for every estimator. Throws std::invalid_argument for undefined
// (kind, model) combinations and for n < 2.
double factor(EstimatorKind kind, std::size_t n, CorrectionModel model);

// Finite-sample MAD factor from the locally calibrated table shipped with
// the library (see data/mad_factors.csv for the generating run). Returns
// 1.0, with a one-time warning on stderr, for n outside the table.
double mad_factor(std::size_t n);

struct MadFactorEntry {
  std::size_t n;
  double factor;
  double se;  // Monte-Carlo standard error of `factor`
};
std::span<const MadFactorEntry> mad_factor_table();

// Parity-aware factor table: explicit entries for small n plus an
// inverse-polynomial tail 1 + alpha/n + beta/n^2 for n above the entries.
struct FactorTable {
  struct Tail {
    double alpha_odd, beta_odd;
    double alpha_even, beta_even;
  };

  EstimatorKind estimator = EstimatorKind::sd;
  std::vector<std::pair<std::size_t, double>> entries;  // sorted by n
  std::optional<Tail> tail;

  bool covers(std::size_t n) const;
  // Factor at n; throws std::invalid_argument when nothing covers n.
  double at(std::size_t n) const;
};

// Built-in refined table for Sn or Qn (entries n = 2..100, equation tail).
FactorTable refined_table(EstimatorKind kind);

struct ModelComparisonRow {
  std::size_t n;
  double factor_a;
  double factor_b;
  double abs_diff;
};

struct ModelComparison {
  double max_abs_diff = 0.0;
  std::size_t n_at_max = 0;
  std::vector<ModelComparisonRow> rows;
};

// Deterministic scan of |factor_a(n) - factor_b(n)| over the given n values.
ModelComparison compare_models(EstimatorKind kind, CorrectionModel model_a,
                               CorrectionModel model_b, std::span<const std::size_t> n_values);

}  // namespace robust_scale
