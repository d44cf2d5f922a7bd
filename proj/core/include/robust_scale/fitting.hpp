#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "robust_scale/correction.hpp"

namespace robust_scale {

enum class Parity { odd, even };

constexpr Parity parity_of(std::size_t n) {
  return (n % 2 == 1) ? Parity::odd : Parity::even;
}

std::string_view to_string(Parity parity);
Parity parse_parity(std::string_view name);

struct FitResult {
  double alpha = 0.0;
  double beta = 0.0;
  Parity parity = Parity::odd;
  double residual_rms = 0.0;
  std::size_t n_points = 0;
};

// Evaluate the factor-decay model 1 + alpha/n + beta/n^2.
double inverse_poly(double alpha, double beta, std::size_t n);

// Least-squares fit of (factor - 1) against the regressors (1/n, 1/n^2)
// over the points whose n matches `parity`. Throws std::invalid_argument
// when fewer than two points survive the filter or the design is singular.
FitResult fit_inverse_poly(std::span<const std::pair<std::size_t, double>> points,
                           Parity parity);

struct PredictionErrorReport {
  double max_abs_diff = 0.0;
  std::size_t n_at_max = 0;
};

// Deterministic scan of |table(n) - (1 + alpha/n + beta/n^2)| over the
// given n values (which should match the fit's parity).
PredictionErrorReport prediction_error(const FactorTable& table, const FitResult& fit,
                                       std::span<const std::size_t> n_values);

}  // namespace robust_scale
