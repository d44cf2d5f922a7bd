#include "robust_scale/fitting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace robust_scale {

std::string_view to_string(Parity parity) {
  return parity == Parity::odd ? "odd" : "even";
}

Parity parse_parity(std::string_view name) {
  if (name == "odd") return Parity::odd;
  if (name == "even") return Parity::even;
  throw std::invalid_argument("unknown parity: " + std::string(name));
}

double inverse_poly(double alpha, double beta, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  return 1.0 + alpha * inv + beta * inv * inv;
}

FitResult fit_inverse_poly(std::span<const std::pair<std::size_t, double>> points,
                           Parity parity) {
  // Linear least squares of (factor - 1) on the regressors (1/n, 1/n^2);
  // the 2x2 normal equations are solved in closed form.
  double suu = 0.0, suv = 0.0, svv = 0.0, suy = 0.0, svy = 0.0;
  std::size_t m = 0;
  for (const auto& [n, factor] : points) {
    if (parity_of(n) != parity) continue;
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    const double u = 1.0 / static_cast<double>(n);
    const double v = u * u;
    const double y = factor - 1.0;
    suu += u * u;
    suv += u * v;
    svv += v * v;
    suy += u * y;
    svy += v * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("underdetermined fit");

  const double det = suu * svv - suv * suv;
  if (!(det > 1e-12 * suu * svv)) throw std::invalid_argument("singular design");

  FitResult fit;
  fit.alpha = (suy * svv - svy * suv) / det;
  fit.beta = (svy * suu - suy * suv) / det;
  fit.parity = parity;
  fit.n_points = m;

  double ss = 0.0;
  for (const auto& [n, factor] : points) {
    if (parity_of(n) != parity) continue;
    const double r = factor - inverse_poly(fit.alpha, fit.beta, n);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(m));
  return fit;
}

PredictionErrorReport prediction_error(const FactorTable& table, const FitResult& fit,
                                       std::span<const std::size_t> n_values) {
  PredictionErrorReport report;
  for (std::size_t n : n_values) {
    if (parity_of(n) != fit.parity) continue;
    const double diff = std::abs(table.at(n) - inverse_poly(fit.alpha, fit.beta, n));
    if (diff > report.max_abs_diff) {
      report.max_abs_diff = diff;
      report.n_at_max = n;
    }
  }
  return report;
}

}  // namespace robust_scale
