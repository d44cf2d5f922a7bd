#include "robust_scale/correction.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "factor_tables.hpp"

namespace robust_scale {

namespace {

void require_n(std::size_t n) {
  if (n < 2) throw std::invalid_argument("need at least 2 observations");
}

[[noreturn]] void undefined_combination() {
  throw std::invalid_argument("model not defined for estimator");
}

double inverse_poly_tail(const FactorTable::Tail& tail, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  const bool odd = (n % 2 == 1);
  const double alpha = odd ? tail.alpha_odd : tail.alpha_even;
  const double beta = odd ? tail.beta_odd : tail.beta_even;
  return 1.0 + alpha * inv + beta * inv * inv;
}

double refined_factor(EstimatorKind kind, std::size_t n) {
  const auto& table = (kind == EstimatorKind::sn) ? tables::kRefinedSn : tables::kRefinedQn;
  const auto& tail = (kind == EstimatorKind::sn) ? tables::kRefinedSnTail : tables::kRefinedQnTail;
  if (n <= tables::kRefinedMaxN) return table[n - tables::kRefinedMinN];
  return inverse_poly_tail(tail, n);
}

double croux1992_factor(EstimatorKind kind, std::size_t n) {
  const double dn = static_cast<double>(n);
  if (kind == EstimatorKind::sn) {
    if (n <= 9) return tables::kCrouxSn[n - 2];
    return (n % 2 == 1) ? dn / (dn - 0.9) : 1.0;
  }
  if (n <= 9) return tables::kCrouxQn[n - 2];
  return (n % 2 == 1) ? dn / (dn + 1.4) : dn / (dn + 3.8);
}

double robustbase_factor(std::size_t n) {
  if (n <= 12) return tables::kRobustbaseQn[n - 2];
  const double inv = 1.0 / static_cast<double>(n);
  if (n % 2 == 1) {
    return 1.0 / (1.0 + (1.60188 + (-2.1284 - 5.172 * inv) * inv) * inv);
  }
  return 1.0 / (1.0 + (3.67561 + (1.9654 + (6.987 - 77.0 * inv) * inv) * inv) * inv);
}

}  // namespace

double asymptotic_constant(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mad: return kMadConsistencyConstant;
    case EstimatorKind::sn: return kSnConsistencyConstant;
    case EstimatorKind::qn: return kQnConsistencyConstant;
    case EstimatorKind::sd: return 1.0;
  }
  throw std::invalid_argument("unknown estimator kind");
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie in (0, 1)");

  // Acklam's rational approximation, then one Halley step against the
  // erfc-based CDF; absolute error is far below the 1e-10 contract.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double error = cdf - p;
  const double u = error * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double factor(EstimatorKind kind, std::size_t n, CorrectionModel model) {
  require_n(n);
  switch (model) {
    case CorrectionModel::asymptotic_only:
      return 1.0;
    case CorrectionModel::refined:
      if (kind != EstimatorKind::sn && kind != EstimatorKind::qn) undefined_combination();
      return refined_factor(kind, n);
    case CorrectionModel::croux1992:
      if (kind != EstimatorKind::sn && kind != EstimatorKind::qn) undefined_combination();
      return croux1992_factor(kind, n);
    case CorrectionModel::robustbase:
      if (kind != EstimatorKind::qn) undefined_combination();
      return robustbase_factor(n);
  }
  throw std::invalid_argument("unknown correction model");
}

double mad_factor(std::size_t n) {
  require_n(n);
  for (const auto& entry : tables::mad_factor_entries()) {
    if (entry.n == n) return entry.factor;
  }
  static std::mutex warn_mutex;
  static std::unordered_set<std::size_t> warned;
  std::lock_guard lock(warn_mutex);
  if (warned.insert(n).second) {
    std::cerr << "robust_scale: no calibrated MAD factor for n = " << n
              << "; using 1.0\n";
  }
  return 1.0;
}

std::span<const MadFactorEntry> mad_factor_table() { return tables::mad_factor_entries(); }

bool FactorTable::covers(std::size_t n) const {
  if (tail && !entries.empty() && n > entries.back().first) return true;
  return std::binary_search(entries.begin(), entries.end(), std::pair<std::size_t, double>{n, 0.0},
                            [](const auto& x, const auto& y) { return x.first < y.first; });
}

double FactorTable::at(std::size_t n) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), n,
                                   [](const auto& e, std::size_t v) { return e.first < v; });
  if (it != entries.end() && it->first == n) return it->second;
  if (tail && !entries.empty() && n > entries.back().first) return inverse_poly_tail(*tail, n);
  throw std::invalid_argument("factor table does not cover n");
}

FactorTable refined_table(EstimatorKind kind) {
  if (kind != EstimatorKind::sn && kind != EstimatorKind::qn) undefined_combination();
  FactorTable table;
  table.estimator = kind;
  const auto& values = (kind == EstimatorKind::sn) ? tables::kRefinedSn : tables::kRefinedQn;
  table.entries.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    table.entries.emplace_back(tables::kRefinedMinN + i, values[i]);
  }
  table.tail = (kind == EstimatorKind::sn) ? tables::kRefinedSnTail : tables::kRefinedQnTail;
  return table;
}

ModelComparison compare_models(EstimatorKind kind, CorrectionModel model_a,
                               CorrectionModel model_b, std::span<const std::size_t> n_values) {
  if (n_values.empty()) throw std::invalid_argument("empty n range");
  ModelComparison result;
  result.rows.reserve(n_values.size());
  for (std::size_t n : n_values) {
    const double fa = factor(kind, n, model_a);
    const double fb = factor(kind, n, model_b);
    const double diff = std::abs(fa - fb);
    result.rows.push_back({n, fa, fb, diff});
    if (diff > result.max_abs_diff || result.rows.size() == 1) {
      result.max_abs_diff = diff;
      result.n_at_max = n;
    }
  }
  return result;
}

}  // namespace robust_scale
