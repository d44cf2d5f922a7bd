#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace robust_scale {

enum class EstimatorKind { mad, sn, qn, sd };
enum class CorrectionModel { refined, croux1992, robustbase, asymptotic_only };

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(CorrectionModel model);

// Throw std::invalid_argument on unknown names. Accepted spellings are the
// lowercase enum names ("mad", "sn", "qn", "sd", "refined", "croux1992",
// "robustbase", "asymptotic").
EstimatorKind parse_estimator_kind(std::string_view name);
CorrectionModel parse_correction_model(std::string_view name);

// A sample of observations. Construction validates every value: NaN or
// infinite observations are rejected rather than dropped, and the sample
// must be nonempty. Scale estimators additionally require size() >= 2.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

}  // namespace robust_scale
