#include "robust_scale/sample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace robust_scale {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mad: return "mad";
    case EstimatorKind::sn: return "sn";
    case EstimatorKind::qn: return "qn";
    case EstimatorKind::sd: return "sd";
  }
  throw std::invalid_argument("unknown estimator kind");
}

std::string_view to_string(CorrectionModel model) {
  switch (model) {
    case CorrectionModel::refined: return "refined";
    case CorrectionModel::croux1992: return "croux1992";
    case CorrectionModel::robustbase: return "robustbase";
    case CorrectionModel::asymptotic_only: return "asymptotic";
  }
  throw std::invalid_argument("unknown correction model");
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "mad") return EstimatorKind::mad;
  if (name == "sn") return EstimatorKind::sn;
  if (name == "qn") return EstimatorKind::qn;
  if (name == "sd") return EstimatorKind::sd;
  throw std::invalid_argument("unknown estimator: " + std::string(name));
}

CorrectionModel parse_correction_model(std::string_view name) {
  if (name == "refined") return CorrectionModel::refined;
  if (name == "croux1992") return CorrectionModel::croux1992;
  if (name == "robustbase") return CorrectionModel::robustbase;
  if (name == "asymptotic" || name == "asymptotic_only") return CorrectionModel::asymptotic_only;
  throw std::invalid_argument("unknown correction model: " + std::string(name));
}

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empty sample");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("sample contains a non-finite value");
  }
}

}  // namespace robust_scale
