#include "robust_scale/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "robust_scale/estimators.hpp"

using namespace robust_scale;

namespace {

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("moment merge equals a single pass over the concatenation") {
  std::mt19937_64 rng(31337);
  std::lognormal_distribution<double> skewed(0.0, 1.0);

  std::vector<double> all(10007);
  for (double& v : all) v = skewed(rng);

  MomentAccumulator single;
  for (double v : all) single.add(v);

  // Uneven shard boundaries, merged in order.
  const std::size_t cuts[] = {0, 13, 13, 500, 2517, 9000, all.size()};
  MomentAccumulator merged;
  for (std::size_t c = 0; c + 1 < std::size(cuts); ++c) {
    MomentAccumulator shard;
    for (std::size_t i = cuts[c]; i < cuts[c + 1]; ++i) shard.add(all[i]);
    merged.merge(shard);
  }

  CHECK(merged.count() == single.count());
  CHECK(close_rel(merged.mean(), single.mean()));
  CHECK(close_rel(merged.variance(), single.variance()));
}

TEST_CASE("standardized variance") {
  CHECK(standardized_variance(1.0, 0.5, 10) == 5.0);
  // Homogeneity: scaling the estimator by s scales mean by s and variance
  // by s^2, leaving the result unchanged.
  const double base = standardized_variance(0.8, 0.03, 17);
  for (double s : {2.0, 0.125, 77.0}) {
    CHECK(close_rel(standardized_variance(s * 0.8, s * s * 0.03, 17), base));
  }
  CHECK_THROWS_WITH_AS(standardized_variance(0.0, 1.0, 5), "degenerate estimator distribution",
                       std::invalid_argument);
}

TEST_CASE("sample_normal is a pure function of (seed, stream)") {
  RandomStream a(99, derive_substream(1, 12, 3));
  RandomStream b(99, derive_substream(1, 12, 3));
  const Sample sa = sample_normal(12, a);
  const Sample sb = sample_normal(12, b);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa.values()[i] == sb.values()[i]);
}

TEST_CASE("calibration rejects the baseline estimator and tiny runs") {
  CHECK_THROWS_WITH_AS(calibrate_factor(EstimatorKind::sd, 5, 1000, 1),
                       "SD needs no calibration", std::invalid_argument);
  CHECK_THROWS_AS(calibrate_factor(EstimatorKind::qn, 5, 99, 1), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_factor(EstimatorKind::qn, 1, 1000, 1), std::invalid_argument);
}

TEST_CASE("calibration at n = 2 matches the closed forms within 3 SE") {
  // E|x1 - x2| = 2/sqrt(pi) for standard normal pairs, so the factors are
  // sqrt(pi)/(2 * constant).
  const double expected_qn = std::sqrt(std::numbers::pi) / (2.0 * kQnConsistencyConstant);
  const double expected_sn = std::sqrt(std::numbers::pi) / (2.0 * kSnConsistencyConstant);

  const auto qn = calibrate_factor(EstimatorKind::qn, 2, 200000, 4242);
  CHECK(std::abs(qn.factor - expected_qn) < 3.0 * qn.mc_standard_error);
  CHECK(qn.mc_standard_error > 1e-5);
  CHECK(qn.mc_standard_error < 2e-3);

  const auto sn = calibrate_factor(EstimatorKind::sn, 2, 200000, 4242);
  CHECK(std::abs(sn.factor - expected_sn) < 3.0 * sn.mc_standard_error);
}

TEST_CASE("calibration reproduces tabulated factors at desk scale") {
  const auto qn10 = calibrate_factor(EstimatorKind::qn, 10, 200000, 777);
  CHECK(std::abs(qn10.factor - 0.7201) < 0.004);

  const auto sn3 = calibrate_factor(EstimatorKind::sn, 3, 200000, 777);
  CHECK(std::abs(sn3.factor - 1.849) < 0.01);
}

TEST_CASE("mad calibration agrees with the shipped table and drifts to one") {
  // Fresh low-rep calibration vs the committed high-rep table value.
  const auto fresh = calibrate_factor(EstimatorKind::mad, 3, 25000, 818283);
  const auto table = mad_factor_table();
  const auto entry = std::find_if(table.begin(), table.end(),
                                  [](const MadFactorEntry& e) { return e.n == 3; });
  REQUIRE(entry != table.end());
  CHECK(std::abs(fresh.factor - entry->factor) <
        3.0 * (fresh.mc_standard_error + entry->se));

  // The factor approaches 1 for large n.
  const auto large = calibrate_factor(EstimatorKind::mad, 1000, 20000, 515253, 2);
  CHECK(std::abs(large.factor - 1.0) < 0.002);
}

TEST_CASE("worker count never changes results") {
  const auto one = calibrate_factor(EstimatorKind::qn, 7, 20000, 5, 1);
  const auto four = calibrate_factor(EstimatorKind::qn, 7, 20000, 5, 4);
  const auto eight = calibrate_factor(EstimatorKind::qn, 7, 20000, 5, 8);
  CHECK(one.factor == four.factor);
  CHECK(one.factor == eight.factor);
  CHECK(one.mc_standard_error == four.mc_standard_error);
  CHECK(one.mc_standard_error == eight.mc_standard_error);

  const auto eff1 = efficiency_run(6, 20000, 5, 1);
  const auto eff8 = efficiency_run(6, 20000, 5, 8);
  CHECK(eff1.e_mad == eff8.e_mad);
  CHECK(eff1.e_sn == eff8.e_sn);
  CHECK(eff1.e_qn == eff8.e_qn);
  CHECK(eff1.se_qn == eff8.se_qn);
}

TEST_CASE("efficiency at n = 2 is exactly one for all three estimators") {
  const auto row = efficiency_run(2, 5000, 11);
  CHECK(std::abs(row.e_mad - 1.0) < 1e-9);
  CHECK(std::abs(row.e_sn - 1.0) < 1e-9);
  CHECK(std::abs(row.e_qn - 1.0) < 1e-9);
}

TEST_CASE("efficiency is invariant to the correction constants") {
  const auto base = efficiency_run(9, 20000, 321, 2);
  EfficiencyScales odd_scales;
  odd_scales.sd = 0.37;
  odd_scales.mad = 5.5;
  odd_scales.sn = 0.001;
  odd_scales.qn = 123.0;
  const auto scaled = efficiency_run(9, 20000, 321, 2, odd_scales);
  CHECK(close_rel(base.e_mad, scaled.e_mad, 1e-12));
  CHECK(close_rel(base.e_sn, scaled.e_sn, 1e-12));
  CHECK(close_rel(base.e_qn, scaled.e_qn, 1e-12));
  CHECK(close_rel(base.se_mad, scaled.se_mad, 1e-9));
  CHECK(close_rel(base.se_sn, scaled.se_sn, 1e-9));
  CHECK(close_rel(base.se_qn, scaled.se_qn, 1e-9));
}

TEST_CASE("efficiency ordering e_qn > e_sn > e_mad for n >= 4") {
  for (std::size_t n : {4u, 10u, 25u}) {
    const auto row = efficiency_run(n, 30000, 2025);
    CHECK(row.e_qn - row.e_sn > -3.0 * (row.se_qn + row.se_sn));
    CHECK(row.e_sn - row.e_mad > -3.0 * (row.se_sn + row.se_mad));
  }
}

TEST_CASE("factor study: streaming rows, ordering, and the parity pattern") {
  SimulationConfig config;
  for (std::size_t n = 2; n <= 20; ++n) config.n_values.push_back(n);
  config.repetitions = 100000;
  config.seed = 90210;
  config.estimators = {EstimatorKind::qn};
  config.workers = 4;

  std::vector<FactorRow> rows;
  const bool completed = run_factor_study(config, [&](const FactorRow& r) { rows.push_back(r); });
  CHECK(completed);
  REQUIRE(rows.size() == 19);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].n > rows[i - 1].n);

  // Calibrated d_n alternates: odd-n values exceed both even neighbours.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].n % 2 == 1) {
      CHECK(rows[i].factor > rows[i - 1].factor);
      if (i + 1 < rows.size()) CHECK(rows[i].factor > rows[i + 1].factor);
    }
  }
  for (const auto& row : rows) {
    CHECK(row.count == config.repetitions);
    CHECK(row.seed == config.seed);
    CHECK(row.std_variance > 0.0);
    CHECK(close_rel(row.factor, 1.0 / (row.mean * kQnConsistencyConstant)));
  }
}

TEST_CASE("factor study on an empty n list emits nothing and succeeds") {
  SimulationConfig config;
  config.repetitions = 1000;
  config.estimators = {EstimatorKind::sn};
  std::size_t rows = 0;
  CHECK(run_factor_study(config, [&](const FactorRow&) { ++rows; }));
  CHECK(rows == 0);
}

TEST_CASE("factor study refuses sd and empty estimator sets") {
  SimulationConfig config;
  config.n_values = {4};
  config.repetitions = 1000;
  config.estimators = {EstimatorKind::sd};
  CHECK_THROWS_AS(run_factor_study(config, [](const FactorRow&) {}), std::invalid_argument);
  config.estimators.clear();
  CHECK_THROWS_AS(run_factor_study(config, [](const FactorRow&) {}), std::invalid_argument);
}

TEST_CASE("a pre-set cancel flag stops the study before any row") {
  SimulationConfig config;
  config.n_values = {5, 6};
  config.repetitions = 1000;
  config.estimators = {EstimatorKind::qn};

  std::atomic<bool> cancel{true};
  std::size_t rows = 0;
  const bool completed =
      run_factor_study(config, [&](const FactorRow&) { ++rows; }, &cancel);
  CHECK_FALSE(completed);
  CHECK(rows == 0);
}

TEST_CASE("study rows are identical across worker counts") {
  SimulationConfig base;
  base.n_values = {3, 8};
  base.repetitions = 30000;
  base.seed = 1234;
  base.estimators = {EstimatorKind::sn, EstimatorKind::qn};

  const auto collect = [&](unsigned workers) {
    SimulationConfig config = base;
    config.workers = workers;
    std::vector<FactorRow> rows;
    run_factor_study(config, [&](const FactorRow& r) { rows.push_back(r); });
    return rows;
  };
  const auto rows1 = collect(1);
  const auto rows8 = collect(8);
  REQUIRE(rows1.size() == rows8.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].mean == rows8[i].mean);
    CHECK(rows1[i].variance == rows8[i].variance);
    CHECK(rows1[i].factor == rows8[i].factor);
    CHECK(rows1[i].se == rows8[i].se);
  }
}
