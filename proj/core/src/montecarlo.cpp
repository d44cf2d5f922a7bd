#include "robust_scale/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "robust_scale/estimators.hpp"

namespace robust_scale {

namespace {

constexpr std::uint64_t kPurposeFactorStudy = 0x666163746f7273ull;
constexpr std::uint64_t kPurposeEfficiencyStudy = 0x656666ull;

// Work is split into a fixed number of shards per (study, n) unit, each
// with its own derived substream, so the result is a pure function of
// (seed, config) no matter how many workers execute the shards.
constexpr std::size_t kShardsPerUnit = 64;

struct Shard {
  std::size_t index;       // substream derivation uses this, not the count
  std::uint64_t reps;
};

std::vector<Shard> plan_shards(std::uint64_t repetitions) {
  std::vector<Shard> shards;
  shards.reserve(kShardsPerUnit);
  const std::uint64_t base = repetitions / kShardsPerUnit;
  const std::uint64_t extra = repetitions % kShardsPerUnit;
  for (std::size_t i = 0; i < kShardsPerUnit; ++i) {
    const std::uint64_t reps = base + (i < extra ? 1 : 0);
    if (reps > 0) shards.push_back({i, reps});
  }
  return shards;
}

// Runs task(i) for i in [0, count) on `workers` threads. The first task
// exception, if any, is rethrown on the calling thread. Returns false if
// `cancel` interrupted the sweep before every task ran.
bool for_each_shard(std::size_t count, unsigned workers, const std::atomic<bool>* cancel,
                    const std::function<void(std::size_t)>& task) {
  const auto cancelled = [&] { return cancel && cancel->load(std::memory_order_relaxed); };
  workers = std::max(1u, workers);

  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      if (cancelled()) return false;
      task(i);
    }
    return !cancelled();  // a task may have stopped early on cancellation
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      if (cancelled() || aborted.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        aborted.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
  return !cancelled() && next.load() >= count;
}

void validate_common(std::size_t n, std::uint64_t reps) {
  if (n < 2) throw std::invalid_argument("need at least 2 observations");
  if (reps < 100) throw std::invalid_argument("repetitions must be at least 100");
}

double raw_estimate(EstimatorKind kind, const Sample& sample) {
  switch (kind) {
    case EstimatorKind::mad: return mad_raw(sample);
    case EstimatorKind::sn: return sn_fast(sample);
    case EstimatorKind::qn: return qn_fast(sample);
    case EstimatorKind::sd: return sd_unbiased(sample);
  }
  throw std::invalid_argument("unknown estimator kind");
}

std::vector<EstimatorKind> dedupe_kinds(std::vector<EstimatorKind> kinds) {
  std::vector<EstimatorKind> out;
  for (EstimatorKind k : kinds) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

// Per-(n) factor-study unit: shard moments of the raw estimates.
struct FactorUnit {
  std::vector<std::vector<MomentAccumulator>> per_shard;  // [shard][kind]
  bool completed = false;
};

FactorUnit run_factor_unit(std::size_t n, std::uint64_t reps, std::uint64_t seed,
                           std::span<const EstimatorKind> kinds, unsigned workers,
                           const std::atomic<bool>* cancel) {
  const auto shards = plan_shards(reps);
  FactorUnit unit;
  unit.per_shard.assign(shards.size(), std::vector<MomentAccumulator>(kinds.size()));

  unit.completed = for_each_shard(
      shards.size(), workers, cancel, [&](std::size_t s) {
        RandomStream stream(seed, derive_substream(kPurposeFactorStudy, n, shards[s].index));
        std::vector<double> values(n);
        auto& accs = unit.per_shard[s];
        for (std::uint64_t rep = 0; rep < shards[s].reps; ++rep) {
          if ((rep & 511u) == 0 && cancel && cancel->load(std::memory_order_relaxed)) return;
          stream.fill_normal(values);
          Sample sample(values);
          for (std::size_t k = 0; k < kinds.size(); ++k) {
            accs[k].add(raw_estimate(kinds[k], sample));
          }
        }
      });
  return unit;
}

MomentAccumulator merge_all(const std::vector<std::vector<MomentAccumulator>>& per_shard,
                            std::size_t kind_index) {
  MomentAccumulator total;
  for (const auto& shard : per_shard) total.merge(shard[kind_index]);
  return total;
}

FactorRow make_factor_row(std::size_t n, EstimatorKind kind, const MomentAccumulator& acc,
                          std::uint64_t seed) {
  const double constant = asymptotic_constant(kind);
  const double mean = acc.mean();
  if (mean == 0.0) throw std::invalid_argument("degenerate estimator distribution");
  FactorRow row;
  row.n = n;
  row.kind = kind;
  row.mean = mean;
  row.variance = acc.variance();
  row.std_variance = standardized_variance(mean, row.variance, n);
  row.factor = 1.0 / (mean * constant);
  const double se_mean = std::sqrt(row.variance / static_cast<double>(acc.count()));
  row.se = se_mean / (mean * mean * constant);
  row.count = acc.count();
  row.seed = seed;
  return row;
}

// Efficiency study: per-shard moments of the four estimators on shared samples.
struct EfficiencyUnit {
  std::vector<std::array<MomentAccumulator, 4>> per_shard;  // sd, mad, sn, qn
  bool completed = false;
};

EfficiencyUnit run_efficiency_unit(std::size_t n, std::uint64_t reps, std::uint64_t seed,
                                   unsigned workers, const EfficiencyScales& scales,
                                   const std::atomic<bool>* cancel) {
  const auto shards = plan_shards(reps);
  EfficiencyUnit unit;
  unit.per_shard.assign(shards.size(), {});

  unit.completed = for_each_shard(
      shards.size(), workers, cancel, [&](std::size_t s) {
        RandomStream stream(seed, derive_substream(kPurposeEfficiencyStudy, n, shards[s].index));
        std::vector<double> values(n);
        auto& accs = unit.per_shard[s];
        for (std::uint64_t rep = 0; rep < shards[s].reps; ++rep) {
          if ((rep & 511u) == 0 && cancel && cancel->load(std::memory_order_relaxed)) return;
          stream.fill_normal(values);
          Sample sample(values);
          accs[0].add(scales.sd * sd_unbiased(sample));
          accs[1].add(scales.mad * mad_raw(sample));
          accs[2].add(scales.sn * sn_fast(sample));
          accs[3].add(scales.qn * qn_fast(sample));
        }
      });
  return unit;
}

std::array<double, 3> efficiency_from(const std::array<MomentAccumulator, 4>& accs,
                                      std::size_t n) {
  const double vs_sd = standardized_variance(accs[0].mean(), accs[0].variance(), n);
  std::array<double, 3> e{};
  for (std::size_t i = 0; i < 3; ++i) {
    e[i] = vs_sd / standardized_variance(accs[i + 1].mean(), accs[i + 1].variance(), n);
  }
  return e;
}

EfficiencyRow make_efficiency_row(std::size_t n, const EfficiencyUnit& unit, std::uint64_t seed) {
  const std::size_t shard_count = unit.per_shard.size();

  std::array<MomentAccumulator, 4> total{};
  for (const auto& shard : unit.per_shard) {
    for (std::size_t k = 0; k < 4; ++k) total[k].merge(shard[k]);
  }
  const auto point = efficiency_from(total, n);

  // Leave-one-shard-out jackknife for the standard errors; prefix/suffix
  // merges keep it O(shards).
  std::array<double, 3> se{};
  if (shard_count > 1) {
    std::vector<std::array<MomentAccumulator, 4>> prefix(shard_count);
    std::vector<std::array<MomentAccumulator, 4>> suffix(shard_count);
    prefix[0] = unit.per_shard[0];
    for (std::size_t s = 1; s < shard_count; ++s) {
      prefix[s] = prefix[s - 1];
      for (std::size_t k = 0; k < 4; ++k) prefix[s][k].merge(unit.per_shard[s][k]);
    }
    suffix[shard_count - 1] = unit.per_shard[shard_count - 1];
    for (std::size_t s = shard_count - 1; s-- > 0;) {
      suffix[s] = unit.per_shard[s];
      for (std::size_t k = 0; k < 4; ++k) suffix[s][k].merge(suffix[s + 1][k]);
    }

    std::vector<std::array<double, 3>> leave_out(shard_count);
    std::array<double, 3> mean_loo{};
    for (std::size_t g = 0; g < shard_count; ++g) {
      std::array<MomentAccumulator, 4> rest{};
      if (g > 0) rest = prefix[g - 1];
      if (g + 1 < shard_count) {
        for (std::size_t k = 0; k < 4; ++k) rest[k].merge(suffix[g + 1][k]);
      }
      leave_out[g] = efficiency_from(rest, n);
      for (std::size_t i = 0; i < 3; ++i) mean_loo[i] += leave_out[g][i];
    }
    for (std::size_t i = 0; i < 3; ++i) mean_loo[i] /= static_cast<double>(shard_count);
    for (std::size_t i = 0; i < 3; ++i) {
      double ss = 0.0;
      for (std::size_t g = 0; g < shard_count; ++g) {
        const double d = leave_out[g][i] - mean_loo[i];
        ss += d * d;
      }
      se[i] = std::sqrt(ss * static_cast<double>(shard_count - 1) /
                        static_cast<double>(shard_count));
    }
  }

  EfficiencyRow row;
  row.n = n;
  row.e_mad = point[0];
  row.e_sn = point[1];
  row.e_qn = point[2];
  row.se_mad = se[0];
  row.se_sn = se[1];
  row.se_qn = se[2];
  row.count = total[0].count();
  row.seed = seed;
  return row;
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

void MomentAccumulator::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / (na + nb);
  m2_ += other.m2_ + delta * delta * na * nb / (na + nb);
  count_ += other.count_;
}

double MomentAccumulator::variance() const {
  if (count_ < 2) throw std::invalid_argument("variance needs at least 2 values");
  return m2_ / static_cast<double>(count_ - 1);
}

double standardized_variance(double mean, double variance, std::size_t n) {
  if (mean == 0.0) throw std::invalid_argument("degenerate estimator distribution");
  if (variance < 0.0) throw std::invalid_argument("negative variance");
  return static_cast<double>(n) * variance / (mean * mean);
}

Sample sample_normal(std::size_t n, RandomStream& stream) {
  std::vector<double> values(n);
  stream.fill_normal(values);
  return Sample(std::move(values));
}

CalibrationResult calibrate_factor(EstimatorKind kind, std::size_t n, std::uint64_t reps,
                                   std::uint64_t seed, unsigned workers) {
  if (kind == EstimatorKind::sd) throw std::invalid_argument("SD needs no calibration");
  validate_common(n, reps);
  const EstimatorKind kinds[] = {kind};
  const auto unit = run_factor_unit(n, reps, seed, kinds, workers, nullptr);
  const auto row = make_factor_row(n, kind, merge_all(unit.per_shard, 0), seed);
  return {row.factor, row.se};
}

EfficiencyRow efficiency_run(std::size_t n, std::uint64_t reps, std::uint64_t seed,
                             unsigned workers, const EfficiencyScales& scales) {
  validate_common(n, reps);
  const auto unit = run_efficiency_unit(n, reps, seed, workers, scales, nullptr);
  return make_efficiency_row(n, unit, seed);
}

bool run_factor_study(const SimulationConfig& config,
                      const std::function<void(const FactorRow&)>& emit,
                      const std::atomic<bool>* cancel) {
  const auto kinds = dedupe_kinds(config.estimators);
  if (kinds.empty()) throw std::invalid_argument("no estimators requested");
  for (EstimatorKind k : kinds) {
    if (k == EstimatorKind::sd) throw std::invalid_argument("SD needs no calibration");
  }
  for (std::size_t n : sorted_unique(config.n_values)) {
    validate_common(n, config.repetitions);
    const auto unit = run_factor_unit(n, config.repetitions, config.seed, kinds,
                                      config.workers, cancel);
    if (!unit.completed) return false;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      emit(make_factor_row(n, kinds[k], merge_all(unit.per_shard, k), config.seed));
    }
  }
  return true;
}

bool run_efficiency_study(const SimulationConfig& config,
                          const std::function<void(const EfficiencyRow&)>& emit,
                          const std::atomic<bool>* cancel) {
  for (std::size_t n : sorted_unique(config.n_values)) {
    validate_common(n, config.repetitions);
    const auto unit = run_efficiency_unit(n, config.repetitions, config.seed, config.workers,
                                          EfficiencyScales{}, cancel);
    if (!unit.completed) return false;
    emit(make_efficiency_row(n, unit, config.seed));
  }
  return true;
}

}  // namespace robust_scale
