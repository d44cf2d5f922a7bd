#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robust_scale/estimators.hpp"
#include "robust_scale/fitting.hpp"
#include "robust_scale/montecarlo.hpp"
#include "robust_scale/version.hpp"
#include "support.hpp"

namespace rs = robust_scale;
namespace cli = robust_scale::cli;

namespace {

std::atomic<bool> g_interrupted{false};

void handle_interrupt(int) { g_interrupted.store(true, std::memory_order_relaxed); }

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInterrupted = 130;

// --seed wins; otherwise ROBUST_SCALE_SEED; otherwise a fixed default.
std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_value) {
  if (seed_given) return seed_value;
  if (const char* env = std::getenv("ROBUST_SCALE_SEED")) return cli::parse_seed(env);
  return 42;
}

std::string kinds_to_csv(const std::vector<rs::EstimatorKind>& kinds) {
  std::string out;
  for (const auto& kind : kinds) {
    if (!out.empty()) out.push_back(',');
    out += rs::to_string(kind);
  }
  return out;
}

struct EstimateOptions {
  std::string input = "-";
  std::string estimators = "mad,sn,qn,sd";
  std::string model = "refined";
  bool drop_missing = false;
};

int run_estimate(const EstimateOptions& opt) {
  const auto kinds = cli::parse_estimator_list(opt.estimators);
  const auto model = rs::parse_correction_model(opt.model);

  cli::ParsedNumbers numbers;
  if (opt.input == "-") {
    numbers = cli::read_numbers(std::cin, opt.drop_missing);
  } else {
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) {
      std::cerr << "robust-scale: cannot open input: " << opt.input << "\n";
      return kExitUsage;
    }
    numbers = cli::read_numbers(in, opt.drop_missing);
  }
  if (numbers.values.size() < 2) {
    std::cerr << "robust-scale: need at least 2 observations, got " << numbers.values.size()
              << "\n";
    return kExitUsage;
  }

  const rs::Sample sample(numbers.values);
  std::cout << "estimator,n,raw,factor,constant,estimate\n";
  for (const auto kind : kinds) {
    const auto parts = rs::estimate_parts(sample, kind, model);
    std::cout << rs::to_string(kind) << ',' << sample.size() << ','
              << cli::format_double(parts.raw, 10) << ',' << cli::format_double(parts.factor, 6)
              << ',' << cli::format_double(parts.constant, 15) << ','
              << cli::format_double(parts.value, 10) << "\n";
  }
  return kExitOk;
}

struct SimOptions {
  std::string n_text;
  std::uint64_t reps = 100000;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  unsigned workers = 1;
  std::string out = "-";
  std::string estimators = "sn,qn";
  std::string moments_out;
};

int run_calibrate(const SimOptions& opt) {
  rs::SimulationConfig config;
  config.n_values = cli::parse_n_list(opt.n_text);
  config.repetitions = opt.reps;
  config.seed = resolve_seed(opt.seed_given, opt.seed_value);
  config.estimators = cli::parse_estimator_list(opt.estimators);
  config.workers = opt.workers;

  const std::string started = cli::iso8601_utc_now();
  cli::CsvSink sink(opt.out);
  sink.write_line("n,estimator,factor,se,mean_raw,reps,seed");
  sink.set_header_written();

  std::optional<cli::CsvSink> moments;
  if (!opt.moments_out.empty()) {
    moments.emplace(opt.moments_out);
    moments->write_line("n,estimator,mean,variance,std_variance,factor,se");
    moments->set_header_written();
  }

  const bool completed = rs::run_factor_study(
      config,
      [&](const rs::FactorRow& row) {
        std::ostringstream line;
        line << row.n << ',' << rs::to_string(row.kind) << ','
             << cli::format_double(row.factor, 6) << ',' << cli::format_double(row.se, 6) << ','
             << cli::format_double(row.mean, 10) << ',' << row.count << ',' << row.seed;
        sink.write_line(line.str());
        std::cerr << "calibrate: n=" << row.n << " " << rs::to_string(row.kind) << "\n";
        if (moments) {
          std::ostringstream full;
          full << row.n << ',' << rs::to_string(row.kind) << ','
               << cli::format_double(row.mean, 10) << ',' << cli::format_double(row.variance, 10)
               << ',' << cli::format_double(row.std_variance, 10) << ','
               << cli::format_double(row.factor, 6) << ',' << cli::format_double(row.se, 6);
          moments->write_line(full.str());
        }
      },
      &g_interrupted);

  if (!completed) {
    sink.write_line("#truncated");
    if (moments) moments->write_line("#truncated");
  }
  const std::uint64_t rows = sink.rows_written();
  const std::string digest = sink.hex_digest();

  if (!sink.is_stdout()) {
    const nlohmann::json config_json = {
        {"n", config.n_values},
        {"reps", config.repetitions},
        {"seed", config.seed},
        {"estimators", kinds_to_csv(config.estimators)},
        {"workers", config.workers},
    };
    cli::write_manifest({"calibrate", rs::kVersion, config_json.dump(), started,
                         cli::iso8601_utc_now(), sink.path(), digest, rows, !completed});
  }
  return completed ? kExitOk : kExitInterrupted;
}

int run_efficiency(const SimOptions& opt) {
  rs::SimulationConfig config;
  config.n_values = cli::parse_n_list(opt.n_text);
  config.repetitions = opt.reps;
  config.seed = resolve_seed(opt.seed_given, opt.seed_value);
  config.workers = opt.workers;

  const std::string started = cli::iso8601_utc_now();
  cli::CsvSink sink(opt.out);
  sink.write_line("n,e_mad,e_sn,e_qn,se_mad,se_sn,se_qn,reps,seed");
  sink.set_header_written();

  const bool completed = rs::run_efficiency_study(
      config,
      [&](const rs::EfficiencyRow& row) {
        std::ostringstream line;
        line << row.n << ',' << cli::format_double(row.e_mad, 6) << ','
             << cli::format_double(row.e_sn, 6) << ',' << cli::format_double(row.e_qn, 6) << ','
             << cli::format_double(row.se_mad, 6) << ',' << cli::format_double(row.se_sn, 6)
             << ',' << cli::format_double(row.se_qn, 6) << ',' << row.count << ',' << row.seed;
        sink.write_line(line.str());
        std::cerr << "efficiency: n=" << row.n << "\n";
      },
      &g_interrupted);

  if (!completed) sink.write_line("#truncated");
  const std::uint64_t rows = sink.rows_written();
  const std::string digest = sink.hex_digest();

  if (!sink.is_stdout()) {
    const nlohmann::json config_json = {
        {"n", config.n_values},
        {"reps", config.repetitions},
        {"seed", config.seed},
        {"workers", config.workers},
    };
    cli::write_manifest({"efficiency", rs::kVersion, config_json.dump(), started,
                         cli::iso8601_utc_now(), sink.path(), digest, rows, !completed});
  }
  return completed ? kExitOk : kExitInterrupted;
}

// Factor CSV reader: header-addressed columns, '#' lines skipped. Requires
// `n` and `factor` columns; rows are filtered by estimator when both the
// column and the flag are present.
std::vector<std::pair<std::size_t, double>> read_factor_csv(const std::string& path,
                                                            const std::string& estimator) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input: " + path);

  std::string line;
  do {
    if (!std::getline(in, line)) throw std::invalid_argument("empty factor CSV");
  } while (line.empty() || line[0] == '#');
  std::map<std::string, std::size_t> columns;
  {
    std::stringstream header(line);
    std::string name;
    std::size_t index = 0;
    while (std::getline(header, name, ',')) columns[name] = index++;
  }
  if (!columns.count("n") || !columns.count("factor")) {
    throw std::invalid_argument("factor CSV needs 'n' and 'factor' columns");
  }
  const bool filter = columns.count("estimator") && !estimator.empty();

  std::vector<std::pair<std::size_t, double>> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    try {
      if (filter && fields.at(columns["estimator"]) != estimator) continue;
      points.emplace_back(std::stoull(fields.at(columns["n"])),
                          std::stod(fields.at(columns["factor"])));
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": malformed factor CSV row");
    }
  }
  return points;
}

struct FitOptions {
  std::string input;
  std::string estimator;
  std::string parity = "odd";
  std::string window = "101..1000";
};

int run_fit(const FitOptions& opt) {
  const auto window = cli::parse_n_list(opt.window);
  auto points = read_factor_csv(opt.input, opt.estimator);
  std::erase_if(points, [&](const auto& p) {
    return p.first < window.front() || p.first > window.back();
  });
  const auto fit = rs::fit_inverse_poly(points, rs::parse_parity(opt.parity));

  const nlohmann::json doc = {
      {"estimator", opt.estimator.empty() ? "all" : opt.estimator},
      {"parity", std::string(rs::to_string(fit.parity))},
      {"window", {window.front(), window.back()}},
      {"alpha", fit.alpha},
      {"beta", fit.beta},
      {"residual_rms", fit.residual_rms},
      {"n_points", fit.n_points},
  };
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

struct CompareOptions {
  std::string estimator;
  std::string models;
  std::string n_text;
  std::string out;
};

int run_compare_models(const CompareOptions& opt) {
  const auto kind = rs::parse_estimator_kind(opt.estimator);
  std::vector<std::string> model_names;
  {
    std::stringstream ss(opt.models);
    std::string item;
    while (std::getline(ss, item, ',')) model_names.push_back(item);
  }
  if (model_names.size() != 2) {
    throw std::invalid_argument("--models needs exactly two comma-separated models");
  }
  const auto model_a = rs::parse_correction_model(model_names[0]);
  const auto model_b = rs::parse_correction_model(model_names[1]);
  const auto n_values = cli::parse_n_list(opt.n_text);

  const auto report = rs::compare_models(kind, model_a, model_b, n_values);

  if (!opt.out.empty()) {
    cli::CsvSink rows(opt.out);
    rows.write_line("n,factor_a,factor_b,abs_diff");
    rows.set_header_written();
    for (const auto& row : report.rows) {
      std::ostringstream line;
      line << row.n << ',' << cli::format_double(row.factor_a, 6) << ','
           << cli::format_double(row.factor_b, 6) << ',' << cli::format_double(row.abs_diff, 6);
      rows.write_line(line.str());
    }
  }

  std::cout << "estimator,model_a,model_b,max_abs_diff,n_at_max\n";
  std::cout << opt.estimator << ',' << model_names[0] << ',' << model_names[1] << ','
            << cli::format_double(report.max_abs_diff, 6) << ',' << report.n_at_max << "\n";
  return kExitOk;
}

struct ExportOptions {
  std::string estimator;
  std::string model = "refined";
  std::string n_text;
  std::string out = "-";
};

int run_export_factors(const ExportOptions& opt) {
  const auto kind = rs::parse_estimator_kind(opt.estimator);
  const auto model = rs::parse_correction_model(opt.model);
  const auto n_values = cli::parse_n_list(opt.n_text);

  cli::CsvSink sink(opt.out);
  sink.write_line("n,factor,model,estimator");
  sink.set_header_written();
  for (const std::size_t n : n_values) {
    std::ostringstream line;
    line << n << ',' << cli::format_double(rs::factor(kind, n, model), 6) << ','
         << rs::to_string(model) << ',' << rs::to_string(kind);
    sink.write_line(line.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust scale estimation (MAD, Sn, Qn, unbiased SD) with refined "
               "finite-sample bias correction and a deterministic Monte-Carlo engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("robust-scale ") + rs::kVersion);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate scale from a file or stdin");
  estimate->add_option("input", est.input, "Input path, '-' for stdin")->capture_default_str();
  estimate->add_option("--estimators", est.estimators, "Comma list of mad,sn,qn,sd")
      ->capture_default_str();
  estimate
      ->add_option("--model", est.model,
                   "Correction model: refined|croux1992|robustbase|asymptotic")
      ->capture_default_str();
  estimate->add_flag("--drop-missing", est.drop_missing,
                     "Skip NA/NaN/empty values instead of failing");

  SimOptions cal;
  auto* calibrate =
      app.add_subcommand("calibrate", "Monte-Carlo bias-correction factor calibration");
  calibrate->add_option("--n", cal.n_text, "Sample sizes, e.g. 2..20 or 3,7,10")->required();
  calibrate->add_option("--reps", cal.reps, "Repetitions per sample size")->capture_default_str();
  calibrate->add_option("--seed", cal.seed_value, "RNG seed (default: $ROBUST_SCALE_SEED or 42)");
  calibrate->add_option("--workers", cal.workers, "Worker threads")->capture_default_str();
  calibrate->add_option("--out", cal.out, "Output CSV path, '-' for stdout")
      ->capture_default_str();
  calibrate->add_option("--estimators", cal.estimators, "Comma list of mad,sn,qn")
      ->capture_default_str();
  calibrate->add_option("--moments-out", cal.moments_out,
                        "Also write full moment rows (n,estimator,mean,variance,...)");

  SimOptions eff;
  auto* efficiency = app.add_subcommand("efficiency", "Finite-sample Gaussian efficiency study");
  efficiency->add_option("--n", eff.n_text, "Sample sizes, e.g. 2..20 or 3,7,10")->required();
  efficiency->add_option("--reps", eff.reps, "Repetitions per sample size")
      ->capture_default_str();
  efficiency->add_option("--seed", eff.seed_value,
                         "RNG seed (default: $ROBUST_SCALE_SEED or 42)");
  efficiency->add_option("--workers", eff.workers, "Worker threads")->capture_default_str();
  efficiency->add_option("--out", eff.out, "Output CSV path, '-' for stdout")
      ->capture_default_str();

  FitOptions fito;
  auto* fit = app.add_subcommand("fit", "Fit 1 + a/n + b/n^2 to a factor CSV");
  fit->add_option("--input", fito.input, "Factor CSV (calibrate output format)")->required();
  fit->add_option("--estimator", fito.estimator, "Filter rows by estimator column");
  fit->add_option("--parity", fito.parity, "odd|even")->capture_default_str();
  fit->add_option("--window", fito.window, "Inclusive n window, e.g. 101..1000")
      ->capture_default_str();

  CompareOptions cmp;
  auto* compare =
      app.add_subcommand("compare-models", "Max |factor_a - factor_b| over an n range");
  compare->add_option("--estimator", cmp.estimator, "sn or qn")->required();
  compare->add_option("--models", cmp.models, "Two comma-separated models")->required();
  compare->add_option("--n", cmp.n_text, "Sample sizes, e.g. 2..100")->required();
  compare->add_option("--out", cmp.out, "Optional per-n CSV path");

  ExportOptions exp;
  auto* export_factors = app.add_subcommand("export-factors", "Dump a factor table as CSV");
  export_factors->add_option("--estimator", exp.estimator, "sn or qn")->required();
  export_factors->add_option("--model", exp.model, "Correction model")->capture_default_str();
  export_factors->add_option("--n", exp.n_text, "Sample sizes")->required();
  export_factors->add_option("--out", exp.out, "Output CSV path, '-' for stdout")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::signal(SIGINT, handle_interrupt);
  std::signal(SIGTERM, handle_interrupt);
  cal.seed_given = calibrate->count("--seed") > 0;
  eff.seed_given = efficiency->count("--seed") > 0;

  try {
    if (estimate->parsed()) return run_estimate(est);
    if (calibrate->parsed()) return run_calibrate(cal);
    if (efficiency->parsed()) return run_efficiency(eff);
    if (fit->parsed()) return run_fit(fito);
    if (compare->parsed()) return run_compare_models(cmp);
    if (export_factors->parsed()) return run_export_factors(exp);
  } catch (const std::invalid_argument& e) {
    std::cerr << "robust-scale: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "robust-scale: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
