#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robust_scale/sample.hpp"

namespace robust_scale::cli {

// %.{sig}g with the C locale (decimal point), stable across runs.
std::string format_double(double value, int significant_digits);

// Inclusive "a..b" ranges and comma lists ("2..10,51,100"); duplicates are
// removed and the result is sorted ascending. Throws std::invalid_argument
// on malformed input.
std::vector<std::size_t> parse_n_list(const std::string& text);

std::uint64_t parse_seed(const std::string& text);

// Comma-separated estimator names.
std::vector<EstimatorKind> parse_estimator_list(const std::string& text);

struct ParsedNumbers {
  std::vector<double> values;
  std::size_t dropped_missing = 0;
};

// Newline-separated decimals or a single-column CSV with a header line.
// Missing values ("NA", "NaN", "nan", "na", empty field) are skipped when
// drop_missing is set and rejected otherwise; any other unparseable token
// is an error. Errors carry the 1-based line number.
ParsedNumbers read_numbers(std::istream& in, bool drop_missing);

// CSV sink with incremental SHA-256 of everything written; rows are
// flushed as they are produced so an interrupted run leaves a usable
// prefix behind.
class CsvSink {
 public:
  // path "-" means stdout (digest still computed, no manifest expected).
  explicit CsvSink(const std::string& path);
  ~CsvSink();

  CsvSink(const CsvSink&) = delete;
  CsvSink& operator=(const CsvSink&) = delete;

  void write_line(const std::string& line);
  std::uint64_t rows_written() const { return rows_; }  // excludes the header
  void set_header_written() { header_ = true; }
  std::string hex_digest();  // finalizes; call once, after the last write

  const std::string& path() const { return path_; }
  bool is_stdout() const { return path_ == "-"; }

 private:
  std::string path_;
  std::ofstream file_;
  std::uint64_t rows_ = 0;
  bool header_ = false;
  struct DigestState;
  std::unique_ptr<DigestState> digest_;
};

struct ManifestInfo {
  std::string command;
  std::string version;
  std::string config_json;  // serialized configuration object
  std::string started_at;
  std::string finished_at;
  std::string output_path;
  std::string sha256;
  std::uint64_t rows = 0;
  bool truncated = false;
};

std::string iso8601_utc_now();

// Writes `<output path>.manifest.json`.
void write_manifest(const ManifestInfo& info);

}  // namespace robust_scale::cli
