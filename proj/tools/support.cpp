#include "support.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <stdexcept>

#include "json.hpp"

namespace robust_scale::cli {

std::string format_double(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
  return buf;
}

namespace {

std::size_t parse_size(std::string_view token) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::invalid_argument("cannot parse integer: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find(sep, start);
    if (end == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_missing_token(std::string_view token) {
  return token.empty() || token == "NA" || token == "na" || token == "NaN" || token == "nan";
}

}  // namespace

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> values;
  for (std::string_view item : split(text, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty item in n list");
    const std::size_t dots = item.find("..");
    if (dots == std::string_view::npos) {
      values.push_back(parse_size(item));
      continue;
    }
    const std::size_t lo = parse_size(trim(item.substr(0, dots)));
    const std::size_t hi = parse_size(trim(item.substr(dots + 2)));
    if (lo > hi) throw std::invalid_argument("descending range in n list");
    for (std::size_t n = lo; n <= hi; ++n) values.push_back(n);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) throw std::invalid_argument("empty n list");
  return values;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse seed: '" + text + "'");
  }
  return value;
}

std::vector<EstimatorKind> parse_estimator_list(const std::string& text) {
  std::vector<EstimatorKind> kinds;
  for (std::string_view item : split(text, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const EstimatorKind kind = parse_estimator_kind(item);
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
  }
  if (kinds.empty()) throw std::invalid_argument("no estimators given");
  return kinds;
}

ParsedNumbers read_numbers(std::istream& in, bool drop_missing) {
  ParsedNumbers out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view token = trim(line);
    if (token.empty()) continue;  // blank lines carry no value
    if (token.front() == '#') continue;

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    const bool parsed = (ec == std::errc() && ptr == token.data() + token.size());
    if (parsed) {
      out.values.push_back(value);
      first_content_line = false;
      continue;
    }
    if (is_missing_token(token)) {
      if (!drop_missing) {
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": missing value (pass --drop-missing to skip)");
      }
      ++out.dropped_missing;
      first_content_line = false;
      continue;
    }
    if (first_content_line) {
      // A single-column CSV header.
      first_content_line = false;
      continue;
    }
    throw std::invalid_argument("line " + std::to_string(line_no) + ": cannot parse '" +
                                std::string(token) + "'");
  }
  return out;
}

struct CsvSink::DigestState {
  EVP_MD_CTX* ctx = nullptr;
};

CsvSink::CsvSink(const std::string& path) : path_(path), digest_(new DigestState) {
  if (!is_stdout()) {
    file_.open(path_, std::ios::binary | std::ios::trunc);
    if (!file_) throw std::runtime_error("cannot open output file: " + path_);
  }
  digest_->ctx = EVP_MD_CTX_new();
  if (!digest_->ctx || EVP_DigestInit_ex(digest_->ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("cannot initialize digest");
  }
}

CsvSink::~CsvSink() {
  if (digest_->ctx) EVP_MD_CTX_free(digest_->ctx);
}

void CsvSink::write_line(const std::string& line) {
  const std::string data = line + "\n";
  if (is_stdout()) {
    std::cout << data << std::flush;
  } else {
    file_ << data;
    file_.flush();
  }
  EVP_DigestUpdate(digest_->ctx, data.data(), data.size());
  if (header_) ++rows_;
}

std::string CsvSink::hex_digest() {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(digest_->ctx, md, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const ManifestInfo& info) {
  nlohmann::json doc;
  doc["command"] = info.command;
  doc["version"] = info.version;
  doc["config"] = nlohmann::json::parse(info.config_json);
  doc["started_at"] = info.started_at;
  doc["finished_at"] = info.finished_at;
  doc["output"] = {{"path", info.output_path},
                   {"sha256", info.sha256},
                   {"rows", info.rows},
                   {"truncated", info.truncated}};

  const std::string path = info.output_path + ".manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open manifest file: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace robust_scale::cli
