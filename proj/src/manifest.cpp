#include "lael/manifest.hpp"

#include <chrono>
#include <ctime>

#include <json.hpp>

namespace lael::io {

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string path, std::string subcommand,
                         std::string config_hash, std::uint64_t seed,
                         std::vector<std::string> config_lines)
    : path_(std::move(path)), subcommand_(std::move(subcommand)),
      config_hash_(std::move(config_hash)), seed_(seed),
      config_lines_(std::move(config_lines)) {}

void RunManifest::begin() {
  started_ = utc_now();
  write();
}

void RunManifest::finish(int exit_code) {
  finished_ = utc_now();
  exit_code_ = exit_code;
  write();
}

void RunManifest::write() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand_;
  j["config_hash"] = config_hash_;
  j["code_version"] = LAEL_VERSION;
  j["seed"] = seed_;
  j["started"] = started_;
  j["finished"] = finished_;
  j["exit_code"] = exit_code_;
  j["config"] = config_lines_;
  j["outputs"] = outputs_;
  std::ofstream f(path_, std::ios::trunc);
  if (!f) throw Error("cannot write manifest '" + path_ + "'");
  f << j.dump(2) << "\n";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::trunc) {
  if (!out_) throw Error("cannot write '" + path + "'");
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (!first_) out_ << ',';
  out_ << v;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

} // namespace lael::io
