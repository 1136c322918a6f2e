#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lael/common.hpp"

namespace lael::io {

/// JSON run record. begin() writes it with an empty end time; finish()
/// rewrites it with the end time, the output list and the exit code.
class RunManifest {
public:
  RunManifest(std::string path, std::string subcommand, std::string config_hash,
              std::uint64_t seed, std::vector<std::string> config_lines);

  void begin();
  void add_output(const std::string& file) { outputs_.push_back(file); }
  void finish(int exit_code);

  const std::vector<std::string>& outputs() const { return outputs_; }

private:
  void write() const;

  std::string path_;
  std::string subcommand_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::vector<std::string> config_lines_;
  std::vector<std::string> outputs_;
  std::string started_;
  std::string finished_;
  int exit_code_ = -1;
};

/// UTC timestamp in ISO 8601.
std::string utc_now();

/// Writes comma-separated rows; numbers use 17 significant digits.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

private:
  std::ofstream out_;
  bool first_ = true;
};

std::string format_double(double v);

} // namespace lael::io
