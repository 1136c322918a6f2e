#pragma once

// INI-style run configuration.
//
//   [grid]   n
//   [model]  eps n_noise xi_seed xi_kmax linsolve_tol linsolve_maxit
//            preset f0_iso
//   [time]   dt t_end snapshot_every
//   [mc]     n_members seed dt t_end antithetic
//   [output] dir
//
// Unknown sections or keys and out-of-range values are rejected with a
// message naming [section].key.

#include <cstdint>
#include <string>
#include <vector>

#include "lael/common.hpp"

namespace lael::cli {

/// Configuration problem; maps to exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct Config {
  struct Grid {
    int n = 64;
  } grid;
  struct Model {
    double eps = 0.1;
    int n_noise = 2;
    std::uint64_t xi_seed = 1;
    int xi_kmax = 2;
    double linsolve_tol = 1e-10;
    int linsolve_maxit = 500;
    std::string preset = "taylor-green"; // taylor-green | random | zero
    double f0_iso = 0.0;                 // F0 = f0_iso * identity
  } model;
  struct Time {
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_every = 100;
  } time;
  struct Mc {
    int n_members = 1000;
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double t_end = 0.5;
    bool antithetic = false;
  } mc;
  struct Output {
    std::string dir = "out";
  } output;

  /// Assigns one key from its textual value; throws ConfigError.
  void set(const std::string& section, const std::string& key,
           const std::string& value);
  /// Cross-key checks (n_noise vs kmax, etc.).
  void validate() const;

  /// Canonical "[section].key=value" lines in fixed order.
  std::vector<std::string> canonical() const;
  /// FNV-1a 64 of the canonical form, as 16 hex digits.
  std::string hash() const;
};

Config parse_config_text(const std::string& text);
Config parse_config(const std::string& path);

/// Applies "--section.key=value" (leading dashes optional).
void apply_override(Config& cfg, const std::string& arg);

} // namespace lael::cli
