#include "lael/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lael::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "]." + key;
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(where(section, key) + ": expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& section, const std::string& key,
                 const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(where(section, key) + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where(section, key) + ": expected true or false, got '" + v + "'");
}

void require(bool ok, const std::string& section, const std::string& key,
             const std::string& what) {
  if (!ok) throw ConfigError(where(section, key) + ": " + what);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

void Config::set(const std::string& s, const std::string& k,
                 const std::string& v) {
  if (s == "grid") {
    if (k == "n") {
      const long long n = to_int(s, k, v);
      require(n >= 8 && n <= 4096 && (n & (n - 1)) == 0, s, k,
              "must be a power of two in [8, 4096]");
      grid.n = int(n);
      return;
    }
  } else if (s == "model") {
    if (k == "eps") {
      model.eps = to_double(s, k, v);
      require(model.eps >= 0.0 && model.eps < 1.0, s, k, "must lie in [0, 1)");
      return;
    }
    if (k == "n_noise") {
      const long long x = to_int(s, k, v);
      require(x >= 0 && x <= 64, s, k, "must lie in [0, 64]");
      model.n_noise = int(x);
      return;
    }
    if (k == "xi_seed") {
      const long long x = to_int(s, k, v);
      require(x >= 0, s, k, "must be non-negative");
      model.xi_seed = std::uint64_t(x);
      return;
    }
    if (k == "xi_kmax") {
      const long long x = to_int(s, k, v);
      require(x >= 1 && x <= 64, s, k, "must lie in [1, 64]");
      model.xi_kmax = int(x);
      return;
    }
    if (k == "linsolve_tol") {
      model.linsolve_tol = to_double(s, k, v);
      require(model.linsolve_tol > 0.0 && model.linsolve_tol <= 1e-4, s, k,
              "must lie in (0, 1e-4]");
      return;
    }
    if (k == "linsolve_maxit") {
      const long long x = to_int(s, k, v);
      require(x >= 1 && x <= 100000, s, k, "must lie in [1, 100000]");
      model.linsolve_maxit = int(x);
      return;
    }
    if (k == "preset") {
      require(v == "taylor-green" || v == "random" || v == "zero", s, k,
              "must be taylor-green, random or zero");
      model.preset = v;
      return;
    }
    if (k == "f0_iso") {
      model.f0_iso = to_double(s, k, v);
      require(model.f0_iso >= 0.0, s, k, "must be non-negative");
      return;
    }
  } else if (s == "time") {
    if (k == "dt") {
      time.dt = to_double(s, k, v);
      require(time.dt > 0.0 && time.dt <= 1.0, s, k, "must lie in (0, 1]");
      return;
    }
    if (k == "t_end") {
      time.t_end = to_double(s, k, v);
      require(time.t_end >= 0.0, s, k, "must be non-negative");
      return;
    }
    if (k == "snapshot_every") {
      const long long x = to_int(s, k, v);
      require(x >= 0, s, k, "must be non-negative (0 disables snapshots)");
      time.snapshot_every = int(x);
      return;
    }
  } else if (s == "mc") {
    if (k == "n_members") {
      const long long x = to_int(s, k, v);
      require(x >= 2 && x <= 10000000, s, k, "must lie in [2, 1e7]");
      mc.n_members = int(x);
      return;
    }
    if (k == "seed") {
      const long long x = to_int(s, k, v);
      require(x >= 0, s, k, "must be non-negative");
      mc.seed = std::uint64_t(x);
      return;
    }
    if (k == "dt") {
      mc.dt = to_double(s, k, v);
      require(mc.dt > 0.0 && mc.dt <= 1.0, s, k, "must lie in (0, 1]");
      return;
    }
    if (k == "t_end") {
      mc.t_end = to_double(s, k, v);
      require(mc.t_end > 0.0, s, k, "must be positive");
      return;
    }
    if (k == "antithetic") {
      mc.antithetic = to_bool(s, k, v);
      return;
    }
  } else if (s == "output") {
    if (k == "dir") {
      require(!v.empty(), s, k, "must not be empty");
      output.dir = v;
      return;
    }
  } else {
    throw ConfigError("unknown section [" + s + "]");
  }
  throw ConfigError("unknown key " + where(s, k));
}

void Config::validate() const {
  if (model.n_noise > 0 && model.xi_kmax >= grid.n / 4)
    throw ConfigError("[model].xi_kmax: must be below [grid].n / 4");
  if (mc.antithetic && mc.n_members % 2 != 0)
    throw ConfigError("[mc].n_members: must be even when antithetic is set");
}

std::vector<std::string> Config::canonical() const {
  return {
      "[grid].n=" + std::to_string(grid.n),
      "[model].eps=" + num(model.eps),
      "[model].n_noise=" + std::to_string(model.n_noise),
      "[model].xi_seed=" + std::to_string(model.xi_seed),
      "[model].xi_kmax=" + std::to_string(model.xi_kmax),
      "[model].linsolve_tol=" + num(model.linsolve_tol),
      "[model].linsolve_maxit=" + std::to_string(model.linsolve_maxit),
      "[model].preset=" + model.preset,
      "[model].f0_iso=" + num(model.f0_iso),
      "[time].dt=" + num(time.dt),
      "[time].t_end=" + num(time.t_end),
      "[time].snapshot_every=" + std::to_string(time.snapshot_every),
      "[mc].n_members=" + std::to_string(mc.n_members),
      "[mc].seed=" + std::to_string(mc.seed),
      "[mc].dt=" + num(mc.dt),
      "[mc].t_end=" + num(mc.t_end),
      "[mc].antithetic=" + std::string(mc.antithetic ? "true" : "false"),
      "[output].dir=" + output.dir,
  };
}

std::string Config::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& line : canonical()) {
    for (unsigned char ch : line + "\n") {
      h ^= ch;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "model" && section != "time" &&
          section != "mc" && section != "output")
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(Config& cfg, const std::string& arg) {
  std::string a = arg;
  while (!a.empty() && a.front() == '-') a.erase(0, 1);
  const auto eq = a.find('=');
  const auto dot = a.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override '" + arg + "' must look like --section.key=value");
  cfg.set(a.substr(0, dot), a.substr(dot + 1, eq - dot - 1), a.substr(eq + 1));
}

} // namespace lael::cli
