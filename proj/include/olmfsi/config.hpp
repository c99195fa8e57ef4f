#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>

#include "olmfsi/errors.hpp"
#include "olmfsi/verification.hpp"

namespace olmfsi {

/// Recognised `key = value` entries. Each key applies to the problems that
/// use it and is ignored by the others.
inline constexpr std::array<std::string_view, 20> kConfigKeys = {
    "nu_f",    "gamma",     "delta",  "E_s",   "nu_s",         "tol",          "omega_max",
    "omega0",  "max_outer", "newton_maxit", "relaxation", "symmetric_stress", "material",
    "bg_nx",   "bg_ny",     "front_nx", "front_cell", "refinements", "ubar",  "U0"};

/// Parsed configuration. Lines are `key = value`; `#` starts a comment.
/// Unknown keys, repeated keys and malformed lines are InputErrors.
class Config {
 public:
  static Config parse(std::istream& is, const std::string& source = "config") {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string where = source + ":" + std::to_string(lineno);
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw InputError(where + ": expected 'key = value'");
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end())
        throw InputError(where + ": unknown key '" + key + "'");
      if (value.empty()) throw InputError(where + ": empty value for '" + key + "'");
      if (!c.values_.emplace(key, value).second) throw InputError(where + ": key '" + key + "' given twice");
      c.lines_[key] = where;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config file " + path);
    return parse(is, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Overwrites `target` when the key is present.
  void get(const std::string& key, double& target) const {
    if (!has(key)) return;
    const std::string& v = values_.at(key);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw InputError(lines_.at(key) + ": '" + v + "' is not a number");
    target = x;
  }
  template <typename I>
    requires std::is_integral_v<I>
  void get(const std::string& key, I& target) const {
    if (!has(key)) return;
    const std::string& v = values_.at(key);
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw InputError(lines_.at(key) + ": '" + v + "' is not an integer");
    target = static_cast<I>(x);
  }
  void get(const std::string& key, bool& target) const {
    if (!has(key)) return;
    const std::string& v = values_.at(key);
    if (v == "true" || v == "1") target = true;
    else if (v == "false" || v == "0") target = false;
    else throw InputError(lines_.at(key) + ": '" + v + "' is not a boolean");
  }
  void get(const std::string& key, MaterialModel& target) const {
    if (!has(key)) return;
    const std::string& v = values_.at(key);
    if (v == "stvk") target = MaterialModel::StVenantKirchhoff;
    else if (v == "linear") target = MaterialModel::Linear;
    else throw InputError(lines_.at(key) + ": material must be 'stvk' or 'linear'");
  }

  void apply(ManufacturedParams& p) const {
    get("nu_f", p.nu_f);
    get("gamma", p.gamma);
    get("delta", p.delta);
    get("E_s", p.E);
    get("nu_s", p.nu_s);
    get("tol", p.tol);
    get("omega_max", p.omega_max);
    get("omega0", p.omega0);
    get("max_outer", p.max_outer);
    get("newton_maxit", p.newton_maxit);
    get("relaxation", p.relaxation);
    get("symmetric_stress", p.symmetric_stress);
    get("material", p.model);
    get("bg_nx", p.background_nx);
    get("bg_ny", p.background_ny);
    get("front_nx", p.front_nx);
    get("U0", p.U0);
  }
  void apply(FlapParams& p) const {
    get("nu_f", p.nu_f);
    get("gamma", p.gamma);
    get("delta", p.delta);
    get("E_s", p.E);
    get("nu_s", p.nu_s);
    get("tol", p.tol);
    get("omega_max", p.omega_max);
    get("omega0", p.omega0);
    get("max_outer", p.max_outer);
    get("newton_maxit", p.newton_maxit);
    get("relaxation", p.relaxation);
    get("bg_nx", p.background_nx);
    get("bg_ny", p.background_ny);
    get("front_cell", p.cell);
    get("refinements", p.refinements);
    get("ubar", p.ubar);
  }
  void apply(StokesParams& p) const {
    get("nu_f", p.nu);
    get("gamma", p.gamma);
    get("delta", p.delta);
    get("bg_nx", p.background_n);
    get("front_nx", p.front_n);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> lines_;
};

}  // namespace olmfsi
