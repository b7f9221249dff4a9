// Copyright 2026 The nmrev Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "nmrev/environment.hpp"
#include "nmrev/errors.hpp"
#include "nmrev/schedule.hpp"
#include "nmrev/trajectories.hpp"

namespace nmrev {

enum class ExperimentKind { TrackSteady, InvertPure, InvertMixed, EnvScan, Selfcheck };

inline std::string_view kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TrackSteady: return "track-steady";
    case ExperimentKind::InvertPure: return "invert-pure";
    case ExperimentKind::InvertMixed: return "invert-mixed";
    case ExperimentKind::EnvScan: return "env-scan";
    case ExperimentKind::Selfcheck: return "selfcheck";
  }
  return "unknown";
}

/// Parameters of one experiment, in units gamma0 = 1.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::TrackSteady;
  LorentzianEnvironment env;
  bool detuning_auto = false;
  double detuning_lo = -5.0;
  double detuning_hi = 5.0;
  double omega_c = 10.0;
  std::optional<double> t_final;
  std::optional<double> t_i;
  double theta_mid = std::numbers::pi / 4.0;
  std::size_t steps = 20000;
  Protocol coherent = Protocol::Transverse;
  bool adiabatic = false;
  BoundaryTable boundary;
  double search_horizon = 20.0;
  std::vector<double> scan_lambda;
};

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::pair<std::string, std::string> split_assignment(std::string_view line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw Error(ErrorCode::ConfigError, where + ": expected key = value");
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (key.empty() || value.empty()) throw Error(ErrorCode::ConfigError, where + ": empty key or value");
  return {std::move(key), std::move(value)};
}

inline double parse_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': '" + text + "' is not a finite number");
  }
  return value;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  if (out.empty()) throw Error(ErrorCode::ConfigError, "key '" + key + "': empty list");
  return out;
}

}  // namespace detail

/// `key = value` lines; `#` starts a comment; duplicate keys are rejected.
inline ConfigMap parse_config_text(std::string_view text) {
  ConfigMap map;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (detail::trim(line).empty()) continue;
    auto [key, value] = detail::split_assignment(line, "line " + std::to_string(line_no));
    if (!map.emplace(key, value).second) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return map;
}

inline ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

/// Applies `key=value` overrides on top of a parsed file.
inline void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    auto [key, value] = detail::split_assignment(o, "override '" + o + "'");
    map[key] = value;
  }
}

inline ExperimentConfig build_config(const ConfigMap& map) {
  ExperimentConfig cfg;
  auto kind_it = map.find("kind");
  if (kind_it == map.end()) throw Error(ErrorCode::ConfigError, "missing required key 'kind'");
  const std::string& kind = kind_it->second;
  if (kind == "track-steady") cfg.kind = ExperimentKind::TrackSteady;
  else if (kind == "invert-pure") cfg.kind = ExperimentKind::InvertPure;
  else if (kind == "invert-mixed") cfg.kind = ExperimentKind::InvertMixed;
  else if (kind == "env-scan") cfg.kind = ExperimentKind::EnvScan;
  else if (kind == "selfcheck") cfg.kind = ExperimentKind::Selfcheck;
  else throw Error(ErrorCode::ConfigError, "unknown kind '" + kind + "'");

  const bool inversion = cfg.kind == ExperimentKind::InvertPure || cfg.kind == ExperimentKind::InvertMixed;
  cfg.detuning_auto = inversion;

  for (const auto& [key, value] : map) {
    auto num = [&] { return detail::parse_number(key, value); };
    if (key == "kind") continue;
    else if (key == "gamma0") cfg.env.gamma0 = num();
    else if (key == "lambda") cfg.env.lambda = num();
    else if (key == "cavity_detuning") cfg.env.cavity_detuning = num();
    else if (key == "drive_detuning") {
      if (value == "auto") {
        if (!inversion) throw Error(ErrorCode::ConfigError, "drive_detuning = auto needs an inversion kind");
        cfg.detuning_auto = true;
      } else {
        cfg.env.drive_detuning = num();
        cfg.detuning_auto = false;
      }
    }
    else if (key == "detuning_bracket") {
      const auto b = detail::parse_list(key, value);
      if (b.size() != 2 || !(b[1] > b[0])) throw Error(ErrorCode::ConfigError, "detuning_bracket needs lo, hi");
      cfg.detuning_lo = b[0];
      cfg.detuning_hi = b[1];
    }
    else if (key == "n0") cfg.env.n0 = num();
    else if (key == "omega_c") cfg.omega_c = num();
    else if (key == "t_final") cfg.t_final = num();
    else if (key == "t_i") cfg.t_i = num();
    else if (key == "theta_mid") cfg.theta_mid = num();
    else if (key == "grid") {
      const double g = num();
      if (g < 2 || g != std::floor(g) || g > 1e8) throw Error(ErrorCode::ConfigError, "grid must be an integer >= 2");
      cfg.steps = static_cast<std::size_t>(g);
    }
    else if (key == "coherent") {
      if (value == "transverse") cfg.coherent = Protocol::Transverse;
      else if (value == "detuning") cfg.coherent = Protocol::Detuning;
      else throw Error(ErrorCode::ConfigError, "coherent must be transverse or detuning");
    }
    else if (key == "control") {
      if (value == "reverse-engineered") cfg.adiabatic = false;
      else if (value == "adiabatic") cfg.adiabatic = true;
      else throw Error(ErrorCode::ConfigError, "control must be reverse-engineered or adiabatic");
    }
    else if (key == "bc_ry_mid") cfg.boundary.ry_mid = num();
    else if (key == "bc_rz_rate_mid") cfg.boundary.rz_rate_mid = num();
    else if (key == "bc_rz_rate_end") cfg.boundary.rz_rate_end = num();
    else if (key == "search_horizon") cfg.search_horizon = num();
    else if (key == "scan_lambda") cfg.scan_lambda = detail::parse_list(key, value);
    else throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }

  if (!(cfg.env.gamma0 > 0.0)) throw Error(ErrorCode::ConfigError, "gamma0 must be positive");
  if (!(cfg.env.lambda > 0.0)) throw Error(ErrorCode::ConfigError, "lambda must be positive");
  if (cfg.env.n0 < 0.0) throw Error(ErrorCode::ConfigError, "n0 must be nonnegative");
  if (cfg.t_final && !(*cfg.t_final > 0.0)) throw Error(ErrorCode::ConfigError, "t_final must be positive");
  if (cfg.t_i && !(*cfg.t_i > 0.0)) throw Error(ErrorCode::ConfigError, "t_i must be positive");
  if (!(cfg.search_horizon > 0.0)) throw Error(ErrorCode::ConfigError, "search_horizon must be positive");
  if (cfg.kind != ExperimentKind::InvertMixed && cfg.kind != ExperimentKind::Selfcheck && !cfg.t_final) {
    throw Error(ErrorCode::ConfigError, "missing required key 't_final'");
  }
  if (cfg.kind == ExperimentKind::EnvScan) {
    if (cfg.scan_lambda.empty()) cfg.scan_lambda = {cfg.env.lambda};
    for (double l : cfg.scan_lambda) {
      if (!(l > 0.0)) throw Error(ErrorCode::ConfigError, "scan_lambda entries must be positive");
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV output

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string render() const {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    char buf[64];
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.15g", row[c]);
        if (c) out += ',';
        out += buf;
      }
      out += '\n';
    }
    return out;
  }
};

/// Writes every file or none: contents go to temporaries first and are
/// renamed into place only after all writes succeeded.
inline void write_files(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path final_path = dir / name;
    fs::path tmp = final_path;
    tmp += ".tmp";
    staged.emplace_back(tmp, final_path);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
      cleanup();
      throw Error(ErrorCode::ConfigError, "cannot write " + final_path.string());
    }
  }
  for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

}  // namespace nmrev
