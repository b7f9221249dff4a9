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


#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nmrev/nmrev.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelfcheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

int run_selfcheck(bool inject_fault) {
  nmrev::SelfcheckOptions opt;
  opt.perturb_structure = inject_fault;
  bool ok = true;
  for (const auto& s : nmrev::run_selfcheck(opt)) {
    std::printf("%s %-28s metric=%.3e tol=%.1e\n", s.passed ? "PASS" : "FAIL", s.name.c_str(), s.metric, s.tolerance);
    ok = ok && s.passed;
  }
  return ok ? kExitOk : kExitSelfcheckFailed;
}

using FileList = std::vector<std::pair<std::string, std::string>>;

FileList run_experiment(const nmrev::ExperimentConfig& cfg) {
  using nmrev::ExperimentKind;
  FileList files;
  if (cfg.kind == ExperimentKind::EnvScan) {
    const nmrev::TimeGrid grid{0.0, cfg.t_final.value(), cfg.steps};
    const auto scans = nmrev::env_scan(cfg.env, cfg.scan_lambda, grid);
    for (std::size_t i = 0; i < scans.size(); ++i) {
      files.emplace_back("env_lambda_" + format_number(cfg.scan_lambda[i]) + ".csv", nmrev::env_table(scans[i]).render());
      std::printf("lambda = %s\n", format_number(cfg.scan_lambda[i]).c_str());
    }
    return files;
  }
  nmrev::ExperimentResult res;
  switch (cfg.kind) {
    case ExperimentKind::TrackSteady: res = nmrev::run_tracking(cfg); break;
    case ExperimentKind::InvertPure: res = nmrev::run_pure_inversion(cfg); break;
    case ExperimentKind::InvertMixed: res = nmrev::run_mixed_inversion(cfg); break;
    default: throw nmrev::Error(nmrev::ErrorCode::ConfigError, "unsupported kind");
  }
  files.emplace_back("states.csv", nmrev::states_table(res.run).render());
  files.emplace_back("controls.csv", nmrev::controls_table(res.run).render());
  files.emplace_back("env.csv", nmrev::env_table(nmrev::sample_environment(res.env, res.run.grid)).render());
  std::printf("kind = %s\n", std::string(nmrev::kind_name(cfg.kind)).c_str());
  for (const auto& [key, value] : res.summary) std::printf("%s = %s\n", key.c_str(), format_number(value).c_str());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nmrev: reverse-engineered control of a non-Markovian two-level system"};
  std::string config_path;
  std::string out_dir = "out";
  std::size_t grid = 0;
  std::vector<std::string> overrides;
  bool selfcheck = false;
  bool inject_fault = false;
  app.add_option("--config", config_path, "experiment config (key = value lines)");
  app.add_option("--out", out_dir, "output directory for CSV files");
  app.add_option("--grid", grid, "number of integration steps (overrides the config)");
  app.add_option("--override", overrides, "key=value override, repeatable");
  app.add_flag("--selfcheck", selfcheck, "run the oracle suites and exit");
  app.add_flag("--inject-fault", inject_fault, "corrupt one structure constant (selfcheck test hook)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (selfcheck) return run_selfcheck(inject_fault);
  if (config_path.empty()) {
    std::cerr << "error: --config is required (or use --selfcheck)\n";
    return kExitConfig;
  }

  nmrev::ExperimentConfig cfg;
  try {
    nmrev::ConfigMap map = nmrev::read_config_file(config_path);
    nmrev::apply_overrides(map, overrides);
    if (grid != 0) map["grid"] = std::to_string(grid);
    cfg = nmrev::build_config(map);
  } catch (const nmrev::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (cfg.kind == nmrev::ExperimentKind::Selfcheck) return run_selfcheck(inject_fault);

  try {
    const FileList files = run_experiment(cfg);
    nmrev::write_files(out_dir, files);
  } catch (const nmrev::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == nmrev::ErrorCode::ConfigError ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
