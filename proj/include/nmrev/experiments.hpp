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

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nmrev/config.hpp"
#include "nmrev/controllability.hpp"
#include "nmrev/environment.hpp"
#include "nmrev/reverse_engineering.hpp"
#include "nmrev/simulator.hpp"
#include "nmrev/trajectories.hpp"

namespace nmrev {

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::TrackSteady;
  LorentzianEnvironment env;  // with the detuning actually used
  TrajectorySpec trajectory;
  SimulationRun run;
  ControllabilityReport report;
  double t_i = 0.0;
  double t_final = 0.0;
  std::vector<std::pair<std::string, double>> summary;

  double min_fidelity() const {
    double m = 1.0;
    for (double f : run.fidelity) m = std::min(m, f);
    return m;
  }
};

namespace detail {

inline ExperimentResult finish_run(ExperimentResult res, const ControlSchedule& schedule, const Vec3& r0,
                                   std::size_t steps) {
  const TimeGrid grid{0.0, res.t_final, steps};
  res.run = integrate_bloch(schedule, res.env, r0, grid);
  attach_fidelity(res.run, res.trajectory);
  res.report = controllability_check(schedule, res.trajectory, res.env);
  res.summary.emplace_back("drive_detuning", res.env.drive_detuning);
  res.summary.emplace_back("t_final", res.t_final);
  res.summary.emplace_back("min_fidelity", res.min_fidelity());
  res.summary.emplace_back("final_rz", res.run.states.back().z());
  res.summary.emplace_back("min_n", res.report.min_excitation);
  res.summary.emplace_back("min_n_time", res.report.min_excitation_time);
  res.summary.emplace_back("max_residual", res.report.max_residual);
  res.summary.emplace_back("controllable", res.report.controllable ? 1.0 : 0.0);
  return res;
}

}  // namespace detail

/// Instantaneous steady-state tracking, reverse-engineered or adiabatic.
inline ExperimentResult run_tracking(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.kind = ExperimentKind::TrackSteady;
  res.env = cfg.env;
  res.t_final = cfg.t_final.value();
  res.trajectory = tracking_trajectory(res.env, cfg.env.n0, cfg.omega_c, res.t_final);
  const TimeGrid grid{0.0, res.t_final, cfg.steps};
  ControlSchedule schedule;
  if (cfg.adiabatic) {
    schedule = sample_schedule(
        [&](double t) { return ControlValues{reference_ramp(cfg.omega_c, res.t_final, t), 0.0, cfg.env.n0}; }, grid,
        Protocol::Transverse);
  } else {
    schedule = synthesize_schedule(res.trajectory, res.env, half_step_times(grid), cfg.coherent);
  }
  const Vec3 r0 = res.trajectory(0.0).r;
  return detail::finish_run(std::move(res), schedule, r0, cfg.steps);
}

/// Pure-state inversion; with automatic detuning, s0(t_f / 2) = 0.
inline ExperimentResult run_pure_inversion(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.kind = ExperimentKind::InvertPure;
  res.t_final = cfg.t_final.value();
  res.env = cfg.env;
  if (cfg.detuning_auto) {
    res.env.drive_detuning =
        tune_detuning_for_lamb_zero(cfg.env, fixed_target(0.5 * res.t_final), cfg.detuning_lo, cfg.detuning_hi)
            .detuning;
  }
  res.trajectory = pure_inversion_trajectory(res.t_final, cfg.theta_mid);
  const TimeGrid grid{0.0, res.t_final, cfg.steps};
  const ControlSchedule schedule = synthesize_schedule(res.trajectory, res.env, half_step_times(grid), cfg.coherent);
  res = detail::finish_run(std::move(res), schedule, Vec3(0, 0, -1), cfg.steps);
  res.summary.emplace_back("final_excited_fidelity", bloch_fidelity(res.run.states.back(), Vec3(0, 0, 1)));
  return res;
}

/// Mixed-state inversion: t_i from Gamma0 = 0, t_f from the first negative
/// minimum of Gamma0, Delta from s0(t_i) = 0, unless given explicitly.
inline ExperimentResult run_mixed_inversion(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.kind = ExperimentKind::InvertMixed;
  res.env = cfg.env;
  const SearchWindow window{0.0, cfg.search_horizon, 20000};
  res.t_i = cfg.t_i ? *cfg.t_i : find_gamma_zero(cfg.env, window);
  res.t_final = cfg.t_final ? *cfg.t_final : find_gamma_negmax(cfg.env, res.t_i, cfg.search_horizon);
  if (cfg.detuning_auto) {
    const TargetTime target = cfg.t_i ? fixed_target(*cfg.t_i) : gamma_zero_target(window);
    res.env.drive_detuning =
        tune_detuning_for_lamb_zero(cfg.env, target, cfg.detuning_lo, cfg.detuning_hi).detuning;
  }
  res.trajectory = mixed_inversion_trajectory(res.t_i, res.t_final, cfg.boundary);
  const TimeGrid grid{0.0, res.t_final, cfg.steps};
  const ControlSchedule schedule = synthesize_schedule(res.trajectory, res.env, half_step_times(grid), cfg.coherent);
  res = detail::finish_run(std::move(res), schedule, Vec3(0, 0, -1), cfg.steps);
  res.summary.emplace_back("t_i", res.t_i);
  return res;
}

/// Largest per-component gap between the Bloch run and the Kronecker-form
/// density run under the same schedule.
inline double dual_representation_gap(const SimulationRun& run, const LorentzianEnvironment& env) {
  const GeneratorBasis basis = build_basis(2);
  const auto rhos = integrate_two_level_density(run.controls, env, two_level_density(run.states.front()), run.grid);
  double gap = 0.0;
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    const BlochVector r = density_to_bloch(rhos[k], basis);
    gap = std::max(gap, (r - RealVector(run.states[k])).cwiseAbs().maxCoeff());
  }
  return gap;
}

inline std::vector<EnvSnapshot> sample_environment(const LorentzianEnvironment& env, const TimeGrid& grid) {
  std::vector<EnvSnapshot> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = decay_and_shift(env, grid.at(k));
  return out;
}

/// Gamma0(t), s0(t) for each lambda, one worker thread per value.
inline std::vector<std::vector<EnvSnapshot>> env_scan(const LorentzianEnvironment& base,
                                                      const std::vector<double>& lambdas, const TimeGrid& grid) {
  std::vector<std::vector<EnvSnapshot>> out(lambdas.size());
  std::vector<std::exception_ptr> errors(lambdas.size());
  std::vector<std::thread> workers;
  workers.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        LorentzianEnvironment env = base;
        env.lambda = lambdas[i];
        env.validate();
        out[i] = sample_environment(env, grid);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tables

inline CsvTable states_table(const SimulationRun& run) {
  CsvTable t{{"t", "r_x", "r_y", "r_z", "fidelity"}, {}};
  for (std::size_t k = 0; k < run.states.size(); ++k) {
    const Vec3& r = run.states[k];
    t.rows.push_back({run.grid.at(k), r.x(), r.y(), r.z(), run.fidelity.empty() ? 1.0 : run.fidelity[k]});
  }
  return t;
}

/// Controls at the simulation nodes (every other half-step sample).
inline CsvTable controls_table(const SimulationRun& run) {
  const std::string second = run.controls.protocol == Protocol::Transverse ? "omega_y" : "detuning";
  CsvTable t{{"t", "omega_x", second, "n"}, {}};
  for (std::size_t k = 0; k < run.grid.size(); ++k) {
    const double time = run.grid.at(k);
    const ControlValues c = run.controls.at(time);
    t.rows.push_back({time, c.omega_x, c.second, c.excitation});
  }
  return t;
}

inline CsvTable env_table(const std::vector<EnvSnapshot>& samples) {
  CsvTable t{{"t", "gamma0", "s0"}, {}};
  for (const auto& s : samples) t.rows.push_back({s.t, s.gamma, s.shift});
  return t;
}

}  // namespace nmrev
