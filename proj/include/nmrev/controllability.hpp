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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "nmrev/environment.hpp"
#include "nmrev/reverse_engineering.hpp"
#include "nmrev/schedule.hpp"
#include "nmrev/trajectories.hpp"

namespace nmrev {

inline constexpr double kExcitationFloor = -1e-9;
inline constexpr double kFieldBound = 1e6;

struct ControllabilityReport {
  double min_excitation = std::numeric_limits<double>::infinity();
  double min_excitation_time = 0.0;
  std::vector<double> sign_changes;  // midpoints between samples where N changes sign
  double max_omega_x = 0.0;
  double max_second = 0.0;           // |Omega_y^R| or |Delta^R|
  double max_residual = 0.0;         // back-substitution |f(r, c) - rdot|
  std::size_t regularized_samples = 0;
  bool n_nonnegative = false;
  bool fields_bounded = false;
  bool singularity_free = false;
  bool controllable = false;
};

/// Dynamical controllability of a synthesized schedule: N(t) >= 0 and finite
/// fields. Never throws on physical grounds.
inline ControllabilityReport controllability_check(const ControlSchedule& schedule, const TrajectorySpec& trajectory,
                                                   const LorentzianEnvironment& env) {
  ControllabilityReport rep;
  bool finite = true;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double t = schedule.times[k];
    const ControlValues& c = schedule.values[k];
    finite = finite && std::isfinite(c.omega_x) && std::isfinite(c.second) && std::isfinite(c.excitation);
    if (c.excitation < rep.min_excitation) {
      rep.min_excitation = c.excitation;
      rep.min_excitation_time = t;
    }
    if (k > 0 && (schedule.values[k - 1].excitation < 0.0) != (c.excitation < 0.0)) {
      rep.sign_changes.push_back(0.5 * (schedule.times[k - 1] + t));
    }
    rep.max_omega_x = std::max(rep.max_omega_x, std::abs(c.omega_x));
    rep.max_second = std::max(rep.max_second, std::abs(c.second));
    const bool regularized = k < schedule.regularized.size() && schedule.regularized[k];
    if (regularized) {
      ++rep.regularized_samples;
      continue;
    }
    const EnvSnapshot snap = decay_and_shift(env, t);
    const TrajectoryPoint p = trajectory(t);
    const Vec3 f = bloch_field(p.r, c, snap.gamma, snap.shift, schedule.protocol);
    rep.max_residual = std::max(rep.max_residual, (f - p.rdot).norm());
  }
  rep.n_nonnegative = rep.min_excitation >= kExcitationFloor;
  rep.fields_bounded = finite && rep.max_omega_x <= kFieldBound && rep.max_second <= kFieldBound;
  rep.singularity_free = rep.regularized_samples == 0;
  rep.controllable = rep.n_nonnegative && rep.fields_bounded;
  return rep;
}

}  // namespace nmrev
