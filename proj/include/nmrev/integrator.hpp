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
#include <string>

#include "nmrev/errors.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

/// Uniform grid t_k = t0 + k (t1 - t0) / steps, k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t steps = 1;

  double step() const { return (t1 - t0) / static_cast<double>(steps); }
  double at(std::size_t k) const {
    return k == steps ? t1 : t0 + static_cast<double>(k) * step();
  }
  std::size_t size() const { return steps + 1; }

  void validate() const {
    if (steps == 0 || !(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
      throw Error(ErrorCode::InvalidInput, "time grid needs t1 > t0 and at least one step");
    }
  }
};

template <typename State>
bool all_finite(const State& y) {
  if constexpr (requires { y.allFinite(); }) {
    return y.allFinite();
  } else {
    return std::isfinite(std::abs(y));
  }
}

/// Classical fixed-step RK4. rhs(t, y) returns dy/dt; observe(k, t, y) is
/// called at every node including k = 0. Throws integration-diverged on the
/// first non-finite state.
template <typename State, typename Rhs, typename Observer>
State rk4_integrate(State y, const TimeGrid& grid, Rhs&& rhs, Observer&& observe) {
  grid.validate();
  const double h = grid.step();
  observe(std::size_t{0}, grid.t0, y);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const double t = grid.at(k);
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = rhs(t + h, State(y + h * k3));
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(y)) {
      throw Error(ErrorCode::IntegrationDiverged,
                  "non-finite state at t = " + std::to_string(grid.at(k + 1)));
    }
    observe(k + 1, grid.at(k + 1), y);
  }
  return y;
}

template <typename State, typename Rhs>
State rk4_integrate(State y, const TimeGrid& grid, Rhs&& rhs) {
  return rk4_integrate(std::move(y), grid, std::forward<Rhs>(rhs),
                       [](std::size_t, double, const State&) {});
}

}  // namespace nmrev
