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
#include <string>
#include <vector>

#include "nmrev/errors.hpp"

namespace nmrev {

/// Which second coherent control the two-level schedule carries.
enum class Protocol {
  Transverse,  // Omega_x^R, Omega_y^R
  Detuning,    // Omega_x^R, Delta^R
};

struct ControlValues {
  double omega_x = 0.0;
  double second = 0.0;      // Omega_y^R or Delta^R
  double excitation = 0.0;  // mean excitation number N
};

/// Time-sampled two-level controls. Between samples the values are
/// interpolated with the cubic Lagrange polynomial through the four nearest
/// samples; at a sample time the stored value is returned exactly.
struct ControlSchedule {
  Protocol protocol = Protocol::Transverse;
  std::vector<double> times;
  std::vector<ControlValues> values;
  std::vector<bool> regularized;  // sample obtained by the +-eps limit rule

  std::size_t size() const noexcept { return times.size(); }

  void validate() const {
    if (times.size() < 2 || values.size() != times.size()) {
      throw Error(ErrorCode::InvalidInput, "control schedule needs >= 2 samples with matching values");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (k > 0 && !(times[k] > times[k - 1])) {
        throw Error(ErrorCode::InvalidInput, "control schedule times must be strictly increasing");
      }
      const auto& v = values[k];
      if (!std::isfinite(v.omega_x) || !std::isfinite(v.second) || !std::isfinite(v.excitation)) {
        throw Error(ErrorCode::InvalidInput, "control schedule has a non-finite sample at t = " +
                                                 std::to_string(times[k]));
      }
    }
  }

  ControlValues at(double t) const {
    const auto n = times.size();
    if (n == 0) throw Error(ErrorCode::InvalidInput, "empty control schedule");
    if (n == 1) return values.front();
    const double span = times.back() - times.front();
    const double slack = 1e-12 * std::max(1.0, span);
    if (t < times.front() - slack || t > times.back() + slack) {
      throw Error(ErrorCode::DomainError, "control schedule evaluated outside its grid at t = " + std::to_string(t));
    }
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t hi = it == times.end() ? n - 1 : static_cast<std::size_t>(it - times.begin());
    if (std::abs(times[hi] - t) <= slack) return values[hi];
    if (hi > 0 && std::abs(times[hi - 1] - t) <= slack) return values[hi - 1];
    if (hi == 0) hi = 1;
    // Nodes hi-2 .. hi+1, shifted inward at the ends.
    std::size_t first = hi >= 2 ? hi - 2 : 0;
    if (n >= 4) first = std::min(first, n - 4);
    const std::size_t count = std::min<std::size_t>(4, n);
    ControlValues out;
    for (std::size_t a = first; a < first + count; ++a) {
      double weight = 1.0;
      for (std::size_t b = first; b < first + count; ++b) {
        if (b != a) weight *= (t - times[b]) / (times[a] - times[b]);
      }
      out.omega_x += weight * values[a].omega_x;
      out.second += weight * values[a].second;
      out.excitation += weight * values[a].excitation;
    }
    return out;
  }
};

inline std::string protocol_name(Protocol p) { return p == Protocol::Transverse ? "transverse" : "detuning"; }

}  // namespace nmrev
