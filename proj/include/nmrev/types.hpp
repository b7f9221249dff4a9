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

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace nmrev {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

/// Real scalar function of time (rates, incoherent multipliers, drives).
using TimeFunction = std::function<double(double)>;
using ComplexTimeFunction = std::function<Complex(double)>;

inline TimeFunction constant(double value) {
  return [value](double) { return value; };
}

inline constexpr Complex kI{0.0, 1.0};

}  // namespace nmrev
