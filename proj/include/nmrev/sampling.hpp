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
#include <cstdint>
#include <random>

#include "nmrev/liouvillian.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

/// Seeded generator of random algebraic inputs for oracle and property checks.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double sign() { return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

  /// Uniform direction scaled to a radius drawn from [0, radius].
  RealVector ball(int size, double radius) {
    RealVector v(size);
    for (int i = 0; i < size; ++i) v(i) = std::normal_distribution<double>(0.0, 1.0)(rng_);
    const double norm = v.norm();
    return norm == 0.0 ? v : RealVector(v * (uniform(0.0, radius) / norm));
  }

  RealVector vector(int size, double scale) {
    RealVector v(size);
    for (int i = 0; i < size; ++i) v(i) = uniform(-scale, scale);
    return v;
  }

  ComplexVector complex_vector(int size, double scale) {
    ComplexVector v(size);
    for (int i = 0; i < size; ++i) v(i) = Complex(uniform(-scale, scale), uniform(-scale, scale));
    return v;
  }

  HamiltonianSpec hamiltonian(int dimension, double scale = 1.0) {
    return {vector(dimension * dimension, scale)};
  }

  /// Traceless shape with a constant rate in [0.1, 1] and multiplier in [0, 1].
  LindbladChannel channel(int dimension) {
    LindbladChannel ch;
    ch.shape = complex_vector(dimension * dimension - 1, 1.0);
    ch.rate = constant(uniform(0.1, 1.0));
    ch.control = constant(uniform(0.0, 1.0));
    return ch;
  }

  /// Random density matrix G G^dag / Tr.
  ComplexMatrix density(int dimension) {
    ComplexMatrix g(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
      for (int j = 0; j < dimension; ++j) g(i, j) = Complex(uniform(-1, 1), uniform(-1, 1));
    const ComplexMatrix rho = g * g.adjoint();
    return rho / rho.trace();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace nmrev
