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
#include <vector>

#include "nmrev/errors.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

/// Dense rank-3 tensor of extent n on every axis.
template <typename Scalar>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int extent) : extent_(extent), data_(static_cast<std::size_t>(extent) * extent * extent) {}

  int extent() const noexcept { return extent_; }

  Scalar& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  const Scalar& operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * extent_ + j) * extent_ + k;
  }

  int extent_ = 0;
  std::vector<Scalar> data_;
};

/// Hermitian generator basis of su(N) together with the identity.
///
/// generators[0] is the identity; generators[1..N^2-1] are traceless and
/// satisfy Tr[T_i T_j] = normalization * delta_ij. Ordering: symmetric
/// off-diagonal pairs (j<k, lexicographic), antisymmetric pairs (same
/// order), then the diagonal generators. For N = 2 this yields exactly
/// (I, sigma_x, sigma_y, sigma_z).
struct GeneratorBasis {
  int dimension = 0;
  std::vector<ComplexMatrix> generators;
  double normalization = 2.0;

  /// Number of traceless generators, N^2 - 1.
  int size() const noexcept { return dimension * dimension - 1; }

  const ComplexMatrix& generator(int a) const { return generators.at(static_cast<std::size_t>(a)); }

  /// Prefactor sqrt(N(N-1)/2) in rho = (I + kappa * sum r_i T_i) / N.
  double bloch_scale() const { return std::sqrt(dimension * (dimension - 1) / 2.0); }
};

/// Structure constants and d-coefficients. Indices run over the traceless
/// generators only: tensor index a corresponds to generators[a + 1].
///
///   [T_a, T_b] = i sum_c f_abc T_c
///   {T_a, T_b} = (2 * normalization / N) delta_ab I + sum_c d_abc T_c
struct StructureTensors {
  int dimension = 0;
  double normalization = 2.0;
  Tensor3<double> f;
  Tensor3<double> d;

  int size() const noexcept { return f.extent(); }
};

using BlochVector = RealVector;
using DensityMatrix = ComplexMatrix;

inline GeneratorBasis build_basis(int dimension) {
  if (dimension < 2) {
    throw Error(ErrorCode::InvalidDimension,
                "build_basis: dimension must be >= 2, got " + std::to_string(dimension));
  }
  const int n = dimension;
  GeneratorBasis basis;
  basis.dimension = n;
  basis.generators.reserve(static_cast<std::size_t>(n * n));
  basis.generators.push_back(ComplexMatrix::Identity(n, n));

  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      basis.generators.push_back(std::move(s));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(j, k) = -kI;
      a(k, j) = kI;
      basis.generators.push_back(std::move(a));
    }
  }
  for (int l = 1; l < n; ++l) {
    ComplexMatrix diag = ComplexMatrix::Zero(n, n);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int m = 0; m < l; ++m) diag(m, m) = scale;
    diag(l, l) = -scale * l;
    basis.generators.push_back(std::move(diag));
  }
  return basis;
}

namespace detail {

inline constexpr double kTensorImagTolerance = 1e-12;

inline double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const char* what) {
  const Complex value = (a * b).trace();
  if (std::abs(value.imag()) > kTensorImagTolerance) {
    throw Error(ErrorCode::InvalidInput,
                std::string("structure_constants: non-real ") + what + " projection");
  }
  return value.real();
}

}  // namespace detail

inline StructureTensors structure_constants(const GeneratorBasis& basis) {
  const int n = basis.size();
  StructureTensors tensors;
  tensors.dimension = basis.dimension;
  tensors.normalization = basis.normalization;
  tensors.f = Tensor3<double>(n);
  tensors.d = Tensor3<double>(n);
  for (int a = 0; a < n; ++a) {
    const ComplexMatrix& ta = basis.generator(a + 1);
    for (int b = 0; b < n; ++b) {
      const ComplexMatrix& tb = basis.generator(b + 1);
      const ComplexMatrix commutator = ta * tb - tb * ta;
      const ComplexMatrix anticommutator = ta * tb + tb * ta;
      for (int c = 0; c < n; ++c) {
        const ComplexMatrix& tc = basis.generator(c + 1);
        // f_abc = -i Tr([T_a, T_b] T_c) / normalization
        tensors.f(a, b, c) =
            detail::trace_product_real(-kI * commutator, tc, "commutator") / basis.normalization;
        tensors.d(a, b, c) =
            detail::trace_product_real(anticommutator, tc, "anticommutator") / basis.normalization;
      }
    }
  }
  return tensors;
}

inline DensityMatrix bloch_to_density(const BlochVector& r, const GeneratorBasis& basis) {
  if (r.size() != basis.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "bloch_to_density: expected " + std::to_string(basis.size()) +
                    " components, got " + std::to_string(r.size()));
  }
  const int n = basis.dimension;
  ComplexMatrix rho = ComplexMatrix::Identity(n, n);
  const double kappa = basis.bloch_scale();
  for (int i = 0; i < basis.size(); ++i) rho += kappa * r(i) * basis.generator(i + 1);
  return rho / static_cast<double>(n);
}

inline constexpr double kTraceTolerance = 1e-9;

inline BlochVector density_to_bloch(const DensityMatrix& rho, const GeneratorBasis& basis) {
  const int n = basis.dimension;
  if (rho.rows() != n || rho.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "density_to_bloch: matrix size does not match basis");
  }
  const Complex trace = rho.trace();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    throw Error(ErrorCode::MalformedState,
                "density_to_bloch: trace deviates from 1 by " + std::to_string(std::abs(trace - 1.0)));
  }
  const double scale = n / (basis.normalization * basis.bloch_scale());
  BlochVector r(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    r(i) = scale * (rho * basis.generator(i + 1)).trace().real();
  }
  return r;
}

}  // namespace nmrev
