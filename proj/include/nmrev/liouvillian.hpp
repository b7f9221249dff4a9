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
#include <span>
#include <string>
#include <vector>

#include "nmrev/errors.hpp"
#include "nmrev/sun_algebra.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

/// H = sum_{a=0}^{N^2-1} c_a T_a with T_0 = I. c_0 never affects dynamics.
struct HamiltonianSpec {
  RealVector coefficients;
};

/// One dissipation channel gamma(t) * c(t) * D[L], L = sum_a shape_a T_a.
///
/// The shape may have N^2 - 1 entries (traceless generators only) or N^2
/// entries, in which case entry 0 multiplies the identity. The rate may be
/// negative; no positivity is enforced.
struct LindbladChannel {
  ComplexVector shape;
  TimeFunction rate = constant(1.0);
  TimeFunction control = constant(1.0);

  double weight(double t) const { return rate(t) * control(t); }
};

/// Component form of the master equation: rdot = matrix * r + offset.
struct LiouvillianComponents {
  RealMatrix matrix;
  RealVector offset;

  RealVector apply(const RealVector& r) const { return matrix * r + offset; }
};

/// N^2 x N^2 supermatrix acting on row-major vectorized density matrices,
/// vec(rho)[i * N + j] = rho(i, j).
using SuperMatrix = ComplexMatrix;

inline ComplexVector vectorize(const ComplexMatrix& rho) {
  const auto n = rho.rows();
  ComplexVector v(n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
  return v;
}

inline ComplexMatrix unvectorize(const ComplexVector& v, int dimension) {
  ComplexMatrix rho(dimension, dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = 0; j < dimension; ++j) rho(i, j) = v(i * dimension + j);
  return rho;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Shape vector padded to N^2 entries (identity slot first).
inline ComplexVector extended_shape(const ComplexVector& shape, int dimension) {
  const int full = dimension * dimension;
  if (shape.size() == full) return shape;
  if (shape.size() == full - 1) {
    ComplexVector out = ComplexVector::Zero(full);
    out.tail(full - 1) = shape;
    return out;
  }
  throw Error(ErrorCode::DimensionMismatch,
              "lindblad shape must have N^2-1 or N^2 entries, got " + std::to_string(shape.size()));
}

inline ComplexMatrix operator_from_coefficients(const ComplexVector& full_coefficients,
                                                const GeneratorBasis& basis) {
  const int n = basis.dimension;
  ComplexMatrix op = ComplexMatrix::Zero(n, n);
  for (int a = 0; a < n * n; ++a) op += full_coefficients(a) * basis.generator(a);
  return op;
}

inline ComplexMatrix hamiltonian_matrix(const HamiltonianSpec& h, const GeneratorBasis& basis) {
  const int full = basis.dimension * basis.dimension;
  if (h.coefficients.size() != full) {
    throw Error(ErrorCode::DimensionMismatch, "hamiltonian: expected N^2 coefficients");
  }
  return operator_from_coefficients(h.coefficients.cast<Complex>(), basis);
}

/// Precomputed dissipator tensors for one basis.
///
/// Built from f and d alone through the extended product table
/// T_a T_b = sum_c P_abc T_c (a, b, c = 0..N^2-1), so the component form
/// never touches the matrix representation. Immutable after construction.
class LiouvillianTensors {
 public:
  explicit LiouvillianTensors(StructureTensors structure)
      : structure_(std::move(structure)),
        generators_(structure_.size()),
        extended_(generators_ + 1),
        dissipator_(static_cast<std::size_t>(extended_) * extended_ * generators_ * generators_),
        offset_(static_cast<std::size_t>(extended_) * extended_ * generators_) {
    build();
  }

  const StructureTensors& structure() const noexcept { return structure_; }
  int dimension() const noexcept { return structure_.dimension; }
  int size() const noexcept { return generators_; }

  /// Contribution of l_m l_n^* to matrix element (i, j); m, n extended
  /// (0 = identity), i, j over traceless generators.
  Complex dissipator(int m, int n, int i, int j) const {
    return dissipator_[((static_cast<std::size_t>(m) * extended_ + n) * generators_ + i) * generators_ + j];
  }

  /// Contribution of l_m l_n^* to offset component k.
  Complex offset(int m, int n, int k) const {
    return offset_[(static_cast<std::size_t>(m) * extended_ + n) * generators_ + k];
  }

 private:
  void build() {
    const int e = extended_;
    const double nu = structure_.normalization;
    const double dim = structure_.dimension;
    const double kappa = std::sqrt(dim * (dim - 1.0) / 2.0);

    Tensor3<Complex> product(e);
    for (int a = 0; a < e; ++a) {
      product(0, a, a) = 1.0;
      product(a, 0, a) = 1.0;
    }
    for (int a = 1; a < e; ++a) {
      product(a, a, 0) = nu / dim;
      for (int b = 1; b < e; ++b)
        for (int c = 1; c < e; ++c)
          product(a, b, c) = 0.5 * Complex(structure_.d(a - 1, b - 1, c - 1), structure_.f(a - 1, b - 1, c - 1));
    }
    std::vector<double> gram(static_cast<std::size_t>(e), nu);
    gram[0] = dim;

    auto trace3 = [&](int a, int b, int c) { return product(a, b, c) * gram[static_cast<std::size_t>(c)]; };
    auto trace4 = [&](int a, int b, int c, int d) {
      Complex sum = 0.0;
      for (int x = 0; x < e; ++x) sum += product(a, b, x) * product(c, d, x) * gram[static_cast<std::size_t>(x)];
      return sum;
    };

    for (int m = 0; m < e; ++m) {
      for (int n = 0; n < e; ++n) {
        for (int i = 0; i < generators_; ++i) {
          const int ti = i + 1;
          for (int j = 0; j < generators_; ++j) {
            const int tj = j + 1;
            // Tr[T_i (2 T_m T_j T_n - T_n T_m T_j - T_j T_n T_m)] / nu
            const Complex value =
                (2.0 * trace4(ti, m, tj, n) - trace4(ti, n, m, tj) - trace4(ti, tj, n, m)) / nu;
            dissipator_[((static_cast<std::size_t>(m) * e + n) * generators_ + i) * generators_ + j] = value;
          }
          // Tr[T_k (2 T_m T_n - 2 T_n T_m)] / (kappa nu)
          offset_[(static_cast<std::size_t>(m) * e + n) * generators_ + i] =
              2.0 * (trace3(ti, m, n) - trace3(ti, n, m)) / (kappa * nu);
        }
      }
    }
  }

  StructureTensors structure_;
  int generators_;
  int extended_;
  std::vector<Complex> dissipator_;
  std::vector<Complex> offset_;
};

/// C_ij = sum_k c_k f_kji (normalization 2).
inline RealMatrix coherent_part(const HamiltonianSpec& h, const StructureTensors& tensors) {
  const int n = tensors.size();
  if (h.coefficients.size() != n + 1) {
    throw Error(ErrorCode::DimensionMismatch, "coherent_part: expected N^2 coefficients");
  }
  RealMatrix c = RealMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double ck = h.coefficients(k + 1);
    if (ck == 0.0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) += ck * tensors.f(k, j, i);
  }
  return c;
}

/// Incoherent matrix of one channel shape at unit weight.
inline RealMatrix channel_matrix(const ComplexVector& shape, const LiouvillianTensors& tensors) {
  const int n = tensors.size();
  const ComplexVector l = extended_shape(shape, tensors.dimension());
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < l.size(); ++a) {
    if (l(a) == Complex(0.0)) continue;
    for (Eigen::Index b = 0; b < l.size(); ++b) {
      const Complex w = l(a) * std::conj(l(b));
      if (w == Complex(0.0)) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc(i, j) += w * tensors.dissipator(static_cast<int>(a), static_cast<int>(b), i, j);
    }
  }
  return acc.real();
}

inline RealVector channel_offset(const ComplexVector& shape, const LiouvillianTensors& tensors) {
  const int n = tensors.size();
  const ComplexVector l = extended_shape(shape, tensors.dimension());
  ComplexVector acc = ComplexVector::Zero(n);
  for (Eigen::Index a = 0; a < l.size(); ++a) {
    for (Eigen::Index b = 0; b < l.size(); ++b) {
      const Complex w = l(a) * std::conj(l(b));
      if (w == Complex(0.0)) continue;
      for (int k = 0; k < n; ++k) acc(k) += w * tensors.offset(static_cast<int>(a), static_cast<int>(b), k);
    }
  }
  return acc.real();
}

inline RealMatrix incoherent_part(std::span<const LindbladChannel> channels,
                                  const LiouvillianTensors& tensors, double t) {
  RealMatrix out = RealMatrix::Zero(tensors.size(), tensors.size());
  for (const auto& channel : channels) {
    const double weight = channel.weight(t);
    if (weight != 0.0) out += weight * channel_matrix(channel.shape, tensors);
  }
  return out;
}

inline RealVector inhomogeneous_part(std::span<const LindbladChannel> channels,
                                     const LiouvillianTensors& tensors, double t) {
  RealVector out = RealVector::Zero(tensors.size());
  for (const auto& channel : channels) {
    const double weight = channel.weight(t);
    if (weight != 0.0) out += weight * channel_offset(channel.shape, tensors);
  }
  return out;
}

inline LiouvillianComponents component_liouvillian(const HamiltonianSpec& h,
                                                   std::span<const LindbladChannel> channels,
                                                   const LiouvillianTensors& tensors, double t) {
  return {coherent_part(h, tensors.structure()) + incoherent_part(channels, tensors, t),
          inhomogeneous_part(channels, tensors, t)};
}

/// -i (H x I - I x H^T) + sum gamma c (2 L x L^* - L^dag L x I - I x L^T L^*).
inline SuperMatrix kron_liouvillian(const HamiltonianSpec& h, std::span<const LindbladChannel> channels,
                                    const GeneratorBasis& basis, double t) {
  const int n = basis.dimension;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix hm = hamiltonian_matrix(h, basis);
  SuperMatrix s = -kI * (kron(hm, id) - kron(id, hm.transpose()));
  for (const auto& channel : channels) {
    const double weight = channel.weight(t);
    if (weight == 0.0) continue;
    const ComplexMatrix l = operator_from_coefficients(extended_shape(channel.shape, n), basis);
    const ComplexMatrix ldl = l.adjoint() * l;
    s += weight * (2.0 * kron(l, l.conjugate()) - kron(ldl, id) - kron(id, ldl.transpose()));
  }
  return s;
}

inline constexpr double kTracePreservationTolerance = 1e-8;

/// Largest |<<I| S|| entry; zero for a trace-preserving generator.
inline double trace_leakage(const SuperMatrix& s, int dimension) {
  double worst = 0.0;
  for (Eigen::Index col = 0; col < s.cols(); ++col) {
    Complex sum = 0.0;
    for (int i = 0; i < dimension; ++i) sum += s(i * dimension + i, col);
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

inline LiouvillianComponents components_from_kron(const SuperMatrix& s, const GeneratorBasis& basis) {
  const int dim = basis.dimension;
  if (s.rows() != dim * dim || s.cols() != dim * dim) {
    throw Error(ErrorCode::DimensionMismatch, "components_from_kron: supermatrix size does not match basis");
  }
  const double leak = trace_leakage(s, dim);
  if (leak > kTracePreservationTolerance) {
    throw Error(ErrorCode::MalformedLiouvillian,
                "components_from_kron: trace preservation violated by " + std::to_string(leak));
  }
  const int n = basis.size();
  const double nu = basis.normalization;
  LiouvillianComponents out{RealMatrix::Zero(n, n), RealVector::Zero(n)};
  for (int j = 0; j < n; ++j) {
    const ComplexMatrix image = unvectorize(s * vectorize(basis.generator(j + 1)), dim);
    for (int i = 0; i < n; ++i) out.matrix(i, j) = (basis.generator(i + 1) * image).trace().real() / nu;
  }
  const ComplexMatrix image = unvectorize(s * vectorize(basis.generator(0)), dim);
  for (int i = 0; i < n; ++i)
    out.offset(i) = (basis.generator(i + 1) * image).trace().real() / (nu * basis.bloch_scale());
  return out;
}

}  // namespace nmrev
