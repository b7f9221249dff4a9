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


#include <gtest/gtest.h>

#include "nmrev/sampling.hpp"
#include "nmrev/sun_algebra.hpp"

using namespace nmrev;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Basis, TwoLevelIsPauli) {
  const GeneratorBasis b = build_basis(2);
  ASSERT_EQ(b.generators.size(), 4u);
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  EXPECT_EQ(b.generator(0), ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(b.generator(1), sx);
  EXPECT_EQ(b.generator(2), sy);
  EXPECT_EQ(b.generator(3), sz);
}

TEST(Basis, RejectsDegenerateDimension) {
  for (int n : {1, 0, -3}) {
    try {
      build_basis(n);
      FAIL() << "accepted N = " << n;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidDimension);
    }
  }
}

TEST(Basis, HermitianTracelessOrthogonalUpToFour) {
  for (int n = 2; n <= 4; ++n) {
    const GeneratorBasis b = build_basis(n);
    EXPECT_EQ(b.size(), n * n - 1);
    EXPECT_NEAR(b.generator(0).trace().real(), n, 0.0);
    for (int i = 1; i <= b.size(); ++i) {
      EXPECT_LE(max_abs(b.generator(i) - b.generator(i).adjoint()), 1e-14);
      EXPECT_LE(std::abs(b.generator(i).trace()), 1e-14);
      for (int j = 1; j <= b.size(); ++j) {
        const Complex g = (b.generator(i) * b.generator(j)).trace();
        EXPECT_NEAR(g.real(), i == j ? 2.0 : 0.0, 1e-14) << n << ' ' << i << ' ' << j;
        EXPECT_NEAR(g.imag(), 0.0, 1e-14);
      }
    }
  }
}

TEST(Structure, TwoLevelLeviCivita) {
  const StructureTensors st = structure_constants(build_basis(2));
  EXPECT_NEAR(st.f(0, 1, 2), 2.0, 1e-15);
  EXPECT_NEAR(st.f(1, 2, 0), 2.0, 1e-15);
  EXPECT_NEAR(st.f(2, 0, 1), 2.0, 1e-15);
  EXPECT_NEAR(st.f(1, 0, 2), -2.0, 1e-15);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(st.d(a, b, c), 0.0);
        if (a == b || b == c || a == c) {
          EXPECT_EQ(st.f(a, b, c), 0.0);
        }
      }
}

TEST(Structure, SymmetryOfFAndD) {
  for (int n : {2, 3}) {
    const StructureTensors st = structure_constants(build_basis(n));
    const int m = st.size();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          EXPECT_NEAR(st.f(i, j, k), -st.f(j, i, k), 1e-12);
          EXPECT_NEAR(st.f(i, j, k), -st.f(i, k, j), 1e-12);
          EXPECT_NEAR(st.d(i, j, k), st.d(j, i, k), 1e-12);
          EXPECT_NEAR(st.d(i, j, k), st.d(i, k, j), 1e-12);
        }
  }
}

TEST(Structure, ReconstructsCommutatorAndAnticommutator) {
  for (int n = 2; n <= 4; ++n) {
    const GeneratorBasis b = build_basis(n);
    const StructureTensors st = structure_constants(b);
    for (int i = 0; i < b.size(); ++i)
      for (int j = 0; j < b.size(); ++j) {
        const ComplexMatrix& ti = b.generator(i + 1);
        const ComplexMatrix& tj = b.generator(j + 1);
        ComplexMatrix comm = ComplexMatrix::Zero(n, n);
        ComplexMatrix anti = (i == j ? 2.0 * b.normalization / n : 0.0) * ComplexMatrix::Identity(n, n);
        for (int k = 0; k < b.size(); ++k) {
          comm += kI * st.f(i, j, k) * b.generator(k + 1);
          anti += st.d(i, j, k) * b.generator(k + 1);
        }
        EXPECT_LE(max_abs(ti * tj - tj * ti - comm), 1e-12);
        EXPECT_LE(max_abs(ti * tj + tj * ti - anti), 1e-12);
      }
  }
}

TEST(Bloch, PoleAndCentre) {
  const GeneratorBasis b = build_basis(2);
  EXPECT_LE(max_abs(bloch_to_density(Vec3(0, 0, 0), b) - 0.5 * ComplexMatrix::Identity(2, 2)), 1e-16);
  ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
  ground(1, 1) = 1.0;
  EXPECT_LE(max_abs(bloch_to_density(Vec3(0, 0, -1), b) - ground), 1e-16);
  ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
  excited(0, 0) = 1.0;
  EXPECT_LE((density_to_bloch(excited, b) - Vec3(0, 0, 1)).norm(), 1e-16);
  EXPECT_LE(density_to_bloch(0.5 * ComplexMatrix::Identity(2, 2), b).norm(), 1e-16);
}

TEST(Bloch, RoundTripRandomStates) {
  Sampler rng(101);
  for (int n : {2, 3}) {
    const GeneratorBasis b = build_basis(n);
    for (int k = 0; k < 100; ++k) {
      const RealVector r = rng.ball(b.size(), n == 2 ? 1.0 : 0.5);
      const DensityMatrix rho = bloch_to_density(r, b);
      EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
      EXPECT_LE((density_to_bloch(rho, b) - r).cwiseAbs().maxCoeff(), 1e-12);
      const DensityMatrix sample = rng.density(n);
      EXPECT_LE(max_abs(bloch_to_density(density_to_bloch(sample, b), b) - sample), 1e-12);
    }
  }
}

TEST(Bloch, PureStateNormTwoLevel) {
  const GeneratorBasis b = build_basis(2);
  Sampler rng(7);
  for (int k = 0; k < 50; ++k) {
    RealVector r = rng.ball(3, 1.0);
    r /= r.norm();
    const DensityMatrix rho = bloch_to_density(r, b);
    EXPECT_LE(max_abs(rho * rho - rho), 1e-10);
    const DensityMatrix mixed = bloch_to_density(0.9 * r, b);
    EXPECT_GT(max_abs(mixed * mixed - mixed), 1e-3);
  }
}

TEST(Bloch, Errors) {
  const GeneratorBasis b = build_basis(2);
  EXPECT_THROW(bloch_to_density(RealVector::Zero(8), b), Error);
  try {
    density_to_bloch(ComplexMatrix::Identity(2, 2), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedState);
  }
  try {
    density_to_bloch(ComplexMatrix::Identity(3, 3) / 3.0, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}
