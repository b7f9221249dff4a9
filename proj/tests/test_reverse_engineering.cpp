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


#include <vector>

#include <gtest/gtest.h>

#include "golden_values.hpp"
#include "nmrev/reverse_engineering.hpp"
#include "nmrev/sampling.hpp"
#include "nmrev/selfcheck.hpp"

using namespace nmrev;

namespace {

const LiouvillianTensors& qubit_tensors() {
  static const LiouvillianTensors tensors(structure_constants(build_basis(2)));
  return tensors;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST(ClosedForm, GroundStateHold) {
  const ControlValues c = two_level_controls(Vec3(0, 0, -1), Vec3::Zero(), 0.4, 0.2);
  EXPECT_NEAR(c.omega_x, 0.0, 1e-15);
  EXPECT_NEAR(c.second, 0.0, 1e-15);
  EXPECT_NEAR(c.excitation, 0.0, 1e-15);
}

TEST(ClosedForm, ThermalHold) {
  const double n0 = 0.3;
  const ControlValues c = two_level_controls(Vec3(0, 0, -1.0 / (2 * n0 + 1)), Vec3::Zero(), 0.6, -0.1);
  EXPECT_NEAR(c.excitation, n0, 1e-14);
  EXPECT_NEAR(c.omega_x, 0.0, 1e-15);
}

TEST(ClosedForm, RecoversSteadyStateDrive) {
  const Vec3 r(golden::kSteadyState[0], golden::kSteadyState[1], golden::kSteadyState[2]);
  const ControlValues c = two_level_controls(r, Vec3::Zero(), 0.7, 0.3);
  EXPECT_NEAR(c.omega_x, 1.1, 1e-12);
  EXPECT_NEAR(c.second, 0.0, 1e-12);
  EXPECT_NEAR(c.excitation, 0.2, 1e-12);
}

TEST(ClosedForm, BackSubstitution) {
  Sampler rng(2026);
  for (Protocol p : {Protocol::Transverse, Protocol::Detuning}) {
    int done = 0;
    while (done < 200) {
      const Vec3 r = rng.ball(3, 1.0);
      if (std::abs(p == Protocol::Transverse ? r.z() : r.y()) < 0.05) continue;
      const Vec3 rdot = rng.vector(3, 2.0);
      const double gamma = rng.sign() * rng.uniform(0.05, 1.5);
      const double shift = rng.uniform(-2.0, 2.0);
      const ControlValues c = closed_form_controls(r, rdot, gamma, shift, p);
      EXPECT_LE((bloch_field(r, c, gamma, shift, p) - rdot).norm(), 1e-10 * (1 + rdot.norm()));
      ++done;
    }
  }
}

TEST(ClosedForm, RoundTripFromControls) {
  Sampler rng(17);
  for (int k = 0; k < 100; ++k) {
    Vec3 r = rng.ball(3, 1.0);
    if (std::abs(r.z()) < 0.05 || std::abs(r.y()) < 0.05) continue;
    const double gamma = rng.uniform(-1.0, 1.0), shift = rng.uniform(-1.0, 1.0);
    const ControlValues c{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0, 2)};
    for (Protocol p : {Protocol::Transverse, Protocol::Detuning}) {
      if (std::abs(gamma) < 1e-3) continue;
      const Vec3 rdot = bloch_field(r, c, gamma, shift, p);
      const ControlValues back = closed_form_controls(r, rdot, gamma, shift, p);
      EXPECT_NEAR(back.omega_x, c.omega_x, 1e-9);
      EXPECT_NEAR(back.second, c.second, 1e-9);
      EXPECT_NEAR(back.excitation, c.excitation, 1e-9);
    }
  }
}

TEST(ClosedForm, Singularities) {
  EXPECT_EQ(code_of([] { two_level_controls(Vec3(0.5, 0.2, 0.0), Vec3(0, 0, 1), 0.5, 0.0); }), ErrorCode::Singularity);
  EXPECT_EQ(code_of([] { two_level_controls(Vec3(0.0, 0.0, -0.5), Vec3(0, 0, 1), 0.0, 0.0); }),
            ErrorCode::Singularity);
  EXPECT_EQ(code_of([] { two_level_controls_detuning(Vec3(0.5, 0.0, 0.3), Vec3(0, 0, 1), 0.5, 0.0); }),
            ErrorCode::Singularity);
  EXPECT_EQ(code_of([] { two_level_damping(Vec3::Zero(), Vec3(1, 0, 0), 0.5); }), ErrorCode::Singularity);
}

TEST(ClosedForm, DampingIdentity) {
  Sampler rng(5);
  for (int k = 0; k < 50; ++k) {
    const Vec3 r = rng.ball(3, 1.0);
    if (r.norm() < 0.1) continue;
    const Vec3 rdot = rng.vector(3, 1.0);
    const double gamma = rng.uniform(0.1, 1.0);
    EXPECT_NEAR(two_level_damping(r, rdot, gamma), gamma * (2 * two_level_excitation(r, rdot, gamma) + 1), 1e-12);
  }
}

TEST(Generic, MatchesClosedForm) {
  for (Protocol p : {Protocol::Transverse, Protocol::Detuning}) {
    const SolverEquivalenceResult res = closed_form_solver_error(200, 99, p);
    EXPECT_LE(res.control_deviation, 1e-9);
    EXPECT_LE(res.residual, 1e-10);
  }
}

TEST(Generic, IllConditionedFlagAndSingularSystem) {
  const Vec3 r(0.3, 0.2, 1e-13);
  const std::vector<int> coherent{1, 2};
  const std::vector<IncoherentControl> inc = {{{lowering_shape(), raising_shape()}, 0.5, "N"}};
  Drift drift;
  drift.hamiltonian.coefficients = RealVector::Zero(4);
  drift.channels.push_back({lowering_shape(), constant(0.5)});
  const ControlSystem sys = assemble_control_system(r, Vec3(0.1, 0.1, 0.1), coherent, inc, drift, qubit_tensors(), 0.0);
  ASSERT_EQ(sys.labels.size(), 3u);
  EXPECT_EQ(sys.labels[2], "N");
  const ControlSolution sol = solve_controls(sys);
  EXPECT_TRUE(sol.ill_conditioned);

  const ControlSystem flat = assemble_control_system(Vec3(0.3, 0.2, 0.0), Vec3(0.1, 0.1, 0.1), coherent, inc, drift,
                                                     qubit_tensors(), 0.0);
  try {
    solve_controls(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoUniqueSolution);
    EXPECT_NE(std::string(e.what()).find("c1="), std::string::npos);
  }
}

TEST(Generic, OverdeterminedSystems) {
  Drift drift;
  drift.hamiltonian.coefficients = RealVector::Zero(4);
  const std::vector<int> only_x{1};
  const Vec3 r(0.0, 0.4, 0.3);
  // Omega_x alone reproduces rdot = (0, -2 Omega rz, 2 Omega ry).
  const Vec3 reachable(0.0, -2 * 0.7 * 0.3, 2 * 0.7 * 0.4);
  const ControlSolution sol =
      solve_controls(assemble_control_system(r, reachable, only_x, {}, drift, qubit_tensors(), 0.0));
  EXPECT_NEAR(sol.values(0), 0.7, 1e-12);
  EXPECT_EQ(code_of([&] {
              solve_controls(assemble_control_system(r, Vec3(1, 0, 0), only_x, {}, drift, qubit_tensors(), 0.0));
            }),
            ErrorCode::InconsistentSystem);
  EXPECT_EQ(code_of([&] { solve_controls(assemble_control_system(r, Vec3(1, 0, 0), {}, {}, drift, qubit_tensors(), 0.0)); }),
            ErrorCode::InconsistentSystem);
}

TEST(Generic, InputValidation) {
  Drift drift;
  const std::vector<int> bad{4};
  EXPECT_EQ(code_of([&] { assemble_control_system(Vec3::Zero(), Vec3::Zero(), bad, {}, drift, qubit_tensors(), 0.0); }),
            ErrorCode::InvalidInput);
  const std::vector<int> too_many{1, 2, 3, 1};
  EXPECT_EQ(code_of([&] {
              assemble_control_system(Vec3::Zero(), Vec3::Zero(), too_many, {}, drift, qubit_tensors(), 0.0);
            }),
            ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] {
              assemble_control_system(RealVector::Zero(8), RealVector::Zero(8), {}, {}, drift, qubit_tensors(), 0.0);
            }),
            ErrorCode::DimensionMismatch);
  ControlSystem nan_sys{RealMatrix::Constant(3, 1, std::nan("")), RealVector::Zero(3), {"c1"}};
  EXPECT_EQ(code_of([&] { solve_controls(nan_sys); }), ErrorCode::InvalidInput);
}

TEST(Generic, QutritHamiltonianControls) {
  // N = 3 with all eight coherent controls: recover a random Hamiltonian.
  const GeneratorBasis basis = build_basis(3);
  const LiouvillianTensors tensors(structure_constants(basis));
  Sampler rng(8);
  const HamiltonianSpec h = rng.hamiltonian(3);
  const LindbladChannel ch = rng.channel(3);
  const RealVector r = rng.ball(8, 0.5);
  const RealVector rdot = component_liouvillian(h, std::vector{ch}, tensors, 0.0).apply(r);
  // Only the components reachable through the coherent part are determined;
  // fix all but two and solve for those two.
  Drift drift;
  drift.hamiltonian.coefficients = h.coefficients;
  drift.hamiltonian.coefficients(1) = 0.0;
  drift.hamiltonian.coefficients(5) = 0.0;
  drift.channels.push_back(ch);
  const std::vector<int> idx{1, 5};
  const ControlSolution sol = solve_controls(assemble_control_system(r, rdot, idx, {}, drift, tensors, 0.0));
  EXPECT_NEAR(sol.values(0), h.coefficients(1), 1e-10);
  EXPECT_NEAR(sol.values(1), h.coefficients(5), 1e-10);
}

TEST(Markovian, ReducesToLindbladForm) {
  Sampler rng(12);
  for (int k = 0; k < 100; ++k) {
    const Vec3 r = rng.ball(3, 1.0);
    if (std::abs(r.z()) < 0.05) continue;
    const MarkovianReductionReport rep = markovian_reduction_check(r, rng.vector(3, 1.0), 1.0);
    EXPECT_LE(std::abs(rep.identity_residual), 1e-12);
    EXPECT_LE(rep.field_residual, 1e-9);
  }
}

TEST(Schedule, ExactAtSamplesAndCubicBetween) {
  ControlSchedule s;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    s.times.push_back(t);
    s.values.push_back({t * t * t, 2 * t - 1, 0.5});
  }
  s.validate();
  EXPECT_EQ(s.at(0.3).omega_x, s.values[3].omega_x);
  for (double t : {0.05, 0.47, 0.93, 0.999}) {
    const ControlValues v = s.at(t);
    EXPECT_NEAR(v.omega_x, t * t * t, 1e-13);
    EXPECT_NEAR(v.second, 2 * t - 1, 1e-13);
    EXPECT_NEAR(v.excitation, 0.5, 1e-14);
  }
  EXPECT_EQ(code_of([&] { s.at(1.1); }), ErrorCode::DomainError);
  s.times[4] = s.times[3];
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::InvalidInput);
}

TEST(Schedule, RemovableSingularityIsAveraged) {
  // The pure inversion crosses r_z = 0 at t_f / 2.
  LorentzianEnvironment env;
  env.lambda = 0.5;
  env.cavity_detuning = 0.5;
  env.drive_detuning = golden::kPureDetuning;
  const TrajectorySpec spec = pure_inversion_trajectory(10.0);
  const ControlSchedule s = synthesize_schedule(spec, env, half_step_times(TimeGrid{0, 10, 10}), Protocol::Transverse);
  ASSERT_EQ(s.size(), 21u);
  EXPECT_TRUE(s.regularized[10]);
  EXPECT_TRUE(s.regularized[0]);
  EXPECT_FALSE(s.regularized[5]);
  const ControlValues near = closed_form_controls(spec(5.001).r, spec(5.001).rdot, decay_rate(env, 5.001),
                                                  lamb_shift(env, 5.001), Protocol::Transverse);
  EXPECT_NEAR(s.values[10].omega_x, near.omega_x, 1e-2);
  EXPECT_NEAR(s.values[10].excitation, near.excitation, 1e-2);
}

TEST(Schedule, NonRemovableSingularityRejected) {
  LorentzianEnvironment env;
  env.lambda = 0.5;
  env.cavity_detuning = 0.5;
  env.drive_detuning = 0.1;
  const TrajectorySpec spec = pure_inversion_trajectory(10.0);
  try {
    synthesize_schedule(spec, env, half_step_times(TimeGrid{0, 10, 10}), Protocol::Transverse);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singularity);
    EXPECT_NE(std::string(e.what()).find("non-removable"), std::string::npos);
  }
}

TEST(Schedule, HalfStepTimes) {
  const auto times = half_step_times(TimeGrid{1.0, 2.0, 4});
  ASSERT_EQ(times.size(), 9u);
  EXPECT_EQ(times.front(), 1.0);
  EXPECT_EQ(times.back(), 2.0);
  EXPECT_DOUBLE_EQ(times[3], 1.375);
}
