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
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nmrev/environment.hpp"
#include "nmrev/errors.hpp"
#include "nmrev/integrator.hpp"
#include "nmrev/liouvillian.hpp"
#include "nmrev/reverse_engineering.hpp"
#include "nmrev/schedule.hpp"
#include "nmrev/sun_algebra.hpp"
#include "nmrev/trajectories.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

inline constexpr std::size_t kDefaultSteps = 20000;
inline constexpr double kEigenvalueFloor = -1e-8;

struct SimulationRun {
  TimeGrid grid;
  std::vector<Vec3> states;
  std::vector<double> fidelity;
  ControlSchedule controls;
};

/// Gamma0(t) and s0(t) supplier for the Bloch integrator.
using RateSource = std::function<EnvSnapshot(double)>;

inline RateSource environment_rates(const LorentzianEnvironment& env) {
  env.validate();
  return [env](double t) { return decay_and_shift(env, t); };
}

inline RateSource constant_rates(double gamma, double shift) {
  return [gamma, shift](double t) { return EnvSnapshot{t, Complex(1.0), gamma, shift}; };
}

/// Two-level Bloch equations driven by a schedule, RK4 on a uniform grid.
inline SimulationRun integrate_bloch(const ControlSchedule& schedule, const RateSource& rates, const Vec3& r0,
                                     const TimeGrid& grid) {
  SimulationRun run{grid, std::vector<Vec3>(grid.size()), {}, schedule};
  rk4_integrate(
      r0, grid,
      [&](double t, const Vec3& r) {
        const EnvSnapshot snap = rates(t);
        return bloch_field(r, schedule.at(t), snap.gamma, snap.shift, schedule.protocol);
      },
      [&](std::size_t k, double, const Vec3& r) { run.states[k] = r; });
  return run;
}

inline SimulationRun integrate_bloch(const ControlSchedule& schedule, const LorentzianEnvironment& env,
                                     const Vec3& r0, const TimeGrid& grid) {
  return integrate_bloch(schedule, environment_rates(env), r0, grid);
}

/// General component form rdot = M(t) r + b(t).
inline std::vector<RealVector> integrate_components(const std::function<LiouvillianComponents(double)>& generator,
                                                    const RealVector& r0, const TimeGrid& grid) {
  std::vector<RealVector> states(grid.size());
  rk4_integrate(
      r0, grid, [&](double t, const RealVector& r) { return RealVector(generator(t).apply(r)); },
      [&](std::size_t k, double, const RealVector& r) { states[k] = r; });
  return states;
}

/// Vectorized density matrix under a supermatrix generator S(t).
inline std::vector<DensityMatrix> integrate_density(const std::function<SuperMatrix(double)>& generator,
                                                    const DensityMatrix& rho0, const TimeGrid& grid) {
  const int n = static_cast<int>(rho0.rows());
  std::vector<DensityMatrix> states(grid.size());
  rk4_integrate(
      vectorize(rho0), grid, [&](double t, const ComplexVector& v) { return ComplexVector(generator(t) * v); },
      [&](std::size_t k, double, const ComplexVector& v) { states[k] = unvectorize(v, n); });
  return states;
}

/// Kronecker-form generator of the scheduled two-level dynamics.
inline std::function<SuperMatrix(double)> two_level_supermatrix(const ControlSchedule& schedule,
                                                                const LorentzianEnvironment& env,
                                                                const GeneratorBasis& basis) {
  return [&schedule, env, &basis](double t) {
    const EnvSnapshot snap = decay_and_shift(env, t);
    const Drift d = two_level_generator(schedule.at(t), snap.gamma, snap.shift, schedule.protocol);
    return kron_liouvillian(d.hamiltonian, d.channels, basis, t);
  };
}

inline std::vector<DensityMatrix> integrate_two_level_density(const ControlSchedule& schedule,
                                                              const LorentzianEnvironment& env,
                                                              const DensityMatrix& rho0, const TimeGrid& grid) {
  const GeneratorBasis basis = build_basis(2);
  return integrate_density(two_level_supermatrix(schedule, env, basis), rho0, grid);
}

namespace detail {

inline Eigen::SelfAdjointEigenSolver<ComplexMatrix> checked_spectrum(const DensityMatrix& rho, const char* which) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (rho + rho.adjoint()));
  if (eig.eigenvalues().minCoeff() < kEigenvalueFloor) {
    throw Error(ErrorCode::UnphysicalState,
                std::string("fidelity: ") + which + " has eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()));
  }
  return eig;
}

}  // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.
inline double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.rows() != rho1.cols() || rho2.rows() != rho2.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "fidelity: matrices differ in size");
  }
  const auto e1 = detail::checked_spectrum(rho1, "first state");
  const auto e2 = detail::checked_spectrum(rho2, "second state");
  if (rho1.rows() == 2) {
    const double det1 = std::max(0.0, e1.eigenvalues()(0)) * std::max(0.0, e1.eigenvalues()(1));
    const double det2 = std::max(0.0, e2.eigenvalues()(0)) * std::max(0.0, e2.eigenvalues()(1));
    const double overlap = (rho1 * rho2).trace().real();
    return std::max(0.0, overlap + 2.0 * std::sqrt(det1 * det2));
  }
  const RealVector lam = e1.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix root = e1.eigenvectors() * lam.cast<Complex>().asDiagonal() * e1.eigenvectors().adjoint();
  const ComplexMatrix m = root * rho2 * root;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> em(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  const double trace = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return trace * trace;
}

inline DensityMatrix two_level_density(const Vec3& r) {
  DensityMatrix rho(2, 2);
  rho << 0.5 * (1.0 + r.z()), Complex(0.5 * r.x(), -0.5 * r.y()), Complex(0.5 * r.x(), 0.5 * r.y()),
      0.5 * (1.0 - r.z());
  return rho;
}

inline double bloch_fidelity(const Vec3& a, const Vec3& b) { return fidelity(two_level_density(a), two_level_density(b)); }

/// Fidelity of each simulated state against the trajectory at the same time.
inline void attach_fidelity(SimulationRun& run, const TrajectorySpec& reference) {
  run.fidelity.resize(run.states.size());
  for (std::size_t k = 0; k < run.states.size(); ++k) {
    run.fidelity[k] = bloch_fidelity(run.states[k], reference(run.grid.at(k)).r);
  }
}

/// Samples f on the nodes and midpoints of the grid.
inline ControlSchedule sample_schedule(const std::function<ControlValues(double)>& f, const TimeGrid& grid,
                                       Protocol protocol) {
  ControlSchedule s;
  s.protocol = protocol;
  s.times = half_step_times(grid);
  s.values.reserve(s.times.size());
  for (double t : s.times) s.values.push_back(f(t));
  s.regularized.assign(s.times.size(), false);
  s.validate();
  return s;
}

/// Omega_x^R = Omega_0^R(t), Omega_y^R = 0, N = N0, started in the
/// instantaneous steady state; fidelity against the steady-state path.
inline SimulationRun adiabatic_reference_run(const LorentzianEnvironment& env, double n0, double omega_c,
                                             double t_final, const TimeGrid& grid) {
  const TrajectorySpec reference = tracking_trajectory(env, n0, omega_c, t_final);
  const ControlSchedule schedule = sample_schedule(
      [&](double t) { return ControlValues{reference_ramp(omega_c, t_final, t), 0.0, n0}; }, grid,
      Protocol::Transverse);
  SimulationRun run = integrate_bloch(schedule, env, reference(0.0).r, grid);
  attach_fidelity(run, reference);
  return run;
}

}  // namespace nmrev
