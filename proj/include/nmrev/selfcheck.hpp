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
#include <cstdint>
#include <string>
#include <vector>

#include "nmrev/environment.hpp"
#include "nmrev/liouvillian.hpp"
#include "nmrev/reverse_engineering.hpp"
#include "nmrev/sampling.hpp"
#include "nmrev/sun_algebra.hpp"

namespace nmrev {

/// Generalized Bloch coordinates of any matrix (no trace check), linear in A:
/// N Tr[A T_i] / (normalization * kappa).
inline RealVector bloch_coordinates(const ComplexMatrix& a, const GeneratorBasis& basis) {
  const double scale = basis.dimension / (basis.normalization * basis.bloch_scale());
  RealVector r(basis.size());
  for (int i = 0; i < basis.size(); ++i) r(i) = scale * (a * basis.generator(i + 1)).trace().real();
  return r;
}

/// Max deviation between the component form and the Kronecker oracle over
/// random Hamiltonians, channels and states. `perturb` corrupts one
/// structure constant of the component form.
inline double liouvillian_equivalence_error(int dimension, int instances, std::uint64_t seed, bool perturb = false) {
  const GeneratorBasis basis = build_basis(dimension);
  StructureTensors st = structure_constants(basis);
  if (perturb) st.f(0, 1, 2) += 0.1;
  const LiouvillianTensors tensors(st);
  Sampler rng(seed);
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const HamiltonianSpec h = rng.hamiltonian(dimension);
    std::vector<LindbladChannel> channels;
    const int count = 1 + k % 3;
    for (int c = 0; c < count; ++c) channels.push_back(rng.channel(dimension));
    const RealVector r = rng.ball(basis.size(), 0.5);
    const double t = rng.uniform(0.0, 5.0);
    const LiouvillianComponents comp = component_liouvillian(h, channels, tensors, t);
    const SuperMatrix s = kron_liouvillian(h, channels, basis, t);
    const ComplexMatrix image = unvectorize(s * vectorize(bloch_to_density(r, basis)), dimension);
    worst = std::max(worst, (comp.apply(r) - bloch_coordinates(image, basis)).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct PropagatorOracleResult {
  double sup_deviation = 0.0;   // closed form vs ODE on [0, 10]
  double boundary_error = 0.0;  // |Gamma0(0)| and |s0(0) - Delta|
};

/// Closed-form u(t) against the local ODE form over random parameters with
/// lambda in [0.05, 5] and |delta|, |Delta| <= 1.
inline PropagatorOracleResult propagator_oracle_error(int sets, std::uint64_t seed, std::size_t steps = 20000) {
  Sampler rng(seed);
  PropagatorOracleResult res;
  for (int k = 0; k < sets; ++k) {
    LorentzianEnvironment env;
    env.lambda = rng.uniform(0.05, 5.0);
    env.cavity_detuning = rng.uniform(-1.0, 1.0);
    env.drive_detuning = rng.uniform(-1.0, 1.0);
    const TimeGrid grid{0.0, 10.0, steps};
    const auto ode = propagator_ode(env, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      res.sup_deviation = std::max(res.sup_deviation, std::abs(ode[i] - propagator_u(env, grid.at(i))));
    }
    const EnvSnapshot s0 = decay_and_shift(env, 0.0);
    res.boundary_error = std::max({res.boundary_error, std::abs(s0.gamma), std::abs(s0.shift - env.drive_detuning)});
  }
  return res;
}

struct SolverEquivalenceResult {
  double control_deviation = 0.0;  // closed form vs generic solve
  double residual = 0.0;           // back-substitution into the Bloch equations
};

/// Closed-form two-level controls against the generic linear system on
/// random states with |r_z| > 0.1 (|r_y| > 0.1 for the detuning protocol).
inline SolverEquivalenceResult closed_form_solver_error(int instances, std::uint64_t seed,
                                                        Protocol protocol = Protocol::Transverse) {
  const LiouvillianTensors tensors(structure_constants(build_basis(2)));
  Sampler rng(seed);
  SolverEquivalenceResult res;
  int done = 0;
  while (done < instances) {
    const Vec3 r = rng.ball(3, 1.0);
    const double guard = protocol == Protocol::Transverse ? r.z() : r.y();
    if (std::abs(guard) <= 0.1) continue;
    const Vec3 rdot = rng.vector(3, 1.0);
    const double gamma = rng.sign() * rng.uniform(0.1, 1.0);
    const double shift = rng.uniform(-1.0, 1.0);
    const ControlValues closed = closed_form_controls(r, rdot, gamma, shift, protocol);
    const ControlValues generic = generic_two_level_controls(r, rdot, gamma, shift, protocol, tensors);
    res.control_deviation = std::max({res.control_deviation, std::abs(closed.omega_x - generic.omega_x),
                                      std::abs(closed.second - generic.second),
                                      std::abs(closed.excitation - generic.excitation)});
    res.residual = std::max(res.residual, (bloch_field(r, closed, gamma, shift, protocol) - rdot).norm());
    ++done;
  }
  return res;
}

struct SuiteResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double tolerance = 0.0;
};

struct SelfcheckOptions {
  bool perturb_structure = false;
  std::uint64_t seed = 20260415;
};

inline std::vector<SuiteResult> run_selfcheck(const SelfcheckOptions& opt = {}) {
  std::vector<SuiteResult> out;
  auto add = [&](std::string name, double metric, double tol) {
    out.push_back({std::move(name), metric <= tol, metric, tol});
  };
  const double liou = std::max(liouvillian_equivalence_error(2, 100, opt.seed, opt.perturb_structure),
                               liouvillian_equivalence_error(3, 100, opt.seed + 1, opt.perturb_structure));
  add("liouvillian-equivalence", liou, 1e-10);
  const PropagatorOracleResult prop = propagator_oracle_error(20, opt.seed + 2);
  add("propagator-ode-oracle", prop.sup_deviation, 1e-6);
  add("environment-boundary", prop.boundary_error, 1e-10);
  const SolverEquivalenceResult solver = closed_form_solver_error(100, opt.seed + 3);
  add("closed-form-vs-solver", solver.control_deviation, 1e-9);
  add("back-substitution", solver.residual, 1e-10);
  const SolverEquivalenceResult detuning = closed_form_solver_error(100, opt.seed + 4, Protocol::Detuning);
  add("detuning-protocol-vs-solver", detuning.control_deviation, 1e-9);
  return out;
}

}  // namespace nmrev
