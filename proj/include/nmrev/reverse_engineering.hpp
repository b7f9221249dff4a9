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
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "nmrev/environment.hpp"
#include "nmrev/errors.hpp"
#include "nmrev/integrator.hpp"
#include "nmrev/liouvillian.hpp"
#include "nmrev/schedule.hpp"
#include "nmrev/sun_algebra.hpp"
#include "nmrev/trajectories.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

// ---------------------------------------------------------------------------
// Generic linear system

/// An incoherent control c~(t) multiplying rate(t) * sum_s D[L_s].
struct IncoherentControl {
  std::vector<ComplexVector> shapes;
  double rate = 1.0;
  std::string label = "incoherent";
};

/// Uncontrolled part of the generator at the current instant.
struct Drift {
  HamiltonianSpec hamiltonian;
  std::vector<LindbladChannel> channels;
};

/// Lambda * controls = rhs, with rhs = rdot - drift(r).
struct ControlSystem {
  RealMatrix matrix;
  RealVector rhs;
  std::vector<std::string> labels;
};

inline ControlSystem assemble_control_system(const RealVector& r, const RealVector& rdot,
                                             std::span<const int> coherent_indices,
                                             std::span<const IncoherentControl> incoherent, const Drift& drift,
                                             const LiouvillianTensors& tensors, double t) {
  const int n = tensors.size();
  if (r.size() != n || rdot.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "assemble_control_system: r and rdot must have N^2-1 entries");
  }
  const auto columns = static_cast<Eigen::Index>(coherent_indices.size() + incoherent.size());
  if (columns > n) {
    throw Error(ErrorCode::InvalidInput, "assemble_control_system: more controls than equations");
  }
  const StructureTensors& st = tensors.structure();
  ControlSystem sys;
  sys.matrix = RealMatrix::Zero(n, columns);
  Eigen::Index col = 0;
  for (int k : coherent_indices) {
    if (k < 1 || k > n) throw Error(ErrorCode::InvalidInput, "assemble_control_system: coherent index out of range");
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += st.f(k - 1, j, i) * r(j);
      sys.matrix(i, col) = acc;
    }
    sys.labels.push_back("c" + std::to_string(k));
    ++col;
  }
  for (const auto& control : incoherent) {
    RealVector column = RealVector::Zero(n);
    for (const auto& shape : control.shapes) {
      column += channel_matrix(shape, tensors) * r + channel_offset(shape, tensors);
    }
    sys.matrix.col(col++) = control.rate * column;
    sys.labels.push_back(control.label);
  }
  RealVector h = drift.hamiltonian.coefficients;
  if (h.size() == 0) h = RealVector::Zero(n + 1);
  const LiouvillianComponents fixed = component_liouvillian(HamiltonianSpec{h}, drift.channels, tensors, t);
  sys.rhs = rdot - fixed.apply(r);
  return sys;
}

struct ControlSolution {
  RealVector values;
  double residual = 0.0;
  double condition = 0.0;
  bool ill_conditioned = false;
};

inline constexpr double kSingularRatio = 1e-14;
inline constexpr double kIllConditioned = 1e12;

inline ControlSolution solve_controls(const ControlSystem& sys) {
  if (!sys.matrix.allFinite() || !sys.rhs.allFinite()) {
    throw Error(ErrorCode::InvalidInput, "solve_controls: non-finite system");
  }
  const auto cols = sys.matrix.cols();
  ControlSolution out;
  if (cols == 0) {
    out.values = RealVector::Zero(0);
    out.residual = sys.rhs.norm();
    if (out.residual > 1e-9 * (1.0 + sys.rhs.norm())) {
      throw Error(ErrorCode::InconsistentSystem, "solve_controls: no controls selected but rhs is nonzero");
    }
    return out;
  }
  Eigen::JacobiSVD<RealMatrix> svd(sys.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const double smax = sigma(0);
  const double smin = sigma(sigma.size() - 1);
  if (smax == 0.0 || smin <= kSingularRatio * smax || sigma.size() < cols) {
    std::ostringstream msg;
    msg << "solve_controls: singular system, deficient direction (";
    const RealVector dir = svd.matrixV().col(svd.matrixV().cols() - 1);
    for (Eigen::Index k = 0; k < dir.size(); ++k) {
      msg << (k ? ", " : "") << (k < static_cast<Eigen::Index>(sys.labels.size()) ? sys.labels[k] + "=" : "")
          << dir(k);
    }
    msg << ")";
    throw Error(ErrorCode::NoUniqueSolution, msg.str());
  }
  out.values = svd.solve(sys.rhs);
  out.residual = (sys.matrix * out.values - sys.rhs).norm();
  out.condition = smax / smin;
  out.ill_conditioned = out.condition > kIllConditioned;
  if (sys.matrix.rows() > cols && out.residual > 1e-9 * (1.0 + sys.rhs.norm())) {
    throw Error(ErrorCode::InconsistentSystem,
                "solve_controls: overdetermined system has residual " + std::to_string(out.residual));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-level closed forms

inline constexpr double kSingularityTolerance = 1e-8;

/// sigma_- = (sigma_x - i sigma_y) / 2 and sigma_+ in generator coordinates.
inline ComplexVector lowering_shape() { return (ComplexVector(3) << 0.5, Complex(0.0, -0.5), 0.0).finished(); }
inline ComplexVector raising_shape() { return (ComplexVector(3) << 0.5, Complex(0.0, 0.5), 0.0).finished(); }

/// Two-level generator for the given controls: H = (s0 + Delta^R) sigma_+ sigma_-
/// + Omega_x sigma_x + Omega_y sigma_y, channels sigma_- at Gamma0 (N+1), sigma_+ at Gamma0 N.
inline Drift two_level_generator(const ControlValues& c, double gamma, double shift, Protocol protocol) {
  const double precession = protocol == Protocol::Detuning ? shift + c.second : shift;
  const double omega_y = protocol == Protocol::Transverse ? c.second : 0.0;
  Drift d;
  d.hamiltonian.coefficients = (RealVector(4) << 0.5 * precession, c.omega_x, omega_y, 0.5 * precession).finished();
  d.channels.push_back({lowering_shape(), constant(gamma * (c.excitation + 1.0))});
  d.channels.push_back({raising_shape(), constant(gamma * c.excitation)});
  return d;
}

/// Two-level Bloch equations with damping a = Gamma0 (2N + 1).
inline Vec3 bloch_field(const Vec3& r, const ControlValues& c, double gamma, double shift, Protocol protocol) {
  const double a = gamma * (2.0 * c.excitation + 1.0);
  const double w = protocol == Protocol::Detuning ? shift + c.second : shift;
  const double oy = protocol == Protocol::Transverse ? c.second : 0.0;
  const double ox = c.omega_x;
  return {2.0 * oy * r.z() - w * r.y() - a * r.x(),
          w * r.x() - 2.0 * ox * r.z() - a * r.y(),
          2.0 * ox * r.y() - 2.0 * oy * r.x() - 2.0 * a * r.z() - 2.0 * gamma};
}

/// a = Gamma0 (2N + 1) = -(r.rdot + 2 Gamma0 r_z) / (r^2 + r_z^2).
inline double two_level_damping(const Vec3& r, const Vec3& rdot, double gamma) {
  const double q = r.squaredNorm() + r.z() * r.z();
  if (q < kSingularityTolerance) throw Error(ErrorCode::Singularity, "damping undefined at the Bloch-ball centre");
  return -(r.dot(rdot) + 2.0 * gamma * r.z()) / q;
}

inline double two_level_excitation(const Vec3& r, const Vec3& rdot, double gamma) {
  if (std::abs(gamma) < kSingularityTolerance) {
    throw Error(ErrorCode::Singularity, "singular N: decay rate " + std::to_string(gamma) + " is zero");
  }
  const double q = r.squaredNorm() + r.z() * r.z();
  if (q < kSingularityTolerance) throw Error(ErrorCode::Singularity, "singular N at the Bloch-ball centre");
  return -(2.0 * gamma * r.z() + r.dot(rdot) + gamma * q) / (2.0 * gamma * q);
}

/// (Omega_x^R, Omega_y^R, N) making the Bloch equations produce rdot.
inline ControlValues two_level_controls(const Vec3& r, const Vec3& rdot, double gamma, double shift) {
  if (std::abs(r.z()) < kSingularityTolerance) {
    throw Error(ErrorCode::Singularity, "two_level_controls: r_z = " + std::to_string(r.z()) + " is zero");
  }
  const double q = r.squaredNorm() + r.z() * r.z();
  const double g = r.dot(rdot) + 2.0 * gamma * r.z();
  ControlValues c;
  c.omega_x = (q * (r.x() * shift - rdot.y()) + g * r.y()) / (2.0 * r.z() * q);
  c.second = (q * (r.y() * shift + rdot.x()) - g * r.x()) / (2.0 * r.z() * q);
  c.excitation = two_level_excitation(r, rdot, gamma);
  return c;
}

/// (Omega_x^R, Delta^R, N) for H = (s0 + Delta^R) sigma_+ sigma_- + Omega_x^R sigma_x.
inline ControlValues two_level_controls_detuning(const Vec3& r, const Vec3& rdot, double gamma, double shift) {
  if (std::abs(r.y()) < kSingularityTolerance) {
    throw Error(ErrorCode::Singularity, "two_level_controls_detuning: r_y = " + std::to_string(r.y()) + " is zero");
  }
  const double a = two_level_damping(r, rdot, gamma);
  ControlValues c;
  c.omega_x = (rdot.z() + 2.0 * a * r.z() + 2.0 * gamma) / (2.0 * r.y());
  c.second = -shift - (rdot.x() + a * r.x()) / r.y();
  c.excitation = two_level_excitation(r, rdot, gamma);
  return c;
}

inline ControlValues closed_form_controls(const Vec3& r, const Vec3& rdot, double gamma, double shift,
                                          Protocol protocol) {
  return protocol == Protocol::Transverse ? two_level_controls(r, rdot, gamma, shift)
                                          : two_level_controls_detuning(r, rdot, gamma, shift);
}

/// The same inversion through the generic linear system: coherent indices
/// {x, y} (or {x, z} with Delta^R = 2 c_z) plus N on sigma_- and sigma_+.
inline ControlValues generic_two_level_controls(const Vec3& r, const Vec3& rdot, double gamma, double shift,
                                                Protocol protocol, const LiouvillianTensors& tensors) {
  const std::vector<int> coherent =
      protocol == Protocol::Transverse ? std::vector<int>{1, 2} : std::vector<int>{1, 3};
  const std::vector<IncoherentControl> incoherent = {{{lowering_shape(), raising_shape()}, gamma, "N"}};
  Drift drift;
  drift.hamiltonian.coefficients = (RealVector(4) << 0.5 * shift, 0.0, 0.0, 0.5 * shift).finished();
  drift.channels.push_back({lowering_shape(), constant(gamma)});
  const ControlSystem sys = assemble_control_system(r, rdot, coherent, incoherent, drift, tensors, 0.0);
  const ControlSolution sol = solve_controls(sys);
  ControlValues c;
  c.omega_x = sol.values(0);
  c.second = protocol == Protocol::Transverse ? sol.values(1) : 2.0 * sol.values(1);
  c.excitation = sol.values(2);
  return c;
}

struct MarkovianReductionReport {
  double excitation = 0.0;
  double identity_residual = 0.0;  // 2 G r_z + r.rdot + (2N + 1)(r^2 + r_z^2) G
  double omega_x = 0.0;
  double omega_y = 0.0;
  double omega_x_reduced = 0.0;  // -(rdot_y + (2N+1) G r_y) / (2 r_z)
  double omega_y_reduced = 0.0;  //  (rdot_x + (2N+1) G r_x) / (2 r_z)
  double field_residual = 0.0;
};

/// Markovian limit s0 = 0, Gamma0 = gamma0 of the closed-form controls.
inline MarkovianReductionReport markovian_reduction_check(const Vec3& r, const Vec3& rdot, double gamma0) {
  MarkovianReductionReport rep;
  const ControlValues c = two_level_controls(r, rdot, gamma0, 0.0);
  const double q = r.squaredNorm() + r.z() * r.z();
  const double a = (2.0 * c.excitation + 1.0) * gamma0;
  rep.excitation = c.excitation;
  rep.identity_residual = 2.0 * gamma0 * r.z() + r.dot(rdot) + a * q;
  rep.omega_x = c.omega_x;
  rep.omega_y = c.second;
  rep.omega_x_reduced = -(rdot.y() + a * r.y()) / (2.0 * r.z());
  rep.omega_y_reduced = (rdot.x() + a * r.x()) / (2.0 * r.z());
  rep.field_residual = std::max(std::abs(rep.omega_x - rep.omega_x_reduced), std::abs(rep.omega_y - rep.omega_y_reduced));
  return rep;
}

// ---------------------------------------------------------------------------
// Schedule synthesis

/// Half-width of the removable-singularity average, relative to t_f.
inline constexpr double kLimitEpsilon = 1e-6;
/// Relative mismatch of the two one-sided values above which a singularity
/// is reported as non-removable.
inline constexpr double kLimitMismatch = 1e-2;

namespace detail {

inline ControlValues controls_at(const TrajectorySpec& trajectory, const LorentzianEnvironment& env, double t,
                                 Protocol protocol) {
  const EnvSnapshot snap = decay_and_shift(env, t);
  const TrajectoryPoint p = trajectory(t);
  return closed_form_controls(p.r, p.rdot, snap.gamma, snap.shift, protocol);
}

inline ControlValues combine(const ControlValues& a, double wa, const ControlValues& b, double wb) {
  return {wa * a.omega_x + wb * b.omega_x, wa * a.second + wb * b.second, wa * a.excitation + wb * b.excitation};
}

inline double mismatch(const ControlValues& a, const ControlValues& b) {
  auto rel = [](double x, double y) { return std::abs(x - y) / (1.0 + 0.5 * std::abs(x + y)); };
  return std::max({rel(a.omega_x, b.omega_x), rel(a.second, b.second), rel(a.excitation, b.excitation)});
}

}  // namespace detail

/// Closed-form controls at each time in `times`. Samples that hit a
/// singularity are replaced by the limit rule: the average of t -+ eps in
/// the interior, 2 f(t +- eps) - f(t +- 2 eps) at the ends.
inline ControlSchedule synthesize_schedule(const TrajectorySpec& trajectory, const LorentzianEnvironment& env,
                                           const std::vector<double>& times, Protocol protocol) {
  ControlSchedule schedule;
  schedule.protocol = protocol;
  schedule.times = times;
  schedule.values.reserve(times.size());
  schedule.regularized.assign(times.size(), false);
  const double eps = kLimitEpsilon * trajectory.t_final;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    try {
      schedule.values.push_back(detail::controls_at(trajectory, env, t, protocol));
      continue;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Singularity) throw;
    }
    ControlValues v;
    if (t - 2.0 * eps < 0.0 || t + 2.0 * eps > trajectory.t_final) {
      const double dir = t - 2.0 * eps < 0.0 ? 1.0 : -1.0;
      const ControlValues one = detail::controls_at(trajectory, env, t + dir * eps, protocol);
      const ControlValues two = detail::controls_at(trajectory, env, t + dir * 2.0 * eps, protocol);
      v = detail::combine(one, 2.0, two, -1.0);
    } else {
      const ControlValues left = detail::controls_at(trajectory, env, t - eps, protocol);
      const ControlValues right = detail::controls_at(trajectory, env, t + eps, protocol);
      if (detail::mismatch(left, right) > kLimitMismatch) {
        throw Error(ErrorCode::Singularity, "non-removable control singularity at t = " + std::to_string(t));
      }
      v = detail::combine(left, 0.5, right, 0.5);
    }
    schedule.values.push_back(v);
    schedule.regularized[k] = true;
  }
  schedule.validate();
  return schedule;
}

/// Samples at the nodes and midpoints of an RK4 grid.
inline std::vector<double> half_step_times(const TimeGrid& grid) {
  const TimeGrid fine{grid.t0, grid.t1, 2 * grid.steps};
  std::vector<double> times(fine.size());
  for (std::size_t k = 0; k < fine.size(); ++k) times[k] = fine.at(k);
  return times;
}

}  // namespace nmrev
