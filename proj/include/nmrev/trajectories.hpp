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
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "nmrev/environment.hpp"
#include "nmrev/errors.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

struct TrajectoryPoint {
  Vec3 r = Vec3::Zero();
  Vec3 rdot = Vec3::Zero();
};

/// A value/derivative constraint the trajectory interpolates exactly.
struct Knot {
  double time = 0.0;
  Vec3 value = Vec3::Zero();
  Vec3 derivative = Vec3::Zero();
};

/// Designed two-level Bloch path on [0, t_final].
struct TrajectorySpec {
  std::string kind;
  double t_final = 0.0;
  std::vector<Knot> knots;
  std::function<TrajectoryPoint(double)> evaluator;

  TrajectoryPoint operator()(double t) const {
    if (!(t >= 0.0) || t > t_final * (1.0 + 1e-12)) {
      throw Error(ErrorCode::DomainError, kind + " trajectory evaluated outside [0, t_f] at t = " + std::to_string(t));
    }
    return evaluator(std::min(t, t_final));
  }
};

/// Omega_0^R(t) = 6 Omega_c (t/t_f)^2 (1/2 - t/(3 t_f)), with its time derivative.
struct RampValue {
  double value = 0.0;
  double derivative = 0.0;
};

inline RampValue reference_ramp_jet(double omega_c, double t_final, double t) {
  if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidInput, "reference_ramp: t_f must be positive");
  if (!(t >= 0.0) || t > t_final) {
    throw Error(ErrorCode::DomainError, "reference_ramp: t = " + std::to_string(t) + " outside [0, t_f]");
  }
  const double s = t / t_final;
  return {6.0 * omega_c * s * s * (0.5 - s / 3.0), 6.0 * omega_c * s * (1.0 - s) / t_final};
}

inline double reference_ramp(double omega_c, double t_final, double t) {
  return reference_ramp_jet(omega_c, t_final, t).value;
}

namespace detail {

/// Null vector of the time-frozen two-level Liouvillian with drive omega
/// along x, decay gamma, shift s and N' = 2 N0 + 1; returns r and the
/// partial derivatives with respect to (gamma, s, omega).
struct SteadyStateJet {
  Vec3 r;
  Vec3 d_gamma;
  Vec3 d_shift;
  Vec3 d_omega;
};

inline SteadyStateJet steady_state_jet(double gamma, double s, double omega, double n0) {
  const double np = 2.0 * n0 + 1.0;
  const double p = gamma * gamma * np * np + s * s;
  const double z = np * (p + 2.0 * omega * omega);
  if (std::abs(z) < 1e-300) {
    throw Error(ErrorCode::DegenerateState, "steady_state_bloch: normalizer z vanishes (Gamma0 = s0 = Omega = 0)");
  }
  // numerators: x = -2 omega s, y = 2 N' omega gamma, z-component = -p
  const Vec3 num(-2.0 * omega * s, 2.0 * np * omega * gamma, -p);
  const Vec3 dnum_gamma(0.0, 2.0 * np * omega, -2.0 * gamma * np * np);
  const Vec3 dnum_shift(-2.0 * omega, 0.0, -2.0 * s);
  const Vec3 dnum_omega(-2.0 * s, 2.0 * np * gamma, 0.0);
  const double dz_gamma = np * 2.0 * gamma * np * np;
  const double dz_shift = np * 2.0 * s;
  const double dz_omega = np * 4.0 * omega;
  auto quotient = [&](const Vec3& dnum, double dz) -> Vec3 { return (dnum * z - num * dz) / (z * z); };
  return {num / z, quotient(dnum_gamma, dz_gamma), quotient(dnum_shift, dz_shift), quotient(dnum_omega, dz_omega)};
}

}  // namespace detail

/// Null vector of the frozen generator for given Gamma0, s0, Omega_0^R and N0.
inline Vec3 steady_state_from_rates(double gamma, double shift, double omega0, double n0) {
  return detail::steady_state_jet(gamma, shift, omega0, n0).r;
}

/// Instantaneous steady state for drive Omega_0^R sigma_x at time t.
inline Vec3 steady_state_bloch(const LorentzianEnvironment& env, double n0, double omega0, double t) {
  const EnvSnapshot snap = decay_and_shift(env, t);
  return detail::steady_state_jet(snap.gamma, snap.shift, omega0, n0).r;
}

/// r(t) = steady state at Omega_0^R(t); rdot by the chain rule through
/// Gamma0(t), s0(t) and the ramp. ds0/dt = -Im(ddu/u - (du/u)^2).
inline TrajectorySpec tracking_trajectory(const LorentzianEnvironment& env, double n0, double omega_c,
                                          double t_final) {
  env.validate();
  if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidInput, "tracking_trajectory: t_f must be positive");
  TrajectorySpec spec;
  spec.kind = "track-steady";
  spec.t_final = t_final;
  spec.evaluator = [env, n0, omega_c, t_final](double t) {
    const PropagatorJet jet = propagator_jet(env, t);
    detail::checked_jet(jet, t);
    const Complex w = jet.log_rate;
    const Complex dw = jet.second_ratio - w * w;
    const RampValue ramp = reference_ramp_jet(omega_c, t_final, t);
    const auto ss = detail::steady_state_jet(-w.real(), -w.imag(), ramp.value, n0);
    TrajectoryPoint p;
    p.r = ss.r;
    p.rdot = ss.d_gamma * (-dw.real()) + ss.d_shift * (-dw.imag()) + ss.d_omega * ramp.derivative;
    return p;
  };
  for (double t : {0.0, t_final}) {
    const TrajectoryPoint p = spec.evaluator(t);
    spec.knots.push_back({t, p.r, p.rdot});
  }
  return spec;
}

/// Pure-state inversion on the unit sphere: r = (sin th sin ph, cos th sin ph, cos ph) with
/// ph(t) = pi (1 - tau^2 (3 - 2 tau)) and th(t) = 16 th_mid tau^2 (1 - tau)^2, tau = t/t_f.
inline TrajectorySpec pure_inversion_trajectory(double t_final, double theta_mid = std::numbers::pi / 4.0) {
  if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidInput, "pure_inversion_trajectory: t_f must be positive");
  TrajectorySpec spec;
  spec.kind = "invert-pure";
  spec.t_final = t_final;
  spec.evaluator = [t_final, theta_mid](double t) {
    const double pi = std::numbers::pi;
    const double tau = t / t_final;
    const double ph = pi * (1.0 - tau * tau * (3.0 - 2.0 * tau));
    const double dph = -pi * 6.0 * tau * (1.0 - tau) / t_final;
    const double th = 16.0 * theta_mid * tau * tau * (1.0 - tau) * (1.0 - tau);
    const double dth = 32.0 * theta_mid * tau * (1.0 - tau) * (1.0 - 2.0 * tau) / t_final;
    const double sth = std::sin(th), cth = std::cos(th), sph = std::sin(ph), cph = std::cos(ph);
    TrajectoryPoint p;
    p.r = Vec3(sth * sph, cth * sph, cph);
    p.rdot = Vec3(cth * dth * sph + sth * cph * dph, -sth * dth * sph + cth * cph * dph, -sph * dph);
    return p;
  };
  spec.knots = {{0.0, Vec3(0, 0, -1), Vec3::Zero()},
                {0.5 * t_final, spec.evaluator(0.5 * t_final).r, spec.evaluator(0.5 * t_final).rdot},
                {t_final, Vec3(0, 0, 1), Vec3::Zero()}};
  return spec;
}

/// Knot table for the mixed inversion; r_x is identically zero.
struct BoundaryTable {
  double ry_mid = 0.12;
  double rz_rate_mid = 0.4;
  double rz_rate_end = 1.0;
};

namespace detail {

struct Hermite {
  double t0, t1, p0, p1, m0, m1;

  std::pair<double, double> operator()(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double value = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * p1 +
                         (s3 - s2) * h * m1;
    const double slope = (6 * s2 - 6 * s) / h * p0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) / h * p1 +
                         (3 * s2 - 2 * s) * m1;
    return {value, slope};
  }
};

/// Piecewise cubic Hermite through consecutive knots (components y and z).
inline TrajectoryPoint eval_piecewise(const std::vector<Knot>& knots, double t) {
  std::size_t seg = 0;
  while (seg + 2 < knots.size() && t > knots[seg + 1].time) ++seg;
  const Knot& a = knots[seg];
  const Knot& b = knots[seg + 1];
  TrajectoryPoint p;
  for (int c = 1; c < 3; ++c) {
    const auto [v, d] = Hermite{a.time, b.time, a.value(c), b.value(c), a.derivative(c), b.derivative(c)}(t);
    p.r(c) = v;
    p.rdot(c) = d;
  }
  return p;
}

inline double max_norm(const std::vector<Knot>& knots, double lo, double hi, int samples) {
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = lo + (hi - lo) * k / samples;
    worst = std::max(worst, eval_piecewise(knots, t).r.norm());
  }
  return worst;
}

}  // namespace detail

inline constexpr double kNormSlack = 1e-9;

/// Mixed-state inversion through (0,0,-1) -> (0,ry_mid,0) at t_i -> (0,0,1) at t_f,
/// cubic Hermite per segment. A segment whose interpolant leaves the Bloch
/// ball is split at its midpoint; the new knot's derivative is scaled by
/// 0.9^k, k = 1..20, until the norm bound holds.
inline TrajectorySpec mixed_inversion_trajectory(double t_i, double t_final, const BoundaryTable& table = {},
                                                 int norm_samples = 4000) {
  if (!(t_i > 0.0) || !(t_final > t_i)) {
    throw Error(ErrorCode::InvalidInput, "mixed_inversion_trajectory: need 0 < t_i < t_f");
  }
  std::vector<Knot> knots = {
      {0.0, Vec3(0, 0, -1), Vec3::Zero()},
      {t_i, Vec3(0, table.ry_mid, 0), Vec3(0, 0, table.rz_rate_mid)},
      {t_final, Vec3(0, 0, 1), Vec3(0, 0, table.rz_rate_end)},
  };
  for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
    const double lo = knots[seg].time, hi = knots[seg + 1].time;
    if (detail::max_norm(knots, lo, hi, norm_samples) <= 1.0 + kNormSlack) continue;
    const double mid = 0.5 * (lo + hi);
    const TrajectoryPoint base = detail::eval_piecewise(knots, mid);
    bool feasible = false;
    for (int k = 1; k <= 20 && !feasible; ++k) {
      std::vector<Knot> trial = knots;
      trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(seg) + 1,
                   Knot{mid, base.r, base.rdot * std::pow(0.9, k)});
      if (detail::max_norm(trial, lo, hi, norm_samples) <= 1.0 + kNormSlack) {
        knots = std::move(trial);
        feasible = true;
      }
    }
    if (!feasible) {
      throw Error(ErrorCode::InfeasibleTrajectory, "mixed_inversion_trajectory: |r| > 1 on [" + std::to_string(lo) +
                                                       ", " + std::to_string(hi) + "] after 20 rescalings");
    }
    ++seg;  // skip the freshly inserted half
  }
  TrajectorySpec spec;
  spec.kind = "invert-mixed";
  spec.t_final = t_final;
  spec.knots = knots;
  spec.evaluator = [knots](double t) { return detail::eval_piecewise(knots, t); };
  return spec;
}

}  // namespace nmrev
