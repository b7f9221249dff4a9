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
#include <string>
#include <utility>
#include <vector>

#include "nmrev/errors.hpp"
#include "nmrev/integrator.hpp"
#include "nmrev/types.hpp"

namespace nmrev {

/// Lorentzian reservoir of a driven two-level system, gamma0 = 1 sets the
/// frequency unit. Only the detunings delta = w0 - wc and Delta = w0 - wL
/// are stored.
struct LorentzianEnvironment {
  double gamma0 = 1.0;
  double lambda = 1.0;
  double cavity_detuning = 0.0;
  double drive_detuning = 0.0;
  double n0 = 0.0;

  void validate() const {
    const bool finite = std::isfinite(gamma0) && std::isfinite(lambda) && std::isfinite(cavity_detuning) &&
                        std::isfinite(drive_detuning) && std::isfinite(n0);
    if (!finite || !(gamma0 > 0.0) || !(lambda > 0.0)) {
      throw Error(ErrorCode::InvalidInput, "environment: need finite parameters with gamma0 > 0, lambda > 0");
    }
  }

  LorentzianEnvironment with_drive_detuning(double detuning) const {
    LorentzianEnvironment copy = *this;
    copy.drive_detuning = detuning;
    return copy;
  }

  /// Kernel prefactor f(0) = lambda gamma0 / 2.
  double kernel_strength() const { return 0.5 * lambda * gamma0; }

  /// Kernel decay constant lambda + i Delta - i delta.
  Complex kernel_rate() const { return {lambda, drive_detuning - cavity_detuning}; }
};

struct EnvSnapshot {
  double t = 0.0;
  Complex u{1.0, 0.0};
  double gamma = 0.0;
  double shift = 0.0;
};

/// f(tau) = (lambda gamma0 / 2) exp(-(lambda + i Delta - i delta) tau).
inline Complex correlation_kernel(const LorentzianEnvironment& env, double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::DomainError, "correlation_kernel: tau must be >= 0");
  return env.kernel_strength() * std::exp(-env.kernel_rate() * tau);
}

/// u, its first two derivatives, and the log-derivative ratios, which stay
/// finite where u itself under- or overflows.
struct PropagatorJet {
  Complex u;
  Complex du;
  Complex ddu;
  Complex log_rate;       // du / u
  Complex second_ratio;   // ddu / u
  double relative_size;   // |u| over its envelope |exp((kappa0 + d/2) t)|
};

namespace detail {

inline Complex sinh_over_x(Complex x) {
  if (std::abs(x) < 1e-4) {
    const Complex x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

}  // namespace detail

/// u(t) = k(t) [cosh(dt/2) + ((lambda - i delta)/d) sinh(dt/2)],
/// k(t) = exp(-(lambda + 2i Delta - i delta) t / 2), d^2 = (lambda - i delta)^2 - 2 gamma0 lambda.
inline PropagatorJet propagator_jet(const LorentzianEnvironment& env, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::DomainError, "propagator: t must be >= 0");
  const Complex c{env.lambda, -env.cavity_detuning};
  const Complex d2 = c * c - 2.0 * env.gamma0 * env.lambda;
  const Complex d = std::sqrt(d2);
  const Complex k0 = -0.5 * Complex{env.lambda, 2.0 * env.drive_detuning - env.cavity_detuning};
  const Complex x = 0.5 * d * t;

  Complex g, dg, ddg, scale;
  if (x.real() <= 1.0) {
    const Complex ch = std::cosh(x);
    const Complex sc = detail::sinh_over_x(x);
    g = ch + 0.5 * c * t * sc;
    dg = 0.25 * d2 * t * sc + 0.5 * c * ch;
    ddg = 0.25 * d2 * ch + 0.125 * c * d2 * t * sc;
    scale = std::exp(k0 * t);
  } else {
    // cosh and sinh factored as e^x (1 +- e^{-2x}) / 2.
    const Complex e = std::exp(-2.0 * x);
    const Complex plus = 0.5 * (1.0 + e);
    const Complex minus = 0.5 * (1.0 - e);
    g = plus + (c / d) * minus;
    dg = 0.5 * d * minus + 0.5 * c * plus;
    ddg = 0.25 * d2 * plus + 0.25 * c * d * minus;
    scale = std::exp(k0 * t + x);
  }

  PropagatorJet jet;
  jet.u = scale * g;
  jet.du = scale * (k0 * g + dg);
  jet.ddu = scale * (k0 * k0 * g + 2.0 * k0 * dg + ddg);
  jet.log_rate = k0 + dg / g;
  jet.second_ratio = k0 * k0 + 2.0 * k0 * dg / g + ddg / g;
  jet.relative_size = std::abs(g) * (x.real() <= 1.0 ? std::exp(-x.real()) : 1.0);
  return jet;
}

inline Complex propagator_u(const LorentzianEnvironment& env, double t) { return propagator_jet(env, t).u; }

inline constexpr double kPropagatorZeroTolerance = 1e-12;

namespace detail {

inline const PropagatorJet& checked_jet(const PropagatorJet& jet, double t) {
  if (jet.relative_size < kPropagatorZeroTolerance || !std::isfinite(jet.log_rate.real()) ||
      !std::isfinite(jet.log_rate.imag())) {
    throw Error(ErrorCode::PropagatorZero, "propagator u vanishes at t = " + std::to_string(t));
  }
  return jet;
}

}  // namespace detail

/// Gamma0 = -Re(du/u), s0 = -Im(du/u).
inline EnvSnapshot decay_and_shift(const LorentzianEnvironment& env, double t) {
  const PropagatorJet jet = propagator_jet(env, t);
  detail::checked_jet(jet, t);
  return {t, jet.u, -jet.log_rate.real(), -jet.log_rate.imag()};
}

inline double decay_rate(const LorentzianEnvironment& env, double t) { return decay_and_shift(env, t).gamma; }
inline double lamb_shift(const LorentzianEnvironment& env, double t) { return decay_and_shift(env, t).shift; }

/// d Gamma0 / dt = -Re(ddu/u - (du/u)^2).
inline double decay_rate_derivative(const LorentzianEnvironment& env, double t) {
  const PropagatorJet jet = propagator_jet(env, t);
  detail::checked_jet(jet, t);
  return -(jet.second_ratio - jet.log_rate * jet.log_rate).real();
}

/// Propagator from the local form of the integro-differential equation:
/// du/dt = -i Delta u - z, dz/dt = f(0) u - (lambda + i Delta - i delta) z.
inline std::vector<Complex> propagator_ode(const LorentzianEnvironment& env, const TimeGrid& grid) {
  using State = Eigen::Vector2cd;
  const Complex rate = env.kernel_rate();
  const double f0 = env.kernel_strength();
  const double delta = env.drive_detuning;
  std::vector<Complex> out(grid.size());
  rk4_integrate(
      State(1.0, 0.0), grid,
      [&](double, const State& s) { return State(-kI * delta * s(0) - s(1), f0 * s(0) - rate * s(1)); },
      [&](std::size_t k, double, const State& s) { out[k] = s(0); });
  return out;
}

/// Samples of a complex field on a uniform grid.
struct FieldSeries {
  TimeGrid grid;
  std::vector<Complex> values;
};

/// Effective drive Omega^R = i (dh/dt - h du/u) for a lab drive Omega, with
/// h from dh/dt = -i Delta h - y - i Omega, dy/dt = f(0) h - (lambda + i Delta - i delta) y.
inline FieldSeries renormalized_field_series(const LorentzianEnvironment& env, const ComplexTimeFunction& omega,
                                             const TimeGrid& grid) {
  using State = Eigen::Vector2cd;
  const Complex rate = env.kernel_rate();
  const double f0 = env.kernel_strength();
  const double delta = env.drive_detuning;
  auto rhs = [&](double t, const State& s) {
    return State(-kI * delta * s(0) - s(1) - kI * omega(t), f0 * s(0) - rate * s(1));
  };
  FieldSeries series{grid, std::vector<Complex>(grid.size())};
  rk4_integrate(State(0.0, 0.0), grid, rhs, [&](std::size_t k, double t, const State& s) {
    const PropagatorJet jet = propagator_jet(env, t);
    detail::checked_jet(jet, t);
    series.values[k] = kI * (rhs(t, s)(0) - s(0) * jet.log_rate);
  });
  return series;
}

inline Complex renormalized_field(const LorentzianEnvironment& env, const ComplexTimeFunction& omega, double t,
                                  std::size_t steps = 4000) {
  if (t == 0.0) return omega(0.0);
  return renormalized_field_series(env, omega, TimeGrid{0.0, t, steps}).values.back();
}

/// Convolution form h = -i int_0^t Omega(t') u(t - t') dt' by composite
/// Simpson quadrature. Slow; a cross-check for renormalized_field.
inline Complex renormalized_field_quadrature(const LorentzianEnvironment& env, const ComplexTimeFunction& omega,
                                             double t, std::size_t panels = 2000) {
  if (t == 0.0) return omega(0.0);
  if (panels % 2 != 0) ++panels;
  const double h = t / static_cast<double>(panels);
  Complex hv = 0.0, hd = 0.0;
  for (std::size_t k = 0; k <= panels; ++k) {
    const double tp = k == panels ? t : static_cast<double>(k) * h;
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const PropagatorJet jet = propagator_jet(env, std::max(0.0, t - tp));
    const Complex om = omega(tp);
    hv += w * om * jet.u;
    hd += w * om * jet.du;
  }
  hv *= -kI * h / 3.0;
  hd = -kI * omega(t) - kI * hd * (h / 3.0);
  const PropagatorJet jet = propagator_jet(env, t);
  detail::checked_jet(jet, t);
  return kI * (hd - hv * jet.log_rate);
}

/// Lab drive realizing a prescribed effective drive: integrate
/// dh/dt = -i Omega^R + h du/u from h(0) = 0, then Omega = i (dh/dt + i Delta h + y).
inline FieldSeries lab_field_from_effective(const LorentzianEnvironment& env, const ComplexTimeFunction& omega_r,
                                            const TimeGrid& grid) {
  using State = Eigen::Vector2cd;
  const Complex rate = env.kernel_rate();
  const double f0 = env.kernel_strength();
  const double delta = env.drive_detuning;
  auto rhs = [&](double t, const State& s) {
    const PropagatorJet jet = propagator_jet(env, t);
    detail::checked_jet(jet, t);
    return State(-kI * omega_r(t) + s(0) * jet.log_rate, f0 * s(0) - rate * s(1));
  };
  FieldSeries series{grid, std::vector<Complex>(grid.size())};
  rk4_integrate(State(0.0, 0.0), grid, rhs, [&](std::size_t k, double t, const State& s) {
    series.values[k] = kI * (rhs(t, s)(0) + kI * delta * s(0) + s(1));
  });
  return series;
}

// ---------------------------------------------------------------------------
// Root finding

struct SearchWindow {
  double lo = 0.0;
  double hi = 20.0;
  std::size_t samples = 20000;
};

inline constexpr double kRootTimeTolerance = 1e-10;

/// Bisection of f on [a, b] with f(a), f(b) of opposite sign (or zero).
inline double bisect(const std::function<double(double)>& f, double a, double b, double tolerance) {
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int iter = 0; iter < 200 && b - a > tolerance; ++iter) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

namespace detail {

inline double sample_or_nan(const std::function<double(double)>& f, double t) {
  try {
    return f(t);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PropagatorZero) return std::nan("");
    throw;
  }
}

inline double window_time(const SearchWindow& w, std::size_t k) {
  return k == w.samples ? w.hi : w.lo + (w.hi - w.lo) * static_cast<double>(k) / static_cast<double>(w.samples);
}

inline void validate_window(const SearchWindow& w, const char* who) {
  if (!(w.hi > w.lo) || w.lo < 0.0 || w.samples < 2) {
    throw Error(ErrorCode::InvalidInput, std::string(who) + ": search window needs 0 <= lo < hi");
  }
}

}  // namespace detail

/// First zero of g where it goes from positive to non-positive. Sign changes
/// through poles (|g| not small after bisection) are skipped.
inline double first_falling_root(const std::function<double(double)>& g, const SearchWindow& window,
                                 double pole_tolerance = 1e-6) {
  detail::validate_window(window, "first_falling_root");
  double prev = detail::sample_or_nan(g, window.lo);
  for (std::size_t k = 1; k <= window.samples; ++k) {
    const double t = detail::window_time(window, k);
    const double cur = detail::sample_or_nan(g, t);
    if (prev > 0.0 && cur <= 0.0) {
      const double root = bisect(g, detail::window_time(window, k - 1), t, kRootTimeTolerance);
      if (std::abs(g(root)) < pole_tolerance) return root;
    }
    prev = cur;
  }
  throw Error(ErrorCode::RootNotFound, "no +/- sign change in [" + std::to_string(window.lo) + ", " +
                                           std::to_string(window.hi) + "]");
}

/// First local minimum of g after window.lo at which g is negative, located
/// as a -/+ sign change of dg.
inline double first_negative_minimum(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                                     const SearchWindow& window) {
  detail::validate_window(window, "first_negative_minimum");
  double prev = detail::sample_or_nan(dg, window.lo);
  for (std::size_t k = 1; k <= window.samples; ++k) {
    const double t = detail::window_time(window, k);
    const double cur = detail::sample_or_nan(dg, t);
    if (prev < 0.0 && cur >= 0.0) {
      const double root = bisect(dg, detail::window_time(window, k - 1), t, kRootTimeTolerance);
      if (g(root) < 0.0) return root;
      throw Error(ErrorCode::RootNotFound, "first minimum after t = " + std::to_string(window.lo) +
                                               " is not negative (no negative excursion)");
    }
    prev = cur;
  }
  throw Error(ErrorCode::RootNotFound, "no negative excursion of the decay rate in [" + std::to_string(window.lo) +
                                           ", " + std::to_string(window.hi) + "]");
}

/// t_i: first time Gamma0 turns negative.
inline double find_gamma_zero(const LorentzianEnvironment& env, const SearchWindow& window = {}) {
  env.validate();
  return first_falling_root([&](double t) { return decay_rate(env, t); }, window);
}

/// t_f: first minimum of Gamma0 after t_i, where Gamma0 is most negative.
inline double find_gamma_negmax(const LorentzianEnvironment& env, double t_i, double horizon = 20.0,
                                std::size_t samples = 20000) {
  env.validate();
  return first_negative_minimum([&](double t) { return decay_rate(env, t); },
                                [&](double t) { return decay_rate_derivative(env, t); },
                                SearchWindow{t_i, t_i + horizon, samples});
}

/// Time at which the Lamb shift must vanish, as a function of the environment.
using TargetTime = std::function<double(const LorentzianEnvironment&)>;

inline TargetTime gamma_zero_target(SearchWindow window = {}) {
  return [window](const LorentzianEnvironment& env) { return find_gamma_zero(env, window); };
}

inline TargetTime fixed_target(double t) {
  return [t](const LorentzianEnvironment&) { return t; };
}

struct DetuningFit {
  double detuning = 0.0;
  double target_time = 0.0;
  double residual = 0.0;
};

/// Drive detuning Delta in [lo, hi] with s0(target(Delta)) = 0, by the
/// Illinois variant of regula falsi.
inline DetuningFit tune_detuning_for_lamb_zero(const LorentzianEnvironment& env, const TargetTime& target,
                                               double lo = -5.0, double hi = 5.0, double tolerance = 1e-12) {
  env.validate();
  if (!(hi >= lo)) throw Error(ErrorCode::InvalidInput, "tune_detuning_for_lamb_zero: empty bracket");
  auto residual = [&](double detuning) {
    const LorentzianEnvironment trial = env.with_drive_detuning(detuning);
    const double t = target(trial);
    return std::pair{lamb_shift(trial, t), t};
  };
  auto finish = [&](double detuning) {
    const auto [s, t] = residual(detuning);
    return DetuningFit{detuning, t, s};
  };
  double a = lo, b = hi;
  double fa = residual(a).first, fb = residual(b).first;
  if (fa == 0.0) return finish(a);
  if (fb == 0.0) return finish(b);
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::RootNotFound, "tune_detuning_for_lamb_zero: s0 does not change sign on [" +
                                             std::to_string(lo) + ", " + std::to_string(hi) +
                                             "]; try a wider bracket");
  }
  int side = 0;
  double c = a;
  for (int iter = 0; iter < 200; ++iter) {
    c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = residual(c).first;
    if (fc == 0.0 || std::abs(fc) < tolerance || b - a < tolerance) break;
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
  }
  return finish(c);
}

}  // namespace nmrev
