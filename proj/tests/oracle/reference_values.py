# Copyright 2026 The nmrev Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference values for tests/golden_values.hpp.

The propagator is integrated from its memory-kernel ODE with scipy (no closed
form), steady states come from the numerical null space of the Kronecker
generator. Output is a C++ snippet; the values are frozen in the header.
"""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def propagator(lam, delta, drive, t_max, gamma0=1.0):
    f0 = 0.5 * lam * gamma0
    rate = lam + 1j * drive - 1j * delta

    def rhs(_, y):
        u = y[0] + 1j * y[1]
        z = y[2] + 1j * y[3]
        du = -1j * drive * u - z
        dz = f0 * u - rate * z
        return [du.real, du.imag, dz.real, dz.imag]

    sol = solve_ivp(rhs, (0.0, t_max), [1.0, 0.0, 0.0, 0.0], method="DOP853",
                    rtol=1e-13, atol=1e-15, dense_output=True)

    def at(t):
        y = sol.sol(t)
        u = y[0] + 1j * y[1]
        z = y[2] + 1j * y[3]
        return u, -1j * drive * u - z

    def decay(t):
        u, du = at(t)
        return -(du / u).real

    def shift(t):
        u, du = at(t)
        return -(du / u).imag

    return at, decay, shift


def first_falling_root(g, lo, hi, n=20000):
    ts = np.linspace(lo, hi, n + 1)
    vals = [g(t) for t in ts]
    for a, b, ga, gb in zip(ts[:-1], ts[1:], vals[:-1], vals[1:]):
        if ga > 0 >= gb:
            return brentq(g, a, b, xtol=1e-14)
    raise RuntimeError("no root")


def first_minimum(g, lo, hi, n=20000, h=1e-5):
    dg = lambda t: (g(t + h) - g(t - h)) / (2 * h)
    ts = np.linspace(lo, hi, n + 1)
    vals = [dg(t) for t in ts]
    for a, b, ga, gb in zip(ts[:-1], ts[1:], vals[:-1], vals[1:]):
        if ga < 0 <= gb:
            return brentq(dg, a, b, xtol=1e-12)
    raise RuntimeError("no minimum")


def steady_state(gamma, shift, omega, n0):
    sx = np.array([[0, 1], [1, 0]], complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2)
    sm = (sx - 1j * sy) / 2
    sp = sm.conj().T
    h = shift * sp @ sm + omega * sx

    def diss(l):
        return 2 * np.kron(l, l.conj()) - np.kron(l.conj().T @ l, eye) - np.kron(eye, l.T @ l.conj())

    s = -1j * (np.kron(h, eye) - np.kron(eye, h.T)) + gamma * (n0 + 1) * diss(sm) + gamma * n0 * diss(sp)
    w, v = np.linalg.eig(s)
    rho = v[:, np.argmin(abs(w))].reshape(2, 2)
    rho = rho / np.trace(rho)
    return [np.trace(rho @ m).real for m in (sx, sy, sz)]


def main():
    print("// narrow spectrum: lambda = delta = 0.1, Delta = 0")
    at, decay, shift = propagator(0.1, 0.1, 0.0, 30.0)
    for t in (1.0, 5.0, 9.0):
        u, _ = at(t)
        print(f"u({t}) = {u.real:.15e} {u.imag:+.15e}i  gamma0 = {decay(t):.15e}  s0 = {shift(t):.15e}")
    t_i = first_falling_root(decay, 1e-6, 20.0)
    t_f = first_minimum(decay, t_i, t_i + 20.0)
    print(f"t_i = {t_i:.15e}")
    print(f"t_f = {t_f:.12e}  gamma0(t_f) = {decay(t_f):.12e}")
    # s0 is shifted additively by Delta, gamma0 does not depend on it.
    print(f"detuning for s0(t_i) = 0: {-shift(t_i):.15e}")

    print("// medium spectrum: lambda = delta = 0.5")
    at, decay, shift = propagator(0.5, 0.5, 0.0, 12.0)
    print(f"detuning for s0(5) = 0: {-shift(5.0):.15e}")
    at, decay, shift = propagator(0.5, 0.5, 0.1, 12.0)
    ts = np.linspace(0.0, 10.0, 10001)
    print(f"min |u| on [0,10], Delta = 0.1: {min(abs(at(t)[0]) for t in ts):.12e}")
    print(f"gamma0(2) = {decay(2.0):.15e}  s0(2) = {shift(2.0):.15e}")

    print("// flat-spectrum limit")
    for lam in (10.0, 20.0):
        _, decay, _ = propagator(lam, 0.0, 0.0, 10.0)
        print(f"lambda = {lam}: gamma0(3/lambda) = {decay(3 / lam):.12e}, gamma0(5) = {decay(5.0):.12e}")

    print("// steady state, Gamma0 = 0.7, s0 = 0.3, Omega = 1.1, N0 = 0.2")
    print("r =", ", ".join(f"{x:.15e}" for x in steady_state(0.7, 0.3, 1.1, 0.2)))
    print("// thermal hold N0 = 0.3: r_z =", f"{steady_state(0.9, 0.4, 0.0, 0.3)[2]:.15e}")


if __name__ == "__main__":
    main()
