"""Shared test oracles: finite differences and manufactured fields.

Finite differences live here (and only here): the production code carries
analytic derivatives, and these stencils provide the independent check.
"""

from __future__ import annotations

import numpy as np

_W1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_O1 = np.array([-2, -1, 1, 2])
_W2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_O2 = np.array([-2, -1, 0, 1, 2])


def fd_gradient(f, x, h=1e-3):
    """4th-order gradient of a vector field f: R^2 -> C^m at one point."""
    x = np.asarray(x, dtype=float)
    cols = []
    for axis in range(2):
        e = np.zeros(2)
        e[axis] = h
        cols.append(sum(w * np.asarray(f(x + k * e)) for w, k in zip(_W1, _O1)) / h)
    return np.stack(cols, axis=-1)  # [..., m, axis]


def fd_second(f, x, axis, h=1e-3):
    x = np.asarray(x, dtype=float)
    e = np.zeros(2)
    e[axis] = h
    return sum(w * np.asarray(f(x + k * e)) for w, k in zip(_W2, _O2)) / (h * h)


def fd_mixed(f, x, h=1e-3):
    x = np.asarray(x, dtype=float)
    total = 0.0
    for wa, ka in zip(_W1, _O1):
        for wb, kb in zip(_W1, _O1):
            total = total + wa * wb * np.asarray(f(x + np.array([ka, kb]) * h))
    return total / (h * h)


def navier_residual(f, params, omega, x, h=1e-3):
    """Max-abs residual of ``mu lap u + (lam+mu) grad div u + omega^2 u`` at x."""
    u = np.asarray(f(x))
    lap = fd_second(f, x, 0, h) + fd_second(f, x, 1, h)
    d11 = fd_second(lambda p: f(p)[0], x, 0, h)
    d22 = fd_second(lambda p: f(p)[1], x, 1, h)
    d12_u1 = fd_mixed(lambda p: f(p)[0], x, h)
    d12_u2 = fd_mixed(lambda p: f(p)[1], x, h)
    grad_div = np.array([d11 + d12_u2, d12_u1 + d22])
    res = params.mu * lap + (params.lmbda + params.mu) * grad_div + omega**2 * u
    return float(np.abs(res).max())


class VanishingField:
    """Manufactured smooth field vanishing on the line through p with normal nu.

    ``w(x) = ((x - p) . nu) * g(x)`` with ``g`` a superposition of complex
    exponentials, so values and Jacobians are analytic.
    """

    def __init__(self, rng: np.random.Generator, p, nu, n_terms: int = 3):
        self.p = np.asarray(p, dtype=float)
        self.nu = np.asarray(nu, dtype=float)
        self.coeffs = rng.normal(size=(n_terms, 2)) + 1j * rng.normal(size=(n_terms, 2))
        self.waves = rng.normal(size=(n_terms, 2))

    def g(self, x):
        phases = np.exp(1j * (self.waves @ np.asarray(x, dtype=float)))
        return phases @ self.coeffs

    def g_jac(self, x):
        phases = np.exp(1j * (self.waves @ np.asarray(x, dtype=float)))
        return np.einsum("t,tm,tn->mn", phases, 1j * self.coeffs, self.waves)

    def value(self, x):
        phi = float((np.asarray(x, dtype=float) - self.p) @ self.nu)
        return phi * self.g(x)

    def jacobian(self, x):
        phi = float((np.asarray(x, dtype=float) - self.p) @ self.nu)
        return np.outer(self.g(x), self.nu) + phi * self.g_jac(x)

    def on_line_points(self, rng: np.random.Generator, n: int) -> np.ndarray:
        tau = np.array([-self.nu[1], self.nu[0]])
        t = rng.uniform(-2.0, 2.0, size=n)
        return self.p[None, :] + t[:, None] * tau[None, :]


def stress_tensor_traction(value_jac, nu, params):
    """Independent traction oracle: sigma(u) nu with the componentwise tensor."""
    jac = value_jac
    nu = np.asarray(nu, dtype=float)
    div_u = jac[0, 0] + jac[1, 1]
    sigma = params.lmbda * div_u * np.eye(2) + params.mu * (jac + jac.T)
    return sigma @ nu
