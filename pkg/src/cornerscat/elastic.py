"""Physical domain types and first-order boundary operators.

Conventions (fixed once, used everywhere):

* ``curl u := d1 u2 - d2 u1`` (a scalar in 2D);
* for a scalar ``c``, ``nu x c := c (nu2, -nu1)`` and ``c x nu := c (-nu2, nu1)``
  (the standard 3D embedding with the scalar on the out-of-plane axis);
* Jacobians are stored as ``J[m, n] = d u_m / d x_n`` and travel with field
  samples analytically whenever a closed form exists.  Finite differences
  are a test oracle, never the production derivative path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, ContractViolation, GridResolutionError

__all__ = [
    "LameParameters",
    "Wavenumbers",
    "wavenumbers",
    "Direction",
    "WaveKind",
    "PlaneWave",
    "FieldSample",
    "BoundarySegment",
    "corner_segments",
    "traction",
    "guenter_derivative",
    "normal_from_cauchy",
    "helmholtz_split",
    "cross_vectors",
    "perp",
]

_UNIT_TOL = 1e-14


@dataclass(frozen=True)
class LameParameters:
    """Elastic moduli with the usual positivity constraints."""

    lmbda: float
    mu: float

    def __post_init__(self):
        if not (self.mu > 0):
            raise ConfigurationError(f"shear modulus must be positive, got {self.mu}")
        if not (self.lmbda + self.mu > 0):
            raise ConfigurationError(
                f"lambda + mu must be positive, got {self.lmbda + self.mu}"
            )

    @property
    def lam_plus_2mu(self) -> float:
        return self.lmbda + 2.0 * self.mu


@dataclass(frozen=True)
class Wavenumbers:
    """Circular frequency with the derived compressional and shear wavenumbers."""

    omega: float
    k_p: float
    k_s: float

    def __post_init__(self):
        if not (0 < self.k_p < self.k_s):
            raise ConfigurationError(
                f"wavenumbers must satisfy 0 < k_p < k_s, got ({self.k_p}, {self.k_s})"
            )


def wavenumbers(params: LameParameters, omega: float) -> Wavenumbers:
    """Derive ``k_p = omega / sqrt(lambda + 2 mu)`` and ``k_s = omega / sqrt(mu)``."""
    if not (omega > 0):
        raise ConfigurationError(f"omega must be positive, got {omega}")
    return Wavenumbers(
        omega=omega,
        k_p=omega / math.sqrt(params.lam_plus_2mu),
        k_s=omega / math.sqrt(params.mu),
    )


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate a 2-vector by +90 degrees."""
    return np.array([-v[1], v[0]], dtype=v.dtype)


def cross_vectors(a: np.ndarray, b: np.ndarray) -> complex:
    """2D cross product ``a1 b2 - a2 b1`` (scalar)."""
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True, eq=False)
class Direction:
    """Unit propagation direction with its +90-degree rotation."""

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        object.__setattr__(self, "d", d)
        if abs(float(np.hypot(d[0], d[1])) - 1.0) > _UNIT_TOL:
            raise ConfigurationError(f"direction must be unit length, got {d}")

    @staticmethod
    def from_angle(theta: float) -> "Direction":
        return Direction(np.array([math.cos(theta), math.sin(theta)]))

    @property
    def d_perp(self) -> np.ndarray:
        return perp(self.d)


class WaveKind(Enum):
    P = "p"
    S = "s"


@dataclass(frozen=True)
class FieldSample:
    """Complex 2-vector value, optionally with its analytic Jacobian."""

    value: np.ndarray
    jacobian: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class PlaneWave:
    """Unit-amplitude compressional or shear plane wave.

    A P wave is ``d exp(i k_p d.x)``, an S wave ``d_perp exp(i k_s d.x)``;
    both solve the homogeneous frequency-domain equation by construction.
    Superposition prefactors belong to the far-field layer, not here.
    """

    kind: WaveKind
    direction: Direction
    waven: Wavenumbers

    @property
    def _k_and_amp(self) -> tuple[float, np.ndarray]:
        if self.kind is WaveKind.P:
            return self.waven.k_p, self.direction.d
        return self.waven.k_s, self.direction.d_perp

    def eval(self, x: np.ndarray) -> FieldSample:
        """Value and exact analytic Jacobian at one point."""
        k, amp = self._k_and_amp
        d = self.direction.d
        phase = np.exp(1j * k * float(d @ np.asarray(x, dtype=float)))
        value = amp.astype(complex) * phase
        jac = 1j * k * phase * np.outer(amp, d)
        return FieldSample(value=value, jacobian=jac)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Values only, vectorized over points of shape (N, 2)."""
        k, amp = self._k_and_amp
        phase = np.exp(1j * k * (xs @ self.direction.d))
        return phase[:, None] * amp[None, :]


@dataclass(frozen=True, eq=False)
class BoundarySegment:
    """A point on a straight boundary piece with unit tangent and normal."""

    point: np.ndarray
    tau: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        for name in ("point", "tau", "nu"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if abs(np.hypot(*self.tau) - 1) > _UNIT_TOL or abs(np.hypot(*self.nu) - 1) > _UNIT_TOL:
            raise ConfigurationError("tangent and normal must be unit vectors")
        if abs(float(self.tau @ self.nu)) > _UNIT_TOL:
            raise ConfigurationError("tangent and normal must be orthogonal")

    @property
    def orientation(self) -> float:
        """+1 when nu = tau rotated by +90 degrees, -1 for the opposite sense."""
        return float(np.sign(cross_vectors(self.tau, self.nu)))


def corner_segments(radius: float) -> tuple[BoundarySegment, BoundarySegment]:
    """The two half-axis segments meeting at the origin corner.

    Returns (horizontal, vertical): the horizontal piece carries
    ``tau = (1, 0), nu = (0, -1)``, the vertical one ``tau = (0, 1),
    nu = (-1, 0)``; both normals point away from the first quadrant.
    """
    horizontal = BoundarySegment(np.array([radius / 2, 0.0]), np.array([1.0, 0.0]), np.array([0.0, -1.0]))
    vertical = BoundarySegment(np.array([0.0, radius / 2]), np.array([0.0, 1.0]), np.array([-1.0, 0.0]))
    return horizontal, vertical


# ---------------------------------------------------------------------------
# Boundary operators
# ---------------------------------------------------------------------------
def _require_jacobian(sample: FieldSample) -> np.ndarray:
    if sample.jacobian is None:
        raise ContractViolation("field sample carries no Jacobian")
    return sample.jacobian


def _div_curl(jac: np.ndarray) -> tuple[complex, complex]:
    return jac[0, 0] + jac[1, 1], jac[1, 0] - jac[0, 1]


def traction(sample: FieldSample, nu: np.ndarray, params: LameParameters) -> np.ndarray:
    """Boundary stress vector ``2 mu dnu u + lambda nu div u + mu nu x curl u``."""
    jac = _require_jacobian(sample)
    nu = np.asarray(nu, dtype=float)
    div_u, curl_u = _div_curl(jac)
    nu_cross = np.array([nu[1], -nu[0]], dtype=complex)
    return 2.0 * params.mu * (jac @ nu) + params.lmbda * div_u * nu + params.mu * curl_u * nu_cross


def guenter_derivative(sample: FieldSample, nu: np.ndarray) -> np.ndarray:
    """Tangential derivative ``dnu u - nu div u + nu x curl u``.

    Vanishes identically for fields that vanish along the line through the
    sample point with normal ``nu``, which is what makes it usable as a
    boundary reduction device.
    """
    jac = _require_jacobian(sample)
    nu = np.asarray(nu, dtype=float)
    div_u, curl_u = _div_curl(jac)
    nu_cross = np.array([nu[1], -nu[0]], dtype=complex)
    return (jac @ nu) - div_u * nu + curl_u * nu_cross


def normal_from_cauchy(
    t_vec: np.ndarray, nu: np.ndarray, params: LameParameters
) -> np.ndarray:
    """Reconstruct ``dnu u`` from the traction of a field vanishing on the boundary.

    Splits the traction into tangential and normal parts and rescales them by
    ``1/mu`` and ``1/(lambda + 2 mu)``; the caller asserts that the underlying
    field vanishes along the boundary line (otherwise the formula does not
    apply).
    """
    nu = np.asarray(nu, dtype=float)
    t_vec = np.asarray(t_vec, dtype=complex)
    tangential_scalar = nu[0] * t_vec[1] - nu[1] * t_vec[0]  # nu x t
    tangential = tangential_scalar * np.array([-nu[1], nu[0]], dtype=complex)  # (..) x nu
    normal = (nu @ t_vec) * nu.astype(complex)
    return tangential / params.mu + normal / params.lam_plus_2mu


# ---------------------------------------------------------------------------
# Compressional / shear splitting on sampled fields
# ---------------------------------------------------------------------------
def _d2_axis(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Fourth-order second derivative along an axis; output cropped by 2 there."""
    s = [slice(None)] * u.ndim

    def sl(k):
        s2 = list(s)
        s2[axis] = slice(2 + k, u.shape[axis] - 2 + k or None)
        return tuple(s2)

    return (
        -u[sl(-2)] + 16 * u[sl(-1)] - 30 * u[sl(0)] + 16 * u[sl(1)] - u[sl(2)]
    ) / (12.0 * h * h)


def _d1_axis(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    s = [slice(None)] * u.ndim

    def sl(k):
        s2 = list(s)
        s2[axis] = slice(2 + k, u.shape[axis] - 2 + k or None)
        return tuple(s2)

    return (u[sl(-2)] - 8 * u[sl(-1)] + 8 * u[sl(1)] - u[sl(2)]) / (12.0 * h)


def helmholtz_split(
    u: np.ndarray, h: float, waven: Wavenumbers
) -> tuple[np.ndarray, np.ndarray]:
    """Split a sampled solution into compressional and shear parts.

    ``u`` has shape (ny, nx, 2) on a uniform grid with spacing ``h``; axis 1
    is x1 and axis 0 is x2.  Uses fourth-order stencils, so the returned
    arrays are cropped by two cells on every side:
    ``u_p = -(1/k_p^2) grad div u`` and ``u_s = (1/k_s^2) curl-vec curl u``.
    Their sum reproduces ``u`` (to the stencil error) only when ``u`` solves
    the homogeneous equation, which is the caller's responsibility.
    """
    u = np.asarray(u)
    if u.ndim != 3 or u.shape[2] != 2:
        raise ContractViolation(f"expected field of shape (ny, nx, 2), got {u.shape}")
    points_per_wavelength = 2.0 * math.pi / (waven.k_s * h)
    if points_per_wavelength < 5.0:
        raise GridResolutionError(
            f"grid resolves {points_per_wavelength:.2f} points per shear "
            f"wavelength; need at least 5 (h={h}, k_s={waven.k_s})"
        )
    if min(u.shape[0], u.shape[1]) < 5:
        raise GridResolutionError("need at least 5 samples per axis for 4th-order stencils")

    u1, u2 = u[..., 0], u[..., 1]
    # pure second derivatives, valid on the doubly cropped region
    d11_u1 = _d2_axis(u1, 1, h)[2:-2, :]
    d22_u1 = _d2_axis(u1, 0, h)[:, 2:-2]
    d11_u2 = _d2_axis(u2, 1, h)[2:-2, :]
    d22_u2 = _d2_axis(u2, 0, h)[:, 2:-2]
    d12_u1 = _d1_axis(_d1_axis(u1, 1, h), 0, h)
    d12_u2 = _d1_axis(_d1_axis(u2, 1, h), 0, h)

    grad_div = np.stack([d11_u1 + d12_u2, d12_u1 + d22_u2], axis=-1)
    u_p = -grad_div / waven.k_p**2
    # curl-vec of the scalar curl: (d2, -d1) of (d1 u2 - d2 u1)
    curl_comp1 = d12_u2 - d22_u1
    curl_comp2 = -(d11_u2 - d12_u1)
    u_s = np.stack([curl_comp1, curl_comp2], axis=-1) / waven.k_s**2
    return u_p, u_s
