"""Outgoing fundamental solution of the frequency-domain Navier operator.

``green_matrix`` evaluates the 2x2 tensor

    G(z) = (i / 4 mu) H0(k_s r) I
         + (i / 4 omega^2) HessHess[ H0(k_s r) - H0(k_p r) ],   r = |z|,

normalized as the outgoing solution of ``(L + omega^2) G = -delta I``; the
Hessian is written in closed form through H1 and H2.  The module also
provides the exact integral of ``G`` over a disk (used for the weakly
singular self-cell of the volume quadrature) and the numeric calibration of
the far-field kernel constants from the large-radius expansion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elastic import LameParameters, Wavenumbers
from .hankel import hankel1

__all__ = [
    "green_matrix",
    "kupradze_green",
    "disk_integral",
    "self_cell_integral",
    "FarFieldConstants",
    "farfield_constants",
    "farfield_constants_closed_form",
]


def _h012(kr: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h0 = hankel1(0, kr)
    h1 = hankel1(1, kr)
    return h0, h1, (2.0 / kr) * h1 - h0


def green_matrix(z: np.ndarray, params: LameParameters, waven: Wavenumbers) -> np.ndarray:
    """Fundamental-solution tensor for displacement offsets ``z`` of shape (..., 2).

    Returns an array of shape (..., 2, 2).  All offsets must be nonzero.
    """
    z = np.asarray(z, dtype=float)
    r = np.sqrt(np.sum(z * z, axis=-1))
    if np.any(r == 0):
        raise ValueError("fundamental solution evaluated at coincident points")
    zh = z / r[..., None]
    ks, kp, w2 = waven.k_s, waven.k_p, waven.omega**2

    h0s, h1s, h2s = _h012(ks * r)
    h0p, h1p, h2p = _h012(kp * r)
    # radial/transverse coefficients of the Hessian of H0(k|z|)
    a_s = -0.5 * ks * ks * (h0s - h2s)
    a_p = -0.5 * kp * kp * (h0p - h2p)
    b_s = -(ks / r) * h1s
    b_p = -(kp / r) * h1p

    eye = np.eye(2)
    zzT = zh[..., :, None] * zh[..., None, :]
    coef_zz = (a_s - a_p) - (b_s - b_p)
    return (0.25j) * (
        (h0s / params.mu + (b_s - b_p) / w2)[..., None, None] * eye
        + (coef_zz / w2)[..., None, None] * zzT
    )


def kupradze_green(
    x: np.ndarray, y: np.ndarray, params: LameParameters, waven: Wavenumbers
) -> np.ndarray:
    """Tensor between two points; raises on coincidence."""
    return green_matrix(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), params, waven)


def disk_integral(radius: float, params: LameParameters, waven: Wavenumbers) -> np.ndarray:
    """Exact integral of the tensor over a disk centered at its singularity.

    The identity part integrates through ``int_0^R H0(kr) r dr =
    R H1(kR)/k + 2i/(pi k^2)``; the Hessian part reduces by the divergence
    theorem to boundary terms plus the ``2i I`` contribution of the
    logarithmic singularity, and the singular contributions of the two
    wavenumbers cancel.  Result is a multiple of the identity.
    """
    R = radius
    ks, kp, w2 = waven.k_s, waven.k_p, waven.omega**2
    ident_part = (2.0 * np.pi * R / ks) * hankel1(1, ks * R) + 4.0j / (ks * ks)
    hess_part = np.pi * R * (kp * hankel1(1, kp * R) - ks * hankel1(1, ks * R))
    scalar = 0.25j * (ident_part / params.mu + hess_part / w2)
    return scalar * np.eye(2)


def self_cell_integral(h: float, params: LameParameters, waven: Wavenumbers) -> np.ndarray:
    """Analytic self-cell correction: integral over the equal-area disk."""
    return disk_integral(h / np.sqrt(np.pi), params, waven)


@dataclass(frozen=True)
class FarFieldConstants:
    """Kernel constants of the two radiating far-field channels."""

    c_p: complex
    c_s: complex


def _beat_averaged(sample_fn, r0: float, beat_half_period: float) -> complex:
    return 0.5 * (sample_fn(r0) + sample_fn(r0 + beat_half_period))


def farfield_constants(
    params: LameParameters, waven: Wavenumbers, wavelengths: float = 200.0
) -> FarFieldConstants:
    """Calibrate the far-field kernel constants from the tensor at large radius.

    Extracts ``c_p`` (``c_s``) as the radial (transverse) projection of
    ``sqrt(r) exp(-i k r) G(r xhat)`` at ``wavelengths`` wavelengths of the
    respective channel.  Each projection is contaminated at order 1/(k r) by
    the other channel's oscillatory tail, so two radii half a beat period
    apart are averaged.
    """
    xhat = np.array([1.0, 0.0])
    xperp = np.array([0.0, 1.0])
    kp, ks = waven.k_p, waven.k_s
    beat = np.pi / (ks - kp)

    def sample_p(r: float) -> complex:
        g = green_matrix(r * xhat, params, waven)
        return complex(np.sqrt(r) * np.exp(-1j * kp * r) * (xhat @ g @ xhat))

    def sample_s(r: float) -> complex:
        g = green_matrix(r * xhat, params, waven)
        return complex(np.sqrt(r) * np.exp(-1j * ks * r) * (xperp @ g @ xperp))

    c_p = _beat_averaged(sample_p, wavelengths * 2.0 * np.pi / kp, beat)
    c_s = _beat_averaged(sample_s, wavelengths * 2.0 * np.pi / ks, beat)
    return FarFieldConstants(c_p=c_p, c_s=c_s)


def farfield_constants_closed_form(
    params: LameParameters, waven: Wavenumbers
) -> FarFieldConstants:
    """Leading-order constants from the large-argument Hankel expansion.

    Kept as an independent cross-check of the numeric calibration; the
    production far-field path always uses the calibrated values.
    """
    pref = np.exp(1j * np.pi / 4.0)
    c_p = pref * np.sqrt(2.0 / (np.pi * waven.k_p)) / (4.0 * params.lam_plus_2mu)
    c_s = pref * np.sqrt(2.0 / (np.pi * waven.k_s)) / (4.0 * params.mu)
    return FarFieldConstants(c_p=complex(c_p), c_s=complex(c_s))
