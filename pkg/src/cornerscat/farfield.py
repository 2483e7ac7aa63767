"""Discretized far-field operator, superposition fields, and frequency sweeps.

The far-field operator maps a pair of direction densities to the far-field
pattern of the scattered wave they generate.  Discretely: direction nodes
are the N-th roots of unity, quadrature is the (spectrally accurate)
trapezoid rule with weight ``2 pi / N``, and the operator becomes a
``2N x 2N`` complex matrix with compressional/shear blocks on both sides.
Columns carry the superposition prefactors ``exp(-i pi/4) sqrt(k/omega)``
so that applying the matrix to sampled densities mirrors the continuum
definition of the superposed incident field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elastic import Direction, LameParameters, PlaneWave, WaveKind, Wavenumbers, wavenumbers
from .errors import ConfigurationError, SolverError
from .green import farfield_constants
from .grids import ScattererGrid
from .solver import far_field, ls_solve_many, unit_directions

__all__ = [
    "direction_angles",
    "FarFieldMatrix",
    "assemble_F",
    "HerglotzDensity",
    "herglotz_eval",
    "SweepReport",
    "injectivity_sweep",
    "golden_minimize",
    "find_dips",
]


def direction_angles(n: int) -> np.ndarray:
    """Angles of the N-th roots of unity."""
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True, eq=False)
class FarFieldMatrix:
    """Sampled far-field operator at one frequency.

    Layout: row block 0 holds compressional pattern samples, row block 1
    shear samples; column block 0 is driven by compressional incidence,
    block 1 by shear incidence.  ``matrix[i + pN, j + qN]`` is the far-field
    coefficient of channel ``p`` at observation node ``i`` produced by a
    unit density at incidence node ``j`` in channel ``q``, including the
    quadrature weight and superposition prefactor of the column.
    """

    omega: float
    angles: np.ndarray
    matrix: np.ndarray
    scatterer: str

    @property
    def n_directions(self) -> int:
        return len(self.angles)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    def sigma_extremes(self) -> tuple[float, float]:
        s = self.singular_values()
        return float(s[-1]), float(np.median(s))


def _herglotz_prefactors(waven: Wavenumbers) -> tuple[complex, complex]:
    phase = np.exp(-1j * np.pi / 4.0)
    return (
        phase * np.sqrt(waven.k_p / waven.omega),
        phase * np.sqrt(waven.k_s / waven.omega),
    )


def assemble_F(
    grid: ScattererGrid,
    params: LameParameters,
    waven: Wavenumbers,
    n_directions: int,
    rtol: float = 1e-10,
    method: str = "auto",
    precision: str = "double",
) -> FarFieldMatrix:
    """Assemble the far-field matrix column by column from forward solves."""
    if n_directions < 16 or n_directions % 2:
        raise ConfigurationError("need an even number of directions, at least 16")
    angles = direction_angles(n_directions)
    incidents = [
        PlaneWave(kind, Direction.from_angle(th), waven)
        for kind in (WaveKind.P, WaveKind.S)
        for th in angles
    ]
    try:
        fields = ls_solve_many(
            grid, incidents, params, waven, rtol=rtol, method=method, precision=precision
        )
    except SolverError as err:
        raise SolverError(
            f"forward solve failed while assembling F at omega={waven.omega}: {err}",
            err.residuals,
        ) from err
    constants = farfield_constants(params, waven)
    weight = 2.0 * np.pi / n_directions
    pre_p, pre_s = _herglotz_prefactors(waven)
    n = n_directions
    F = np.zeros((2 * n, 2 * n), dtype=complex)
    for col, fld in enumerate(fields):
        pattern = far_field(fld, params, waven, angles, constants=constants)
        scale = weight * (pre_p if col < n else pre_s)
        F[:n, col] = scale * pattern.u_p
        F[n:, col] = scale * pattern.u_s
    return FarFieldMatrix(
        omega=waven.omega, angles=angles, matrix=F, scatterer=grid.describe()
    )


@dataclass(frozen=True, eq=False)
class HerglotzDensity:
    """Direction densities for the two incidence channels, one value per node."""

    angles: np.ndarray
    g_p: np.ndarray
    g_s: np.ndarray

    def __post_init__(self):
        if len(self.g_p) != len(self.angles) or len(self.g_s) != len(self.angles):
            raise ConfigurationError("density length must match direction nodes")


def herglotz_eval(
    g: HerglotzDensity, params: LameParameters, waven: Wavenumbers, x: np.ndarray
) -> np.ndarray:
    """Superposed incident field of a direction density, by trapezoid quadrature.

    Evaluates ``exp(-i pi/4) * sum_j w [ sqrt(k_p/omega) e^{i k_p d_j.x} d_j g_p(d_j)
    + sqrt(k_s/omega) e^{i k_s d_j.x} d_j-perp g_s(d_j) ]`` with ``w = 2 pi / N``
    at one point or an array of points of shape (..., 2).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    d = unit_directions(g.angles)
    dperp = np.stack([-d[:, 1], d[:, 0]], axis=-1)
    pre_p, pre_s = _herglotz_prefactors(waven)
    weight = 2.0 * np.pi / len(g.angles)
    phase_p = np.exp(1j * waven.k_p * (pts @ d.T))
    phase_s = np.exp(1j * waven.k_s * (pts @ d.T))
    out = weight * (
        pre_p * (phase_p * g.g_p[None, :]) @ d
        + pre_s * (phase_s * g.g_s[None, :]) @ dperp
    )
    return out[0] if single else out.reshape(*x.shape[:-1], 2)


RESOLVED_FLOOR = 1e-5


@dataclass
class SweepReport:
    """Singular-value diagnostics of the far-field operator over a frequency sweep.

    Two injectivity diagnostics are carried side by side:

    * ``ratios`` -- the per-frequency ``sigma_min / sigma_median`` of the raw
      matrix.  At small ``k R`` the spectrum of the (severely smoothing)
      far-field operator decays through all numerical scales, so this raw
      ratio measures the decay depth of the spectrum tail rather than a
      kernel; it is reported for completeness.
    * ``local_collapse`` -- the testable restatement of near-injectivity
      loss: each resolved singular value is compared against its own median
      over neighboring frequencies, and the minimum of that ratio is taken.
      A near-kernel frequency makes one resolved singular value dive far
      below its local trend; a scatterer whose kernel stays trivial keeps
      the ratio at order one across the whole sweep.
    """

    scatterer: str
    n_directions: int
    omegas: list[float] = field(default_factory=list)
    spectra: list[np.ndarray] = field(default_factory=list)
    failures: dict[int, str] = field(default_factory=dict)

    @property
    def sigma_min(self) -> np.ndarray:
        return np.array([s[-1] if s is not None else np.nan for s in self.spectra])

    @property
    def sigma_median(self) -> np.ndarray:
        return np.array([np.median(s) if s is not None else np.nan for s in self.spectra])

    @property
    def sigma_max(self) -> np.ndarray:
        return np.array([s[0] if s is not None else np.nan for s in self.spectra])

    @property
    def ratios(self) -> np.ndarray:
        return self.sigma_min / self.sigma_median

    def index_medians(self) -> np.ndarray:
        """Median of each singular-value index across the sweep."""
        good = [s for s in self.spectra if s is not None]
        return np.median(np.stack(good), axis=0)

    def resolved_count(self) -> int:
        """Indices resolved above the relative floor at the sweep level."""
        med = self.index_medians()
        return int(np.sum(med >= RESOLVED_FLOOR * med[0]))

    def local_reference(self, omega: float, exclude: float, use: int = 4) -> np.ndarray:
        """Median reference spectrum from samples near ``omega`` but outside
        the ``exclude`` radius (so a dip does not contaminate its own
        reference)."""
        cands = [
            (abs(om - omega), s)
            for om, s in zip(self.omegas, self.spectra)
            if s is not None and abs(om - omega) >= exclude
        ]
        cands.sort(key=lambda t: t[0])
        if len(cands) < 2:
            raise ConfigurationError("not enough sweep samples for a local reference")
        return np.median(np.stack([s for _, s in cands[:use]]), axis=0)

    def local_collapse(self, width: int = 2) -> np.ndarray:
        """Per-sample minimum of resolved singular values against neighbors.

        ``width`` is the one-sided neighbor count; the sample itself is
        excluded from its reference so dips register at full depth.
        """
        k = self.resolved_count()
        n = len(self.spectra)
        out = np.full(n, np.nan)
        for i, s in enumerate(self.spectra):
            if s is None:
                continue
            neighbors = [
                self.spectra[j]
                for j in range(max(0, i - width), min(n, i + width + 1))
                if j != i and self.spectra[j] is not None
            ]
            if not neighbors:
                continue
            ref = np.median(np.stack(neighbors), axis=0)[:k]
            out[i] = float(np.min(s[:k] / ref))
        return out

    def to_rows(self) -> list[dict]:
        collapse = self.local_collapse()
        return [
            {
                "omega": self.omegas[i],
                "sigma_min": float(self.sigma_min[i]),
                "sigma_median": float(self.sigma_median[i]),
                "sigma_max": float(self.sigma_max[i]),
                "ratio": float(self.ratios[i]),
                "local_collapse": float(collapse[i]),
                "error": self.failures.get(i, ""),
            }
            for i in range(len(self.omegas))
        ]

    def to_dict(self) -> dict:
        return {
            "scatterer": self.scatterer,
            "n_directions": self.n_directions,
            "resolved_count": self.resolved_count(),
            "samples": self.to_rows(),
        }


def injectivity_sweep(
    grid: ScattererGrid,
    params: LameParameters,
    omegas: np.ndarray,
    n_directions: int,
    rtol: float = 1e-10,
    method: str = "auto",
    precision: str = "double",
) -> SweepReport:
    """Assemble F and record its singular spectrum at each frequency.

    Solver failures are recorded per sample (with NaN diagnostics) instead of
    aborting the whole sweep.
    """
    omegas = np.sort(np.asarray(omegas, dtype=float))
    if len(omegas) < 2:
        raise ConfigurationError("a sweep needs at least two frequency samples")
    report = SweepReport(scatterer=grid.describe(), n_directions=n_directions)
    for i, om in enumerate(omegas):
        report.omegas.append(float(om))
        try:
            F = assemble_F(
                grid,
                params,
                wavenumbers(params, float(om)),
                n_directions,
                rtol,
                method,
                precision,
            )
            report.spectra.append(F.singular_values())
        except SolverError as err:
            report.failures[i] = str(err)
            report.spectra.append(None)
    return report


# ---------------------------------------------------------------------------
# Scan utilities shared by the frequency sweeps
# ---------------------------------------------------------------------------
def golden_minimize(fn, a: float, b: float, iterations: int = 24) -> tuple[float, float]:
    """Golden-section minimum of a scalar function on [a, b]."""
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iterations):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = fn(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def find_dips(
    omegas: np.ndarray, values: np.ndarray, depth_ratio: float = 0.5
) -> list[tuple[int, float]]:
    """Indices of local minima at most ``depth_ratio`` times the median value.

    Returns (index, depth) pairs sorted by increasing depth (deepest first).
    """
    omegas = np.asarray(omegas)
    values = np.asarray(values)
    med = float(np.median(values[np.isfinite(values)]))
    hits = []
    for i in range(1, len(values) - 1):
        if not np.isfinite(values[i]):
            continue
        if values[i] <= values[i - 1] and values[i] <= values[i + 1]:
            depth = values[i] / med
            if depth <= depth_ratio:
                hits.append((i, float(depth)))
    return sorted(hits, key=lambda t: t[1])
