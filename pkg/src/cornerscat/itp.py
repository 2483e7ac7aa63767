"""Interior transmission spectrum scan by singular-value dips.

The coupled interior problem on a bounded domain D pairs a driving field v
(solving the homogeneous equation, no boundary data) with a contrast field
w (driven by v, with both value and traction clamped on the boundary):

    L v + omega^2 v           = 0                 in D,
    L w + omega^2 rho0 w      = omega^2 (1 - rho0) v   in D,
    w = 0,  T w = 0           on dD.

Frequencies admitting a nontrivial pair make the discretized block operator
nearly rank-deficient.  The discretization is second-order finite
differences on the node lattice of the bounding box: elliptic rows for w at
interior nodes, elliptic rows for v at every node (one-sided ghost-free
stencils on the boundary), clamped-value and traction rows for w on the
boundary.  The w block is over-determined, the full operator rectangular,
and the scan tracks its smallest singular value (via the normal equations
and shift-invert Lanczos) over a frequency window, reporting dips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, splu

from .elastic import LameParameters, wavenumbers
from .errors import ConfigurationError, GridResolutionError
from .farfield import find_dips, golden_minimize
from .grids import Disk, Geometry, LShape, Rectangle

__all__ = ["ItpOperator", "Dip", "ItpScanReport", "itp_scan", "MIN_NODES_PER_WAVELENGTH"]

MIN_NODES_PER_WAVELENGTH = 8.0


def _boundary_normal(geometry: Geometry, x: float, y: float, h: float) -> np.ndarray:
    """Outward unit normal at a boundary node; bisector at polygon corners."""
    if isinstance(geometry, Disk):
        r = np.hypot(x, y)
        if r == 0:
            raise ConfigurationError("boundary node at disk center")
        return np.array([x / r, y / r])
    if isinstance(geometry, Rectangle):
        nx_ = (x >= geometry.width / 2 - h / 2) * 1.0 - (x <= -geometry.width / 2 + h / 2) * 1.0
        ny_ = (y >= geometry.height / 2 - h / 2) * 1.0 - (y <= -geometry.height / 2 + h / 2) * 1.0
        v = np.array([nx_, ny_])
        norm = np.hypot(*v)
        if norm == 0:
            dists = [
                (geometry.width / 2 - abs(x), np.array([np.sign(x) or 1.0, 0.0])),
                (geometry.height / 2 - abs(y), np.array([0.0, np.sign(y) or 1.0])),
            ]
            return min(dists, key=lambda t: t[0])[1]
        return v / norm
    if isinstance(geometry, LShape):
        w2, h2 = geometry.width / 2, geometry.height / 2
        cx, cy = w2 - geometry.notch_width, h2 - geometry.notch_height
        candidates = [
            (abs(x + w2), np.array([-1.0, 0.0])),
            (abs(y + h2), np.array([0.0, -1.0])),
        ]
        if y <= cy + h / 2:
            candidates.append((abs(x - w2), np.array([1.0, 0.0])))
        if x <= cx + h / 2:
            candidates.append((abs(y - h2), np.array([0.0, 1.0])))
        if x >= cx - h / 2 and y >= cy - h / 2:
            candidates.append((abs(x - cx), np.array([1.0, 0.0])))
            candidates.append((abs(y - cy), np.array([0.0, 1.0])))
        d, v = min(candidates, key=lambda t: t[0])
        near = [c for c in candidates if c[0] <= d + h / 4]
        if len(near) > 1:
            v = sum(c[1] for c in near)
            n = np.hypot(*v)
            v = v / n if n else near[0][1]
        return v
    raise ConfigurationError(f"unsupported geometry {geometry!r}")


def _first_derivative(avail) -> list[tuple[int, float]]:
    """Second-order first-derivative stencil (offset, coeff*h) on one axis.

    ``avail(k)`` reports whether the node at offset ``k`` is in the domain.
    Falls back to first order when only one neighbor exists.
    """
    if avail(-1) and avail(1):
        return [(-1, -0.5), (1, 0.5)]
    if avail(1) and avail(2):
        return [(0, -1.5), (1, 2.0), (2, -0.5)]
    if avail(-1) and avail(-2):
        return [(0, 1.5), (-1, -2.0), (-2, 0.5)]
    if avail(1):
        return [(0, -1.0), (1, 1.0)]
    if avail(-1):
        return [(0, 1.0), (-1, -1.0)]
    raise GridResolutionError("node has no in-domain neighbor for a derivative stencil")


def _second_derivative(avail) -> list[tuple[int, float]]:
    """Second-derivative stencil (offset, coeff*h^2); one-sided on the boundary."""
    if avail(-1) and avail(1):
        return [(-1, 1.0), (0, -2.0), (1, 1.0)]
    if avail(1) and avail(2) and avail(3):
        return [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)]
    if avail(-1) and avail(-2) and avail(-3):
        return [(0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)]
    if avail(1) and avail(2):
        return [(0, 1.0), (1, -2.0), (2, 1.0)]
    if avail(-1) and avail(-2):
        return [(0, 1.0), (-1, -2.0), (-2, 1.0)]
    raise GridResolutionError("node is too isolated for a second-derivative stencil")


class ItpOperator:
    """Sparse frequency-parametric block operator ``A(omega) = A0 + omega^2 M``.

    Rectangular: the w block carries both clamped-value and traction rows on
    the boundary, so rows exceed unknowns by twice the boundary node count.
    """

    def __init__(
        self,
        geometry: Geometry,
        rho0: float,
        params: LameParameters,
        n_nodes: int,
    ):
        if rho0 == 1.0:
            raise ConfigurationError("density contrast rho0 must differ from one")
        self.geometry = geometry
        self.rho0 = rho0
        self.params = params
        x0, x1, y0, y1 = geometry.bounding_box()
        self.h = (x1 - x0) / (n_nodes - 1)
        xs = np.linspace(x0, x1, n_nodes)
        n_y = round((y1 - y0) / self.h) + 1
        ys = y0 + np.arange(n_y) * self.h
        X, Y = np.meshgrid(xs, ys)
        mask = geometry.contains(X, Y)
        inner = np.zeros_like(mask)
        inner[1:-1, 1:-1] = (
            mask[1:-1, 1:-1]
            & mask[:-2, 1:-1]
            & mask[2:, 1:-1]
            & mask[1:-1, :-2]
            & mask[1:-1, 2:]
            & mask[:-2, :-2]
            & mask[:-2, 2:]
            & mask[2:, :-2]
            & mask[2:, 2:]
        )
        self.mask = mask
        self.interior = inner
        self.boundary = mask & ~inner
        self.X, self.Y = X, Y
        self.node_index = -np.ones(mask.shape, dtype=int)
        self.node_index[mask] = np.arange(int(mask.sum()))
        self.n_active = int(mask.sum())
        self._build()

    # unknown layout: [w1, w2, v1, v2] blocks of size n_active each
    def _col(self, block: int, iy: int, ix: int) -> int:
        return block * self.n_active + self.node_index[iy, ix]

    def _avail(self, iy: int, ix: int, axis: int):
        ny, nx = self.mask.shape

        def avail(k: int) -> bool:
            jy, jx = (iy, ix + k) if axis == 0 else (iy + k, ix)
            return 0 <= jy < ny and 0 <= jx < nx and bool(self.mask[jy, jx])

        return avail

    def _shift(self, iy: int, ix: int, axis: int, off: int) -> tuple[int, int]:
        return (iy, ix + off) if axis == 0 else (iy + off, ix)

    def _elliptic_entries(
        self, iy: int, ix: int, comp: int, w_block: int
    ) -> dict[int, float] | None:
        """Stencil of the elliptic operator row (times h^2) for one component.

        Returns None when the node is too isolated for any usable stencil
        (ragged staircase corners); callers skip such rows, which only thins
        the over-determined block.
        """
        lam, mu = self.params.lmbda, self.params.mu
        c_xx = lam + 2 * mu if comp == 0 else mu
        c_yy = mu if comp == 0 else lam + 2 * mu
        entries: dict[int, float] = {}

        def accum(block, jy, jx, val):
            c = self._col(block, jy, jx)
            entries[c] = entries.get(c, 0.0) + val

        try:
            for axis, coeff in ((0, c_xx), (1, c_yy)):
                for off, val in _second_derivative(self._avail(iy, ix, axis)):
                    jy, jx = self._shift(iy, ix, axis, off)
                    accum(w_block + comp, jy, jx, coeff * val)
            # mixed derivative on the other component
            sx = _first_derivative(self._avail(iy, ix, 0))
            sy = _first_derivative(self._avail(iy, ix, 1))
        except GridResolutionError:
            return None
        for ox, vx in sx:
            for oy, vy in sy:
                accum(w_block + 1 - comp, iy + oy, ix + ox, (lam + mu) * vx * vy)
        return entries

    def _build(self):
        lam, mu = self.params.lmbda, self.params.mu
        h = self.h
        rows_a, cols_a, vals_a = [], [], []
        rows_m, cols_m, vals_m = [], [], []
        row = 0

        def add(r, c, v, mass=False):
            if mass:
                rows_m.append(r)
                cols_m.append(c)
                vals_m.append(v)
            else:
                rows_a.append(r)
                cols_a.append(c)
                vals_a.append(v)

        iys, ixs = np.nonzero(self.interior)
        for iy, ix in zip(iys, ixs):
            for comp in range(2):
                entries = self._elliptic_entries(iy, ix, comp, 0)
                if entries is None:
                    continue
                for c, v in entries.items():
                    add(row, c, v)
                add(row, self._col(comp, iy, ix), self.rho0 * h * h, mass=True)
                add(row, self._col(2 + comp, iy, ix), -(1.0 - self.rho0) * h * h, mass=True)
                row += 1
        ays, axs = np.nonzero(self.mask)
        for iy, ix in zip(ays, axs):
            for comp in range(2):
                entries = self._elliptic_entries(iy, ix, comp, 2)
                if entries is None:
                    continue
                for c, v in entries.items():
                    add(row, c, v)
                add(row, self._col(2 + comp, iy, ix), h * h, mass=True)
                row += 1

        bys, bxs = np.nonzero(self.boundary)
        for iy, ix in zip(bys, bxs):
            add(row, self._col(0, iy, ix), 1.0)
            row += 1
            add(row, self._col(1, iy, ix), 1.0)
            row += 1
            try:
                sx = _first_derivative(self._avail(iy, ix, 0))
                sy = _first_derivative(self._avail(iy, ix, 1))
            except GridResolutionError:
                continue
            nu = _boundary_normal(self.geometry, self.X[iy, ix], self.Y[iy, ix], h)
            grads = {}
            for m in range(2):
                gx = [(self._col(m, iy, ix + off), c) for off, c in sx]
                gy = [(self._col(m, iy + off, ix), c) for off, c in sy]
                grads[m] = (gx, gy)
            # traction rows (times h): 2 mu J nu + lam div nu + mu curl (nu2, -nu1)
            for comp in range(2):
                entries: dict[int, float] = {}

                def accum(pairs, scale):
                    for c, v in pairs:
                        entries[c] = entries.get(c, 0.0) + v * scale

                accum(grads[comp][0], 2 * mu * nu[0])
                accum(grads[comp][1], 2 * mu * nu[1])
                accum(grads[0][0], lam * nu[comp])
                accum(grads[1][1], lam * nu[comp])
                cross = nu[1] if comp == 0 else -nu[0]
                accum(grads[1][0], mu * cross)
                accum(grads[0][1], -mu * cross)
                for c, v in entries.items():
                    add(row, c, v)
                row += 1

        n_unknowns = 4 * self.n_active
        self.n_rows = row
        shape = (row, n_unknowns)
        self.A0 = sp.csr_matrix((vals_a, (rows_a, cols_a)), shape=shape)
        self.M = sp.csr_matrix((vals_m, (rows_m, cols_m)), shape=shape)

    def matrix(self, omega: float) -> sp.csr_matrix:
        return self.A0 + (omega * omega) * self.M

    def sigma_min(self, omega: float) -> float:
        """Smallest singular value via shift-invert Lanczos on the normal matrix."""
        A = self.matrix(omega)
        normal = (A.T @ A).tocsc()
        try:
            vals = eigsh(normal, k=1, sigma=0, which="LM", return_eigenvectors=False)
            lam = float(vals[0])
        except RuntimeError:
            # exactly singular factorization shift; nudge off zero
            scale = float(np.abs(normal.diagonal()).max())
            vals = eigsh(
                normal, k=1, sigma=-1e-14 * scale, which="LM", return_eigenvectors=False
            )
            lam = float(vals[0])
        return float(np.sqrt(max(lam, 0.0)))


@dataclass(frozen=True)
class Dip:
    omega: float
    sigma: float
    depth_ratio: float

    def to_dict(self) -> dict:
        return {"omega": self.omega, "sigma": self.sigma, "depth_ratio": self.depth_ratio}


@dataclass
class ItpScanReport:
    geometry: str
    rho0: float
    n_nodes: int
    omegas: list[float] = field(default_factory=list)
    sigma: list[float] = field(default_factory=list)
    dips: list[Dip] = field(default_factory=list)

    @property
    def median_sigma(self) -> float:
        return float(np.median(self.sigma))

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "rho0": self.rho0,
            "n_nodes": self.n_nodes,
            "median_sigma": self.median_sigma,
            "samples": [
                {"omega": o, "sigma": s} for o, s in zip(self.omegas, self.sigma)
            ],
            "dips": [d.to_dict() for d in self.dips],
        }


def itp_scan(
    geometry: Geometry,
    rho0: float,
    params: LameParameters,
    omegas: np.ndarray,
    n_nodes: int,
    refine: bool = True,
    detect_ratio: float = 0.5,
) -> ItpScanReport:
    """Scan the coupled-problem operator for near-singular frequencies.

    Reports every local minimum of the smallest singular value at most
    ``detect_ratio`` times the window median; with ``refine`` the dip
    location is polished by golden-section search inside its bracket.
    """
    omegas = np.sort(np.asarray(omegas, dtype=float))
    waven_max = wavenumbers(params, float(omegas[-1]))
    op = ItpOperator(geometry, rho0, params, n_nodes)
    nodes_per_wavelength = 2.0 * np.pi / (waven_max.k_s * op.h)
    if nodes_per_wavelength < MIN_NODES_PER_WAVELENGTH:
        raise GridResolutionError(
            f"node grid resolves {nodes_per_wavelength:.2f} nodes per shear "
            f"wavelength at omega={omegas[-1]}; need {MIN_NODES_PER_WAVELENGTH}"
        )
    sigma = [op.sigma_min(float(om)) for om in omegas]
    report = ItpScanReport(
        geometry=geometry.describe(),
        rho0=rho0,
        n_nodes=n_nodes,
        omegas=[float(o) for o in omegas],
        sigma=[float(s) for s in sigma],
    )
    med = report.median_sigma
    for idx, _depth in find_dips(omegas, np.asarray(sigma), detect_ratio):
        om, sg = float(omegas[idx]), float(sigma[idx])
        if refine:
            om, sg = golden_minimize(op.sigma_min, float(omegas[idx - 1]), float(omegas[idx + 1]))
        report.dips.append(Dip(omega=om, sigma=sg, depth_ratio=sg / med))
    report.dips.sort(key=lambda d: d.depth_ratio)
    return report
