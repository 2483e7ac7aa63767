"""Volume-integral forward solver and far-field extraction.

The total field inside the scatterer satisfies

    u = u_in + omega^2 (rho0 - 1) * integral_D G(x, y) u(y) dy,

discretized by the midpoint rule on the cell grid with the analytic
equal-area-disk correction on the self cell.  The kernel is translation
invariant on the regular grid, so the dense system matrix is a gather from
one table of kernel offsets, and one application of the discrete volume
potential is a block 2x2 circulant convolution evaluated with FFTs.  The
two paths realize the same operator and the tests pin them together.

Solves use a dense LU up to a cell-count threshold (cost independent of the
scattering strength; the preferred route for the many-right-hand-side
far-field assemblies) and an unpreconditioned restarted GMRES through the
FFT application above it.  The GMRES processes batches of right-hand sides
simultaneously so the FFTs amortize across incident directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elastic import LameParameters, PlaneWave, Wavenumbers
from .errors import GridResolutionError, SolverError
from .green import farfield_constants, green_matrix, self_cell_integral
from .grids import ScattererGrid

__all__ = [
    "VolumeKernel",
    "WaveField",
    "FarFieldPattern",
    "ls_solve",
    "ls_solve_many",
    "born_field",
    "far_field",
    "scattered_field_at",
    "dense_system_matrix",
    "unit_directions",
    "MIN_CELLS_PER_WAVELENGTH",
    "DENSE_CELL_LIMIT",
]

MIN_CELLS_PER_WAVELENGTH = 8.0
DENSE_CELL_LIMIT = 2200
GMRES_RESTART = 250
GMRES_MAX_OUTER = 6
GMRES_BATCH = 8


def unit_directions(angles: np.ndarray) -> np.ndarray:
    """Unit vectors for an array of angles, shape (N, 2)."""
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex displacement samples on the grid's bounding-box lattice."""

    grid: ScattererGrid
    values: np.ndarray  # (ny, nx, 2) complex

    def masked_values(self) -> np.ndarray:
        return self.values[self.grid.mask]


@dataclass(frozen=True, eq=False)
class FarFieldPattern:
    """Compressional and shear far-field coefficients per observation angle.

    ``u_p[k]`` multiplies the radial unit vector of ``angles[k]`` and
    ``u_s[k]`` its +90-degree rotation, so the reconstructed pattern has its
    compressional part parallel and shear part perpendicular to the
    observation direction by construction.
    """

    angles: np.ndarray
    u_p: np.ndarray
    u_s: np.ndarray

    def reconstruct(self) -> np.ndarray:
        d = unit_directions(self.angles)
        dperp = np.stack([-d[:, 1], d[:, 0]], axis=-1)
        return self.u_p[:, None] * d + self.u_s[:, None] * dperp


class VolumeKernel:
    """FFT-ready block-circulant embedding of the discrete volume potential."""

    def __init__(self, grid: ScattererGrid, params: LameParameters, waven: Wavenumbers):
        self.grid = grid
        self.params = params
        self.waven = waven
        self._check_resolution()
        ny, nx = grid.shape
        h = grid.h
        py, px = 2 * ny, 2 * nx
        dy = np.where(np.arange(py) < ny, np.arange(py), np.arange(py) - py)
        dx = np.where(np.arange(px) < nx, np.arange(px), np.arange(px) - px)
        DX, DY = np.meshgrid(dx * h, dy * h)
        offsets = np.stack([DX, DY], axis=-1)
        r2 = DX * DX + DY * DY
        kernel = np.zeros((py, px, 2, 2), dtype=complex)
        far = r2 > 0
        kernel[far] = green_matrix(offsets[far], params, waven) * (h * h)
        kernel[0, 0] = self_cell_integral(h, params, waven)
        # the wrap seam is only ever multiplied against zero padding
        kernel[ny, :] = 0.0
        kernel[:, nx] = 0.0
        self.kernel = kernel
        self.kernel_hat = np.fft.fft2(kernel, axes=(0, 1))

    def _check_resolution(self):
        cells = 2.0 * np.pi / (self.waven.k_s * self.grid.h)
        if cells < MIN_CELLS_PER_WAVELENGTH:
            raise GridResolutionError(
                f"grid resolves {cells:.2f} cells per shear wavelength; "
                f"need at least {MIN_CELLS_PER_WAVELENGTH}"
            )

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Discrete volume potential of lattice data ``f`` of shape (ny, nx, 2)."""
        return self.apply_batch(f[..., None])[..., 0]

    def apply_batch(self, f: np.ndarray) -> np.ndarray:
        """Batched potential application; ``f`` has shape (ny, nx, 2, B)."""
        ny, nx = self.grid.shape
        padded = np.zeros((2 * ny, 2 * nx, *f.shape[2:]), dtype=complex)
        padded[:ny, :nx] = f
        fhat = np.fft.fft2(padded, axes=(0, 1))
        uhat = np.einsum("yxmn,yxnb->yxmb", self.kernel_hat, fhat)
        u = np.fft.ifft2(uhat, axes=(0, 1))
        return u[:ny, :nx]

    def gather_dense(self, mask: np.ndarray) -> np.ndarray:
        """Dense kernel block matrix on the masked cells, from the offset table.

        Returns shape (n, n, 2, 2) with ``[a, b]`` the kernel between masked
        cells a (target) and b (source); identical to pairwise evaluation.
        """
        ny, nx = self.grid.shape
        iy, ix = np.nonzero(mask)
        dy = (iy[:, None] - iy[None, :]) % (2 * ny)
        dx = (ix[:, None] - ix[None, :]) % (2 * nx)
        return self.kernel[dy, dx]


def _contrast(grid: ScattererGrid, waven: Wavenumbers) -> np.ndarray:
    return waven.omega**2 * (grid.rho0 - 1.0) * grid.coverage


def _incident_values(grid: ScattererGrid, incident: PlaneWave) -> np.ndarray:
    X, Y = grid.cell_centers()
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    return incident.eval_many(pts).reshape(*grid.shape, 2)


def dense_system_matrix(
    grid: ScattererGrid, params: LameParameters, waven: Wavenumbers
) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``I - G V`` on the masked cells; returns (matrix, mask points).

    Assembled by gathering the translation-invariant kernel table, so the
    cost is one table build plus an index gather.
    """
    kernel = VolumeKernel(grid, params, waven)
    pts = grid.masked_points()
    n = len(pts)
    G = kernel.gather_dense(grid.mask)
    v = _contrast(grid, waven)[grid.mask]
    A = -G * v[None, :, None, None]
    A = A.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    A[np.arange(2 * n), np.arange(2 * n)] += 1.0
    return A, pts


def _solve_dense(
    grid: ScattererGrid,
    incidents: list[PlaneWave],
    params: LameParameters,
    waven: Wavenumbers,
    precision: str = "double",
) -> list[WaveField]:
    from scipy.linalg import lu_factor, lu_solve

    A, _ = dense_system_matrix(grid, params, waven)
    if precision == "single":
        A = A.astype(np.complex64)
    lu = lu_factor(A, overwrite_a=True, check_finite=False)
    lattices = [_incident_values(grid, inc) for inc in incidents]
    rhs = np.stack([lat[grid.mask].ravel() for lat in lattices], axis=1)
    if precision == "single":
        rhs = rhs.astype(np.complex64)
    sols = lu_solve(lu, rhs, check_finite=False).astype(complex)
    out = []
    for col, lat in enumerate(lattices):
        values = np.array(lat)
        values[grid.mask] = sols[:, col].reshape(-1, 2)
        out.append(WaveField(grid, values))
    return out


def _block_gmres(
    matvec_batch,
    B: np.ndarray,
    rtol: float,
    restart: int = GMRES_RESTART,
    max_outer: int = GMRES_MAX_OUTER,
) -> tuple[np.ndarray, list[float]]:
    """Restarted GMRES on a batch of right-hand sides with one shared operator.

    ``matvec_batch`` maps (m, k) -> (m, k); every column builds its own
    Krylov recursion, but operator applications are batched so the FFT work
    amortizes across columns.  Returns the solution block and the worst-case
    relative residual history.
    """
    m, k = B.shape
    X = np.zeros_like(B)
    bnorm = np.linalg.norm(B, axis=0)
    bnorm[bnorm == 0] = 1.0
    history: list[float] = []
    for _ in range(max_outer):
        R = B - matvec_batch(X)
        beta = np.linalg.norm(R, axis=0)
        rel = beta / bnorm
        history.append(float(rel.max()))
        if np.all(rel <= rtol):
            return X, history
        V: list[np.ndarray] = [R / beta[None, :]]
        H = np.zeros((k, restart + 1, restart), dtype=complex)
        cs = np.zeros((k, restart), dtype=complex)
        sn = np.zeros((k, restart), dtype=complex)
        g = np.zeros((k, restart + 1), dtype=complex)
        g[:, 0] = beta
        j_used = restart
        for j in range(restart):
            w = matvec_batch(V[j])
            for i in range(j + 1):
                hij = np.einsum("mk,mk->k", V[i].conj(), w)
                H[:, i, j] = hij
                w -= V[i] * hij[None, :]
            hnext = np.linalg.norm(w, axis=0)
            H[:, j + 1, j] = hnext
            V.append(w / np.where(hnext == 0, 1.0, hnext)[None, :])
            # progressive Givens rotations per column: annihilator stored as
            # (c, s) = (conj(f), conj(g)) / r acting by
            # [t, u] -> [c t + s u, -conj(s) t + conj(c) u]
            for i in range(j):
                t = H[:, i, j].copy()
                H[:, i, j] = cs[:, i] * t + sn[:, i] * H[:, i + 1, j]
                H[:, i + 1, j] = -sn[:, i].conj() * t + cs[:, i].conj() * H[:, i + 1, j]
            denom = np.sqrt(np.abs(H[:, j, j]) ** 2 + np.abs(H[:, j + 1, j]) ** 2)
            denom_safe = np.where(denom == 0, 1.0, denom)
            cs[:, j] = H[:, j, j].conj() / denom_safe
            sn[:, j] = H[:, j + 1, j].conj() / denom_safe
            H[:, j, j] = denom
            H[:, j + 1, j] = 0.0
            g[:, j + 1] = -sn[:, j].conj() * g[:, j]
            g[:, j] = cs[:, j] * g[:, j]
            history.append(float((np.abs(g[:, j + 1]) / bnorm).max()))
            if np.all(np.abs(g[:, j + 1]) / bnorm <= rtol):
                j_used = j + 1
                break
        else:
            j_used = restart
        # back substitution per column on the triangularized H
        Y = np.zeros((k, j_used), dtype=complex)
        for col in range(k):
            Hc = H[col, :j_used, :j_used]
            Y[col] = np.linalg.solve(Hc, g[col, :j_used])
        X = X + np.einsum("jmk,kj->mk", np.stack(V[:j_used]), Y)
        if history[-1] <= rtol:
            Rfin = B - matvec_batch(X)
            history.append(float((np.linalg.norm(Rfin, axis=0) / bnorm).max()))
            if history[-1] <= 10 * rtol:
                return X, history
    raise SolverError(
        f"GMRES failed to reach rtol={rtol} within {max_outer} restart cycles",
        history,
    )


def _solve_gmres(
    grid: ScattererGrid,
    incidents: list[PlaneWave],
    params: LameParameters,
    waven: Wavenumbers,
    rtol: float,
) -> list[WaveField]:
    kernel = VolumeKernel(grid, params, waven)
    v = _contrast(grid, waven)
    mask = grid.mask
    n_mask = int(mask.sum())

    def matvec_batch(x: np.ndarray) -> np.ndarray:
        k = x.shape[1]
        lattice = np.zeros((*grid.shape, 2, k), dtype=complex)
        lattice[mask] = v[mask, None, None] * x.reshape(n_mask, 2, k)
        pot = kernel.apply_batch(lattice)
        return x - pot[mask].reshape(2 * n_mask, k)

    out = []
    for start in range(0, len(incidents), GMRES_BATCH):
        chunk = incidents[start : start + GMRES_BATCH]
        lattices = [_incident_values(grid, inc) for inc in chunk]
        B = np.stack([lat[mask].ravel() for lat in lattices], axis=1)
        X, _ = _block_gmres(matvec_batch, B, rtol)
        for col, lat in enumerate(lattices):
            values = np.array(lat)
            values[mask] = X[:, col].reshape(-1, 2)
            out.append(WaveField(grid, values))
    return out


def ls_solve_many(
    grid: ScattererGrid,
    incidents: list[PlaneWave],
    params: LameParameters,
    waven: Wavenumbers,
    rtol: float = 1e-10,
    method: str = "auto",
    precision: str = "double",
) -> list[WaveField]:
    """Total fields for several incident waves sharing one kernel/factorization.

    ``method``: "dense" forces the LU route, "fft" the batched GMRES route,
    "auto" picks dense up to ``DENSE_CELL_LIMIT`` masked cells.
    ``precision="single"`` runs the dense factorization in complex64 (used
    for survey sweeps whose results feed detection, not assertions).
    """
    if rtol <= 0:
        raise ValueError("rtol must be positive")
    if method not in ("auto", "dense", "fft"):
        raise ValueError(f"unknown solve method {method!r}")
    if precision not in ("double", "single"):
        raise ValueError(f"unknown precision {precision!r}")
    n_mask = int(grid.mask.sum())
    if method == "dense" or (method == "auto" and n_mask <= DENSE_CELL_LIMIT):
        return _solve_dense(grid, incidents, params, waven, precision)
    return _solve_gmres(grid, incidents, params, waven, rtol)


def ls_solve(
    grid: ScattererGrid,
    incident: PlaneWave,
    params: LameParameters,
    waven: Wavenumbers,
    rtol: float = 1e-10,
    method: str = "auto",
) -> WaveField:
    """Total field on the grid for one incident plane wave."""
    return ls_solve_many(grid, [incident], params, waven, rtol, method)[0]


def born_field(
    grid: ScattererGrid,
    incident: PlaneWave,
    params: LameParameters,
    waven: Wavenumbers,
) -> WaveField:
    """Single-application weak-contrast approximation (test oracle)."""
    kernel = VolumeKernel(grid, params, waven)
    u_in = _incident_values(grid, incident)
    v = _contrast(grid, waven)
    return WaveField(grid, u_in + kernel.apply(v[..., None] * u_in))


def far_field(
    field: WaveField,
    params: LameParameters,
    waven: Wavenumbers,
    angles: np.ndarray,
    constants=None,
) -> FarFieldPattern:
    """Compressional/shear far-field pattern of a solved total field.

    Uses the calibrated kernel constants and the same weighted midpoint
    quadrature as the forward solve.
    """
    grid = field.grid
    if constants is None:
        constants = farfield_constants(params, waven)
    d = unit_directions(np.asarray(angles))
    dperp = np.stack([-d[:, 1], d[:, 0]], axis=-1)
    pts = grid.masked_points()
    u = field.masked_values()
    w = (_contrast(grid, waven)[grid.mask]) * grid.h**2

    phase_p = np.exp(-1j * waven.k_p * (d @ pts.T))
    phase_s = np.exp(-1j * waven.k_s * (d @ pts.T))
    radial = d @ u.T
    transverse = dperp @ u.T
    u_p = constants.c_p * np.sum(phase_p * radial * w[None, :], axis=1)
    u_s = constants.c_s * np.sum(phase_s * transverse * w[None, :], axis=1)
    return FarFieldPattern(angles=np.asarray(angles), u_p=u_p, u_s=u_s)


def scattered_field_at(
    field: WaveField,
    params: LameParameters,
    waven: Wavenumbers,
    points: np.ndarray,
) -> np.ndarray:
    """Scattered field at exterior points by direct volume-potential evaluation."""
    grid = field.grid
    pts = grid.masked_points()
    u = field.masked_values()
    w = (_contrast(grid, waven)[grid.mask]) * grid.h**2
    points = np.atleast_2d(np.asarray(points, dtype=float))
    diff = points[:, None, :] - pts[None, :, :]
    G = green_matrix(diff, params, waven)
    return np.einsum("xymn,yn,y->xm", G, u, w)
