"""Flagship juxtaposition: interior-spectrum dips vs far-field injectivity.

For each scatterer the experiment runs two independent machines over one
frequency window:

* the interior transmission scan (:mod:`cornerscat.itp`), which locates
  frequencies where the clamped coupled interior problem nearly degenerates;
* the far-field operator sweep (:mod:`cornerscat.farfield`), which tracks
  how close the scattering map comes to losing injectivity, via the
  local-collapse diagnostic (resolved singular values measured against
  their own neighborhood trend).

The juxtaposition: the smooth control scatterer (disk) shows a far-field
collapse at its interior dip -- one resolved singular pair dives orders of
magnitude below trend -- while the right-angled scatterer keeps every
resolved singular value at its trend across the whole sweep, interior dips
included.  An optional stability pass repeats the decisive quantities on a
refined solver grid, a refined node grid, and with doubled direction count.

Survey sweeps run in single precision (detection only); every number that
feeds an assertion is re-evaluated in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elastic import LameParameters, wavenumbers
from .farfield import SweepReport, assemble_F, golden_minimize, injectivity_sweep
from .grids import Disk, Geometry, Rectangle, ScattererGrid
from .itp import Dip, ItpScanReport, itp_scan

__all__ = ["HeadlineConfig", "ScattererOutcome", "HeadlineReport", "headline_experiment"]


@dataclass(frozen=True)
class HeadlineConfig:
    """Experiment configuration; defaults are the calibrated desk-scale run."""

    params: LameParameters = LameParameters(1.0, 1.0)
    rho0: float = 4.0
    rectangle: Rectangle = Rectangle(2.0, 1.5)
    disk: Disk = Disk(1.25)
    omega_min: float = 2.6
    omega_max: float = 4.6
    sweep_points: int = 40
    solver_cells: int = 48
    n_directions: int = 32
    itp_nodes: int = 49
    rtol: float = 1e-8
    refine_iterations: int = 10
    itp_detect_ratio: float = 0.6
    stability: bool = False
    stability_points: int = 3

    def omegas(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.sweep_points)

    @property
    def step(self) -> float:
        return (self.omega_max - self.omega_min) / (self.sweep_points - 1)


@dataclass
class ScattererOutcome:
    geometry: str
    sweep: SweepReport
    itp: ItpScanReport
    itp_dip: Dip | None
    collapse_omega: float | None = None
    collapse_depth: float | None = None
    raw_ratio_at_collapse: float | None = None
    sweep_collapse_floor: float = float("nan")
    stability: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "itp_dip": self.itp_dip.to_dict() if self.itp_dip else None,
            "collapse_omega": self.collapse_omega,
            "collapse_depth": self.collapse_depth,
            "raw_ratio_at_collapse": self.raw_ratio_at_collapse,
            "sweep_collapse_floor": self.sweep_collapse_floor,
            "stability": self.stability,
            "sweep": self.sweep.to_dict(),
            "itp": self.itp.to_dict(),
        }


@dataclass
class HeadlineReport:
    config: dict
    rectangle: ScattererOutcome
    disk: ScattererOutcome

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "rectangle": self.rectangle.to_dict(),
            "disk": self.disk.to_dict(),
        }


def _spectrum(grid, cfg, omega, n_dir, precision="double", rtol=None, method="auto"):
    F = assemble_F(
        grid,
        cfg.params,
        wavenumbers(cfg.params, float(omega)),
        n_dir,
        rtol if rtol is not None else cfg.rtol,
        method,
        precision,
    )
    return F.singular_values()


def _detector(grid, cfg, ref, k, n_dir, precision="single", rtol=None, method="auto"):
    def fn(omega: float) -> float:
        s = _spectrum(grid, cfg, omega, n_dir, precision, rtol, method)
        return float(np.min(s[:k] / ref[:k]))

    return fn


def _mini_floor(grid, cfg, omegas, n_dir, k, precision="single", rtol=None, method="auto"):
    """Local-collapse floor from a short spectra series (width-1 neighbors)."""
    spectra = [_spectrum(grid, cfg, om, n_dir, precision, rtol, method) for om in omegas]
    vals = []
    for i in range(1, len(spectra) - 1):
        ref = np.median(np.stack([spectra[i - 1], spectra[i + 1]]), axis=0)[:k]
        vals.append(float(np.min(spectra[i][:k] / ref)))
    return float(np.min(vals))


def _scatterer_outcome(geometry: Geometry, cfg: HeadlineConfig) -> ScattererOutcome:
    grid = ScattererGrid.build(geometry, cfg.rho0, cfg.solver_cells)
    sweep = injectivity_sweep(
        grid, cfg.params, cfg.omegas(), cfg.n_directions, rtol=cfg.rtol, precision="single"
    )
    itp = itp_scan(
        geometry,
        cfg.rho0,
        cfg.params,
        cfg.omegas(),
        cfg.itp_nodes,
        refine=True,
        detect_ratio=cfg.itp_detect_ratio,
    )
    out = ScattererOutcome(
        geometry=geometry.describe(),
        sweep=sweep,
        itp=itp,
        itp_dip=itp.dips[0] if itp.dips else None,
        sweep_collapse_floor=float(np.nanmin(sweep.local_collapse())),
    )
    if out.itp_dip is not None:
        dip = out.itp_dip
        k = sweep.resolved_count()
        ref = sweep.local_reference(dip.omega, exclude=0.75 * cfg.step, use=4)
        fn = _detector(grid, cfg, ref, k, cfg.n_directions, precision="single")
        lo = max(cfg.omega_min, dip.omega - cfg.step)
        hi = min(cfg.omega_max, dip.omega + cfg.step)
        om_c, _ = golden_minimize(fn, lo, hi, cfg.refine_iterations)
        # assertion-grade values in double precision
        s = _spectrum(grid, cfg, om_c, cfg.n_directions, precision="double")
        out.collapse_omega = float(om_c)
        out.collapse_depth = float(np.min(s[:k] / ref[:k]))
        out.raw_ratio_at_collapse = float(s[-1] / np.median(s))
    return out


def _parabola_min(xs: list[float], ys: list[float]) -> float:
    """Vertex of the parabola through three points (falls back to the argmin)."""
    (x0, x1, x2), (y0, y1, y2) = xs, ys
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a <= 0:
        return xs[int(np.argmin(ys))]
    return float(np.clip(-b / (2 * a), min(xs), max(xs)))


def _stability_pass(out: ScattererOutcome, geometry: Geometry, cfg: HeadlineConfig):
    """Repeat the decisive quantities at h/2 and 2N on reduced budgets."""
    stats: dict = {}
    k = out.sweep.resolved_count()
    step = cfg.step
    sub = np.linspace(cfg.omega_min, cfg.omega_max, cfg.stability_points + 2)

    grid_base = ScattererGrid.build(geometry, cfg.rho0, cfg.solver_cells)
    grid_fine = ScattererGrid.build(geometry, cfg.rho0, 2 * cfg.solver_cells)

    # rectangle-style floor: short series at 2N (base grid) and at h/2
    stats["floor_base_subset"] = _mini_floor(grid_base, cfg, sub, cfg.n_directions, k)
    stats["floor_2N_subset"] = _mini_floor(grid_base, cfg, sub, 2 * cfg.n_directions, k)
    stats["floor_h2_subset"] = _mini_floor(
        grid_fine, cfg, sub, cfg.n_directions, k, rtol=1e-6
    )

    if out.itp_dip is not None:
        dip = out.itp_dip
        itp_fine = itp_scan(
            geometry,
            cfg.rho0,
            cfg.params,
            np.linspace(dip.omega - 1.5 * step, dip.omega + 1.5 * step, 5),
            2 * cfg.itp_nodes - 1,
            refine=True,
            detect_ratio=2.0,
        )
        if itp_fine.dips:
            fine = min(itp_fine.dips, key=lambda d: abs(d.omega - dip.omega))
            stats["itp_dip_omega_h2"] = fine.omega
            stats["itp_dip_shift_rel"] = abs(fine.omega - dip.omega) / dip.omega

    if out.collapse_omega is not None:
        om_c = out.collapse_omega
        for tag, grid, n_dir, rtol in (
            ("h2", grid_fine, cfg.n_directions, 1e-6),
            ("2N", grid_base, 2 * cfg.n_directions, None),
        ):
            shoulders = [om_c - step, om_c + step]
            ref = np.median(
                np.stack(
                    [_spectrum(grid, cfg, om, n_dir, "single", rtol) for om in shoulders]
                ),
                axis=0,
            )
            fn = _detector(grid, cfg, ref, k, n_dir, precision="single", rtol=rtol)
            xs = [om_c - 0.4 * step, om_c, om_c + 0.4 * step]
            ys = [fn(x) for x in xs]
            om_v = _parabola_min(xs, ys)
            depth_v = fn(om_v)
            stats[f"collapse_omega_{tag}"] = om_v
            stats[f"collapse_shift_rel_{tag}"] = abs(om_v - om_c) / om_c
            stats[f"collapse_depth_{tag}"] = depth_v
    out.stability = stats


def headline_experiment(cfg: HeadlineConfig) -> HeadlineReport:
    """Run the two-scatterer juxtaposition (and optional stability passes)."""
    rect_out = _scatterer_outcome(cfg.rectangle, cfg)
    disk_out = _scatterer_outcome(cfg.disk, cfg)
    if cfg.stability:
        _stability_pass(rect_out, cfg.rectangle, cfg)
        _stability_pass(disk_out, cfg.disk, cfg)
    config_echo = {
        "lambda": cfg.params.lmbda,
        "mu": cfg.params.mu,
        "rho0": cfg.rho0,
        "rectangle": cfg.rectangle.describe(),
        "disk": cfg.disk.describe(),
        "omega_window": [cfg.omega_min, cfg.omega_max],
        "sweep_points": cfg.sweep_points,
        "solver_cells": cfg.solver_cells,
        "n_directions": cfg.n_directions,
        "itp_nodes": cfg.itp_nodes,
        "rtol": cfg.rtol,
    }
    return HeadlineReport(config=config_echo, rectangle=rect_out, disk=disk_out)
