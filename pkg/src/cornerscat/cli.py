"""Command-line front end: configuration, dispatch, artifact persistence.

Configs are strict JSON documents: unknown keys are rejected and every
violation is reported at once.  Each run writes its artifacts (CSV plus a
JSON mirror with metadata) under the output root and finishes with an
atomically written manifest listing every produced file with its digest.

Exit codes: 0 success, 1 a verified property failed, 2 configuration error,
3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .corner_induction import certify_induction, reference_reduction_diff
from .elastic import Direction, LameParameters, PlaneWave, WaveKind, wavenumbers
from .errors import ConfigurationError, SolverError
from .farfield import injectivity_sweep
from .grids import ScattererGrid, geometry_from_dict
from .headline import HeadlineConfig, headline_experiment
from .itp import itp_scan
from .lame_algebra import (
    SymbolPoint,
    b_matrix_identities,
    lame_symbol,
    rank_one_update_determinant,
    squared_symbol_factorizations,
)
from .exact import GRMatrix
from .solver import far_field, ls_solve

OUTPUT_ROOT_ENV = "CORNERSCAT_OUT"

MODES = (
    "verify-algebra",
    "verify-induction",
    "solve",
    "farfield-sweep",
    "itp-scan",
    "headline",
)

_KNOWN_KEYS = {
    "mode",
    "lambda",
    "mu",
    "rho0",
    "geometry",
    "omega",
    "omega_range",
    "grid_n",
    "directions",
    "itp_nodes",
    "rtol",
    "outdir",
    "seed",
    "max_order",
    "samples",
    "incident_kind",
    "incident_angle",
    "stability",
    "workers",
}

_MODE_REQUIRED = {
    "verify-algebra": {"lambda", "mu"},
    "verify-induction": {"lambda", "mu"},
    "solve": {"lambda", "mu", "rho0", "geometry", "omega", "grid_n"},
    "farfield-sweep": {"lambda", "mu", "rho0", "geometry", "omega_range", "grid_n", "directions"},
    "itp-scan": {"lambda", "mu", "rho0", "geometry", "omega_range", "itp_nodes"},
    "headline": {"lambda", "mu", "rho0", "omega_range", "grid_n", "directions", "itp_nodes"},
}


@dataclass
class RunConfig:
    mode: str
    lmbda: float = 1.0
    mu: float = 1.0
    rho0: float | None = None
    geometry: dict | None = None
    omega: float | None = None
    omega_range: list | None = None
    grid_n: int = 48
    directions: int = 32
    itp_nodes: int = 49
    rtol: float = 1e-8
    outdir: str | None = None
    seed: int = 7
    max_order: int = 16
    samples: int = 50
    incident_kind: str = "p"
    incident_angle: float = 0.0
    stability: bool = False
    workers: int = 1
    raw: dict = field(default_factory=dict)

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document; collects every violation before failing."""
    problems: list[str] = []
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        problems.append(f"unknown keys: {sorted(unknown)}")
    mode = doc.get("mode")
    if mode not in MODES:
        problems.append(f"mode must be one of {MODES}, got {mode!r}")
    else:
        missing = _MODE_REQUIRED[mode] - set(doc)
        if missing:
            problems.append(f"mode {mode!r} requires keys {sorted(missing)}")

    def num(key, default=None):
        v = doc.get(key, default)
        if v is not None and not isinstance(v, (int, float)):
            problems.append(f"{key} must be a number, got {v!r}")
            return None
        return v

    lmbda = num("lambda", 1.0)
    mu = num("mu", 1.0)
    rho0 = num("rho0")
    omega = num("omega")
    if mu is not None and not (mu > 0):
        problems.append(f"mu must be positive, got {mu}")
    if mu is not None and lmbda is not None and not (lmbda + mu > 0):
        problems.append(f"lambda + mu must be positive, got {lmbda + mu}")
    if rho0 is not None and rho0 == 1.0:
        problems.append("rho0 must be different from one")
    if omega is not None and not (omega > 0):
        problems.append(f"omega must be positive, got {omega}")
    omega_range = doc.get("omega_range")
    if omega_range is not None:
        ok = (
            isinstance(omega_range, (list, tuple))
            and len(omega_range) == 3
            and all(isinstance(v, (int, float)) for v in omega_range)
            and 0 < omega_range[0] < omega_range[1]
            and int(omega_range[2]) >= 2
        )
        if not ok:
            problems.append(
                "omega_range must be [omega_min, omega_max, samples] with "
                "0 < omega_min < omega_max and samples >= 2"
            )
    geometry = doc.get("geometry")
    if geometry is not None:
        try:
            geometry_from_dict(geometry)
        except (ConfigurationError, KeyError, TypeError, ValueError) as err:
            problems.append(f"bad geometry: {err}")
    for key, lo in (("grid_n", 8), ("directions", 16), ("itp_nodes", 9), ("max_order", 0), ("samples", 1), ("workers", 1)):
        v = doc.get(key)
        if v is not None and (not isinstance(v, int) or v < lo):
            problems.append(f"{key} must be an integer >= {lo}, got {v!r}")
    kind = doc.get("incident_kind", "p")
    if kind not in ("p", "s"):
        problems.append(f"incident_kind must be 'p' or 's', got {kind!r}")
    rtol = doc.get("rtol", 1e-8)
    if not isinstance(rtol, (int, float)) or rtol <= 0:
        problems.append(f"rtol must be a positive number, got {rtol!r}")

    if problems:
        raise ConfigurationError("; ".join(problems))
    return RunConfig(
        mode=mode,
        lmbda=float(lmbda),
        mu=float(mu),
        rho0=None if rho0 is None else float(rho0),
        geometry=geometry,
        omega=None if omega is None else float(omega),
        omega_range=list(omega_range) if omega_range is not None else None,
        grid_n=int(doc.get("grid_n", 48)),
        directions=int(doc.get("directions", 32)),
        itp_nodes=int(doc.get("itp_nodes", 49)),
        rtol=float(rtol),
        outdir=doc.get("outdir"),
        seed=int(doc.get("seed", 7)),
        max_order=int(doc.get("max_order", 16)),
        samples=int(doc.get("samples", 50)),
        incident_kind=kind,
        incident_angle=float(doc.get("incident_angle", 0.0)),
        stability=bool(doc.get("stability", False)),
        workers=int(doc.get("workers", 1)),
        raw=dict(doc),
    )


# ---------------------------------------------------------------------------
# Artifact helpers
# ---------------------------------------------------------------------------
class ArtifactWriter:
    def __init__(self, outdir: Path, config: RunConfig):
        self.outdir = outdir
        self.config = config
        self.files: list[Path] = []
        self.t_start = time.time()
        outdir.mkdir(parents=True, exist_ok=True)

    def write_csv(self, name: str, fieldnames: list[str], rows: list[dict]) -> Path:
        path = self.outdir / name
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _fmt(row.get(k, "")) for k in fieldnames})
        self.files.append(path)
        return path

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.outdir / name
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.files.append(path)
        return path

    def write_npz(self, name: str, **arrays) -> Path:
        path = self.outdir / name
        np.savez(path, **arrays)
        self.files.append(path)
        return path

    def finish(self, passed: bool, partial: bool = False) -> Path:
        manifest = {
            "config_hash": self.config.config_hash(),
            "config": self.config.raw,
            "version": __version__,
            "started_unix": self.t_start,
            "finished_unix": time.time(),
            "outputs": [
                {"file": p.name, "sha256": _digest(p)} for p in sorted(self.files)
            ],
            "passed": passed,
            "partial": partial,
        }
        path = self.outdir / "manifest.json"
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
        return path


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _outdir(config: RunConfig) -> Path:
    root = Path(config.outdir or os.environ.get(OUTPUT_ROOT_ENV, "runs"))
    return root / f"{config.mode}-{config.config_hash()}"


# ---------------------------------------------------------------------------
# Mode runners
# ---------------------------------------------------------------------------
def _random_rational(rng: random.Random, lo: int = -8, hi: int = 12) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 9))


def _random_lame(rng: random.Random) -> tuple[Fraction, Fraction]:
    while True:
        mu = Fraction(rng.randint(1, 12), rng.randint(1, 6))
        lm = _random_rational(rng)
        if mu > 0 and lm + mu > 0:
            return lm, mu


def run_verify_algebra(config: RunConfig, writer: ArtifactWriter) -> bool:
    rng = random.Random(config.seed)
    failures = []
    for i in range(500):
        while True:
            A = GRMatrix([[_random_rational(rng) for _ in range(2)] for _ in range(2)])
            if not A.det().is_zero():
                break
        U = GRMatrix.column([_random_rational(rng), _random_rational(rng)])
        V = GRMatrix.column([_random_rational(rng), _random_rational(rng)])
        lhs, rhs = rank_one_update_determinant(A, U, V)
        if lhs != rhs:
            failures.append(f"rank-one update mismatch at sample {i}")
    symbol_reports = []
    for i in range(200):
        lm, mu = _random_lame(rng)
        e1, e2 = _random_rational(rng), _random_rational(rng)
        if e1 == 0 and e2 == 0:
            e1 = Fraction(1)
        p = SymbolPoint(lm, mu, e1, e2)
        rep = lame_symbol(p).verify()
        fact = squared_symbol_factorizations(p)
        symbol_reports.append({"sample": i, "symbol": rep.passed, "factorizations": fact.passed})
        if not (rep.passed and fact.passed):
            failures.append(f"symbol identity failed at sample {i}")
    bid = b_matrix_identities(Fraction(config.lmbda).limit_denominator(10**6),
                              Fraction(config.mu).limit_denominator(10**6))
    if not bid.passed:
        failures.append("B-matrix identities failed")
    writer.write_json(
        "verify_algebra.json",
        {
            "rank_one_samples": 500,
            "symbol_samples": 200,
            "b_matrix": bid.to_dict(),
            "failures": failures,
            "passed": not failures,
        },
    )
    return not failures


def run_verify_induction(config: RunConfig, writer: ArtifactWriter) -> bool:
    rng = random.Random(config.seed)
    certificates = []
    ok = True
    for _ in range(config.samples):
        lm, mu = _random_lame(rng)
        cert = certify_induction(lm, mu, config.max_order)
        certificates.append(cert.to_dict())
        ok = ok and cert.passed
    diffs = {m: reference_reduction_diff(m).to_dict() for m in (4, 5, 6)}
    writer.write_json(
        "induction_certificates.json",
        {"samples": config.samples, "max_order": config.max_order,
         "certificates": certificates, "reference_diffs": diffs, "passed": ok},
    )
    return ok


def _build_grid(config: RunConfig) -> ScattererGrid:
    return ScattererGrid.build(
        geometry_from_dict(config.geometry), config.rho0, config.grid_n
    )


def run_solve(config: RunConfig, writer: ArtifactWriter) -> bool:
    grid = _build_grid(config)
    params = LameParameters(config.lmbda, config.mu)
    waven = wavenumbers(params, config.omega)
    kind = WaveKind.P if config.incident_kind == "p" else WaveKind.S
    incident = PlaneWave(kind, Direction.from_angle(config.incident_angle), waven)
    fld = ls_solve(grid, incident, params, waven, rtol=config.rtol)
    angles = np.linspace(0.0, 2 * np.pi, config.directions, endpoint=False)
    pattern = far_field(fld, params, waven, angles)
    writer.write_csv(
        "farfield.csv",
        ["angle_rad", "re_up", "im_up", "re_us", "im_us"],
        [
            {
                "angle_rad": float(a),
                "re_up": float(pattern.u_p[i].real),
                "im_up": float(pattern.u_p[i].imag),
                "re_us": float(pattern.u_s[i].real),
                "im_us": float(pattern.u_s[i].imag),
            }
            for i, a in enumerate(angles)
        ],
    )
    writer.write_npz(
        f"field-{config.config_hash()}.npz",
        values=fld.values,
        coverage=grid.coverage,
        centers_x=grid.centers_x,
        centers_y=grid.centers_y,
    )
    return True


def run_farfield_sweep(config: RunConfig, writer: ArtifactWriter) -> bool:
    grid = _build_grid(config)
    params = LameParameters(config.lmbda, config.mu)
    lo, hi, n = config.omega_range
    report = injectivity_sweep(
        grid, params, np.linspace(lo, hi, int(n)), config.directions, rtol=config.rtol
    )
    rows = report.to_rows()
    writer.write_csv(
        "sweep.csv",
        ["omega", "sigma_min", "sigma_median", "sigma_max", "ratio", "local_collapse", "error"],
        rows,
    )
    writer.write_json("sweep.json", report.to_dict())
    return not report.failures


def run_itp_scan(config: RunConfig, writer: ArtifactWriter) -> bool:
    params = LameParameters(config.lmbda, config.mu)
    lo, hi, n = config.omega_range
    report = itp_scan(
        geometry_from_dict(config.geometry),
        config.rho0,
        params,
        np.linspace(lo, hi, int(n)),
        config.itp_nodes,
    )
    writer.write_csv(
        "itp.csv",
        ["omega", "sigma"],
        [{"omega": o, "sigma": s} for o, s in zip(report.omegas, report.sigma)],
    )
    writer.write_json("itp.json", report.to_dict())
    return True


def run_headline(config: RunConfig, writer: ArtifactWriter) -> bool:
    lo, hi, n = config.omega_range
    cfg = HeadlineConfig(
        params=LameParameters(config.lmbda, config.mu),
        rho0=config.rho0 if config.rho0 is not None else 4.0,
        omega_min=float(lo),
        omega_max=float(hi),
        sweep_points=int(n),
        solver_cells=config.grid_n,
        n_directions=config.directions,
        itp_nodes=config.itp_nodes,
        rtol=config.rtol,
        stability=config.stability,
    )
    report = headline_experiment(cfg)
    writer.write_json("headline.json", report.to_dict())
    for name, outcome in (("rectangle", report.rectangle), ("disk", report.disk)):
        writer.write_csv(
            f"headline_{name}_sweep.csv",
            ["omega", "sigma_min", "sigma_median", "sigma_max", "ratio", "local_collapse", "error"],
            outcome.sweep.to_rows(),
        )
        writer.write_csv(
            f"headline_{name}_itp.csv",
            ["omega", "sigma"],
            [{"omega": o, "sigma": s} for o, s in zip(outcome.itp.omegas, outcome.itp.sigma)],
        )
    ok = (
        report.disk.itp_dip is not None
        and report.rectangle.itp_dip is not None
        and report.disk.collapse_depth is not None
    )
    return ok


_RUNNERS = {
    "verify-algebra": run_verify_algebra,
    "verify-induction": run_verify_induction,
    "solve": run_solve,
    "farfield-sweep": run_farfield_sweep,
    "itp-scan": run_itp_scan,
    "headline": run_headline,
}


def run(config: RunConfig) -> int:
    writer = ArtifactWriter(_outdir(config), config)
    try:
        passed = _RUNNERS[config.mode](config, writer)
    except SolverError as err:
        writer.write_json("error.json", {"error": str(err), "residuals": err.residuals})
        writer.finish(passed=False, partial=True)
        print(f"solver failure: {err}", file=sys.stderr)
        return 3
    manifest = writer.finish(passed=passed)
    print(f"wrote {manifest}")
    return 0 if passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cornerscat",
        description="Verification and experiment suite for corner scattering",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        if mode in ("verify-algebra", "verify-induction"):
            p.add_argument("--lambda", dest="lmbda", type=float, default=1.0)
            p.add_argument("--mu", type=float, default=1.0)
            p.add_argument("--seed", type=int, default=7)
            p.add_argument("--outdir")
            if mode == "verify-induction":
                p.add_argument("--max-order", type=int, default=16)
                p.add_argument("--samples", type=int, default=50)
        else:
            p.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    if args.command in ("verify-algebra", "verify-induction"):
        doc = {
            "mode": args.command,
            "lambda": args.lmbda,
            "mu": args.mu,
            "seed": args.seed,
        }
        if args.outdir:
            doc["outdir"] = args.outdir
        if args.command == "verify-induction":
            doc["max_order"] = args.max_order
            doc["samples"] = args.samples
    else:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            print(f"config error: {err}", file=sys.stderr)
            return 2
        doc.setdefault("mode", args.command)
        if doc["mode"] != args.command:
            print(
                f"config error: mode {doc['mode']!r} does not match command {args.command!r}",
                file=sys.stderr,
            )
            return 2
    try:
        config = parse_config(doc)
    except ConfigurationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
