"""
Command-line surface: argument parsing, command handlers and table output
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import yaml
from pydantic import ValidationError

from relcoulomb.errors import RelCoulombError
from relcoulomb.expectations import density_report, yrast_expectations
from relcoulomb.models import Command, RunConfig
from relcoulomb.numerics.marginals import figure_data
from relcoulomb.numerics.orbits import orbit_integrate, radial_period
from relcoulomb.numerics.quadrature import QuadratureSpec
from relcoulomb.numerics.sampling import mc_expectation, observables, sample_yrast
from relcoulomb.phasespace import (
    ChartPoint,
    DensityKind,
    angular_marginal,
    chart_density,
    chart_to_phase,
    make_density,
    momentum_marginal,
    negative_region,
    negativity_scan,
    orbital_elements,
)
from relcoulomb.settings import Settings
from relcoulomb.spectrum import (
    Coupling,
    QuantumNumbers,
    effective_ell,
    level_energy,
    radial_state,
    radial_wavefunction,
    series_energy,
)
from relcoulomb.verify import VerificationPipeline

logger = logging.getLogger(__name__)

Rows = List[Dict[str, Any]]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

# sampled observable -> closed-form field of the Yrast expectation table
_SAMPLED_FIELDS = {
    "inv_r": "inv_r",
    "inv_r2": "inv_r2",
    "inv_R": "inv_R",
    "inv_R2": "inv_R2",
    "pr2_separated": "pr2",
    "L2_over_r2_separated": "L2_over_r2",
}


def _coupling(cfg: RunConfig) -> Coupling:
    return Coupling(cfg.alpha_z)


def _grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_points)


def _spec(cfg: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol, max_subdivisions=cfg.max_subdivisions)


def _density(cfg: RunConfig):
    n = cfg.n if cfg.state is DensityKind.YRAST else 2
    return make_density(cfg.state, _coupling(cfg), n=n, lam=cfg.lam)


def cmd_spectrum(cfg: RunConfig) -> Rows:
    """Level energies for every (n, l) with n <= n_max, with the alpha^4 series"""
    coupling = _coupling(cfg)
    rows = []
    for n in range(1, cfg.n_max + 1):
        for l in range(n):
            qn = QuantumNumbers(n, l)
            exact = level_energy(qn, coupling)
            series = series_energy(qn, coupling)
            rows.append(
                {
                    "n": n,
                    "l": l,
                    "ell": effective_ell(l, coupling),
                    "energy": exact,
                    "series": series,
                    "difference": exact - series,
                }
            )
    return rows


def cmd_wavefn(cfg: RunConfig) -> Rows:
    state = radial_state(QuantumNumbers(cfg.n, cfg.level_l), _coupling(cfg))
    r = _grid(cfg)
    values = np.atleast_1d(radial_wavefunction(state, r))
    return [
        {"r": float(x), "radial": float(v), "probability": float(x * x * v * v) if x > 0 else 0.0}
        for x, v in zip(r, values)
    ]


def cmd_density(cfg: RunConfig) -> Rows:
    """
    The density along r at fixed orbit scale R = --radius: pointwise at
    mu = pi/2 and after the mu, nu integrals. Also logs where it is negative.
    """
    sd = _density(cfg)
    R = cfg.radius
    r = _grid(cfg)
    r = r[(r > 0) & (r < R)]
    if r.size == 0:
        raise RelCoulombError(f"no grid points inside (0, R) for R = {R}")

    region = negative_region(sd) if sd.kind is not DensityKind.TWO_S_MIX else None
    if region is not None:
        logger.info(f"{sd.label}: reduced bracket negative for {region.variable} in ({region.lower:.6g}, {region.upper:.6g})")
    lowest, where = negativity_scan(sd, resolution=cfg.resolution, workers=cfg.workers)
    logger.info(f"{sd.label}: minimum density {lowest:.6g} at r={where.r:.6g}, R={where.R:.6g}, mu={where.mu:.6g}")

    pointwise = np.atleast_1d(chart_density(sd, r, R, 0.5 * math.pi))
    reduced = np.atleast_1d(angular_marginal(sd, r, R))
    return [
        {"r": float(x), "R": R, "density": float(d), "reduced": float(a)}
        for x, d, a in zip(r, pointwise, reduced)
    ]


def cmd_marginal(cfg: RunConfig) -> Rows:
    """Momentum marginal of the density next to R_nl(r)^2 / 4 pi"""
    sd = _density(cfg)
    wave = radial_state(sd.qn, sd.coupling)
    r = _grid(cfg)
    r = r[r > 0]
    marginal = np.atleast_1d(momentum_marginal(sd, r))
    reference = np.atleast_1d(radial_wavefunction(wave, r)) ** 2 / (4.0 * math.pi)
    return [
        {"r": float(x), "marginal": float(m), "wavefunction": float(w)}
        for x, m, w in zip(r, marginal, reference)
    ]


def cmd_expect(cfg: RunConfig) -> Rows:
    report = density_report(cfg.state, _coupling(cfg), n=cfg.n, lam=cfg.lam)
    return [report.model_dump()]


def cmd_sample(cfg: RunConfig) -> Rows:
    """Monte Carlo averages from exact Yrast samples next to their closed forms"""
    if cfg.state is not DensityKind.YRAST:
        raise RelCoulombError(f"sampling is implemented for Yrast states, got {cfg.state.value}")
    coupling = _coupling(cfg)
    sd = make_density(DensityKind.YRAST, coupling, n=cfg.n)
    batch = sample_yrast(sd, cfg.samples, cfg.seed, workers=cfg.workers)
    table = yrast_expectations(cfg.n, coupling)

    rows = []
    for name, observable in observables(sd).items():
        mean, stderr = mc_expectation(batch, observable)
        field = _SAMPLED_FIELDS.get(name)
        exact = 1.0 if name == "one" else (getattr(table, field) if field else math.nan)
        rows.append({"observable": name, "mean": mean, "stderr": stderr, "exact": exact})
    return rows


def cmd_orbit(cfg: RunConfig) -> Rows:
    """
    Trajectory from the chart point r = --radius, R = 2 r, mu = pi/4 over
    --periods Kepler periods.
    """
    coupling = _coupling(cfg)
    start = chart_to_phase(
        ChartPoint(r=cfg.radius, theta=0.5 * math.pi, phi=0.0, R=2.0 * cfg.radius, mu=0.25 * math.pi, nu=0.0),
        coupling,
    )
    elements = orbital_elements(start, coupling)
    tol = cfg.tol if cfg.tol is not None else 1e-12
    trajectory = orbit_integrate(start, coupling, cfg.periods * radial_period(elements, coupling), tol=tol)
    logger.info(f"Drift over {cfg.periods:g} periods: energy {trajectory.energy_drift:.2e}, L {trajectory.angmom_drift:.2e}")

    rows = []
    for t, x, p in zip(trajectory.times, trajectory.positions, trajectory.momenta):
        rows.append(
            {
                "t": float(t),
                "x": float(x[0]),
                "y": float(x[1]),
                "z": float(x[2]),
                "px": float(p[0]),
                "py": float(p[1]),
                "pz": float(p[2]),
            }
        )
    return rows


def cmd_figure(cfg: RunConfig) -> Rows:
    rows = figure_data(_grid(cfg), _spec(cfg))
    return [{"p": row.p, "wigner": row.wigner, "classical": row.classical} for row in rows]


def cmd_verify(cfg: RunConfig) -> Dict[str, Any]:
    pipeline = VerificationPipeline(cfg, include_slow=not cfg.quick)
    return pipeline.run()


HANDLERS: Dict[Command, Callable[[RunConfig], Rows]] = {
    Command.SPECTRUM: cmd_spectrum,
    Command.WAVEFN: cmd_wavefn,
    Command.DENSITY: cmd_density,
    Command.MARGINAL: cmd_marginal,
    Command.EXPECT: cmd_expect,
    Command.SAMPLE: cmd_sample,
    Command.ORBIT: cmd_orbit,
    Command.FIGURE: cmd_figure,
}


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def render(rows: Rows, fmt: str) -> str:
    """CSV with 10 significant digits, or JSON with full-precision floats"""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(rows[0].keys())
    writer.writerows([_format_cell(v) for v in row.values()] for row in rows)
    return buffer.getvalue()


def write_rows(rows: Rows, cfg: RunConfig, default: Optional[Path] = None) -> None:
    target = cfg.output or default
    text = render(rows, cfg.format)
    if target is None:
        sys.stdout.write(text)
        return
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {len(rows)} rows to {target}")


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--alpha-z", type=float, help="coupling alpha Z")
    shared.add_argument("--seed", type=int, help="random seed")
    shared.add_argument("--tol", type=float, help="tolerance override")
    shared.add_argument("--output", type=Path, help="output file (default: stdout)")
    shared.add_argument("--format", choices=["csv", "json"], default="csv")
    shared.add_argument("--workers", type=int, help="worker threads")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--n", type=int, default=1, help="principal number")
    state.add_argument("--l", type=int, help="orbital number (default n-1)")
    state.add_argument("--state", choices=[k.value for k in DensityKind], default=DensityKind.YRAST.value)
    state.add_argument("--lam", type=float, default=0.0, help="2s mixture weight")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-min", type=float, default=0.0)
    grid.add_argument("--grid-max", type=float, default=5.0)
    grid.add_argument("--grid-points", type=int, default=200)

    parser = argparse.ArgumentParser(
        prog="relcoulomb", description="Classical phase-space densities of the relativistic hydrogen atom"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", parents=[shared], help="level energies")
    spectrum.add_argument("--n-max", type=int, default=3)

    sub.add_parser("wavefn", parents=[shared, state, grid], help="radial wavefunction on a grid")

    density = sub.add_parser("density", parents=[shared, state, grid], help="density along r at fixed R")
    density.add_argument("--radius", type=float, default=5.0, help="orbit scale R")
    density.add_argument("--resolution", type=int, default=32, help="negativity scan resolution")

    sub.add_parser("marginal", parents=[shared, state, grid], help="momentum marginal of a density")
    sub.add_parser("expect", parents=[shared, state], help="expectation values of a density")

    sample = sub.add_parser("sample", parents=[shared, state], help="Monte Carlo averages")
    sample.add_argument("--samples", type=int)

    orbit = sub.add_parser("orbit", parents=[shared], help="integrate a bound orbit")
    orbit.add_argument("--radius", type=float, default=1.0)
    orbit.add_argument("--periods", type=float, default=10.0)

    sub.add_parser("figure", parents=[shared, grid], help="Wigner and classical momentum marginals")

    verify = sub.add_parser("verify", parents=[shared], help="run the identity suite")
    verify.add_argument("--checks-file", type=Path)
    verify.add_argument("--quick", action="store_true", help="skip slow checks")

    return parser


def build_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """Merge parsed flags over settings and validate"""
    values = {key: value for key, value in vars(args).items() if value is not None}
    merged: Dict[str, Any] = {
        "alpha_z": settings.alpha_z,
        "seed": settings.seed,
        "workers": settings.workers,
        "samples": settings.samples,
        "abs_tol": settings.abs_tol,
        "rel_tol": settings.rel_tol,
        "max_subdivisions": settings.max_subdivisions,
        "output_dir": settings.output_dir,
        "checks_file": settings.checks_file,
    }
    merged.update(values)
    return RunConfig(**merged)


def _one_line(e: ValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(part) for part in first.get("loc", ()))
    return f"{where}: {first['msg']}" if where else first["msg"]


def run(argv: Optional[Sequence[str]], settings: Settings) -> int:
    """Parse, dispatch and write; returns the process exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        cfg = build_config(args, settings)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {_one_line(e)}")
        return EXIT_USAGE

    logger.info(f"Running {cfg.command.value} at alpha Z = {cfg.alpha_z}")
    try:
        if cfg.command is Command.VERIFY:
            result = cmd_verify(cfg)
            write_rows([report.row() for report in result["reports"]], cfg)
            return EXIT_OK if result["status"] == "passed" else EXIT_FAILED

        rows = HANDLERS[cfg.command](cfg)
        default = cfg.output_dir / f"figure.{cfg.format}" if cfg.command is Command.FIGURE else None
        write_rows(rows, cfg, default)
    except (RelCoulombError, ValueError, KeyError, yaml.YAMLError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Failed to write output: {e}")
        return EXIT_IO
    return EXIT_OK
