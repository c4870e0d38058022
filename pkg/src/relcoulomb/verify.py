"""
Verification pipeline - runs the identity suite defined in config/checks.yaml
"""
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import yaml
from scipy import optimize

from relcoulomb.expectations import (
    double_bracket_energy,
    double_bracket_energy_prime,
    naive_classical_energy,
    state_expectations,
    yrast_expectations,
)
from relcoulomb.harmonics import (
    AngularFactor,
    angular_momentum_moments,
    calY,
    lhat,
    nu_average,
    nu_average_lz,
    ylm_squared,
)
from relcoulomb.models import CheckDefinition, RunConfig, VerificationReport
from relcoulomb.numerics.marginals import (
    chart_average,
    classical_marginal,
    crossings,
    figure_data,
    momentum_norm,
    quadrature_momentum_marginal,
    tail_exponent,
    wigner_marginal,
)
from relcoulomb.numerics.orbits import orbit_integrate, radial_period
from relcoulomb.numerics.quadrature import QuadratureSpec, integrate_1d
from relcoulomb.numerics.sampling import mc_expectation, observables, sample_yrast
from relcoulomb.phasespace import (
    ChartPoint,
    DensityKind,
    chart_to_phase,
    density_eval,
    energy_from_scale,
    make_density,
    moment,
    negative_region,
    negativity_scan,
    orbital_elements,
    scale_from_energy,
    two_s_density,
    two_s_mixture,
    yrast_density,
)
from relcoulomb.settings import CHECKS_FILE
from relcoulomb.spectrum import (
    Coupling,
    QuantumNumbers,
    coupling_from_energy,
    effective_ell,
    level_energy,
    radial_state,
    radial_wavefunction,
    schrodinger_residual,
)

logger = logging.getLogger(__name__)

CheckResult = Tuple[float, float]
CheckFunction = Callable[..., CheckResult]

CHECKS: Dict[str, CheckFunction] = {}


def check(name: str) -> Callable[[CheckFunction], CheckFunction]:
    def register(fn: CheckFunction) -> CheckFunction:
        CHECKS[name] = fn
        return fn

    return register


def _as_list(value) -> List[float]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


# -- spectrum ----------------------------------------------------------------


@check("ell_identity")
def _ell_identity(cfg: RunConfig, spec: QuadratureSpec, alpha_z, n_max: int) -> CheckResult:
    worst = 0.0
    for az in _as_list(alpha_z):
        coupling = Coupling(az)
        for l in range(n_max):
            ell = Fraction(effective_ell(l, coupling))
            residual = ell * (ell + 1) + Fraction(coupling.strength) - l * (l + 1)
            worst = max(worst, abs(float(residual)))
    return worst, 0.0


@check("ground_energy_square")
def _ground_energy_square(cfg, spec, alpha_z) -> CheckResult:
    worst = 0.0
    for az in _as_list(alpha_z):
        coupling = Coupling(az)
        E = level_energy(QuantumNumbers(1, 0), coupling)
        worst = max(worst, abs(E * E - (1.0 + effective_ell(0, coupling))))
    return worst, 0.0


@check("level_energy")
def _level_energy(cfg, spec, n: int, l: int, alpha_z: float, reference: float) -> CheckResult:
    return level_energy(QuantumNumbers(n, l), Coupling(alpha_z)), reference


@check("two_s_energy")
def _two_s_energy(cfg, spec, alpha_z: float) -> CheckResult:
    coupling = Coupling(alpha_z)
    ell = effective_ell(0, coupling)
    return level_energy(QuantumNumbers(2, 0), coupling), (2.0 + ell) / math.sqrt(4.0 + 3.0 * ell)


@check("coupling_round_trip")
def _coupling_round_trip(cfg, spec, n: int, l: int, alpha_z: float) -> CheckResult:
    qn = QuantumNumbers(n, l)
    coupling = Coupling(alpha_z)
    return coupling_from_energy(qn, level_energy(qn, coupling)), coupling.strength


@check("schrodinger_residual")
def _schrodinger_residual(cfg, spec, n: int, l: int, alpha_z: float, grid: List[float]) -> CheckResult:
    state = radial_state(QuantumNumbers(n, l), Coupling(alpha_z))
    return schrodinger_residual(state, grid), 0.0


@check("wavefunction_norm")
def _wavefunction_norm(cfg, spec, n: int, l: int, alpha_z: float) -> CheckResult:
    state = radial_state(QuantumNumbers(n, l), Coupling(alpha_z))
    value, _ = integrate_1d(
        lambda r: r * r * radial_wavefunction(state, r) ** 2, 0.0, math.inf, spec.with_scale(1.0 / state.decay)
    )
    return value, 1.0


@check("two_s_orthogonality")
def _two_s_orthogonality(cfg, spec, alpha_z: float) -> CheckResult:
    coupling = Coupling(alpha_z)
    ground = radial_state(QuantumNumbers(1, 0), coupling)
    two_s = radial_state(QuantumNumbers(2, 0), coupling)

    def overlap(x: float) -> float:
        return x * x * radial_wavefunction(two_s, x / two_s.energy) * radial_wavefunction(ground, x / ground.energy)

    value, _ = integrate_1d(overlap, 0.0, math.inf, spec)
    return value, 0.0


# -- phase space -------------------------------------------------------------


@check("orbit_scale")
def _orbit_scale(cfg, spec, alpha_z: float) -> CheckResult:
    coupling = Coupling(alpha_z)
    E = level_energy(QuantumNumbers(1, 0), coupling)
    root = optimize.brentq(
        lambda R: energy_from_scale(R, coupling) - E, 1e-6, 1e6, xtol=1e-300, rtol=4 * np.finfo(float).eps
    )
    return scale_from_energy(E, coupling), root


def _suite_density(entry: List[Any], coupling: Coupling):
    """[kind, n] or [kind, n, lam] from a suite entry"""
    kind, n, *rest = entry
    return make_density(DensityKind(kind), coupling, n=int(n), lam=float(rest[0]) if rest else 0.0)


@check("density_norm_quadrature")
def _density_norm(cfg, spec, states: List[List[Any]], alpha_z: float) -> CheckResult:
    coupling = Coupling(alpha_z)
    worst = 0.0
    for entry in states:
        sd = _suite_density(entry, coupling)
        norm = chart_average(sd, lambda r, R, mu: 1.0, spec)
        logger.info(f"  {sd.label}: norm = {norm:.12g}")
        worst = max(worst, abs(norm - 1.0))
    return worst, 0.0


@check("marginal_recovery")
def _marginal_recovery(cfg, spec, alpha_z: float, states: List[List[Any]], radii: List[float]) -> CheckResult:
    """
    Largest deviation of the quadrature marginal from R_nl^2/(4 pi). Yrast
    levels are compared pointwise relative; 2s densities relative to the
    peak of R_20^2/(4 pi) over the radii, which keeps the node in the check.
    """
    coupling = Coupling(alpha_z)
    worst = 0.0
    for entry in states:
        sd = _suite_density(entry, coupling)
        wave = radial_state(sd.qn, coupling)
        reference = np.asarray(radial_wavefunction(wave, np.asarray(radii, dtype=float))) ** 2 / (4.0 * math.pi)
        peak = float(np.max(reference))
        for r, expected in zip(radii, reference):
            value = quadrature_momentum_marginal(sd, float(r), spec)
            scale = abs(expected) if sd.kind is DensityKind.YRAST else peak
            worst = max(worst, abs(value - expected) / scale)
    return worst, 0.0


@check("lambda_invariance")
def _lambda_invariance(cfg, spec, alpha_z: float, lams: List[float]) -> CheckResult:
    coupling = Coupling(alpha_z)
    inv_r = [moment(two_s_mixture(coupling, lam), -1.0) for lam in lams]
    inv_R = [moment(two_s_mixture(coupling, lam), 0.0, -1.0) for lam in lams]
    return max(max(inv_r) - min(inv_r), max(inv_R) - min(inv_R)), 0.0


@check("negative_region")
def _negative_region(cfg, spec, alpha_z: float, bound: str, reference: float) -> CheckResult:
    region = negative_region(two_s_density(Coupling(alpha_z), "A"))
    return getattr(region, bound), reference


@check("two_s_scan")
def _two_s_scan(cfg, spec, alpha_z: float, resolution: int) -> CheckResult:
    sd = two_s_density(Coupling(alpha_z), "A")
    region = negative_region(sd)
    reduced_min, where = negativity_scan(sd, resolution=resolution, reduced=True, workers=cfg.workers)
    pointwise_min, _ = negativity_scan(sd, resolution=resolution, workers=cfg.workers)
    u = where.r * (where.R - where.r)
    found = reduced_min < 0 and pointwise_min < 0 and region.lower < u < region.upper
    return float(found), 1.0


@check("yrast_scan")
def _yrast_scan(cfg, spec, alpha_z: float, n: int, resolution: int) -> CheckResult:
    value, _ = negativity_scan(yrast_density(n, Coupling(alpha_z)), resolution=resolution, workers=cfg.workers)
    return min(value, 0.0), 0.0


# -- expectations ------------------------------------------------------------


@check("double_bracket")
def _double_bracket(cfg, spec, alpha_z, n_max: int, route: str) -> CheckResult:
    energy = double_bracket_energy if route == "scale" else double_bracket_energy_prime
    worst = 0.0
    for az in _as_list(alpha_z):
        coupling = Coupling(az)
        densities = [yrast_density(n, coupling) for n in range(1, n_max + 1)]
        densities.append(two_s_density(coupling, "A"))
        for sd in densities:
            worst = max(worst, abs(energy(sd) - sd.energy))
    return worst, 0.0


@check("naive_discrepancy")
def _naive_discrepancy(cfg, spec, n: int, alpha_z: float) -> CheckResult:
    coupling = Coupling(alpha_z)
    a4 = coupling.strength**2
    gap = naive_classical_energy(n, coupling) - level_energy(QuantumNumbers(n, n - 1), coupling)
    return gap * 8 * n**4 * (4 * n - 1) / a4, 1.0


@check("expectation_quadrature")
def _expectation_quadrature(
    cfg, spec, n: int, alpha_z: float, state: str = "yrast", fields: Optional[List[str]] = None
) -> CheckResult:
    coupling = Coupling(alpha_z)
    sd = make_density(DensityKind(state), coupling, n=n)
    report = yrast_expectations(n, coupling) if sd.kind is DensityKind.YRAST else state_expectations(sd)
    E = sd.energy
    weights = {
        "inv_r": lambda r, R, mu: 1.0 / r,
        "inv_r2": lambda r, R, mu: 1.0 / (r * r),
        "inv_R": lambda r, R, mu: 1.0 / R,
        "inv_R2": lambda r, R, mu: 1.0 / (R * R),
        "pr2": lambda r, R, mu: 2.0 * E * (1.0 / r - 1.0 / R) * np.cos(mu) ** 2,
        "L2_over_r2": lambda r, R, mu: 2.0 * E * (1.0 / r - 1.0 / R) * np.sin(mu) ** 2,
    }
    worst = 0.0
    for field in fields or list(weights):
        expected = getattr(report, field)
        value = chart_average(sd, weights[field], spec)
        logger.info(f"  {sd.label} {field}: quadrature {value:.12g}, closed form {expected:.12g}")
        worst = max(worst, abs(value - expected) / abs(expected))
    return worst, 0.0


@check("two_s_inverse_radii")
def _two_s_inverse_radii(cfg, spec, alpha_z) -> CheckResult:
    """<1/r> = 1/((2 + ell0) sqrt(4 + 3 ell0)) and <1/R> = <1/r>/2 for both 2s densities"""
    worst = 0.0
    for az in _as_list(alpha_z):
        coupling = Coupling(az)
        ell = effective_ell(0, coupling)
        inv_r = 1.0 / ((2.0 + ell) * math.sqrt(4.0 + 3.0 * ell))
        for variant in ("A", "B"):
            report = state_expectations(two_s_density(coupling, variant))
            worst = max(worst, abs(report.inv_r - inv_r) / inv_r, abs(report.inv_R - 0.5 * inv_r) / (0.5 * inv_r))
    return worst, 0.0


# -- harmonics ---------------------------------------------------------------


@check("harmonic_moments")
def _harmonic_moments(cfg, spec) -> CheckResult:
    worst = 0.0
    for m in (-1, 0, 1):
        lz, lx, ly = angular_momentum_moments(m)
        worst = max(worst, abs(lz - m), abs(lx), abs(ly))
    return worst, 0.0


@check("nu_averages")
def _nu_averages(cfg, spec) -> CheckResult:
    worst = 0.0
    for theta in np.linspace(0.0, math.pi, 13):
        for m in (-1, 0, 1):
            worst = max(worst, abs(nu_average(m, theta) - ylm_squared(m, theta)))
            worst = max(worst, abs(nu_average_lz(m, theta) - 3.0 * m / (8.0 * math.pi) * math.sin(theta) ** 2))
    return worst, 0.0


@check("harmonic_sum")
def _harmonic_sum(cfg, spec, points: int) -> CheckResult:
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    directions = lhat(
        np.arccos(rng.uniform(-1.0, 1.0, points)),
        rng.uniform(0.0, 2.0 * math.pi, points),
        rng.uniform(0.0, 2.0 * math.pi, points),
    )
    total = sum(calY(AngularFactor(m), directions) for m in (-1, 0, 1))
    return float(np.max(np.abs(total - 3.0 / (4.0 * math.pi)))), 0.0


# -- numerics ----------------------------------------------------------------


@check("gamma_quadrature")
def _gamma_quadrature(cfg, spec) -> CheckResult:
    value, _ = integrate_1d(lambda R: R**6 * math.exp(-2.0 * R), 0.0, math.inf, spec.with_scale(1.0))
    return value, 720.0 / 128.0


@check("wigner_zero")
def _wigner_zero(cfg, spec) -> CheckResult:
    return wigner_marginal(0.0), 8.0 / math.pi**2


@check("classical_slope")
def _classical_slope(cfg, spec) -> CheckResult:
    h = 1e-5
    return classical_marginal(h, spec) / h, 11.25 / math.pi


@check("marginal_norm")
def _marginal_norm(cfg, spec, curve: str) -> CheckResult:
    if curve == "wigner":
        return momentum_norm(wigner_marginal, spec), 1.0
    return momentum_norm(lambda p: classical_marginal(p, spec), spec), 1.0


@check("tail_exponent")
def _tail_exponent(cfg, spec, curve: str, reference: float) -> CheckResult:
    f = wigner_marginal if curve == "wigner" else (lambda p: classical_marginal(p, spec))
    return tail_exponent(f, 10.0, 100.0), reference


@check("crossings")
def _crossings(cfg, spec, p_max: float, points: int, expected: int) -> CheckResult:
    rows = figure_data(np.linspace(0.0, p_max, points), spec)
    found = crossings(rows, spec)
    logger.info(f"  W and P cross at p = {[round(p, 4) for p in found]}")
    return float(len(found)), float(expected)


@check("mc_expectations")
def _mc_expectations(
    cfg, spec, n: int, alpha_z: float, names: List[str], samples: Optional[int] = None
) -> CheckResult:
    """Largest |mean - closed form| in standard errors over the listed observables"""
    coupling = Coupling(alpha_z)
    sd = yrast_density(n, coupling)
    batch = sample_yrast(sd, samples or cfg.samples, cfg.seed, workers=cfg.workers)
    table = yrast_expectations(n, coupling)
    funcs = observables(sd)
    worst = 0.0
    for name in names:
        mean, stderr = mc_expectation(batch, funcs[name])
        expected = getattr(table, name.replace("_separated", ""))
        logger.info(f"  {name}: {mean:.8g} +- {stderr:.2g} (closed form {expected:.8g})")
        worst = max(worst, abs(mean - expected) / stderr)
    return worst, 0.0


@check("orbit_drift")
def _orbit_drift(cfg, spec, alpha_z: float, periods: float) -> CheckResult:
    coupling = Coupling(alpha_z)
    start = chart_to_phase(ChartPoint(r=1.0, theta=0.5 * math.pi, phi=0.0, R=3.0, mu=1.0, nu=0.3), coupling)
    elements = orbital_elements(start, coupling)
    trajectory = orbit_integrate(start, coupling, periods * radial_period(elements, coupling), tol=1e-12)
    density = np.asarray(density_eval(yrast_density(1, coupling), trajectory.points))
    density_drift = float(np.max(np.abs(density - density[0])) / density[0])
    return max(trajectory.energy_drift, trajectory.angmom_drift, density_drift), 0.0


class VerificationPipeline:
    """Runs every check in the suite file and collects one report row per check"""

    def __init__(self, cfg: RunConfig, checks_file: Optional[Path] = None, include_slow: bool = True):
        self.cfg = cfg
        self.checks_file = Path(checks_file or cfg.checks_file or CHECKS_FILE)
        self.include_slow = include_slow
        self.spec = QuadratureSpec(
            abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol, max_subdivisions=cfg.max_subdivisions
        )
        self.checks = self._load_checks()

    def _load_checks(self) -> List[CheckDefinition]:
        """Load the suite definition from YAML"""
        try:
            with open(self.checks_file, "r") as f:
                config = yaml.safe_load(f)
            checks = [CheckDefinition(**entry) for entry in config["checks"]]
            logger.info(f"Loaded {len(checks)} checks from {self.checks_file}")
            return checks
        except Exception as e:
            logger.error(f"Failed to load checks from {self.checks_file}: {e}")
            raise

    def _run_check(self, definition: CheckDefinition) -> VerificationReport:
        tol = self.cfg.tol if self.cfg.tol is not None else definition.tolerance
        fn = CHECKS.get(definition.check)
        if fn is None:
            raise KeyError(f"unknown check {definition.check!r} in {self.checks_file}")
        try:
            computed, reference = fn(self.cfg, self.spec, **definition.params)
        except Exception as e:
            logger.error(f"Check {definition.name} failed: {e}", exc_info=True)
            computed, reference = math.nan, 0.0
        return VerificationReport.evaluate(
            definition.name, definition.anchor, float(computed), float(reference), tol, definition.mode
        )

    def run(self) -> Dict[str, Any]:
        """Execute the suite"""
        logger.info("=" * 80)
        logger.info("VERIFICATION SUITE STARTING")
        logger.info("=" * 80)

        selected = [c for c in self.checks if self.include_slow or not c.slow]
        reports = []
        for index, definition in enumerate(selected, start=1):
            logger.info(f"[STEP {index}/{len(selected)}] {definition.name}")
            report = self._run_check(definition)
            mark = "✓" if report.passed else "❌"
            logger.info(
                f"{mark} {definition.name}: computed={report.computed:.12g} "
                f"reference={report.reference:.12g} tol={report.tol:g}"
            )
            reports.append(report)

        failed = [r.name for r in reports if not r.passed]
        logger.info("=" * 80)
        if failed:
            logger.warning(f"VERIFICATION FAILED: {len(failed)} of {len(reports)} checks ({', '.join(failed)})")
        else:
            logger.info(f"VERIFICATION PASSED: {len(reports)} checks")
        logger.info("=" * 80)

        return {
            "status": "failed" if failed else "passed",
            "reports": reports,
            "failed": failed,
        }
