"""
Expectations - analytic averages over the phase-space densities and the
energy functionals built from them.

Single brackets <f> are true averages over a density. Double brackets
<<f>> replace averages of products by products of averages before the
square root of the relativistic kinetic energy is resummed; with that rule
the classical densities return the quantum level energies to all orders.
"""
import logging
import math
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict
from scipy.special import binom

from relcoulomb.phasespace import DensityKind, StateDensity, make_density, moment
from relcoulomb.spectrum import Coupling, QuantumNumbers, effective_ell, level_energy

logger = logging.getLogger(__name__)


class ExpectationReport(BaseModel):
    """Averages in atomic units, energies in units of mc^2"""

    model_config = ConfigDict(frozen=True)

    state: str
    alpha_z: float
    inv_r: float
    inv_r2: float
    inv_R: float
    inv_R2: float
    pr2: float
    L2_over_r2: float
    p2: float
    naive_E: float
    double_bracket_E: float
    double_bracket_E_prime: float
    quantum_E: float


def _bracket_energy(strength: float, inv_R: float) -> float:
    y = strength * inv_R
    return math.sqrt(1.0 + y * y) - y


def _prime_energy(strength: float, p2: float, inv_r: float) -> float:
    return math.sqrt(1.0 + strength * p2) - strength * inv_r


def yrast_expectations(n: int, coupling: Coupling) -> ExpectationReport:
    """Closed-form table for the Yrast level (n, n-1)"""
    qn = QuantumNumbers(n, n - 1)
    ell = effective_ell(qn.l, coupling)
    E = level_energy(qn, coupling)
    a2 = coupling.strength
    k = 1.0 + ell

    inv_r = E / k**2
    inv_r2 = 2.0 * E**2 / (k**3 * (1.0 + 2.0 * ell))
    inv_R = E / (2.0 * k**2)
    inv_R2 = E**2 / (k**3 * (3.0 + 4.0 * ell))
    pr2 = E**2 / (4.0 * k**3)
    L2_over_r2 = E**2 * (3.0 + 4.0 * ell) / (4.0 * k**3)
    # <<a^2/r^2>> is replaced by a^2 <1/r>^2
    p2 = pr2 + L2_over_r2 + a2 * inv_r**2

    return ExpectationReport(
        state=f"yrast(n={n})",
        alpha_z=coupling.alpha_z,
        inv_r=inv_r,
        inv_r2=inv_r2,
        inv_R=inv_R,
        inv_R2=inv_R2,
        pr2=pr2,
        L2_over_r2=L2_over_r2,
        p2=p2,
        naive_E=1.0 - a2 * inv_R + 0.5 * a2 * a2 * inv_R2,
        double_bracket_E=_bracket_energy(a2, inv_R),
        double_bracket_E_prime=_prime_energy(a2, p2, inv_r),
        quantum_E=E,
    )


def state_expectations(sd: StateDensity) -> ExpectationReport:
    """
    The same table for any density, evaluated from exact moments. The
    momentum entries use the level energy for the orbit energy.
    """
    a2 = sd.coupling.strength
    E = sd.energy

    inv_r = moment(sd, -1.0)
    inv_R = moment(sd, 0.0, -1.0)
    cos2_inv_r = moment(sd, -1.0, 0.0, 1.0)
    cos2_inv_R = moment(sd, 0.0, -1.0, 1.0)
    pr2 = 2.0 * E * (cos2_inv_r - cos2_inv_R)
    L2_over_r2 = 2.0 * E * ((inv_r - cos2_inv_r) - (inv_R - cos2_inv_R))
    p2 = pr2 + L2_over_r2 + a2 * inv_r**2
    inv_R2 = moment(sd, 0.0, -2.0)

    return ExpectationReport(
        state=sd.label,
        alpha_z=sd.coupling.alpha_z,
        inv_r=inv_r,
        inv_r2=moment(sd, -2.0),
        inv_R=inv_R,
        inv_R2=inv_R2,
        pr2=pr2,
        L2_over_r2=L2_over_r2,
        p2=p2,
        naive_E=1.0 - a2 * inv_R + 0.5 * a2 * a2 * inv_R2,
        double_bracket_E=_bracket_energy(a2, inv_R),
        double_bracket_E_prime=_prime_energy(a2, p2, inv_r),
        quantum_E=E,
    )


def naive_classical_energy(n: int, coupling: Coupling) -> float:
    """1 - a^2 <1/R> + a^4 <1/R^2>/2; off from E_nl by a^4/(8 n^4 (4n - 1)) at leading order"""
    report = yrast_expectations(n, coupling)
    return report.naive_E


def double_bracket_energy(sd: StateDensity) -> float:
    """sqrt(1 + a^4 <1/R>^2) - a^2 <1/R>"""
    return _bracket_energy(sd.coupling.strength, moment(sd, 0.0, -1.0))


def double_bracket_energy_prime(sd: StateDensity) -> float:
    """sqrt(1 + a^2 <<p^2>>) - a^2 <1/r>, the route through the kinetic energy"""
    report = state_expectations(sd)
    return report.double_bracket_E_prime


def double_bracket_p2(sd: StateDensity) -> float:
    """<<p^2>> = 2 <<E>> (<1/r> - <1/R>) + a^2 <1/r>^2"""
    a2 = sd.coupling.strength
    inv_r = moment(sd, -1.0)
    inv_R = moment(sd, 0.0, -1.0)
    return 2.0 * double_bracket_energy(sd) * (inv_r - inv_R) + a2 * inv_r**2


def resummation_series(sd: StateDensity, max_order: int = 8) -> List[Tuple[int, float]]:
    """
    Partial sums of sqrt(1 + y^2) - y, y = a^2 <1/R>, truncated at increasing
    even orders of alpha Z up to `max_order`. Each partial sum should approach
    the level energy one order faster than the previous one.
    """
    if max_order < 2 or max_order % 2:
        raise ValueError(f"max_order must be an even number >= 2, got {max_order}")
    y = sd.coupling.strength * moment(sd, 0.0, -1.0)
    partial = 1.0 - y
    sums = [(2, partial)]
    # y ~ alpha^2, so the k-th binomial term y^(2k) is of order alpha^(4k)
    for order in range(4, max_order + 1, 2):
        if order % 4 == 0:
            partial += binom(0.5, order // 4) * y ** (order // 2)
        sums.append((order, partial))
    logger.debug(f"resummation_series({sd.label}) -> {sums}")
    return sums


def yrast_table(n_max: int, coupling: Coupling) -> List[ExpectationReport]:
    return [yrast_expectations(n, coupling) for n in range(1, n_max + 1)]


def density_report(kind: DensityKind, coupling: Coupling, n: int = 1, lam: float = 0.0) -> ExpectationReport:
    if DensityKind(kind) is DensityKind.YRAST:
        return yrast_expectations(n, coupling)
    return state_expectations(make_density(kind, coupling, n=n, lam=lam))
