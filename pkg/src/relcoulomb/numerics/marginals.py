"""
Momentum marginals of the ground state: the Wigner function against the
non-relativistic classical density P(r, p) = (2/pi^3) L R^3 exp(-2R),
plus quadrature checks of the phase-space densities themselves.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize
from scipy.special import hyperu

from relcoulomb.phasespace import StateDensity, chart_density, energy_from_scale
from relcoulomb.numerics.quadrature import QuadratureSpec, integrate, integrate_1d

logger = logging.getLogger(__name__)

# int_0^inf R^6 exp(-2R) dR = 6!/2^7
_SIXTH_MOMENT = 720.0 / 128.0

# (binomial coefficient of (1 + aR)^-5, int R^(6+k) exp(-2R) dR) for k = 1..4
_SMALL_A_TERMS = (
    (-5.0, 5040.0 / 256.0),
    (15.0, 40320.0 / 512.0),
    (-35.0, 362880.0 / 1024.0),
    (70.0, 3628800.0 / 2048.0),
)
_SMALL_A = 1e-5


@dataclass(frozen=True)
class FigureRow:
    p: float
    wigner: float
    classical: float


def _rational(spec: QuadratureSpec) -> QuadratureSpec:
    return replace(spec, semi_infinite_map="rational", scale=1.0)


def _chart_spec(spec: QuadratureSpec, beta: float) -> QuadratureSpec:
    # R^k exp(-beta R) under the exponential map with scale 2/beta vanishes at u = 1
    return replace(spec, semi_infinite_map="exponential", scale=2.0 / beta)


def wigner_marginal(p):
    """W(p) = 8 / (pi^2 (1 + p^2)^4)"""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("momentum must be non-negative")
    value = 8.0 / (math.pi**2 * (1.0 + p * p) ** 4)
    return float(value) if value.ndim == 0 else value


def _scale_integral(a: float, spec: QuadratureSpec) -> float:
    """
    int_0^inf R^6 exp(-2R) / (1 + aR)^5 dR = 6! a^-7 U(7, 3, 2/a), with U
    Tricomi's confluent hypergeometric function. Below _SMALL_A the binomial
    series of (1 + aR)^-5 is summed instead; if U is not finite the integral
    falls back to quadrature.
    """
    if a < _SMALL_A:
        return _SIXTH_MOMENT + sum(c * a ** (k + 1) * m for k, (c, m) in enumerate(_SMALL_A_TERMS))
    value = 720.0 * a**-7 * float(hyperu(7.0, 3.0, 2.0 / a))
    if math.isfinite(value):
        return value
    logger.warning(f"hyperu not finite at a={a}, integrating instead")
    value, _ = integrate_1d(
        lambda R: R**6 * math.exp(-2.0 * R) / (1.0 + a * R) ** 5, 0.0, math.inf, _rational(spec)
    )
    return value


def classical_marginal(p: float, spec: QuadratureSpec) -> float:
    """P(p) = (2p/pi) int_0^inf R^6 exp(-2R) / (1 + p^2 R/2)^5 dR"""
    if p < 0:
        raise ValueError("momentum must be non-negative")
    if p == 0:
        return 0.0
    return 2.0 * p / math.pi * _scale_integral(0.5 * p * p, spec)


def classical_marginal_slope() -> float:
    """dP/dp at p = 0"""
    return 2.0 / math.pi * _SIXTH_MOMENT


def classical_marginal_from_positions(p: float, spec: QuadratureSpec) -> float:
    """
    The same marginal integrated over positions directly:
    (2p/pi) int_0^(2/p^2) r^3 R^3 exp(-2R) dr with 1/R = 1/r - p^2/2.
    """
    if p < 0:
        raise ValueError("momentum must be non-negative")
    if p == 0:
        return 0.0
    half_p2 = 0.5 * p * p
    r_max = 1.0 / half_p2

    def integrand(r: float) -> float:
        inv_R = 1.0 / r - half_p2
        if inv_R <= 0:
            return 0.0
        R = 1.0 / inv_R
        if R > 400.0:
            return 0.0
        return r**3 * R**3 * math.exp(-2.0 * R)

    value, _ = integrate_1d(integrand, 0.0, r_max, spec)
    return 2.0 * p / math.pi * value


def momentum_norm(marginal: Callable[[float], float], spec: QuadratureSpec) -> float:
    """int_0^inf 4 pi p^2 f(p) dp"""
    value, _ = integrate_1d(lambda p: 4.0 * math.pi * p * p * marginal(p), 0.0, math.inf, _rational(spec))
    return value


def figure_data(p_grid: Sequence[float], spec: QuadratureSpec) -> List[FigureRow]:
    """Rows (p, W(p), P(p)) on a sorted non-negative grid"""
    grid = [float(p) for p in p_grid]
    if any(p < 0 for p in grid):
        raise ValueError("momentum grid must be non-negative")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("momentum grid must be sorted")
    logger.info(f"Computing {len(grid)} marginal rows on [{grid[0] if grid else 0}, {grid[-1] if grid else 0}]")
    return [FigureRow(p=p, wigner=wigner_marginal(p), classical=classical_marginal(p, spec)) for p in grid]


def crossings(rows: Sequence[FigureRow], spec: Optional[QuadratureSpec] = None) -> List[float]:
    """
    Momenta where W - P changes sign between neighbouring rows, refined by
    Brent's method when a quadrature spec is given.
    """
    found = []
    for left, right in zip(rows, rows[1:]):
        d_left = left.wigner - left.classical
        d_right = right.wigner - right.classical
        if d_left == 0.0 or d_left * d_right >= 0:
            continue
        if spec is None:
            found.append(left.p + (right.p - left.p) * d_left / (d_left - d_right))
        else:
            found.append(
                optimize.brentq(lambda p: wigner_marginal(p) - classical_marginal(p, spec), left.p, right.p, xtol=1e-12)
            )
    return found


def tail_exponent(f: Callable[[float], float], p_lo: float, p_hi: float, points: int = 64) -> float:
    """
    Power k of a tail f ~ p^k, from a least-squares fit of
    log f = c0 + k log p + c2/p^2 + (c4 + c4' log p)/p^4 on a log-spaced grid.
    """
    if not 0 < p_lo < p_hi:
        raise ValueError(f"need 0 < p_lo < p_hi, got {p_lo}, {p_hi}")
    p = np.geomspace(p_lo, p_hi, points)
    values = np.array([f(float(x)) for x in p])
    if np.any(values <= 0):
        raise ValueError("tail fit needs positive values")
    log_p = np.log(p)
    design = np.column_stack([np.ones_like(p), log_p, p**-2, p**-4, log_p * p**-4])
    coef, *_ = np.linalg.lstsq(design, np.log(values), rcond=None)
    return float(coef[1])


def chart_average(
    sd: StateDensity,
    weight: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    spec: QuadratureSpec,
    mu_nodes: int = 96,
) -> float:
    """
    int d^3r d^3p/gamma P * weight(r, R, mu) by nested adaptive quadrature in
    R and r, with Gauss-Legendre in mu. The measure is written out from the
    chart rather than taken from the factorized Beta/Gamma sums.
    """
    nodes, node_weights = leggauss(mu_nodes)
    mu = 0.5 * math.pi * (nodes + 1.0)
    mu_weights = 0.5 * math.pi * node_weights
    a2 = sd.coupling.strength
    beta = min(comp.beta for comp in sd.components)

    def integrand(R: float, r: float) -> float:
        if r <= 0.0 or r >= R:
            return 0.0
        E = float(energy_from_scale(R, sd.coupling))
        s = math.sqrt(2.0 * E * (1.0 / r - 1.0 / R))
        measure = E * s * np.sin(mu) / (R * R * math.sqrt(1.0 + (a2 / R) ** 2))
        values = chart_density(sd, r, R, mu) * measure * weight(r, R, mu)
        return 4.0 * math.pi * r * r * 2.0 * math.pi * float(mu_weights @ values)

    value, error = integrate(integrand, [(0.0, math.inf), (0.0, lambda R: R)], _chart_spec(spec, beta))
    logger.debug(f"chart_average({sd.label}) = {value} +- {error:.2g}")
    return value


def quadrature_momentum_marginal(sd: StateDensity, r: float, spec: QuadratureSpec, mu_nodes: int = 96) -> float:
    """Spatial density at r from integrating P over momentum space in the (mu, nu, R) chart"""
    if not r > 0:
        raise ValueError("quadrature marginal needs r > 0")
    nodes, node_weights = leggauss(mu_nodes)
    mu = 0.5 * math.pi * (nodes + 1.0)
    mu_weights = 0.5 * math.pi * node_weights
    a2 = sd.coupling.strength
    beta = min(comp.beta for comp in sd.components)

    def integrand(R: float) -> float:
        if R <= r:
            return 0.0
        E = float(energy_from_scale(R, sd.coupling))
        s = math.sqrt(2.0 * E * (1.0 / r - 1.0 / R))
        measure = E * s * np.sin(mu) / (R * R * math.sqrt(1.0 + (a2 / R) ** 2))
        return 2.0 * math.pi * float(mu_weights @ (chart_density(sd, r, R, mu) * measure))

    value, _ = integrate_1d(integrand, r, math.inf, _chart_spec(spec, beta))
    return value
