"""
Spectrum - quantum reference layer for the spinless relativistic Coulomb problem

Energies are in units of mc^2, lengths in Bohr radii a0 = hbar/(alpha Z m c),
angular momenta in units of hbar. The only parameter left after scaling is
alpha Z.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import Polynomial
from scipy import constants, optimize
from scipy.special import gammaln

from relcoulomb.errors import (
    DegenerateCoupling,
    DomainError,
    GridOutOfDomain,
    OutOfRange,
    UnsupportedState,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Coupling:
    """Product of the fine-structure constant and the nuclear charge"""

    alpha_z: float

    def __post_init__(self):
        if not math.isfinite(self.alpha_z) or self.alpha_z < 0:
            raise OutOfRange(f"alpha Z must be finite and non-negative, got {self.alpha_z}")

    @property
    def strength(self) -> float:
        """alpha^2 Z^2, the combination that enters every formula"""
        return self.alpha_z * self.alpha_z

    @classmethod
    def from_strength(cls, strength: float) -> "Coupling":
        if strength < 0:
            raise OutOfRange(f"alpha^2 Z^2 must be non-negative, got {strength}")
        return cls(math.sqrt(strength))


@dataclass(frozen=True)
class QuantumNumbers:
    """Level labels (n, l) with 1 <= n and 0 <= l <= n-1"""

    n: int
    l: int

    def __post_init__(self):
        if self.n < 1:
            raise OutOfRange(f"principal number must be >= 1, got n={self.n}")
        if not 0 <= self.l <= self.n - 1:
            raise OutOfRange(f"orbital number must satisfy 0 <= l <= n-1, got n={self.n}, l={self.l}")

    @property
    def is_yrast(self) -> bool:
        return self.l == self.n - 1

    @property
    def radial_order(self) -> int:
        """n - l, the shift that turns the effective angular momentum into a principal number"""
        return self.n - self.l


@dataclass(frozen=True)
class AtomicUnits:
    """SI anchors of the scaled units for nuclear charge Z (electron values)"""

    Z: float
    bohr_radius_m: float
    bohr_time_s: float
    rest_energy_mev: float
    fine_structure: float


class RadialKind(str, Enum):
    GROUND = "ground"
    YRAST = "yrast"
    TWO_S = "2s"


@dataclass(frozen=True)
class RadialState:
    """
    Normalized radial eigenfunction R(r) = C r^ell P(r) exp(-decay r).

    `scaled_polynomial` is P written in the scaled radius x = E r, where the
    radial equation takes its non-relativistic form.
    """

    kind: RadialKind
    qn: QuantumNumbers
    coupling: Coupling
    ell: float
    energy: float
    norm_constant: float
    decay: float
    scaled_polynomial: Polynomial

    @property
    def polynomial(self) -> Polynomial:
        """P(r) in the unscaled radius"""
        coef = self.scaled_polynomial.coef * self.energy ** np.arange(len(self.scaled_polynomial.coef))
        return Polynomial(coef)

    @property
    def scaled_decay(self) -> float:
        """Decay rate in the scaled radius, 1/(n - l + ell)"""
        return 1.0 / (self.qn.radial_order + self.ell)


def _ell(l: int, strength: float) -> float:
    disc = (2 * l + 1) ** 2 - 4.0 * strength
    root = math.sqrt(max(disc, 0.0))
    # l - 2 a^2/(2l+1+root) avoids the cancellation in -1/2 + root/2
    return l - 2.0 * strength / (2 * l + 1 + root)


def effective_ell(l: int, coupling: Coupling) -> float:
    """
    Effective angular momentum ell_l with ell(ell+1) = l(l+1) - alpha^2 Z^2.

    Raises DegenerateCoupling in the fall-to-center regime alpha Z >= (2l+1)/2.
    """
    if l < 0:
        raise OutOfRange(f"orbital number must be non-negative, got l={l}")
    disc = (2 * l + 1) ** 2 - 4.0 * coupling.strength
    if disc <= 0:
        raise DegenerateCoupling(
            f"alpha Z = {coupling.alpha_z} >= {(2 * l + 1) / 2} makes ell_{l} complex"
        )
    return _ell(l, coupling.strength)


def _energy_from_ell(radial_order: int, ell: float, strength: float) -> float:
    shift = radial_order + ell
    return 1.0 / math.sqrt(1.0 + strength / (shift * shift))


def level_energy(qn: QuantumNumbers, coupling: Coupling) -> float:
    """E_nl = {1 + alpha^2 Z^2 / [n - l - 1/2 + sqrt((l+1/2)^2 - alpha^2 Z^2)]^2}^(-1/2)"""
    ell = effective_ell(qn.l, coupling)
    return _energy_from_ell(qn.radial_order, ell, coupling.strength)


def series_energy(qn: QuantumNumbers, coupling: Coupling) -> float:
    """Level energy expanded to order alpha^4 Z^4"""
    a2 = coupling.strength
    n, l = qn.n, qn.l
    return 1.0 - a2 / (2 * n**2) - a2 * a2 * (1.0 / (n**3 * (2 * l + 1)) - 3.0 / (8 * n**4))


def coupling_from_energy(qn: QuantumNumbers, energy: float) -> float:
    """
    Invert the level formula: alpha^2 Z^2 = (1-E^2)/E^2 (n - l + ell_l)^2.

    ell_l itself depends on alpha Z, so the relation is solved as a bracketed
    root in alpha^2 Z^2 on [0, (l+1/2)^2].
    """
    if not 0.0 < energy < 1.0:
        raise OutOfRange(f"level energy must lie in (0, 1), got {energy}")

    ratio = (1.0 - energy) * (1.0 + energy) / (energy * energy)
    upper = (qn.l + 0.5) ** 2

    def mismatch(strength: float) -> float:
        shift = qn.radial_order + _ell(qn.l, strength)
        return ratio * shift * shift - strength

    if mismatch(upper) >= 0:
        lowest = _energy_from_ell(qn.radial_order, -0.5, upper)
        raise OutOfRange(
            f"E = {energy} is below the lowest energy {lowest} reachable for (n, l) = ({qn.n}, {qn.l})"
        )

    strength = optimize.brentq(
        mismatch, 0.0, upper, xtol=np.finfo(float).tiny, rtol=4 * np.finfo(float).eps, maxiter=500
    )
    logger.debug(f"coupling_from_energy(n={qn.n}, l={qn.l}, E={energy}) -> {strength}")
    return strength


def atomic_units(Z: float) -> AtomicUnits:
    """Bohr radius a0 ~ 1/Z and Bohr time tau0 ~ 1/Z^2 for an electron around charge Z"""
    if not Z > 0:
        raise OutOfRange(f"nuclear charge must be positive, got Z={Z}")
    return AtomicUnits(
        Z=Z,
        bohr_radius_m=constants.physical_constants["Bohr radius"][0] / Z,
        bohr_time_s=constants.physical_constants["atomic unit of time"][0] / Z**2,
        rest_energy_mev=constants.physical_constants["electron mass energy equivalent in MeV"][0],
        fine_structure=constants.fine_structure,
    )


def _polynomial_gamma_integral(coef: np.ndarray, power: float, rate: float) -> float:
    """sum_i coef[i] * integral_0^inf r^(power+i) exp(-rate r) dr"""
    total = 0.0
    for i, c in enumerate(coef):
        if c == 0.0:
            continue
        k = power + i + 1.0
        total += c * math.exp(gammaln(k) - k * math.log(rate))
    return total


def radial_state(qn: QuantumNumbers, coupling: Coupling) -> RadialState:
    """Build the normalized radial state for a Yrast level or for 2s"""
    if qn.is_yrast:
        kind = RadialKind.GROUND if qn.n == 1 else RadialKind.YRAST
    elif (qn.n, qn.l) == (2, 0):
        kind = RadialKind.TWO_S
    else:
        raise UnsupportedState(f"no radial state for (n, l) = ({qn.n}, {qn.l}); only Yrast levels and 2s")

    ell = effective_ell(qn.l, coupling)
    energy = _energy_from_ell(qn.radial_order, ell, coupling.strength)
    shift = qn.radial_order + ell
    if kind is RadialKind.TWO_S:
        scaled_polynomial = Polynomial([1.0, -1.0 / ((1.0 + ell) * (2.0 + ell))])
    else:
        scaled_polynomial = Polynomial([1.0])

    decay = energy / shift
    polynomial_r = scaled_polynomial.coef * energy ** np.arange(len(scaled_polynomial.coef))
    squared = Polynomial(polynomial_r) ** 2
    norm_sq = _polynomial_gamma_integral(squared.coef, 2.0 + 2.0 * ell, 2.0 * decay)

    return RadialState(
        kind=kind,
        qn=qn,
        coupling=coupling,
        ell=ell,
        energy=energy,
        norm_constant=1.0 / math.sqrt(norm_sq),
        decay=decay,
        scaled_polynomial=scaled_polynomial,
    )


def ground_state(coupling: Coupling) -> RadialState:
    return radial_state(QuantumNumbers(1, 0), coupling)


def two_s_state(coupling: Coupling) -> RadialState:
    return radial_state(QuantumNumbers(2, 0), coupling)


def radial_wavefunction(state: RadialState, r):
    """
    R(r) for scalar or array r >= 0.

    At r = 0 the value is 0 for ell > 0, C P(0) for ell = 0 and +inf for the
    mildly singular ell < 0 (integrable, since 2 ell > -1).
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(np.isnan(r_arr)):
        raise DomainError("radial wavefunction needs r >= 0")
    with np.errstate(divide="ignore"):
        power = np.power(r_arr, state.ell)
    value = state.norm_constant * power * state.polynomial(r_arr) * np.exp(-state.decay * r_arr)
    if state.ell < 0:
        value = np.where(r_arr == 0.0, np.inf, value)
    return float(value) if np.ndim(value) == 0 else value


def schrodinger_residual(state: RadialState, r_grid) -> float:
    """
    Relative residual max |H psi| / |psi| of the scaled radial equation

        (-1/2 d^2 - (1/x) d + (l(l+1) - a^2)/(2x^2) - 1/x + 1/R) psi = 0,

    with psi(x) = R(x/E), 1/R = (1-E^2)/(2 a^2 E^2) and analytic derivatives.
    The grid is in the scaled radius x.
    """
    x = np.asarray(r_grid, dtype=float)
    if x.size == 0 or np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise GridOutOfDomain("residual grid must lie strictly inside (0, inf)")

    a2 = state.coupling.strength
    energy = state.energy
    ell = state.ell
    l = state.qn.l
    if a2 > 0:
        inv_R = (1.0 - energy) * (1.0 + energy) / (2.0 * a2 * energy * energy)
    else:
        inv_R = 0.5 * state.scaled_decay**2

    q = state.scaled_polynomial
    dq = q.deriv(1)
    d2q = q.deriv(2)
    slope = ell / x - state.scaled_decay

    # psi = q(x) g(x), g = x^ell exp(-x/(n-l+ell)); everything below is divided by g
    psi = q(x)
    dpsi = dq(x) + psi * slope
    d2psi = d2q(x) + 2.0 * dq(x) * slope + psi * (slope * slope - ell / (x * x))
    h_psi = (
        -0.5 * d2psi
        - dpsi / x
        + (l * (l + 1) - a2) / (2.0 * x * x) * psi
        - psi / x
        + inv_R * psi
    )
    return float(np.max(np.abs(h_psi) / np.abs(psi)))
