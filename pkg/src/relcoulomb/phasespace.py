"""
Phasespace - classical side of the relativistic Coulomb problem

Orbits are labelled by their conserved quantities (E, L) or, equivalently,
by the orbit scale R(E) and omega L = sqrt(L^2 - alpha^2 Z^2). Momenta at a
fixed position are charted by (mu, nu, R): mu tilts the momentum away from
the radial direction, nu turns it around the radius vector.

Every density is built as

    P = N/(4 pi) * omega L * R^3 * Phi(E) * x^(2 ell) * exp(-beta R) * B(x, R),
    x = omega^2 L^2 R / (2E) = r (R - r) sin^2 mu,

where B is a polynomial bracket (B = 1 for Yrast states) and N is fixed by
unit normalization under d^3r d^3p / gamma. In chart coordinates the measure
cancels most factors and leaves

    r^2 dr dOmega_r dmu dnu dR * N/(4 pi) (R - r)^(1+2 ell) r^(2 ell)
        sin^(2+4 ell) mu exp(-beta R) B,

which factorizes into Beta and Gamma integrals. All normalizations,
marginals and moments below are evaluated from those sums.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as poly
from scipy import optimize
from scipy.special import betaln, comb, gammaln

from relcoulomb.errors import DomainError, SubBarrier, Unbound, UnsupportedState
from relcoulomb.spectrum import Coupling, QuantumNumbers, effective_ell, level_energy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhasePoint:
    """
    Position and momentum in atomic units.

    Arrays of shape (3,) describe one point, arrays of shape (N, 3) a batch.
    """

    position: np.ndarray
    momentum: np.ndarray

    @classmethod
    def of(cls, position, momentum) -> "PhasePoint":
        return cls(np.asarray(position, dtype=float), np.asarray(momentum, dtype=float))

    @property
    def radius(self):
        return np.linalg.norm(self.position, axis=-1)

    @property
    def momentum_sq(self):
        return np.sum(self.momentum * self.momentum, axis=-1)

    @property
    def angular_momentum(self) -> np.ndarray:
        return np.cross(self.position, self.momentum)

    @property
    def radial_momentum(self):
        return np.sum(self.position * self.momentum, axis=-1) / self.radius

    def __len__(self) -> int:
        return 1 if self.position.ndim == 1 else self.position.shape[0]


@dataclass(frozen=True)
class OrbitalElements:
    E: float
    L: float
    omega: float
    R: float

    @property
    def omega_L(self) -> float:
        return self.omega * self.L


@dataclass(frozen=True)
class ChartPoint:
    """Position (r, theta, phi) plus momentum chart (R, mu, nu)"""

    r: float
    theta: float
    phi: float
    R: float
    mu: float
    nu: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"chart radius must be positive, got r={self.r}")
        if self.r > self.R:
            raise DomainError(f"chart point needs r <= R, got r={self.r}, R={self.R}")
        if not 0.0 <= self.mu <= math.pi:
            raise DomainError(f"mu must lie in [0, pi], got {self.mu}")

    @property
    def x(self) -> float:
        """r (R - r) sin^2 mu, the combination omega^2 L^2 R / (2E)"""
        return self.r * (self.R - self.r) * math.sin(self.mu) ** 2


class DensityKind(str, Enum):
    YRAST = "yrast"
    TWO_S_A = "2s-a"
    TWO_S_B = "2s-b"
    TWO_S_MIX = "2s-mix"


@dataclass(frozen=True)
class DensityComponent:
    """One normalized term N/(4 pi) x^(2 ell) exp(-beta R) sum_jk c[j, k] x^j R^k"""

    weight: float
    ell: float
    beta: float
    coefficients: np.ndarray
    norm: float


@dataclass(frozen=True)
class StateDensity:
    kind: DensityKind
    coupling: Coupling
    qn: QuantumNumbers
    ell: float
    energy: float
    components: Tuple[DensityComponent, ...]
    lam: float = 0.0

    @property
    def is_signed(self) -> bool:
        return self.kind is not DensityKind.YRAST

    @property
    def label(self) -> str:
        if self.kind is DensityKind.YRAST:
            return f"yrast(n={self.qn.n})"
        if self.kind is DensityKind.TWO_S_MIX:
            return f"2s-mix(lambda={self.lam})"
        return self.kind.value


@dataclass(frozen=True)
class NegativeRegion:
    """Interval of `variable` on which the angle-integrated bracket is negative"""

    variable: str
    lower: float
    upper: float


# ---------------------------------------------------------------------------
# Orbits and the (mu, nu, R) chart
# ---------------------------------------------------------------------------


def energy_from_scale(R, coupling: Coupling):
    """E(R) = sqrt(1 + a^4/R^2) - a^2/R with a = alpha Z"""
    a2 = coupling.strength
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise DomainError("orbit scale R must be positive")
    ratio = a2 / R
    # written as 1/(sqrt(1+q^2) + q) to stay accurate for small q
    value = 1.0 / (np.sqrt(1.0 + ratio * ratio) + ratio)
    return float(value) if value.ndim == 0 else value


def scale_from_energy(E: float, coupling: Coupling) -> float:
    """R = 2 a^2 E / (1 - E^2); undefined without coupling, where every bound orbit has E = 1"""
    a2 = coupling.strength
    if a2 == 0:
        raise DomainError("R(E) is not defined at alpha Z = 0; use orbital_elements on a phase point")
    if not 0.0 < E < 1.0:
        raise Unbound(f"bound orbits need 0 < E < 1, got E={E}")
    return 2.0 * a2 * E / ((1.0 - E) * (1.0 + E))


def phi_factor(E):
    """
    Phi(E) = sqrt(1 + a^4/R^2) / (2E^2). With a^2/R = (1 - E^2)/(2E) this is
    (1 + E^2)/(4 E^3), which is 1/2 in the non-relativistic limit.
    """
    E = np.asarray(E, dtype=float)
    value = (1.0 + E * E) / (4.0 * E**3)
    return float(value) if value.ndim == 0 else value


def _elements_arrays(position: np.ndarray, momentum: np.ndarray, a2: float):
    r = np.linalg.norm(position, axis=-1)
    if np.any(r <= 0):
        raise DomainError("phase point at the origin")
    p2 = np.sum(momentum * momentum, axis=-1)
    E = np.sqrt(1.0 + a2 * p2) - a2 / r
    if np.any(E <= 0):
        raise DomainError("total energy must be positive")
    inv_R = 1.0 / r + a2 / (2.0 * E * r * r) - p2 / (2.0 * E)
    if np.any(inv_R <= 0):
        raise Unbound("phase point is not on a bound orbit")
    L = np.linalg.norm(np.cross(position, momentum), axis=-1)
    omega_L_sq = L * L - a2
    if np.any(omega_L_sq < -64 * np.finfo(float).eps * max(a2, 1.0)):
        raise SubBarrier(f"angular momentum below alpha Z = {math.sqrt(a2)}")
    omega_L_sq = np.maximum(omega_L_sq, 0.0)
    return r, E, L, inv_R, omega_L_sq


def orbital_elements(pt: PhasePoint, coupling: Coupling) -> OrbitalElements:
    """Conserved (E, L, omega, R) of the orbit through a single phase point"""
    if len(pt) != 1 or pt.position.ndim != 1:
        raise DomainError("orbital_elements takes a single phase point")
    a2 = coupling.strength
    _, E, L, inv_R, omega_L_sq = _elements_arrays(pt.position, pt.momentum, a2)
    E, L, inv_R = float(E), float(L), float(inv_R)
    omega = 1.0 if L == 0.0 else math.sqrt(float(omega_L_sq)) / L
    return OrbitalElements(E=E, L=L, omega=omega, R=1.0 / inv_R)


def _frame(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    zero = np.zeros_like(np.asarray(theta, dtype=float) + np.asarray(phi, dtype=float))
    r_hat = np.stack([st * cp, st * sp, ct + zero], axis=-1)
    theta_hat = np.stack([ct * cp, ct * sp, -st + zero], axis=-1)
    phi_hat = np.stack([-sp + zero, cp + zero, zero], axis=-1)
    return r_hat, theta_hat, phi_hat


def _chart_speed(r, R, E):
    """s = sqrt(2E (1/r - 1/R)), the momentum scale at radius r on an orbit of scale R"""
    return np.sqrt(np.maximum(2.0 * E * (1.0 / r - 1.0 / R), 0.0))


def chart_arrays_to_phase(r, theta, phi, R, mu, nu, coupling: Coupling, E=None) -> PhasePoint:
    """Vectorized chart_to_phase on equally shaped arrays"""
    a2 = coupling.strength
    r, R = np.asarray(r, dtype=float), np.asarray(R, dtype=float)
    E = energy_from_scale(R, coupling) if E is None else np.asarray(E, dtype=float)
    s = _chart_speed(r, R, E)
    p_r = s * np.cos(mu)
    omega_L = r * s * np.sin(mu)
    p_perp = np.sqrt(omega_L * omega_L + a2) / r
    r_hat, theta_hat, phi_hat = _frame(theta, phi)
    momentum = (
        (p_perp * np.cos(nu))[..., None] * theta_hat
        + (p_perp * np.sin(nu))[..., None] * phi_hat
        + p_r[..., None] * r_hat
    )
    return PhasePoint(r[..., None] * r_hat, momentum)


def chart_to_phase(cp: ChartPoint, coupling: Coupling, E: Optional[float] = None) -> PhasePoint:
    """
    Assemble the phase point of a chart point: p_r = s cos mu, omega L = r s sin mu,
    the transverse momentum L/r pointing along cos nu theta_hat + sin nu phi_hat.
    E defaults to E(R).
    """
    return chart_arrays_to_phase(cp.r, cp.theta, cp.phi, cp.R, cp.mu, cp.nu, coupling, E)


def phase_to_chart(pt: PhasePoint, coupling: Coupling) -> Tuple[ChartPoint, OrbitalElements]:
    """Inverse of chart_to_phase for a single bound point"""
    elements = orbital_elements(pt, coupling)
    r = float(pt.radius)
    theta = math.acos(max(-1.0, min(1.0, pt.position[2] / r)))
    phi = math.atan2(pt.position[1], pt.position[0]) % (2 * math.pi)
    r_hat, theta_hat, phi_hat = _frame(theta, phi)
    p = pt.momentum
    mu = math.atan2(elements.omega_L / r, float(p @ r_hat))
    nu = math.atan2(float(p @ phi_hat), float(p @ theta_hat)) % (2 * math.pi)
    return ChartPoint(r=r, theta=theta, phi=phi, R=max(elements.R, r), mu=mu, nu=nu), elements


def measure_factor(cp: ChartPoint, coupling: Coupling, E: Optional[float] = None) -> float:
    """
    Density of d^3p/gamma in (mu, nu, R):
    (1/(2 R^2 Phi)) sqrt(2/(E r) - 2/(E R)) sin mu = E s sin mu / (R^2 sqrt(1 + a^4/R^2)).
    """
    if E is None:
        E = energy_from_scale(cp.R, coupling)
    if not E > 0:
        raise DomainError(f"orbit energy must be positive, got {E}")
    a2 = coupling.strength
    s = float(_chart_speed(cp.r, cp.R, E))
    return E * s * math.sin(cp.mu) / (cp.R**2 * math.sqrt(1.0 + (a2 / cp.R) ** 2))


# ---------------------------------------------------------------------------
# State densities
# ---------------------------------------------------------------------------


def _mu_integral(ell: float, j: int, cos2_power: float = 0.0) -> float:
    """log of int_0^pi sin^(2+4ell+2j) mu cos^(2c) mu dmu"""
    return betaln(1.5 + 2.0 * ell + j, cos2_power + 0.5)


def _component_moment(comp: DensityComponent, r_power: float, R_power: float, cos2_power: float) -> float:
    ell, beta = comp.ell, comp.beta
    total = 0.0
    for (j, k), c in np.ndenumerate(comp.coefficients):
        if c == 0.0:
            continue
        first = 3.0 + 2.0 * ell + j + r_power
        radial = 5.0 + 4.0 * ell + 2 * j + k + r_power + R_power
        if first <= 0 or radial <= 0:
            raise DomainError(
                f"moment <r^{r_power} R^{R_power} cos^{2 * cos2_power} mu> diverges for ell={ell}"
            )
        log_term = (
            _mu_integral(ell, j, cos2_power)
            + betaln(first, 2.0 + 2.0 * ell + j)
            + gammaln(radial)
            - radial * math.log(beta)
        )
        total += c * math.exp(log_term)
    return 2.0 * math.pi * comp.norm * total


def _normalized(weight: float, ell: float, beta: float, coefficients) -> DensityComponent:
    coefficients = np.atleast_2d(np.asarray(coefficients, dtype=float))
    raw = DensityComponent(weight=weight, ell=ell, beta=beta, coefficients=coefficients, norm=1.0)
    norm = 1.0 / _component_moment(raw, 0.0, 0.0, 0.0)
    return DensityComponent(weight=weight, ell=ell, beta=beta, coefficients=coefficients, norm=norm)


def _two_s_brackets(ell: float):
    s = math.sqrt(4.0 + 3.0 * ell)
    bracket_a = [
        [(1 + ell) ** 2 * s**4 * (3 + 4 * ell) * (5 + 4 * ell)],
        [-8.0 * (1 + ell) * s**2 * (5 + 4 * ell)],
        [16.0],
    ]
    bracket_b = [[(1 + ell) * s**2 * (7 + 8 * ell), -8.0 * (1 + ell) * s, 2.0]]
    return s, bracket_a, bracket_b


def yrast_density(n: int, coupling: Coupling) -> StateDensity:
    """Non-negative density whose momentum marginal is the Yrast level (n, n-1)"""
    qn = QuantumNumbers(n, n - 1)
    ell = effective_ell(qn.l, coupling)
    energy = level_energy(qn, coupling)
    beta = 2.0 * energy / (1.0 + ell)
    comp = _normalized(1.0, ell, beta, [[1.0]])
    return StateDensity(DensityKind.YRAST, coupling, qn, ell, energy, (comp,))


def two_s_density(coupling: Coupling, variant: str = "A") -> StateDensity:
    """
    2s density with bracket A (a quadratic in x) or B (a quadratic in R).
    Both reproduce R_20^2 and share <1/r> and <1/R>.
    """
    qn = QuantumNumbers(2, 0)
    ell = effective_ell(0, coupling)
    energy = level_energy(qn, coupling)
    s, bracket_a, bracket_b = _two_s_brackets(ell)
    variant = variant.upper()
    if variant == "A":
        kind, bracket = DensityKind.TWO_S_A, bracket_a
    elif variant == "B":
        kind, bracket = DensityKind.TWO_S_B, bracket_b
    else:
        raise UnsupportedState(f"unknown 2s variant {variant!r}; expected 'A' or 'B'")
    comp = _normalized(1.0, ell, 2.0 / s, bracket)
    return StateDensity(kind, coupling, qn, ell, energy, (comp,))


def two_s_mixture(coupling: Coupling, lam: float) -> StateDensity:
    """(1 - lam) P_A + lam P_B"""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"mixture parameter must lie in [0, 1], got {lam}")
    a = two_s_density(coupling, "A")
    b = two_s_density(coupling, "B")
    comp_a, comp_b = a.components[0], b.components[0]
    components = (
        DensityComponent(1.0 - lam, comp_a.ell, comp_a.beta, comp_a.coefficients, comp_a.norm),
        DensityComponent(lam, comp_b.ell, comp_b.beta, comp_b.coefficients, comp_b.norm),
    )
    return StateDensity(DensityKind.TWO_S_MIX, coupling, a.qn, a.ell, a.energy, components, lam=lam)


def make_density(kind: DensityKind, coupling: Coupling, n: int = 1, lam: float = 0.0) -> StateDensity:
    kind = DensityKind(kind)
    if kind is DensityKind.YRAST:
        return yrast_density(n, coupling)
    if kind is DensityKind.TWO_S_A:
        return two_s_density(coupling, "A")
    if kind is DensityKind.TWO_S_B:
        return two_s_density(coupling, "B")
    return two_s_mixture(coupling, lam)


def _density_from_x(sd: StateDensity, x, R, E):
    """P as a function of x = omega^2 L^2 R/(2E), R and the orbit energy E"""
    # polyval2d needs x and R of one shape
    x, R = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(R, dtype=float))
    total = np.zeros(x.shape)
    # omega L x^(2 ell) = sqrt(2E/R) x^(1/2 + 2 ell)
    prefactor = np.sqrt(2.0 * E / R) * R**3 * phi_factor(E)
    for comp in sd.components:
        if comp.weight == 0.0:
            continue
        bracket = poly.polyval2d(x, R, comp.coefficients)
        total = total + comp.weight * comp.norm / (4.0 * math.pi) * np.power(x, 0.5 + 2.0 * comp.ell) * np.exp(
            -comp.beta * R
        ) * bracket
    return prefactor * total


def density_eval(sd: StateDensity, pt: PhasePoint):
    """P(E, L) at one phase point or a batch of them"""
    a2 = sd.coupling.strength
    _, E, _, inv_R, omega_L_sq = _elements_arrays(pt.position, pt.momentum, a2)
    R = 1.0 / inv_R
    x = omega_L_sq * R / (2.0 * E)
    value = _density_from_x(sd, x, R, E)
    return float(value) if np.ndim(value) == 0 else value


def chart_density(sd: StateDensity, r, R, mu):
    """P evaluated on chart coordinates, with E = E(R)"""
    r, R = np.asarray(r, dtype=float), np.asarray(R, dtype=float)
    E = energy_from_scale(R, sd.coupling)
    x = r * np.clip(R - r, 0.0, None) * np.sin(mu) ** 2
    return _density_from_x(sd, x, R, E)


# ---------------------------------------------------------------------------
# Exact moments and marginals
# ---------------------------------------------------------------------------


def moment(sd: StateDensity, r_power: float = 0.0, R_power: float = 0.0, cos2_power: float = 0.0) -> float:
    """<r^a R^b cos^(2c) mu> under the density, from Beta/Gamma sums"""
    return sum(
        comp.weight * _component_moment(comp, r_power, R_power, cos2_power)
        for comp in sd.components
        if comp.weight != 0.0
    )


def momentum_marginal(sd: StateDensity, r):
    """
    Spatial density after integrating over momentum space,
    rho(r) = R_nl(r)^2 / (4 pi), so that int rho d^3r = 1.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(np.isnan(r_arr)):
        raise DomainError("momentum_marginal needs r >= 0")
    total = np.zeros_like(r_arr)
    for comp in sd.components:
        if comp.weight == 0.0:
            continue
        ell, beta = comp.ell, comp.beta
        series = np.zeros_like(r_arr)
        for (j, k), c in np.ndenumerate(comp.coefficients):
            if c == 0.0:
                continue
            mu_part = math.exp(_mu_integral(ell, j))
            inner = np.zeros_like(r_arr)
            for i in range(k + 1):
                shape = 2.0 + 2.0 * ell + j + i
                inner = inner + comb(k, i) * r_arr ** (k - i) * math.exp(gammaln(shape) - shape * math.log(beta))
            series = series + c * mu_part * r_arr**j * inner
        with np.errstate(divide="ignore", invalid="ignore"):
            power = np.power(r_arr, 2.0 * ell)
        total = total + comp.weight * 0.5 * comp.norm * power * np.exp(-beta * r_arr) * series
    return float(total) if total.ndim == 0 else total


def r_marginal(sd: StateDensity, R):
    """Density of the orbit scale R after integrating over r, mu, nu and directions"""
    R_arr = np.asarray(R, dtype=float)
    if np.any(R_arr < 0) or np.any(np.isnan(R_arr)):
        raise DomainError("r_marginal needs R >= 0")
    total = np.zeros_like(R_arr)
    positive = R_arr > 0
    log_R = np.log(np.where(positive, R_arr, 1.0))
    for comp in sd.components:
        if comp.weight == 0.0:
            continue
        ell, beta = comp.ell, comp.beta
        for (j, k), c in np.ndenumerate(comp.coefficients):
            if c == 0.0:
                continue
            power = 4.0 + 4.0 * ell + 2 * j + k
            log_const = _mu_integral(ell, j) + betaln(3.0 + 2.0 * ell + j, 2.0 + 2.0 * ell + j)
            term = np.where(positive, np.exp(log_const + power * log_R - beta * R_arr), 0.0)
            total = total + comp.weight * 2.0 * math.pi * comp.norm * c * term
    return float(total) if total.ndim == 0 else total


def angular_marginal(sd: StateDensity, r, R):
    """
    Radial phase-space density: density in R at fixed r after the mu and nu
    integrals, normalized so that its R-integral is momentum_marginal(r).
    """
    r_arr, R_arr = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(R, dtype=float))
    if np.any(r_arr <= 0):
        raise DomainError("angular_marginal needs r > 0")
    gap = np.clip(R_arr - r_arr, 0.0, None)
    u = r_arr * gap
    total = np.zeros(r_arr.shape)
    for comp in sd.components:
        if comp.weight == 0.0:
            continue
        ell, beta = comp.ell, comp.beta
        bracket = np.zeros(r_arr.shape)
        for (j, k), c in np.ndenumerate(comp.coefficients):
            if c == 0.0:
                continue
            bracket = bracket + c * math.exp(_mu_integral(ell, j)) * u**j * R_arr**k
        factor = np.power(gap, 1.0 + 2.0 * ell) * np.power(r_arr, 2.0 * ell) * np.exp(-beta * R_arr)
        total = total + comp.weight * 0.5 * comp.norm * factor * bracket
    return float(total) if total.ndim == 0 else total


def negative_region(sd: StateDensity) -> Optional[NegativeRegion]:
    """
    Where the angle-integrated 2s bracket is negative: an x = r(R - r)
    interval for bracket A, an R interval for bracket B, None for Yrast.
    """
    if sd.kind is DensityKind.YRAST:
        return None
    if sd.kind is DensityKind.TWO_S_MIX:
        raise UnsupportedState("the mixture bracket depends on x and R jointly")
    comp = sd.components[0]
    if sd.kind is DensityKind.TWO_S_A:
        coef = [c * math.exp(_mu_integral(comp.ell, j)) for j, c in enumerate(comp.coefficients[:, 0])]
        variable = "x"
    else:
        coef = list(comp.coefficients[0, :])
        variable = "R"
    roots = np.sort(Polynomial(coef).roots())
    if np.any(np.iscomplex(roots)):
        return None
    lower, upper = (float(v) for v in np.real(roots))
    return NegativeRegion(variable=variable, lower=lower, upper=upper)


def _scan_scale(sd: StateDensity) -> float:
    beta = min(comp.beta for comp in sd.components)
    degree = max(2 * comp.coefficients.shape[0] + comp.coefficients.shape[1] for comp in sd.components)
    return 10.0 * (5.0 + 4.0 * sd.ell + degree) / beta


def negativity_scan(
    sd: StateDensity,
    resolution: int = 64,
    reduced: bool = False,
    workers: int = 1,
    starts: int = 4,
) -> Tuple[float, ChartPoint]:
    """
    Grid search for the minimum of the density over (r/R, R, mu), or of the
    angle-integrated density over (r/R, R) when `reduced`, refined with
    bounded L-BFGS-B from the best grid points.
    """
    if resolution < 2:
        raise DomainError(f"negativity scan needs resolution >= 2, got {resolution}")

    R_max = _scan_scale(sd)
    t_axis = np.linspace(0.0, 1.0, resolution + 1)[1:]
    R_axis = np.linspace(0.0, R_max, resolution + 1)[1:]
    mu_axis = np.linspace(0.0, 0.5 * math.pi, resolution)

    def evaluate(t, R, mu):
        if reduced:
            return angular_marginal(sd, t * R, R)
        return chart_density(sd, t * R, R, mu)

    def slab(R_block):
        if reduced:
            t, R = np.meshgrid(t_axis, R_block, indexing="ij")
            mu = np.full_like(t, 0.5 * math.pi)
        else:
            t, R, mu = np.meshgrid(t_axis, R_block, mu_axis, indexing="ij")
        return t.ravel(), R.ravel(), mu.ravel(), np.asarray(evaluate(t, R, mu)).ravel()

    blocks = np.array_split(R_axis, max(1, workers))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        parts = list(executor.map(slab, blocks))
    t_all = np.concatenate([p[0] for p in parts])
    R_all = np.concatenate([p[1] for p in parts])
    mu_all = np.concatenate([p[2] for p in parts])
    values = np.concatenate([p[3] for p in parts])

    order = np.argsort(values, kind="stable")[:starts]
    best_value = float(values[order[0]])
    best = (float(t_all[order[0]]), float(R_all[order[0]]), float(mu_all[order[0]]))

    bounds = [(1e-9, 1.0), (R_max * 1e-6, R_max)]
    if not reduced:
        bounds.append((0.0, 0.5 * math.pi))

    def objective(v):
        mu = v[2] if not reduced else 0.5 * math.pi
        return float(evaluate(v[0], v[1], mu))

    for index in order:
        start = [t_all[index], R_all[index]] + ([] if reduced else [mu_all[index]])
        result = optimize.minimize(objective, np.asarray(start), method="L-BFGS-B", bounds=bounds)
        if result.fun < best_value:
            best_value = float(result.fun)
            best = (float(result.x[0]), float(result.x[1]), 0.5 * math.pi if reduced else float(result.x[2]))

    t, R, mu = best
    location = ChartPoint(r=t * R, theta=0.5 * math.pi, phi=0.0, R=R, mu=mu, nu=0.0)
    logger.debug(f"negativity_scan({sd.label}, reduced={reduced}) -> {best_value:.6g} at {location}")
    return best_value, location
