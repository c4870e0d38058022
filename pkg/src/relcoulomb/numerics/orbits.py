"""
Relativistic Kepler orbits

Hamilton's equations of the scaled Hamiltonian H = sqrt(1 + a^2 p^2) - a^2/r,

    dr/dt = a^2 p / gamma,    dp/dt = -a^2 r / |r|^3,

integrated with an adaptive eighth-order Runge-Kutta scheme. Time runs in
units where one non-relativistic revolution of scale R lasts about
2 pi (R/2)^(3/2) / a^2.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from relcoulomb.errors import Collision, DomainError, ToleranceFailure
from relcoulomb.phasespace import OrbitalElements, PhasePoint, orbital_elements
from relcoulomb.spectrum import Coupling

logger = logging.getLogger(__name__)

R_MIN = 1e-8


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    energy_drift: float
    angmom_drift: float

    @property
    def points(self) -> PhasePoint:
        return PhasePoint(self.positions, self.momenta)

    def __len__(self) -> int:
        return int(self.times.shape[0])


def _energy(positions: np.ndarray, momenta: np.ndarray, a2: float) -> np.ndarray:
    r = np.linalg.norm(positions, axis=-1)
    return np.sqrt(1.0 + a2 * np.sum(momenta * momenta, axis=-1)) - a2 / r


def circular_orbit(r: float, coupling: Coupling) -> PhasePoint:
    """Start on a circle of radius r in the xy plane: p^2 = (a^2 + sqrt(a^4 + 4 r^2)) / (2 r^2)"""
    if not r > 0:
        raise DomainError(f"orbit radius must be positive, got {r}")
    a2 = coupling.strength
    p = math.sqrt((a2 + math.sqrt(a2 * a2 + 4.0 * r * r)) / (2.0 * r * r))
    return PhasePoint.of([r, 0.0, 0.0], [0.0, p, 0.0])


def radial_period(elements: OrbitalElements, coupling: Coupling) -> float:
    """Kepler estimate 2 pi (R/2)^(3/2) / a^2; ignores relativistic precession"""
    a2 = coupling.strength
    if a2 == 0:
        raise DomainError("no dynamics at alpha Z = 0")
    return 2.0 * math.pi * (0.5 * elements.R) ** 1.5 / a2


def orbit_integrate(
    start: PhasePoint,
    coupling: Coupling,
    t_end: float,
    tol: float = 1e-12,
    samples: int = 2001,
    r_min: float = R_MIN,
) -> Trajectory:
    """Integrate a bound orbit to t_end and record the drifts of E and |L|"""
    a2 = coupling.strength
    if a2 == 0:
        raise DomainError("no dynamics at alpha Z = 0")
    if not t_end > 0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    elements = orbital_elements(start, coupling)

    def rhs(_t, y):
        x, p = y[:3], y[3:]
        r = math.sqrt(x @ x)
        gamma = math.sqrt(1.0 + a2 * (p @ p))
        return np.concatenate([a2 * p / gamma, -a2 * x / r**3])

    def collision(_t, y):
        x = y[:3]
        return math.sqrt(x @ x) - r_min

    collision.terminal = True
    collision.direction = -1

    y0 = np.concatenate([start.position, start.momentum]).astype(float)
    t_eval = np.linspace(0.0, t_end, samples)
    logger.info(f"Integrating orbit E={elements.E:.12f}, L={elements.L:.6f} to t={t_end:.6g} (tol={tol:g})")
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        y0,
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
        t_eval=t_eval,
        events=collision,
    )
    if sol.status == 1:
        t_hit = float(sol.t_events[0][0])
        raise Collision(f"orbit reached r < {r_min} at t={t_hit:.6g} (L={elements.L:.3g})")
    if sol.status != 0:
        raise ToleranceFailure(f"orbit integration failed: {sol.message}")

    positions = sol.y[:3].T
    momenta = sol.y[3:].T
    energy = _energy(positions, momenta, a2)
    angmom = np.linalg.norm(np.cross(positions, momenta), axis=-1)
    energy_drift = float(np.max(np.abs(energy - elements.E)) / abs(elements.E))
    angmom_drift = float(np.max(np.abs(angmom - elements.L)) / elements.L) if elements.L > 0 else 0.0

    logger.info(f"Orbit done: {sol.nfev} evaluations, energy drift {energy_drift:.2e}, L drift {angmom_drift:.2e}")
    return Trajectory(
        times=sol.t,
        positions=positions,
        momenta=momenta,
        energy_drift=energy_drift,
        angmom_drift=angmom_drift,
    )
