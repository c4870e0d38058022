"""
Harmonics - phase-space forms of squared l = 1 spherical harmonics

A classical orbit carries no azimuthal phase, only the direction L_hat of
its angular momentum. The factors below are functions of n . L_hat whose
average over the orbit-plane angle nu reproduces |Y_1m(theta)|^2. The odd
parts are taken linear in n . L_hat.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from relcoulomb.errors import DomainError, UnsupportedState
from relcoulomb.phasespace import DensityKind, PhasePoint, StateDensity, density_eval

logger = logging.getLogger(__name__)

_UNIT = 3.0 / (4.0 * math.pi)


@dataclass(frozen=True)
class AngularFactor:
    m: int
    axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    parity_form: str = field(default="linear")

    def __post_init__(self):
        if self.m not in (-1, 0, 1):
            raise DomainError(f"m must be -1, 0 or 1, got {self.m}")
        if self.parity_form != "linear":
            raise UnsupportedState(f"only the linear odd part is implemented, got {self.parity_form!r}")
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-14:
            raise DomainError(f"axis must be a unit vector, got {self.axis}")


def lhat(theta, phi, nu) -> np.ndarray:
    """Angular-momentum direction for position angles (theta, phi) and orbit-plane angle nu"""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    sn, cn = np.sin(nu), np.cos(nu)
    return np.stack(
        [
            -ct * cp * sn - sp * cn,
            -ct * sp * sn + cp * cn,
            st * sn + 0.0 * cp,
        ],
        axis=-1,
    )


def calY(af: AngularFactor, lhat_vec) -> np.ndarray:
    c = np.asarray(lhat_vec, dtype=float) @ np.asarray(af.axis, dtype=float)
    if af.m == 0:
        value = _UNIT * (1.0 - 2.0 * c * c)
    else:
        value = _UNIT * (c * c + af.m * c)
    return float(value) if np.ndim(value) == 0 else value


def ylm_squared(m: int, theta):
    """|Y_1m(theta)|^2"""
    if m == 0:
        return _UNIT * np.cos(theta) ** 2
    return 0.5 * _UNIT * np.sin(theta) ** 2


def nu_average(m: int, theta: float, points: int = 32) -> float:
    """(1/2pi) int calY dnu by the periodic trapezoid rule (exact for these trigonometric polynomials)"""
    factor = AngularFactor(m)
    nu = 2.0 * math.pi * np.arange(points) / points
    return float(np.mean(calY(factor, lhat(theta, 0.0, nu))))


def nu_average_lz(m: int, theta: float, points: int = 32) -> float:
    """(1/2pi) int L_hat_z calY dnu, equal to (3m/8pi) sin^2 theta"""
    factor = AngularFactor(m)
    nu = 2.0 * math.pi * np.arange(points) / points
    directions = lhat(theta, 0.0, nu)
    return float(np.mean(directions[..., 2] * calY(factor, directions)))


def angular_momentum_moments(m: int, order: int = 16, points: int = 32) -> Tuple[float, float, float]:
    """
    Averages of L_hat_z, L_hat_x, L_hat_y weighted by calY over positions and nu:
    int dOmega (1/2pi) int dnu L_hat calY. Gauss-Legendre in cos theta,
    trapezoid in phi and nu.
    """
    factor = AngularFactor(m)
    cos_theta, weights = leggauss(order)
    theta = np.arccos(cos_theta)
    angles = 2.0 * math.pi * np.arange(points) / points
    T, P, N = np.meshgrid(theta, angles, angles, indexing="ij")
    directions = lhat(T, P, N)
    weight = calY(factor, directions)
    w = weights[:, None, None] * (2.0 * math.pi / points) / points
    lz, lx, ly = (float(np.sum(w * directions[..., axis] * weight)) for axis in (2, 0, 1))
    logger.debug(f"angular_momentum_moments(m={m}) -> ({lz:.3g}, {lx:.3g}, {ly:.3g})")
    return lz, lx, ly


def polarized_density(sd: StateDensity, pt: PhasePoint, factor: AngularFactor):
    """
    2p density with its orientation dependence, 4 pi P(E, L) calY(L_hat).
    The three values of m sum to 3 P(E, L) at every point.
    """
    if sd.kind is not DensityKind.YRAST or sd.qn.n != 2:
        raise UnsupportedState(f"orientation factors are defined for the 2p level, got {sd.label}")
    L = pt.angular_momentum
    norm = np.linalg.norm(L, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DomainError("angular momentum direction undefined for L = 0")
    value = 4.0 * math.pi * np.asarray(density_eval(sd, pt)) * calY(factor, L / norm)
    return float(value) if np.ndim(value) == 0 else value
