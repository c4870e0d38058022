"""
Adaptive quadrature on finite and semi-infinite intervals.

A thin layer over QUADPACK (scipy.integrate.quad): semi-infinite ranges are
mapped onto (0, 1) first, several dimensions are handled by nesting, and a
tolerance QUADPACK cannot reach raises MaxSubdivisions instead of warning.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Tuple, Union

from scipy import integrate as sp_integrate

from relcoulomb.errors import MaxSubdivisions

logger = logging.getLogger(__name__)

Bound = Union[float, Callable[..., float]]

SEMI_INFINITE_MAPS = ("exponential", "rational")

INNER_TIGHTENING = 100.0
MIN_INNER_REL_TOL = 1e-13


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    semi_infinite_map: str = "exponential"
    scale: float = 1.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError(f"tolerances must be positive, got abs={self.abs_tol}, rel={self.rel_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if self.semi_infinite_map not in SEMI_INFINITE_MAPS:
            raise ValueError(f"semi_infinite_map must be one of {SEMI_INFINITE_MAPS}")
        if not self.scale > 0:
            raise ValueError(f"map scale must be positive, got {self.scale}")

    @classmethod
    def from_settings(cls, settings) -> "QuadratureSpec":
        return cls(
            abs_tol=settings.abs_tol,
            rel_tol=settings.rel_tol,
            max_subdivisions=settings.max_subdivisions,
        )

    def with_scale(self, scale: float) -> "QuadratureSpec":
        return replace(self, scale=scale)


def _mapped(f: Callable[[float], float], lower: float, spec: QuadratureSpec) -> Callable[[float], float]:
    s = spec.scale
    if spec.semi_infinite_map == "exponential":

        def g(u: float) -> float:
            gap = 1.0 - u
            if gap <= 0.0:
                return 0.0
            return f(lower - s * math.log(gap)) * s / gap

    else:

        def g(u: float) -> float:
            gap = 1.0 - u
            if gap <= 0.0:
                return 0.0
            return f(lower + s * u / gap) * s / (gap * gap)

    return g


def integrate_1d(f: Callable[[float], float], lower: float, upper: float, spec: QuadratureSpec) -> Tuple[float, float]:
    """int_lower^upper f, with upper = inf mapped onto (0, 1)"""
    if upper == lower:
        return 0.0, 0.0
    if math.isinf(upper) and upper > 0 and math.isfinite(lower):
        g, a, b = _mapped(f, lower, spec), 0.0, 1.0
    else:
        g, a, b = f, lower, upper

    result = sp_integrate.quad(
        g, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions, full_output=1
    )
    if len(result) == 4:
        value, error, info, message = result
        raise MaxSubdivisions(
            f"quadrature on [{lower}, {upper}] stopped after {info.get('last', '?')} subintervals: {message} "
            f"(value {value:.6g}, error estimate {error:.3g})",
            value=float(value),
            error=float(error),
        )
    value, error, _ = result
    return float(value), float(error)


def integrate(f: Callable[..., float], bounds: Sequence[Tuple[Bound, Bound]], spec: QuadratureSpec) -> Tuple[float, float]:
    """
    Nested adaptive integral of f(x0, x1, ...).

    bounds[0] is the outermost range. A bound may be a number or a callable
    of the enclosing variables, e.g. (0, lambda R: R) for r in [0, R]. The
    returned error adds the outer estimate to the largest inner one.

    Inner ranges run at tolerances INNER_TIGHTENING times tighter than the
    outer one, with the relative tolerance floored at MIN_INNER_REL_TOL. An
    inner range that stops short of the tighter target is accepted when its
    error estimate still meets the outer one.
    """
    if not bounds:
        raise ValueError("integrate needs at least one range")
    inner_spec = replace(
        spec,
        abs_tol=spec.abs_tol / INNER_TIGHTENING,
        rel_tol=max(spec.rel_tol / INNER_TIGHTENING, MIN_INNER_REL_TOL),
    )

    def resolve(bound: Bound, outer: Tuple[float, ...]) -> float:
        return float(bound(*outer)) if callable(bound) else float(bound)

    def nested(depth: int, outer: Tuple[float, ...]) -> Tuple[float, float]:
        lower = resolve(bounds[depth][0], outer)
        upper = resolve(bounds[depth][1], outer)
        level_spec = spec if depth == 0 else inner_spec
        if depth == len(bounds) - 1:
            return integrate_1d(lambda x: f(*outer, x), lower, upper, level_spec)

        inner_errors = [0.0]

        def inner(x: float) -> float:
            try:
                value, error = nested(depth + 1, outer + (x,))
            except MaxSubdivisions as e:
                if not e.error <= max(spec.abs_tol, spec.rel_tol * abs(e.value)):
                    raise
                logger.debug(f"inner range at {outer + (x,)} kept at the outer tolerance: {e}")
                value, error = e.value, e.error
            inner_errors[0] = max(inner_errors[0], error)
            return value

        value, error = integrate_1d(inner, lower, upper, level_spec)
        return value, error + inner_errors[0]

    return nested(0, ())
