"""Verification machinery: quadrature, sampling, orbit integration and momentum marginals"""
from relcoulomb.numerics.marginals import (
    FigureRow,
    classical_marginal,
    classical_marginal_from_positions,
    crossings,
    figure_data,
    tail_exponent,
    wigner_marginal,
)
from relcoulomb.numerics.orbits import Trajectory, circular_orbit, orbit_integrate, radial_period
from relcoulomb.numerics.quadrature import QuadratureSpec, integrate
from relcoulomb.numerics.sampling import SampleBatch, mc_expectation, observables, sample_yrast

__all__ = [
    "FigureRow",
    "QuadratureSpec",
    "SampleBatch",
    "Trajectory",
    "circular_orbit",
    "classical_marginal",
    "classical_marginal_from_positions",
    "crossings",
    "figure_data",
    "integrate",
    "mc_expectation",
    "observables",
    "orbit_integrate",
    "radial_period",
    "sample_yrast",
    "tail_exponent",
    "wigner_marginal",
]
