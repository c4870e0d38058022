"""
Tests for the Wigner and classical momentum marginals and the quadrature
checks of the phase-space densities
"""
import logging
import math

import numpy as np
import pytest

from relcoulomb.expectations import yrast_expectations
from relcoulomb.numerics.marginals import (
    FigureRow,
    chart_average,
    classical_marginal,
    classical_marginal_from_positions,
    classical_marginal_slope,
    crossings,
    figure_data,
    momentum_norm,
    quadrature_momentum_marginal,
    tail_exponent,
    wigner_marginal,
)
from relcoulomb.numerics.quadrature import QuadratureSpec, integrate_1d
from relcoulomb.phasespace import DensityKind, make_density, momentum_marginal, two_s_density, yrast_density
from relcoulomb.spectrum import Coupling, effective_ell

logger = logging.getLogger(__name__)

SPEC = QuadratureSpec()
LOOSE = QuadratureSpec(rel_tol=1e-9)


def test_wigner_at_zero():
    assert wigner_marginal(0.0) == pytest.approx(8.0 / math.pi**2, abs=1e-15)
    with pytest.raises(ValueError):
        wigner_marginal(-1.0)


def test_classical_vanishes_at_zero_with_known_slope():
    assert classical_marginal(0.0, SPEC) == 0.0
    h = 1e-5
    assert classical_marginal(h, SPEC) / h == pytest.approx(11.25 / math.pi, abs=1e-6)
    assert classical_marginal_slope() == pytest.approx(11.25 / math.pi)


@pytest.mark.parametrize("p", [0.275, 0.3, 1.0, 1.5, 2.0])
def test_classical_marginal_two_ways(p):
    assert classical_marginal_from_positions(p, LOOSE) == pytest.approx(classical_marginal(p, SPEC), rel=1e-7)


def _scale_integral_by_quadrature(p):
    a = 0.5 * p * p
    value, _ = integrate_1d(
        lambda R: R**6 * math.exp(-2.0 * R) / (1.0 + a * R) ** 5, 0.0, math.inf, QuadratureSpec(abs_tol=1e-30, rel_tol=1e-9)
    )
    return value


@pytest.mark.parametrize(
    "p",
    [math.sqrt(2 * 0.999e-5), math.sqrt(2 * 1.001e-5), 0.01, 0.275, 1.0, 3.0, 10.0, 40.0],
)
def test_classical_marginal_matches_scale_integral(p):
    expected = 2.0 * p / math.pi * _scale_integral_by_quadrature(p)
    assert classical_marginal(p, SPEC) == pytest.approx(expected, rel=1e-8)


def test_classical_marginal_on_a_fine_grid():
    rows = figure_data(np.linspace(0.0, 20.0, 401), SPEC)
    values = np.array([row.classical for row in rows[1:]])
    assert np.all(np.isfinite(values) & (values > 0))


def test_wigner_normalized():
    assert momentum_norm(wigner_marginal, SPEC) == pytest.approx(1.0, abs=1e-10)


def test_classical_normalized():
    assert momentum_norm(lambda p: classical_marginal(p, SPEC), SPEC) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("curve, expected", [("wigner", -8.0), ("classical", -9.0)])
def test_tail_exponents(curve, expected):
    f = wigner_marginal if curve == "wigner" else (lambda p: classical_marginal(p, SPEC))
    assert tail_exponent(f, 10.0, 100.0) == pytest.approx(expected, abs=0.05)


def test_tail_exponent_of_known_power():
    assert tail_exponent(lambda p: p**-3 * (1.0 + p**-2), 10.0, 100.0) == pytest.approx(-3.0, abs=1e-4)
    with pytest.raises(ValueError):
        tail_exponent(wigner_marginal, 10.0, 1.0)


def test_figure_rows():
    rows = figure_data([0.0, 0.5, 1.0], SPEC)
    assert rows[0] == FigureRow(p=0.0, wigner=8.0 / math.pi**2, classical=0.0)
    assert all(row.classical > 0 for row in rows[1:])
    with pytest.raises(ValueError):
        figure_data([1.0, 0.5], SPEC)
    with pytest.raises(ValueError):
        figure_data([-0.5, 0.5], SPEC)


def test_crossings_linear_interpolation():
    rows = [FigureRow(0.0, 1.0, 0.0), FigureRow(1.0, 0.0, 1.0), FigureRow(2.0, 0.0, 1.0), FigureRow(3.0, 2.0, 0.0)]
    np.testing.assert_allclose(crossings(rows), [0.5, 7.0 / 3.0])


def test_curves_cross_four_times_below_five():
    rows = figure_data(np.linspace(0.0, 5.0, 501), SPEC)
    found = crossings(rows, SPEC)
    logger.info(f"W and P cross at {found}")
    assert found == pytest.approx([0.3645, 1.0500, 1.4183, 3.0486], abs=2e-3)
    for p in found:
        assert wigner_marginal(p) == pytest.approx(classical_marginal(p, SPEC), rel=1e-8)


@pytest.mark.slow
def test_chart_average_normalization_and_inverse_radius():
    coupling = Coupling(0.2)
    sd = yrast_density(2, coupling)
    assert chart_average(sd, lambda r, R, mu: 1.0, SPEC) == pytest.approx(1.0, rel=1e-8)
    expected = yrast_expectations(2, coupling).inv_r
    assert chart_average(sd, lambda r, R, mu: 1.0 / r, SPEC) == pytest.approx(expected, rel=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["A", "B"])
def test_quadrature_marginal_matches_closed_form(variant):
    sd = two_s_density(Coupling(0.2), variant)
    for r in (0.5, 1.0, 3.0, 5.0):
        assert quadrature_momentum_marginal(sd, r, SPEC) == pytest.approx(momentum_marginal(sd, r), rel=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["A", "B"])
def test_quadrature_marginal_through_the_two_s_node(variant):
    sd = two_s_density(Coupling(0.2), variant)
    radii = np.linspace(0.5, 5.0, 10)
    expected = momentum_marginal(sd, radii)
    peak = float(np.max(np.abs(expected)))
    for r, value in zip(radii, expected):
        assert quadrature_momentum_marginal(sd, float(r), SPEC) == pytest.approx(value, abs=1e-8 * peak)


@pytest.mark.slow
@pytest.mark.parametrize(
    "kind, n, lam",
    [("yrast", 1, 0.0), ("yrast", 2, 0.0), ("yrast", 3, 0.0), ("2s-a", 2, 0.0), ("2s-b", 2, 0.0), ("2s-mix", 2, 0.5)],
)
def test_chart_average_normalizes_every_density(kind, n, lam):
    sd = make_density(DensityKind(kind), Coupling(0.2), n=n, lam=lam)
    assert chart_average(sd, lambda r, R, mu: 1.0, SPEC) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["A", "B"])
def test_two_s_inverse_radii_by_quadrature(variant):
    coupling = Coupling(0.2)
    sd = two_s_density(coupling, variant)
    ell = effective_ell(0, coupling)
    inv_r = 1.0 / ((2.0 + ell) * math.sqrt(4.0 + 3.0 * ell))
    assert chart_average(sd, lambda r, R, mu: 1.0 / r, SPEC) == pytest.approx(inv_r, rel=1e-8)
    assert chart_average(sd, lambda r, R, mu: 1.0 / R, SPEC) == pytest.approx(0.5 * inv_r, rel=1e-8)
