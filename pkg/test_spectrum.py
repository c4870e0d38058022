"""
Tests for the level formula, the effective angular momentum and the radial states
"""
import logging
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relcoulomb.errors import DegenerateCoupling, DomainError, GridOutOfDomain, OutOfRange, UnsupportedState
from relcoulomb.numerics.quadrature import QuadratureSpec, integrate_1d
from relcoulomb.spectrum import (
    Coupling,
    QuantumNumbers,
    RadialKind,
    atomic_units,
    coupling_from_energy,
    effective_ell,
    ground_state,
    level_energy,
    radial_state,
    radial_wavefunction,
    schrodinger_residual,
    series_energy,
    two_s_state,
)

logger = logging.getLogger(__name__)

SPEC = QuadratureSpec()


@pytest.mark.parametrize("alpha_z", [0.05, 0.1, 0.2, 0.3])
@pytest.mark.parametrize("l", range(6))
def test_effective_ell_identity(alpha_z, l):
    coupling = Coupling(alpha_z)
    ell = Fraction(effective_ell(l, coupling))
    residual = ell * (ell + 1) + Fraction(coupling.strength) - l * (l + 1)
    assert abs(float(residual)) <= 1e-14


def test_effective_ell_without_coupling_is_l():
    for l in range(5):
        assert effective_ell(l, Coupling(0.0)) == l


def test_ground_energy_value():
    assert level_energy(QuantumNumbers(1, 0), Coupling(0.2)) == pytest.approx(0.9789063, abs=5e-8)


@pytest.mark.parametrize("alpha_z", [0.05, 0.1, 0.2, 0.3])
def test_ground_energy_square(alpha_z):
    coupling = Coupling(alpha_z)
    E = level_energy(QuantumNumbers(1, 0), coupling)
    assert abs(E * E - (1.0 + effective_ell(0, coupling))) <= 1e-14


def test_two_s_energy_closed_form():
    coupling = Coupling(0.3)
    ell = effective_ell(0, coupling)
    expected = (2.0 + ell) / math.sqrt(4.0 + 3.0 * ell)
    assert level_energy(QuantumNumbers(2, 0), coupling) == pytest.approx(expected, rel=1e-14)


def test_all_levels_at_rest_without_coupling():
    for n in range(1, 4):
        for l in range(n):
            assert level_energy(QuantumNumbers(n, l), Coupling(0.0)) == 1.0


def test_fall_to_center_rejected():
    with pytest.raises(DegenerateCoupling):
        level_energy(QuantumNumbers(1, 0), Coupling(0.6))
    # the p levels survive up to alpha Z = 3/2
    assert 0 < level_energy(QuantumNumbers(2, 1), Coupling(0.6)) < 1


@pytest.mark.parametrize(
    "n, l",
    [(0, 0), (2, 2), (1, -1)],
)
def test_invalid_quantum_numbers(n, l):
    with pytest.raises(OutOfRange):
        QuantumNumbers(n, l)


def test_negative_coupling_rejected():
    with pytest.raises(DomainError):
        Coupling(-0.1)


@settings(max_examples=60, deadline=None)
@given(
    alpha_z=st.floats(min_value=0.01, max_value=0.45),
    n=st.integers(min_value=1, max_value=4),
    data=st.data(),
)
def test_coupling_round_trip(alpha_z, n, data):
    l = data.draw(st.integers(min_value=0, max_value=n - 1))
    qn = QuantumNumbers(n, l)
    coupling = Coupling(alpha_z)
    recovered = coupling_from_energy(qn, level_energy(qn, coupling))
    assert recovered == pytest.approx(coupling.strength, rel=1e-10)


def test_coupling_round_trip_3d():
    qn = QuantumNumbers(3, 2)
    coupling = Coupling(0.3)
    assert coupling_from_energy(qn, level_energy(qn, coupling)) == pytest.approx(0.09, rel=1e-12)


def test_coupling_from_energy_out_of_range():
    with pytest.raises(OutOfRange):
        coupling_from_energy(QuantumNumbers(1, 0), 1.0)
    # below the fall-to-center threshold of the s level
    with pytest.raises(OutOfRange):
        coupling_from_energy(QuantumNumbers(1, 0), 0.5)


def test_series_energy_error_is_sixth_order():
    qn = QuantumNumbers(2, 1)
    gaps = [abs(level_energy(qn, Coupling(a)) - series_energy(qn, Coupling(a))) for a in (0.1, 0.05)]
    assert 32 < gaps[0] / gaps[1] < 128


@pytest.mark.parametrize(
    "n, l, alpha_z, grid",
    [
        (1, 0, 0.2, [0.5, 1.0, 2.0, 4.0]),
        (2, 1, 0.2, [0.5, 1.0, 2.0, 4.0]),
        (3, 2, 0.1, [0.5, 1.0, 2.0, 4.0, 8.0]),
        (2, 0, 0.15, [0.5, 1.0, 3.0, 4.0, 8.0]),
    ],
)
def test_schrodinger_residual(n, l, alpha_z, grid):
    state = radial_state(QuantumNumbers(n, l), Coupling(alpha_z))
    assert schrodinger_residual(state, grid) <= 1e-10


def test_schrodinger_residual_grid_must_avoid_origin():
    with pytest.raises(GridOutOfDomain):
        schrodinger_residual(ground_state(Coupling(0.2)), [0.0, 1.0])


@pytest.mark.parametrize("n, l", [(1, 0), (2, 1), (3, 2), (2, 0)])
def test_radial_state_normalized(n, l):
    state = radial_state(QuantumNumbers(n, l), Coupling(0.2))
    value, _ = integrate_1d(
        lambda r: r * r * radial_wavefunction(state, r) ** 2, 0.0, math.inf, SPEC.with_scale(0.5 / state.decay)
    )
    assert value == pytest.approx(1.0, rel=1e-10)


def test_two_s_orthogonal_to_ground_in_scaled_radius():
    coupling = Coupling(0.2)
    ground, two_s = ground_state(coupling), two_s_state(coupling)

    def overlap(x):
        return x * x * radial_wavefunction(two_s, x / two_s.energy) * radial_wavefunction(ground, x / ground.energy)

    value, _ = integrate_1d(overlap, 0.0, math.inf, SPEC)
    assert abs(value) <= 1e-8


def test_radial_state_kinds():
    coupling = Coupling(0.2)
    assert radial_state(QuantumNumbers(1, 0), coupling).kind is RadialKind.GROUND
    assert radial_state(QuantumNumbers(3, 2), coupling).kind is RadialKind.YRAST
    assert radial_state(QuantumNumbers(2, 0), coupling).kind is RadialKind.TWO_S
    with pytest.raises(UnsupportedState):
        radial_state(QuantumNumbers(3, 1), coupling)


def test_two_s_node_position():
    state = two_s_state(Coupling(0.2))
    node = (1.0 + state.ell) * (2.0 + state.ell) / state.energy
    assert radial_wavefunction(state, node) == pytest.approx(0.0, abs=1e-14)
    assert radial_wavefunction(state, 0.5 * node) > 0 > radial_wavefunction(state, 2.0 * node)


def test_wavefunction_at_origin():
    assert radial_wavefunction(ground_state(Coupling(0.2)), 0.0) == math.inf
    assert radial_wavefunction(ground_state(Coupling(0.0)), 0.0) == pytest.approx(2.0)
    assert radial_wavefunction(radial_state(QuantumNumbers(2, 1), Coupling(0.2)), 0.0) == 0.0


def test_wavefunction_vectorized_and_checked():
    state = ground_state(Coupling(0.1))
    r = np.linspace(0.1, 5.0, 7)
    values = radial_wavefunction(state, r)
    assert values.shape == r.shape
    np.testing.assert_allclose(values, [radial_wavefunction(state, x) for x in r], rtol=1e-15)
    with pytest.raises(DomainError):
        radial_wavefunction(state, -1.0)


def test_atomic_units_hydrogen():
    units = atomic_units(1.0)
    assert units.bohr_radius_m == pytest.approx(5.29177210903e-11, rel=1e-8)
    assert units.rest_energy_mev == pytest.approx(0.51099895, rel=1e-7)
    assert atomic_units(2.0).bohr_time_s == pytest.approx(units.bohr_time_s / 4.0)
