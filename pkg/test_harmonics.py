"""
Tests for the orientation factors of the 2p level
"""
import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relcoulomb.errors import DomainError, UnsupportedState
from relcoulomb.harmonics import (
    AngularFactor,
    angular_momentum_moments,
    calY,
    lhat,
    nu_average,
    nu_average_lz,
    polarized_density,
    ylm_squared,
)
from relcoulomb.phasespace import ChartPoint, chart_to_phase, density_eval, yrast_density
from relcoulomb.spectrum import Coupling

logger = logging.getLogger(__name__)

angles = st.floats(min_value=0.0, max_value=2.0 * math.pi)


@given(theta=st.floats(min_value=0.0, max_value=math.pi), phi=angles, nu=angles)
def test_factors_sum_to_isotropic_value(theta, phi, nu):
    direction = lhat(theta, phi, nu)
    total = sum(calY(AngularFactor(m), direction) for m in (-1, 0, 1))
    assert total == pytest.approx(3.0 / (4.0 * math.pi), abs=1e-14)


@given(theta=st.floats(min_value=0.0, max_value=math.pi), phi=angles, nu=angles)
def test_lhat_is_unit_and_transverse(theta, phi, nu):
    direction = lhat(theta, phi, nu)
    position = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    assert np.linalg.norm(direction) == pytest.approx(1.0, abs=1e-14)
    assert direction @ position == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("m", [-1, 0, 1])
@pytest.mark.parametrize("theta", np.linspace(0.0, math.pi, 7))
def test_nu_average_gives_squared_harmonic(m, theta):
    assert nu_average(m, theta) == pytest.approx(ylm_squared(m, theta), abs=1e-12)
    assert nu_average_lz(m, theta) == pytest.approx(3.0 * m / (8.0 * math.pi) * math.sin(theta) ** 2, abs=1e-12)


@pytest.mark.parametrize("m", [-1, 0, 1])
def test_angular_momentum_moments(m):
    lz, lx, ly = angular_momentum_moments(m)
    assert lz == pytest.approx(m, abs=1e-10)
    assert lx == pytest.approx(0.0, abs=1e-10)
    assert ly == pytest.approx(0.0, abs=1e-10)


def test_transverse_mixture_nonnegative_and_m0_signed():
    c = np.linspace(-1.0, 1.0, 201)
    directions = np.stack([np.zeros_like(c), np.sqrt(1.0 - c * c), c], axis=-1)
    transverse = calY(AngularFactor(1), directions) + calY(AngularFactor(-1), directions)
    assert np.all(transverse >= 0)
    assert np.min(calY(AngularFactor(0), directions)) < 0


def test_polarized_density_sums_to_three_times_density():
    sd = yrast_density(2, Coupling(0.2))
    pt = chart_to_phase(ChartPoint(r=2.0, theta=0.8, phi=1.0, R=6.0, mu=1.1, nu=0.4), sd.coupling)
    total = sum(polarized_density(sd, pt, AngularFactor(m)) for m in (-1, 0, 1))
    assert total == pytest.approx(3.0 * density_eval(sd, pt), rel=1e-12)


def test_polarized_density_other_axis():
    sd = yrast_density(2, Coupling(0.2))
    pt = chart_to_phase(ChartPoint(r=2.0, theta=0.8, phi=1.0, R=6.0, mu=1.1, nu=0.4), sd.coupling)
    axis = (1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0))
    total = sum(polarized_density(sd, pt, AngularFactor(m, axis=axis)) for m in (-1, 0, 1))
    assert total == pytest.approx(3.0 * density_eval(sd, pt), rel=1e-12)


def test_polarized_density_only_for_2p():
    sd = yrast_density(1, Coupling(0.2))
    pt = chart_to_phase(ChartPoint(r=1.0, theta=0.8, phi=1.0, R=3.0, mu=1.1, nu=0.4), sd.coupling)
    with pytest.raises(UnsupportedState):
        polarized_density(sd, pt, AngularFactor(0))


def test_angular_factor_validation():
    with pytest.raises(DomainError):
        AngularFactor(2)
    with pytest.raises(DomainError):
        AngularFactor(0, axis=(1.0, 1.0, 0.0))
    with pytest.raises(UnsupportedState):
        AngularFactor(1, parity_form="cubic")
