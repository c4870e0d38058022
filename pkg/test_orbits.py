"""
Tests for orbit integration
"""
import logging
import math

import numpy as np
import pytest

from relcoulomb.errors import Collision, DomainError
from relcoulomb.numerics.orbits import circular_orbit, orbit_integrate, radial_period
from relcoulomb.phasespace import ChartPoint, chart_to_phase, density_eval, orbital_elements, yrast_density
from relcoulomb.spectrum import Coupling

logger = logging.getLogger(__name__)


def _start(coupling, mu=1.0):
    return chart_to_phase(ChartPoint(r=1.0, theta=0.5 * math.pi, phi=0.0, R=3.0, mu=mu, nu=0.3), coupling)


def test_circular_orbit_keeps_its_radius():
    coupling = Coupling(0.2)
    start = circular_orbit(1.0, coupling)
    elements = orbital_elements(start, coupling)
    trajectory = orbit_integrate(start, coupling, 3 * radial_period(elements, coupling), samples=301)
    radii = np.linalg.norm(trajectory.positions, axis=-1)
    np.testing.assert_allclose(radii, 1.0, atol=1e-8)


def test_generic_orbit_conserves_energy_and_angular_momentum():
    coupling = Coupling(0.2)
    start = _start(coupling)
    elements = orbital_elements(start, coupling)
    trajectory = orbit_integrate(start, coupling, 5 * radial_period(elements, coupling), samples=501)
    assert len(trajectory) == 501
    assert trajectory.energy_drift <= 1e-10
    assert trajectory.angmom_drift <= 1e-10


def test_orbit_stays_in_its_plane():
    coupling = Coupling(0.2)
    start = _start(coupling)
    trajectory = orbit_integrate(start, coupling, 2 * radial_period(orbital_elements(start, coupling), coupling))
    normal = np.cross(start.position, start.momentum)
    np.testing.assert_allclose(trajectory.positions @ normal, 0.0, atol=1e-9)


def test_drift_shrinks_with_tolerance():
    coupling = Coupling(0.3)
    start = _start(coupling, mu=0.5)
    t_end = 5 * radial_period(orbital_elements(start, coupling), coupling)
    loose = orbit_integrate(start, coupling, t_end, tol=1e-7)
    tight = orbit_integrate(start, coupling, t_end, tol=1e-10)
    assert tight.energy_drift < loose.energy_drift


def test_radial_infall_collides():
    coupling = Coupling(0.2)
    # mu = 0 puts omega L at zero: the orbit spirals into the centre
    start = _start(coupling, mu=0.0)
    with pytest.raises(Collision):
        orbit_integrate(start, coupling, 5 * radial_period(orbital_elements(start, coupling), coupling), r_min=1e-3)


def test_no_dynamics_without_coupling():
    start = circular_orbit(1.0, Coupling(0.0))
    with pytest.raises(DomainError):
        orbit_integrate(start, Coupling(0.0), 1.0)
    with pytest.raises(DomainError):
        orbit_integrate(start, Coupling(0.2), -1.0)


@pytest.mark.slow
def test_density_stationary_along_long_orbit():
    coupling = Coupling(0.2)
    start = _start(coupling)
    elements = orbital_elements(start, coupling)
    trajectory = orbit_integrate(start, coupling, 100 * radial_period(elements, coupling), tol=1e-12)
    density = np.asarray(density_eval(yrast_density(1, coupling), trajectory.points))
    assert trajectory.energy_drift <= 1e-9
    assert trajectory.angmom_drift <= 1e-9
    assert np.max(np.abs(density - density[0])) / density[0] <= 1e-9
