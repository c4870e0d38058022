"""
Tests for exact Yrast sampling and Monte Carlo averages
"""
import logging

import numpy as np
import pytest
from scipy import stats

from relcoulomb.errors import EmptyBatch, UnsupportedState
from relcoulomb.expectations import yrast_expectations
from relcoulomb.numerics.sampling import mc_expectation, observables, sample_yrast
from relcoulomb.phasespace import two_s_density, yrast_density
from relcoulomb.spectrum import Coupling

logger = logging.getLogger(__name__)

SEED = 20050101


def test_same_seed_same_batch_for_any_worker_count():
    sd = yrast_density(2, Coupling(0.2))
    single = sample_yrast(sd, 5000, SEED, workers=1, block_size=1024)
    threaded = sample_yrast(sd, 5000, SEED, workers=4, block_size=1024)
    for column in ("r", "theta", "phi", "R", "mu", "nu"):
        np.testing.assert_array_equal(getattr(single, column), getattr(threaded, column))


def test_different_seeds_differ():
    sd = yrast_density(1, Coupling(0.2))
    a = sample_yrast(sd, 100, SEED)
    b = sample_yrast(sd, 100, SEED + 1)
    assert not np.array_equal(a.R, b.R)


def test_batch_shapes_and_chart_limits():
    sd = yrast_density(1, Coupling(0.2))
    batch = sample_yrast(sd, 3000, SEED, block_size=1000)
    assert len(batch) == 3000
    assert np.all((batch.r > 0) & (batch.r < batch.R))
    assert np.all((batch.mu >= 0) & (batch.mu <= np.pi))
    assert batch.phase_points().position.shape == (3000, 3)
    assert len(batch.points) == 3000


def test_scale_follows_gamma_law():
    sd = yrast_density(1, Coupling(0.1))
    batch = sample_yrast(sd, 100_000, SEED)
    beta = sd.components[0].beta
    result = stats.kstest(batch.R, "gamma", args=(5.0 + 4.0 * sd.ell, 0.0, 1.0 / beta))
    assert result.pvalue > 0.01


def test_radius_fraction_follows_beta_law():
    sd = yrast_density(1, Coupling(0.1))
    batch = sample_yrast(sd, 100_000, SEED)
    result = stats.kstest(batch.r / batch.R, "beta", args=(3.0 + 2.0 * sd.ell, 2.0 + 2.0 * sd.ell))
    assert result.pvalue > 0.01


def test_signed_densities_cannot_be_sampled():
    with pytest.raises(UnsupportedState):
        sample_yrast(two_s_density(Coupling(0.2), "A"), 10, SEED)


def test_empty_batch():
    batch = sample_yrast(yrast_density(1, Coupling(0.2)), 0, SEED)
    with pytest.raises(EmptyBatch):
        mc_expectation(batch, observables(batch.state)["inv_r"])


def test_single_batch_has_no_error_estimate():
    batch = sample_yrast(yrast_density(1, Coupling(0.2)), 1, SEED)
    _, stderr = mc_expectation(batch, observables(batch.state)["one"])
    assert stderr == float("inf")


@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 2])
def test_sampled_averages_match_closed_forms(n):
    coupling = Coupling(0.1)
    sd = yrast_density(n, coupling)
    batch = sample_yrast(sd, 1_000_000, SEED)
    table = yrast_expectations(n, coupling)
    pairs = {
        "inv_r": table.inv_r,
        "inv_r2": table.inv_r2,
        "inv_R": table.inv_R,
        "inv_R2": table.inv_R2,
        "pr2_separated": table.pr2,
        "L2_over_r2_separated": table.L2_over_r2,
    }
    if n == 1:
        # 1/r^2 has no finite variance for the s level
        del pairs["inv_r2"]
    funcs = observables(sd)
    for name, expected in pairs.items():
        mean, stderr = mc_expectation(batch, funcs[name])
        logger.info(f"{name}: {mean:.6g} +- {stderr:.2g} (exact {expected:.6g})")
        assert abs(mean - expected) <= 3.0 * stderr


@pytest.mark.slow
def test_sampled_orbit_energy_close_to_level():
    sd = yrast_density(1, Coupling(0.1))
    batch = sample_yrast(sd, 50_000, SEED)
    mean, _ = mc_expectation(batch, observables(sd)["energy"])
    assert mean == pytest.approx(sd.energy, abs=1e-4)
