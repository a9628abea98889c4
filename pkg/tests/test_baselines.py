import math

import numpy as np
import pytest

from pseudomix.baselines import EMConfig, em_fit, l2_distance_arrays, l2_fit
from pseudomix.errors import DomainError
from pseudomix.experiments import default_scenario, sample_mixture
from pseudomix.gmx import MixtureDensity, hausdorff
from pseudomix.kde import KernelEstimate
from pseudomix.optim import OptimizerConfig


def test_em_k1_is_closed_form(rng):
    y = rng.normal(-1, 3, size=400)
    fit = em_fit(y, 1, EMConfig(restarts=1))
    (mu, sig), = fit.theta_hat.as_list()
    assert mu == pytest.approx(y.mean(), rel=1e-12, abs=1e-12)
    assert sig == pytest.approx(y.std(), rel=1e-12)
    assert fit.weights.weights == (1.0,)
    # the first M-step lands on the fixed point
    assert fit.trace[1][1] == pytest.approx(fit.trace[-1][1], abs=1e-12)


def test_em_regression():
    truth = default_scenario().truth
    y = sample_mixture(truth, 5000, 2718)
    fit = em_fit(y, 2, EMConfig(seed=4))
    assert hausdorff(fit.theta_hat, truth.params) <= 0.35
    np.testing.assert_allclose(
        np.ravel(fit.theta_hat.as_list()),
        [-0.016842285428084185, 0.9962726164204122, 3.9922150706952166, 1.961159881646844],
        atol=1e-6,
    )


def test_em_monotone(rng):
    for _ in range(10):
        k = int(rng.integers(1, 4))
        y = np.concatenate([rng.normal(rng.normal(0, 4), rng.uniform(0.3, 2), 80) for _ in range(3)])
        fit = em_fit(y, k, EMConfig(restarts=1, seed=int(rng.integers(1000))))
        lls = [v for _, v in fit.trace]
        assert all(b >= a - 1e-12 for a, b in zip(lls, lls[1:]))
        mus = [c.mu for c in fit.theta_hat]
        assert mus == sorted(mus)


def test_em_rejects_small_samples():
    with pytest.raises(DomainError):
        em_fit([0.0, 1.0], 3)


def test_em_variance_floor():
    y = np.array([0.0, 0.0, 0.0, 1.0, 2.0, 3.0])
    fit = em_fit(y, 2, EMConfig(variance_floor=1e-3, restarts=3))
    assert min(c.sigma for c in fit.theta_hat) >= 1e-3
    assert math.isfinite(fit.objective_value)


def test_l2_single_gaussian(rng):
    y = rng.normal(1, 2, size=1000)
    e = KernelEstimate(y)
    fit = l2_fit(e, 1, OptimizerConfig(starts=2))
    d_hat = -fit.objective_value
    d_truth = l2_distance_arrays(e, np.array([1.0]), np.array([2.0]))[0]
    assert d_hat <= d_truth


def test_l2_recovers_mixture():
    truth = MixtureDensity.from_triples([(0.4, -2.0, 0.7), (0.6, 2.0, 1.0)])
    y = sample_mixture(truth, 20000, 77)
    e = KernelEstimate(y, 0.05)
    fit = l2_fit(e, 2, OptimizerConfig(starts=3, seed=2))
    assert -fit.objective_value < 0.03
    assert -fit.objective_value == pytest.approx(0.018997088677391683, abs=1e-6)  # frozen on first run
    assert hausdorff(fit.theta_hat, truth.params) < 0.1


def test_l2_improves_on_every_start(rng):
    y = np.concatenate([rng.normal(-1, 0.5, 200), rng.normal(2, 1, 200)])
    fit = l2_fit(KernelEstimate(y), 2, OptimizerConfig(starts=4, seed=1))
    for f0, f in zip(fit.start_objectives, fit.final_objectives):
        assert f >= f0
    assert fit.objective_value == max(fit.final_objectives)
    mus = [c.mu for c in fit.theta_hat]
    assert mus == sorted(mus)
