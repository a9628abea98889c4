import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import integrate, kde_triples, npdf, quad_inner
from pseudomix.errors import DomainError
from pseudomix.gmx import Component
from pseudomix.kde import (
    KernelEstimate,
    bandwidth_default,
    kde_component_inner,
    kde_l2_norm_sq,
    kde_logpdf,
    kde_sup_norm,
    read_sample,
    write_sample,
)


def test_bandwidth_two_points():
    # population sd = 1; quartiles -0.5, 0.5 so IQR/1.34 < sd
    expected = 0.9 * (1.0 / 1.34) * 2 ** -0.2
    assert bandwidth_default([-1.0, 1.0]) == pytest.approx(expected, rel=1e-14)


def test_bandwidth_normal_sample():
    y = np.random.default_rng(2024).standard_normal(10000)
    h = bandwidth_default(y)
    assert 0.14 < h < 0.20
    assert h == pytest.approx(0.9 * min(y.std(), np.subtract(*np.percentile(y, [75, 25])) / 1.34) * 10000 ** -0.2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100))
def test_bandwidth_scale_equivariant(c):
    y = np.random.default_rng(5).normal(size=200)
    assert bandwidth_default(c * y) == pytest.approx(c * bandwidth_default(y), rel=1e-12)


def test_bandwidth_zero_spread():
    with pytest.raises(DomainError):
        bandwidth_default([3.0, 3.0, 3.0])
    with pytest.raises(DomainError):
        bandwidth_default([1.0])


def test_bandwidth_zero_iqr_falls_back_to_sd():
    y = [0.0] * 9 + [10.0]
    assert bandwidth_default(y) == pytest.approx(0.9 * np.std(y) * 10 ** -0.2)


def test_kernel_estimate_validation():
    with pytest.raises(DomainError):
        KernelEstimate([0.0])
    with pytest.raises(DomainError):
        KernelEstimate([0.0, math.nan], 1.0)
    with pytest.raises(DomainError):
        KernelEstimate([0.0, 1.0], -1.0)
    e = KernelEstimate([0.0, 1.0], 0.5)
    with pytest.raises(ValueError):
        e.sample[0] = 3.0


def test_kde_logpdf_examples():
    assert kde_logpdf(KernelEstimate([0, 0], 1.0), 0.0) == pytest.approx(-0.91893853320, abs=1e-11)
    assert kde_logpdf(KernelEstimate([-1, 1], 1.0), 0.0) == pytest.approx(-1.41893853320, abs=1e-11)


def test_kde_logpdf_direct_sum(rng):
    for _ in range(50):
        y = rng.normal(0, 2, size=rng.integers(2, 30))
        h = rng.uniform(0.1, 2)
        x = rng.normal(0, 3)
        direct = np.mean([npdf(x, t, h) for t in y])
        assert kde_logpdf(KernelEstimate(y, h), x) == pytest.approx(math.log(direct), abs=1e-12)


def test_kde_integrates_to_one(rng):
    y = rng.normal(0, 1, size=40)
    e = KernelEstimate(y)
    h = e.bandwidth
    total = integrate(lambda x: math.exp(kde_logpdf(e, x)), [y.min() - 10 * h, y.max() + 10 * h], [h, h])
    assert total == pytest.approx(1.0, abs=1e-6)


def test_kde_component_inner_examples():
    assert kde_component_inner(KernelEstimate([0, 0], 1.0), Component(0, 1)) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-12)
    e = KernelEstimate([-2, 2], 0.5)
    ref = quad_inner(kde_triples([-2, 2], 0.5), [(1.0, 0.0, 1.0)])
    assert kde_component_inner(e, Component(0, 1)) == pytest.approx(ref, abs=1e-12)
    assert kde_component_inner(e, Component(0, 1)) == pytest.approx(0.07204168934430732, abs=1e-13)


def test_kde_component_inner_quadrature(rng):
    for _ in range(20):
        y = rng.normal(0, 2, size=rng.integers(2, 8))
        h = rng.uniform(0.2, 1.5)
        c = Component(rng.normal(0, 2), rng.uniform(0.2, 2))
        ref = quad_inner(kde_triples(y, h), [(1.0, c.mu, c.sigma)])
        assert kde_component_inner(KernelEstimate(y, h), c) == pytest.approx(ref, abs=1e-10)


def test_kde_l2_norm_examples():
    assert kde_l2_norm_sq(KernelEstimate([0, 0], 1.0)) == pytest.approx(0.28209479, abs=1e-8)
    e = KernelEstimate([-1, 1], 1.0)
    hand = 0.25 * (2 / math.sqrt(4 * math.pi) + 2 * math.exp(-1) / math.sqrt(4 * math.pi))
    assert kde_l2_norm_sq(e) == pytest.approx(hand, rel=1e-14)
    ref = quad_inner(kde_triples([-1, 1], 1.0), kde_triples([-1, 1], 1.0))
    assert kde_l2_norm_sq(e) == pytest.approx(ref, abs=1e-12)


def test_kde_l2_norm_quadrature(rng):
    for _ in range(10):
        y = rng.normal(0, 2, size=rng.integers(2, 6))
        h = rng.uniform(0.2, 1.5)
        e = KernelEstimate(y, h)
        ref = quad_inner(kde_triples(y, h), kde_triples(y, h))
        assert kde_l2_norm_sq(e) == pytest.approx(ref, abs=1e-10)
        assert e.l2_norm_sq == kde_l2_norm_sq(e)


def test_sup_norm_examples():
    assert kde_sup_norm(KernelEstimate([0, 0], 1.0)) == pytest.approx(0.39894228, abs=1e-8)
    assert kde_sup_norm(KernelEstimate([-10, 10], 1.0)) == pytest.approx(0.19947114, abs=1e-8)


def test_sup_norm_sandwich(rng):
    for _ in range(30):
        y = rng.normal(0, 2, size=rng.integers(2, 60))
        e = KernelEstimate(y)
        at_points = np.exp(kde_logpdf(e, y)).max()
        sup = kde_sup_norm(e)
        assert at_points <= sup * (1 + 1e-12)
        assert sup <= 1 / (math.sqrt(2 * math.pi) * e.bandwidth) * (1 + 1e-12)


def test_sup_norm_dense_grid(rng):
    y = rng.normal(0, 1, size=25)
    e = KernelEstimate(y, 0.4)
    grid = np.linspace(y.min() - 1, y.max() + 1, 200001)
    dense = np.exp(kde_logpdf(e, grid)).max()
    assert kde_sup_norm(e) == pytest.approx(dense, rel=1e-6)


def test_sample_file_round_trip(tmp_path):
    path = tmp_path / "data.txt"
    values = [0.1, -2.5, 1e-17, 3.0]
    write_sample(path, values, header=["made by test"])
    text = path.read_text()
    assert text.startswith("# made by test\n")
    np.testing.assert_array_equal(read_sample(path), values)


def test_read_sample_skips_comments_and_blanks(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("# header\n1.5\n\n  # indented comment\n-2\n")
    np.testing.assert_array_equal(read_sample(path), [1.5, -2.0])


@pytest.mark.parametrize("bad", ["abc\n", "1.0\ninf\n", "nan\n"])
def test_read_sample_rejects_garbage(tmp_path, bad):
    path = tmp_path / "d.txt"
    path.write_text(bad)
    with pytest.raises(DomainError):
        read_sample(path)
