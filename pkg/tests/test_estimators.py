import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from wishart_lab.distributions import make_distribution
from wishart_lab.errors import DuplicateSamples
from wishart_lab.estimators import (DataMatrixSource, GaussianHollowSource, McConfig,
                                    WishartSource, block_size, draw_replicas,
                                    estimate_statistic, knn_entropy, lemma1_residual,
                                    per_sample, projected_rel_entropy, sample_statistic,
                                    tail_curve, tv_lower_bound)
from wishart_lab.rng import RngStream
from wishart_lab.spectra import cubic_trace, lambda_min_floored, orthonormal_rows

GAUSS = make_distribution("gaussian")
UNIF = make_distribution("uniform")


def test_mc_config_validation():
    with pytest.raises(ValueError):
        McConfig(0)
    with pytest.raises(ValueError):
        McConfig(5, workers=0)


def test_zero_statistic():
    e = estimate_statistic(GaussianHollowSource(3), lambda b: np.zeros(len(b)), McConfig(100, 1))
    assert (e.mean, e.variance, e.stderr, e.count) == (0.0, 0.0, 0.0, 100)


def test_needs_two_replicas():
    with pytest.raises(ValueError):
        estimate_statistic(GaussianHollowSource(3), cubic_trace, McConfig(1, 1))


def test_gaussian_cubic_trace_moments():
    e = estimate_statistic(GaussianHollowSource(3), cubic_trace, McConfig(10 ** 5, 21))
    assert abs(e.mean) < 5 * e.stderr
    assert e.variance == pytest.approx(36, rel=0.05)
    assert e.stderr == pytest.approx(math.sqrt(e.variance / e.count))


def test_estimate_matches_sample_statistic():
    cfg = McConfig(5000, 8)
    src = WishartSource(UNIF, 3, 8)
    vals = sample_statistic(src, cubic_trace, cfg)
    e = estimate_statistic(src, cubic_trace, cfg)
    assert e.mean == pytest.approx(vals.mean(), rel=1e-12)
    assert e.variance == pytest.approx(vals.var(ddof=1), rel=1e-10)


@pytest.mark.parametrize("workers", [2, 8])
def test_worker_invariance(workers):
    src = WishartSource(GAUSS, 4, 5)
    base = McConfig(5000, 3, 1)
    other = McConfig(5000, 3, workers)
    assert block_size(src) < 5000
    assert estimate_statistic(src, cubic_trace, base) == estimate_statistic(src, cubic_trace,
                                                                             other)
    np.testing.assert_array_equal(sample_statistic(src, cubic_trace, base),
                                  sample_statistic(src, cubic_trace, other))


def test_replica_k_uses_stream_k():
    src = DataMatrixSource(GAUSS, 2, 3)
    xs = draw_replicas(src, McConfig(3000, 17))
    for k in (0, 1, 2047, 2048, 2999):
        np.testing.assert_array_equal(xs[k],
                                      RngStream(17, k).generator.standard_normal((2, 3)))


def test_per_sample_wrapper():
    vals = sample_statistic(GaussianHollowSource(4), per_sample(lambda m: float(np.trace(m @ m))),
                            McConfig(50, 2))
    assert vals.shape == (50,) and np.all(vals > 0)


def test_tv_examples():
    x = np.random.default_rng(0).standard_normal(1000)
    assert tv_lower_bound(x, x) == 0.0
    assert tv_lower_bound([1.0, 2.0, 3.0], [5.0, 6.0]) == 1.0
    with pytest.raises(ValueError):
        tv_lower_bound([], [1.0])


def test_tv_gaussian_shift():
    rng = np.random.default_rng(1)
    tv = tv_lower_bound(rng.standard_normal(10 ** 5), 2 + rng.standard_normal(10 ** 5))
    assert tv == pytest.approx(2 * norm.cdf(1) - 1, abs=0.01)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=40),
       st.lists(st.floats(-100, 100), min_size=1, max_size=40))
def test_tv_symmetric_bounded(p, q):
    a, b = tv_lower_bound(p, q), tv_lower_bound(q, p)
    assert a == b
    assert 0.0 <= a <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=30),
       st.lists(st.integers(-5, 5), min_size=1, max_size=30))
def test_tv_brute_force(p, q):
    # oracle: every threshold strictly between integers, plus both ends
    taus = np.arange(-6, 6) + 0.5
    brute = max(abs(np.mean(np.array(p) > t) - np.mean(np.array(q) > t)) for t in taus)
    assert tv_lower_bound(p, q) == pytest.approx(brute, abs=1e-12)


def test_knn_examples():
    rng = np.random.default_rng(2)
    assert knn_entropy(rng.random(10 ** 5)) == pytest.approx(0.0, abs=0.02)
    x = rng.standard_normal(10 ** 5)
    assert knn_entropy(x) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=0.02)
    assert knn_entropy(3 * x) - knn_entropy(x) == pytest.approx(math.log(3), abs=0.03)


def test_knn_errors():
    with pytest.raises(DuplicateSamples):
        knn_entropy(np.repeat(np.arange(100.0), 2))
    with pytest.raises(ValueError):
        knn_entropy(np.zeros((10, 5)))
    with pytest.raises(ValueError):
        knn_entropy(np.arange(4.0), k_neighbors=4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_knn_orthonormal_projection_of_gaussian(n):
    A = orthonormal_rows(np.random.default_rng(n).standard_normal((n, 6)))
    y = draw_replicas(DataMatrixSource(GAUSS, None, 6), McConfig(40000, 4)) @ A.T
    assert knn_entropy(y) == pytest.approx(n * 0.5 * math.log(2 * math.pi * math.e),
                                           abs=0.03 * n)


def test_projected_rel_entropy_gaussian_is_zero():
    A = orthonormal_rows(np.random.default_rng(0).standard_normal((2, 8)))
    assert abs(projected_rel_entropy(A, GAUSS, McConfig(20000, 6))) < 0.03


def test_lemma1_residual_examples():
    cfg = McConfig(20000, 10)
    A = np.array([[0.6, 0.8], [-0.8, 0.6]])
    assert abs(lemma1_residual(A, UNIF, cfg)) < 0.05
    assert abs(lemma1_residual(2 * np.array([[0.6, 0.8]]), GAUSS, cfg)) < 0.05
    assert abs(lemma1_residual(np.array([[1.0, 1.0]]), UNIF, cfg)) < 0.05
    assert abs(lemma1_residual(np.array([[1.0, 0.5, 0.0], [0.2, 1.0, 1.0]]), UNIF, cfg)) < 0.05
    with pytest.raises(ValueError):
        lemma1_residual(np.eye(3), GAUSS, cfg)


def test_tail_curve_extremes():
    src = GaussianHollowSource(3)
    stat = lambda b: b[:, 0, 1]
    curve = tail_curve(src, stat, [-50.0, -40.0], McConfig(1000, 3))
    np.testing.assert_array_equal(curve.probabilities, 0.0)
    curve = tail_curve(src, stat, [40.0, 50.0], McConfig(1000, 3))
    np.testing.assert_array_equal(curve.probabilities, 1.0)
    with pytest.raises(ValueError):
        tail_curve(src, stat, [1.0, 0.0], McConfig(10, 3))


def test_tail_curve_lambda_min_concentration():
    curve = tail_curve(DataMatrixSource(GAUSS, 2, 200), lambda_min_floored, [0.05, 0.5, 0.9, 1.0],
                       McConfig(10 ** 4, 5))
    assert curve.probabilities[1] < 0.01
    assert np.all(np.diff(curve.probabilities) >= 0)
    assert curve.probabilities[-1] > 0.5
