import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from wishart_lab.distributions import (Kind, differential_entropy, make_distribution,
                                       parse_distribution, rel_entropy_to_std_gaussian, sample)
from wishart_lab.errors import InvalidDistribution
from wishart_lab.rng import RngStream

LAWS = ["gaussian", "uniform", "laplace", "exponential_power:1.5", "exponential_power:1.2"]


def _quad(dist, fn):
    lo, hi = dist.support
    lo, hi = max(lo, -40.0), min(hi, 40.0)
    pts = [p for p in dist.breakpoints if lo < p < hi]
    edges = [lo, *pts, hi]
    return sum(integrate.quad(fn, a, b, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
               for a, b in zip(edges[:-1], edges[1:]))


@pytest.mark.parametrize("name", LAWS)
def test_standardized_moments_by_quadrature(name):
    dist = parse_distribution(name)
    mass = _quad(dist, dist.pdf)
    mean = _quad(dist, lambda x: x * dist.pdf(x))
    var = _quad(dist, lambda x: x * x * dist.pdf(x))
    m4 = _quad(dist, lambda x: x ** 4 * dist.pdf(x))
    assert mass == pytest.approx(1.0, abs=1e-10)
    assert mean == pytest.approx(0.0, abs=1e-10)
    assert var == pytest.approx(1.0, abs=1e-9)
    assert dist.fourth_moment == pytest.approx(m4, rel=1e-9)


@pytest.mark.parametrize("name", LAWS)
def test_relative_entropy_by_quadrature(name):
    dist = parse_distribution(name)

    def neg_f_log_f(x):
        f = dist.pdf(x)
        return -f * math.log(f) if f > 0 else 0.0

    h = _quad(dist, neg_f_log_f)
    assert differential_entropy(dist) == pytest.approx(h, abs=1e-9)
    assert rel_entropy_to_std_gaussian(dist) == pytest.approx(
        0.5 * math.log(2 * math.pi) + 0.5 - h, abs=1e-9)


def test_closed_form_examples():
    g = make_distribution("gaussian")
    assert g.fourth_moment == 3 and g.rel_ent_gaussian == 0
    u = make_distribution("uniform")
    assert u.support == pytest.approx((-math.sqrt(3), math.sqrt(3)))
    assert u.fourth_moment == pytest.approx(9 / 5)
    assert u.rel_ent_gaussian == pytest.approx(0.5 * math.log(2 * math.pi * math.e / 12))
    assert u.rel_ent_gaussian == pytest.approx(0.17653, abs=1e-4)
    lap = make_distribution("laplace")
    assert lap.scale == pytest.approx(1 / math.sqrt(2))
    assert lap.fourth_moment == pytest.approx(6)
    assert lap.rel_ent_gaussian == pytest.approx(0.07237, abs=1e-5)


@pytest.mark.parametrize("name", LAWS)
def test_cdf_matches_integrated_pdf(name):
    dist = parse_distribution(name)
    for x in (-1.3, -0.2, 0.0, 0.7, 1.6):
        lo = max(dist.support[0], -40.0)
        edges = [lo, *[p for p in dist.breakpoints if lo < p < x], x]
        val = sum(integrate.quad(dist.pdf, a, b, epsabs=1e-13)[0]
                  for a, b in zip(edges[:-1], edges[1:]))
        assert float(dist.cdf(x)) == pytest.approx(val, abs=1e-10)


def test_invalid_distributions():
    with pytest.raises(InvalidDistribution):
        make_distribution("cauchy")
    with pytest.raises(InvalidDistribution):
        parse_distribution("exponential_power:0.5")
    with pytest.raises(InvalidDistribution):
        parse_distribution("exponential_power:3")
    with pytest.raises(InvalidDistribution):
        parse_distribution("gaussian:1")


def test_gaussian_sample_mean():
    x = sample(make_distribution("gaussian"), 10 ** 6, RngStream(11))
    assert abs(x.mean()) < 4 / math.sqrt(10 ** 6)


def test_uniform_sample_support():
    x = sample(make_distribution("uniform"), 10 ** 5, RngStream(12))
    assert np.all(np.abs(x) <= math.sqrt(3))


def test_laplace_sample_fourth_moment():
    x4 = sample(make_distribution("laplace"), 10 ** 6, RngStream(13)) ** 4
    assert abs(x4.mean() - 6) < 5 * x4.std(ddof=1) / math.sqrt(x4.size)


@pytest.mark.parametrize("name", LAWS)
def test_sample_is_standardized(name):
    x = sample(parse_distribution(name), 4 * 10 ** 5, RngStream(14))
    assert abs(x.mean()) < 5 / math.sqrt(x.size)
    assert abs(x.var() - 1) < 5 * np.std(x * x) / math.sqrt(x.size)


def test_sample_reproducible_and_fills_out():
    dist = make_distribution("laplace")
    out = np.empty(1000)
    got = sample(dist, 1000, RngStream(5, 2), out=out)
    assert got is out
    np.testing.assert_array_equal(out, sample(dist, 1000, RngStream(5, 2)))


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 2.0))
def test_exponential_power_family_properties(beta):
    dist = make_distribution(Kind.EXPONENTIAL_POWER, [beta])
    assert 1.0 < dist.fourth_moment <= 6.0 + 1e-9
    assert dist.rel_ent_gaussian >= -1e-12
    assert dist.pdf(0.3) == pytest.approx(dist.pdf(-0.3))
    assert float(dist.cdf(0.0)) == pytest.approx(0.5)
