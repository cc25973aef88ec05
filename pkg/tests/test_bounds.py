import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wishart_lab.bounds import (TAIL_BOUNDS, bounds_report, cubic_trace_theory, logdet_bound,
                                main_tv_bound, moment_identities, tail_bound_evaluators,
                                thm2_entropy_bound)
from wishart_lab.errors import ConstantMissing, DomainError


def test_thm2_examples():
    assert thm2_entropy_bound(1.0, 0.0, 3, 10, 2.0 / 2, 0.2) == pytest.approx(3 * 0.2)
    assert thm2_entropy_bound(0.5, 0.5, 1, 2, 1.0, 0.1) == pytest.approx(0.1)
    assert thm2_entropy_bound(0.01, 0.001, 4, 64, 0.5, 0.0) == 0.0
    assert thm2_entropy_bound(0.01, 0.001, 2, 64, 1.0, 1.0) == pytest.approx(
        2 * 2 * (0.01 + 1e-6 * 64))
    with pytest.raises(DomainError):
        thm2_entropy_bound(0.1, 0.1, 1, 2, 0.0, 0.1)


def test_main_tv_bound_examples():
    assert main_tv_bound(1, 100) == pytest.approx(0.1)
    # log 4096 = 12 log 2 exactly; the approximate figure 103.88 rounds this value
    exact = 64 * 2 * math.log(2) * (12 * math.log(2)) ** 4 / 4096 + 0.125
    assert main_tv_bound(4, 4096) == pytest.approx(exact, rel=1e-14)
    assert main_tv_bound(4, 4096) == pytest.approx(103.88, rel=1e-3)
    assert main_tv_bound(2, 50, C=3) == pytest.approx(3 * main_tv_bound(2, 50))


def test_main_tv_bound_decreasing_beyond_e4():
    d = np.unique(np.geomspace(math.exp(4), 1e9, 200).astype(int) + 1)
    for n in (2, 4, 8):
        vals = [main_tv_bound(n, int(x)) for x in d]
        assert np.all(np.diff(vals) < 0)
    assert main_tv_bound(4, 10 ** 30) < 1e-10


def test_cubic_trace_theory_examples():
    assert cubic_trace_theory(2, 9) == (0.0, 0.0, 0.0)
    assert cubic_trace_theory(3, 4) == pytest.approx((3.0, 0.0, 36.0))
    assert cubic_trace_theory(10, 10 ** 6)[0] == pytest.approx(0.72)


def test_logdet_bound_examples():
    assert logdet_bound(1, 1) == pytest.approx(2)
    assert logdet_bound(4, 64) == pytest.approx(0.5)
    assert logdet_bound(4, 10 ** 12) < 1e-5


def test_moment_identities_examples():
    assert moment_identities(2, 100, 3.0)[1] == pytest.approx(0.06)
    assert moment_identities(1, 50, 1.8)[1] == pytest.approx(0.8 / 50)
    assert moment_identities(4, 16, 3.0)[0] == pytest.approx(0.70711, abs=1e-5)
    with pytest.raises(DomainError):
        moment_identities(2, 10, 0.5)


def test_tail_bound_examples():
    assert tail_bound_evaluators("paouris_large", {"t": 1, "n": 100, "c": 1}) == pytest.approx(
        math.exp(-10))
    assert tail_bound_evaluators("paouris_smallball", {"eps": 0.1 - 1e-15, "d": 100, "c": 1}) \
        == pytest.approx(1e-10, rel=1e-10)
    with pytest.raises(DomainError):
        tail_bound_evaluators("paouris_smallball", {"eps": 0.2, "d": 100, "c": 1})
    with pytest.raises(ConstantMissing):
        tail_bound_evaluators("paouris_large", {"t": 1, "n": 100})
    with pytest.raises(DomainError):
        tail_bound_evaluators("nosuch", {})
    v = tail_bound_evaluators("alpt_opnorm", {"n": 4, "d": 256, "delta": 0.1, "C_prime": 2})
    assert v == pytest.approx(2 * math.sqrt(4 * math.log(4) / 256) * math.log(10) ** 2)


def test_lambda_min_net_terms():
    s, n, d, c = 1e-4, 2, 100, 1.0
    expected = (3 / s) ** n * (2 * math.sqrt(s)) ** 10 + math.exp(-c / math.sqrt(s))
    assert TAIL_BOUNDS["lambda_min_net"]({"s": s, "n": n, "d": d, "c": c}) == pytest.approx(
        expected)
    with pytest.raises(DomainError):
        TAIL_BOUNDS["lambda_min_net"]({"s": 0.5, "n": n, "d": d, "c": c})


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-6, 0.099), st.floats(1e-6, 0.099), st.integers(1, 400))
def test_smallball_monotone_in_eps(e1, e2, d):
    lo, hi = sorted((e1, e2))
    f = TAIL_BOUNDS["paouris_smallball"]
    assert f({"eps": lo, "d": d, "c": 1}) <= f({"eps": hi, "d": d, "c": 1})


def test_bounds_report_rows():
    reports = bounds_report(4, 4096, 3.0, C=2.0, c=0.5, C_prime=1.5)
    names = [r.name for r in reports]
    assert len(set(names)) == len(names)
    by = {r.name: r for r in reports}
    assert by["main_tv_bound"].value == pytest.approx(2 * main_tv_bound(4, 4096))
    assert by["main_tv_bound"].constant_used == 2.0
    assert math.isnan(by["hs_expect"].constant_used)
    assert by["paouris_large_t1"].constant_used == 0.5
