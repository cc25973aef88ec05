"""Closed-form evaluators for the explicit bounds and exact moments.

Universal constants are never hard-coded: each evaluator takes them as
arguments (default 1) and reports the value it used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ConstantMissing, DomainError


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    constant_used: float
    inputs: Mapping[str, float] = field(default_factory=dict)


def thm2_entropy_bound(epsilon: float, gram_zeta: float, n: int, d: int, c: float,
                       ent1: float) -> float:
    """n * min(2 (epsilon + zeta^2 d) / c, 1) * Ent(nu || gamma_1)."""
    if not 0.0 < c <= 1.0:
        raise DomainError(f"spectral gap c must lie in (0, 1], got {c}")
    if ent1 < 0 or epsilon < 0 or gram_zeta < 0:
        raise DomainError("epsilon, zeta and ent1 must be non-negative")
    return n * min(2.0 * (epsilon + gram_zeta ** 2 * d) / c, 1.0) * ent1


def main_tv_bound(n: int, d: int, C: float = 1.0) -> float:
    """C (n^3 log(n) log^4(d) / d + sqrt(n^3 / d)), a bound on TV^2."""
    if n < 1 or d < 2 or C <= 0:
        raise DomainError(f"need n >= 1, d >= 2, C > 0; got n={n}, d={d}, C={C}")
    n3 = float(n) ** 3
    return C * (n3 * math.log(n) * math.log(d) ** 4 / d + math.sqrt(n3 / d))


def cubic_trace_theory(n: int, d: int) -> tuple[float, float, float]:
    """Exact (E Tr W^3 under Wishart, E Tr G^3, Var Tr G^3).

    Only ordered triples of distinct indices contribute; each contributes
    1/sqrt(d) under the hollow Wishart law for any unit-variance entries, and
    each of the C(n,3) triangles of G carries an independent unit-variance
    product.
    """
    if n < 1 or d < 1:
        raise DomainError(f"need n, d >= 1, got n={n}, d={d}")
    triples = n * (n - 1) * (n - 2)
    return triples / math.sqrt(d), 0.0, 6.0 * triples


def logdet_bound(n: int, d: int, C: float = 1.0) -> float:
    """C (sqrt(n/d) + n^2/d), the bound on E[-logdet((1/d) X X^T)]."""
    if n < 1 or d < 1 or C <= 0:
        raise DomainError(f"need n, d >= 1 and C > 0; got n={n}, d={d}, C={C}")
    return C * (math.sqrt(n / d) + n * n / d)


def moment_identities(n: int, d: int, fourth_moment: float) -> tuple[float, float]:
    """(sqrt((m4-1) n/d), (n^2-n)/d + n (m4-1)/d).

    The first bounds E|Tr(I - G)|; the second is the exact value of
    E ||I - G||_HS^2 for G = (1/d) X X^T.
    """
    if fourth_moment < 1:
        raise DomainError(f"fourth moment must be >= 1, got {fourth_moment}")
    excess = fourth_moment - 1.0
    return math.sqrt(excess * n / d), (n * n - n) / d + n * excess / d


def _need(args: Mapping[str, float], *keys: str) -> list[float]:
    missing = [k for k in keys if k not in args]
    if missing:
        raise ConstantMissing(f"missing argument(s): {', '.join(missing)}")
    return [float(args[k]) for k in keys]


def paouris_large(args: Mapping[str, float]) -> float:
    t, n, c = _need(args, "t", "n", "c")
    return math.exp(-c * t * math.sqrt(n))


def paouris_smallball(args: Mapping[str, float]) -> float:
    eps, d, c = _need(args, "eps", "d", "c")
    if not 0.0 < eps < 0.1:
        raise DomainError(f"small-ball radius eps must lie in (0, 1/10), got {eps}")
    return (c * eps) ** math.sqrt(d)


def alpt_opnorm(args: Mapping[str, float]) -> float:
    n, d, delta, C_prime = _need(args, "n", "d", "delta", "C_prime")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return C_prime * math.sqrt(n * math.log(n) / d) * math.log(1.0 / delta) ** 2


def lambda_min_net(args: Mapping[str, float]) -> float:
    """Net bound on P(lambda_min < s): (3/s)^n (c 2 sqrt(s))^sqrt(d) + exp(-c / sqrt(s)).

    The first term is the net cardinality times the small-ball bound at radius
    2 sqrt(s); the second bounds P(lambda_max > 1/sqrt(s)).
    """
    s, n, d, c = _need(args, "s", "n", "d", "c")
    if s <= 0:
        raise DomainError(f"s must be positive, got {s}")
    small = paouris_smallball({"eps": 2.0 * math.sqrt(s), "d": d, "c": c})
    log_first = n * math.log(3.0 / s) + math.log(small) if small > 0 else -math.inf
    return math.exp(min(log_first, 700.0)) + math.exp(-c / math.sqrt(s))


TAIL_BOUNDS = {
    "paouris_large": paouris_large,
    "paouris_smallball": paouris_smallball,
    "alpt_opnorm": alpt_opnorm,
    "lambda_min_net": lambda_min_net,
}


def tail_bound_evaluators(kind: str, args: Mapping[str, float]) -> float:
    try:
        fn = TAIL_BOUNDS[kind]
    except KeyError:
        raise DomainError(f"unknown tail bound {kind!r}") from None
    return fn(args)


def bounds_report(n: int, d: int, fourth_moment: float, C: float = 1.0, c: float = 1.0,
                  C_prime: float = 1.0) -> list[BoundReport]:
    """Every closed-form quantity at one (n, d), for the bounds_report command.

    Exact identities carry ``constant_used = nan``: they involve no universal
    constant.
    """
    nan = math.nan
    inputs = {"n": n, "d": d}
    wishart_mean, _, gaussian_var = cubic_trace_theory(n, d)
    trace_bound, hs_expect = moment_identities(n, d, fourth_moment)
    reports = [
        BoundReport("main_tv_bound", main_tv_bound(n, d, C), C, inputs),
        BoundReport("logdet_bound", logdet_bound(n, d, C), C, inputs),
        BoundReport("trace_bound", trace_bound, nan, inputs),
        BoundReport("hs_expect", hs_expect, nan, inputs),
        BoundReport("cubic_trace_wishart_mean", wishart_mean, nan, inputs),
        BoundReport("cubic_trace_gaussian_var", gaussian_var, nan, inputs),
    ]
    if n >= 2 and d >= 2:
        reports.append(BoundReport(
            "alpt_opnorm_delta_1_over_d",
            alpt_opnorm({"n": n, "d": d, "delta": 1.0 / d, "C_prime": C_prime}), C_prime, inputs))
    reports.append(BoundReport("paouris_large_t1", paouris_large({"t": 1.0, "n": n, "c": c}),
                               c, inputs))
    return reports
