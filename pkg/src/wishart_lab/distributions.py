"""Standardized one-dimensional log-concave entry laws.

Every law is shipped already standardized (mean 0, variance 1), with its
density, distribution function and the closed-form quantities the rest of the
package needs: fourth moment, relative entropy to the standard Gaussian and a
lower bound on its spectral gap.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import InvalidDistribution

SQRT3 = math.sqrt(3.0)
HALF_LOG_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)

# Isotropic log-concave laws have a spectral gap in [1/12, 1].
DEFAULT_SPECTRAL_GAP = 1.0 / 12.0
FOURTH_MOMENT_CEILING = 70.0


class Kind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    LAPLACE = "laplace"
    EXPONENTIAL_POWER = "exponential_power"


@dataclass(frozen=True)
class UnivariateLogConcave:
    """A standardized log-concave law.

    ``scale`` maps the family's base law onto the standardized one: the base
    laws are N(0,1), U[-1,1], Laplace(0,1) and the density proportional to
    exp(-|x|**beta). ``shift`` is zero for every shipped (symmetric) family.
    """

    kind: Kind
    shift: float
    scale: float
    fourth_moment: float
    rel_ent_gaussian: float
    spectral_gap_lb: float = DEFAULT_SPECTRAL_GAP
    beta: float | None = None

    @property
    def name(self) -> str:
        if self.kind is Kind.EXPONENTIAL_POWER:
            return f"{self.kind.value}:{self.beta:g}"
        return self.kind.value

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is Kind.UNIFORM:
            return (-SQRT3, SQRT3)
        return (-math.inf, math.inf)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where the density is not smooth (kinks or jumps)."""
        if self.kind is Kind.UNIFORM:
            return (-SQRT3, SQRT3)
        if self.kind is Kind.GAUSSIAN:
            return ()
        return (0.0,)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is Kind.GAUSSIAN:
            return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if self.kind is Kind.UNIFORM:
            return np.where(np.abs(x) <= SQRT3, 1.0 / (2.0 * SQRT3), 0.0)
        return np.exp(self.logpdf(x))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is Kind.GAUSSIAN:
            return -0.5 * x * x - 0.5 * math.log(2.0 * math.pi)
        if self.kind is Kind.UNIFORM:
            with np.errstate(divide="ignore"):
                return np.log(self.pdf(x))
        b = self._beta
        a = self.scale
        return -np.abs(x / a) ** b - math.log(2.0 * a * special.gamma(1.0 + 1.0 / b))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is Kind.GAUSSIAN:
            return special.ndtr(x)
        if self.kind is Kind.UNIFORM:
            return np.clip((x + SQRT3) / (2.0 * SQRT3), 0.0, 1.0)
        b = self._beta
        upper = 0.5 * special.gammainc(1.0 / b, np.abs(x / self.scale) ** b)
        return np.where(x >= 0, 0.5 + upper, 0.5 - upper)

    def tail_bound(self, mass: float) -> float:
        """Smallest q with P(|X| > q) <= mass (q = sqrt(3) for the uniform law)."""
        if self.kind is Kind.UNIFORM:
            return SQRT3
        if self.kind is Kind.GAUSSIAN:
            return float(-special.ndtri(mass / 2.0))
        b = self._beta
        return float(self.scale * special.gammainccinv(1.0 / b, mass) ** (1.0 / b))

    @property
    def _beta(self) -> float:
        return 1.0 if self.kind is Kind.LAPLACE else float(self.beta)


def _exp_power_constants(beta: float) -> tuple[float, float, float]:
    """(scale, fourth moment, differential entropy) of the standardized law."""
    lg1, lg3, lg5 = (special.gammaln(k / beta) for k in (1.0, 3.0, 5.0))
    scale = math.exp(0.5 * (lg1 - lg3))
    fourth = math.exp(lg5 + lg1 - 2.0 * lg3)
    entropy = 1.0 / beta + math.log(2.0 * scale) + special.gammaln(1.0 + 1.0 / beta)
    return scale, fourth, entropy


def make_distribution(kind, params: Sequence[float] = (), spectral_gap_lb: float | None = None
                      ) -> UnivariateLogConcave:
    """Build a standardized law from a kind name and its parameter list.

    ``exponential_power`` takes one parameter ``beta`` in [1, 2]; the other
    kinds take none. ``spectral_gap_lb`` overrides the default of 1/12 (the
    Gaussian always gets 1).
    """
    try:
        kind = Kind(kind)
    except ValueError:
        raise InvalidDistribution(f"unknown distribution kind {kind!r}; "
                                  f"expected one of {[k.value for k in Kind]}") from None
    params = [float(p) for p in params]
    expected = 1 if kind is Kind.EXPONENTIAL_POWER else 0
    if len(params) != expected:
        raise InvalidDistribution(f"{kind.value} takes {expected} parameter(s), got {len(params)}")

    beta = None
    if kind is Kind.GAUSSIAN:
        scale, fourth, ent = 1.0, 3.0, 0.0
        gap = 1.0
    elif kind is Kind.UNIFORM:
        scale, fourth = SQRT3, 9.0 / 5.0
        ent = 0.5 * math.log(2.0 * math.pi * math.e / 12.0)
        gap = DEFAULT_SPECTRAL_GAP
    elif kind is Kind.LAPLACE:
        scale, fourth = 1.0 / math.sqrt(2.0), 6.0
        ent = HALF_LOG_2PI_E - (1.0 + math.log(math.sqrt(2.0)))
        gap = DEFAULT_SPECTRAL_GAP
    else:
        beta = params[0]
        if not 1.0 <= beta <= 2.0 or not math.isfinite(beta):
            raise InvalidDistribution(f"exponential_power needs beta in [1, 2], got {beta}")
        scale, fourth, h = _exp_power_constants(beta)
        ent = max(HALF_LOG_2PI_E - h, 0.0)
        gap = DEFAULT_SPECTRAL_GAP

    if spectral_gap_lb is not None and kind is not Kind.GAUSSIAN:
        if not 0.0 < spectral_gap_lb <= 1.0:
            raise InvalidDistribution(f"spectral gap must lie in (0, 1], got {spectral_gap_lb}")
        gap = float(spectral_gap_lb)
    if fourth > FOURTH_MOMENT_CEILING:
        raise InvalidDistribution(f"fourth moment {fourth} exceeds {FOURTH_MOMENT_CEILING}")
    return UnivariateLogConcave(kind=kind, shift=0.0, scale=scale, fourth_moment=fourth,
                                rel_ent_gaussian=ent, spectral_gap_lb=gap, beta=beta)


def parse_distribution(spec: str) -> UnivariateLogConcave:
    """Parse ``"laplace"`` or ``"exponential_power:1.5"`` style names."""
    name, _, rest = spec.strip().partition(":")
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    try:
        values = [float(p) for p in params]
    except ValueError:
        raise InvalidDistribution(f"bad distribution parameters in {spec!r}") from None
    return make_distribution(name.strip(), values)


def sample(dist: UnivariateLogConcave, count: int, stream, out: np.ndarray | None = None
           ) -> np.ndarray:
    """Draw ``count`` i.i.d. values from ``dist`` using ``stream``.

    When ``out`` is given it is filled in place (its size must equal
    ``count``) and returned; the draws are identical either way.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    g = stream.generator
    if out is None:
        out = np.empty(count)
    flat = out.reshape(-1)
    if flat.size != count:
        raise ValueError(f"out has {flat.size} entries, expected {count}")
    kind = dist.kind
    if kind is Kind.GAUSSIAN:
        g.standard_normal(out=flat)
    elif kind is Kind.UNIFORM:
        g.random(out=flat)
        flat *= 2.0 * SQRT3
        flat -= SQRT3
    elif kind is Kind.LAPLACE:
        g.standard_exponential(out=flat)
        flat *= dist.scale
        flat *= np.where(g.random(count) < 0.5, -1.0, 1.0)
    else:
        b = dist.beta
        g.standard_gamma(1.0 / b, out=flat)
        np.power(flat, 1.0 / b, out=flat)
        flat *= dist.scale
        flat *= np.where(g.random(count) < 0.5, -1.0, 1.0)
    return out


def rel_entropy_to_std_gaussian(dist: UnivariateLogConcave) -> float:
    """Ent(dist || N(0,1)) = 0.5 log(2 pi e) - h(dist) for a unit-variance law."""
    return dist.rel_ent_gaussian


def differential_entropy(dist: UnivariateLogConcave) -> float:
    return HALF_LOG_2PI_E - dist.rel_ent_gaussian
