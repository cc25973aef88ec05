"""Monte Carlo engine and empirical estimators.

Replica ``k`` of a run with master seed ``s`` always draws from
``RngStream(s, k)``. Replicas are grouped into fixed-size blocks (the size
depends only on the sample shape), blocks may be evaluated by a thread pool,
and block results are merged in block order. Results are therefore a pure
function of ``(replicas, master_seed)`` and bit-identical for any worker
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .bounds import thm2_entropy_bound
from .distributions import UnivariateLogConcave, sample
from .ensembles import hollow_from_upper, wishart_hollow
from .errors import DuplicateSamples
from .rng import RngStream, derive_seed
from .spectra import inverse_sqrt_sym, projection_gram_summary

BLOCK_REPLICAS = 2048
BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class McConfig:
    replicas: int
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class Estimate:
    mean: float
    variance: float
    stderr: float
    count: int


@dataclass(frozen=True)
class TailCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray


class SampleSource(Protocol):
    """Produces one replica's raw draws, then turns a stack of them into samples."""

    shape: tuple[int, ...]

    def draw(self, stream: RngStream, out: np.ndarray) -> None: ...

    def finish(self, batch: np.ndarray) -> np.ndarray: ...


class DataMatrixSource:
    """Replicas of the n x d data matrix (or a length-d vector when n is None)."""

    def __init__(self, dist: UnivariateLogConcave, n: int | None, d: int):
        self.dist = dist
        self.shape = (d,) if n is None else (n, d)
        self.size = math.prod(self.shape)

    def draw(self, stream, out):
        sample(self.dist, self.size, stream, out=out)

    def finish(self, batch):
        return batch


class WishartSource(DataMatrixSource):
    """Replicas of the hollow Wishart matrix built from an n x d data matrix."""

    def __init__(self, dist: UnivariateLogConcave, n: int, d: int):
        super().__init__(dist, n, d)

    def finish(self, batch):
        return wishart_hollow(batch)


class GaussianHollowSource:
    """Replicas of the hollow Gaussian Wigner matrix."""

    def __init__(self, n: int):
        self.n = n
        self.shape = (n * (n - 1) // 2,)

    def draw(self, stream, out):
        stream.generator.standard_normal(out=out)

    def finish(self, batch):
        return hollow_from_upper(batch, self.n)


def block_size(source: SampleSource) -> int:
    return max(1, min(BLOCK_REPLICAS, BLOCK_ENTRIES // max(1, math.prod(source.shape))))


def _blocks(replicas: int, size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, replicas)) for lo in range(0, replicas, size)]


def draw_block(source: SampleSource, master_seed: int, start: int, stop: int) -> np.ndarray:
    """Finished samples for replicas start..stop-1."""
    raw = np.empty((stop - start,) + tuple(source.shape))
    stream = RngStream(master_seed, start)
    for i, k in enumerate(range(start, stop)):
        stream.seek(k)
        source.draw(stream, raw[i])
    return source.finish(raw)


def _map_blocks(fn, blocks, workers):
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def draw_replicas(source: SampleSource, cfg: McConfig) -> np.ndarray:
    """All finished replica samples, stacked in replica order."""
    blocks = _blocks(cfg.replicas, block_size(source))
    parts = _map_blocks(lambda b: draw_block(source, cfg.master_seed, *b), blocks, cfg.workers)
    return np.concatenate(parts, axis=0)


def sample_statistic(source: SampleSource, statistic: Callable[[np.ndarray], np.ndarray],
                     cfg: McConfig) -> np.ndarray:
    """Statistic value of every replica, in replica order.

    ``statistic`` maps a stack of samples (leading axis = replicas) to one
    value (or one row of values) per replica; wrap scalar functions with
    :func:`per_sample`.
    """
    blocks = _blocks(cfg.replicas, block_size(source))

    def run(b):
        vals = np.asarray(statistic(draw_block(source, cfg.master_seed, *b)), dtype=float)
        return vals.reshape((b[1] - b[0],) + vals.shape[1:])

    return np.concatenate(_map_blocks(run, blocks, cfg.workers))


def per_sample(fn: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a function of one sample to a function of a stack of samples."""
    return lambda batch: np.array([fn(m) for m in batch], dtype=float)


def estimate_statistic(source: SampleSource, statistic: Callable[[np.ndarray], np.ndarray],
                       cfg: McConfig) -> Estimate:
    """Mean, unbiased variance and standard error of a statistic over replicas.

    Only per-block (count, mean, sum of squared deviations) triples are kept,
    merged in block order, so memory does not grow with the replica count.
    """
    if cfg.replicas < 2:
        raise ValueError("estimate_statistic needs at least 2 replicas")
    blocks = _blocks(cfg.replicas, block_size(source))

    def run(b):
        vals = np.asarray(statistic(draw_block(source, cfg.master_seed, *b)), dtype=float)
        m = float(vals.mean())
        return vals.size, m, float(np.sum((vals - m) ** 2))

    count, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in _map_blocks(run, blocks, cfg.workers):
        total = count + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * count * nb / total
        count = total
    variance = m2 / (count - 1)
    return Estimate(mean=mean, variance=variance, stderr=math.sqrt(variance / count), count=count)


def tv_lower_bound(samples_p: Sequence[float], samples_q: Sequence[float]) -> float:
    """max over thresholds tau of |P(S > tau) - Q(S > tau)| for the empirical laws.

    Thresholds are the midpoints of consecutive distinct pooled values.
    """
    p = np.sort(np.asarray(samples_p, dtype=float).ravel())
    q = np.sort(np.asarray(samples_q, dtype=float).ravel())
    if p.size == 0 or q.size == 0:
        raise ValueError("tv_lower_bound needs two non-empty samples")
    pooled = np.unique(np.concatenate([p, q]))
    if pooled.size < 2:
        return 0.0
    tau = 0.5 * (pooled[1:] + pooled[:-1])
    sp = 1.0 - np.searchsorted(p, tau, side="right") / p.size
    sq = 1.0 - np.searchsorted(q, tau, side="right") / q.size
    return float(np.max(np.abs(sp - sq)))


def knn_entropy(samples, k_neighbors: int = 4) -> float:
    """Kozachenko-Leonenko differential entropy estimate in nats (max-norm balls)."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    N, dim = x.shape
    if dim > 4:
        raise ValueError(f"knn_entropy supports dimension <= 4, got {dim}")
    distinct = np.unique(x, axis=0).shape[0]
    if distinct < k_neighbors + 1:
        raise ValueError(f"need at least {k_neighbors + 1} distinct points, got {distinct}")
    if N - distinct > 0.01 * N:
        raise DuplicateSamples(f"{N - distinct} of {N} points are exact ties")
    dist, _ = cKDTree(x).query(x, k=k_neighbors + 1, p=np.inf)
    eps = dist[:, k_neighbors]
    if np.any(eps == 0):
        eps = np.where(eps == 0, np.min(eps[eps > 0]), eps)
    return float(digamma(N) - digamma(k_neighbors) + dim * math.log(2.0)
                 + dim * np.mean(np.log(eps)))


def _rel_entropy_estimate(y: np.ndarray, second_moment: float, k_neighbors: int) -> float:
    """Ent(Y || gamma_n) = -h(Y) + (n/2) log(2 pi) + E|Y|^2 / 2, with E|Y|^2 known."""
    n = y.shape[1]
    return 0.5 * n * math.log(2.0 * math.pi) + 0.5 * second_moment - knn_entropy(y, k_neighbors)


def projected_rel_entropy(A: np.ndarray, dist: UnivariateLogConcave, cfg: McConfig,
                          k_neighbors: int = 4) -> float:
    """k-NN estimate of Ent(A Y || gamma_n) for Y with i.i.d. entries from ``dist``.

    The Gaussian cross term uses E|AY|^2 = Tr(A A^T) exactly.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n, d = A.shape
    if n > 4:
        raise ValueError("k-NN entropy estimation is limited to n <= 4")
    y = draw_replicas(DataMatrixSource(dist, None, d), cfg) @ A.T
    return _rel_entropy_estimate(y, float(np.trace(A @ A.T)), k_neighbors)


def lemma1_residual(A: np.ndarray, dist: UnivariateLogConcave, cfg: McConfig,
                    k_neighbors: int = 4) -> float:
    """Empirical residual of the whitening identity for relative entropy.

    With Q = (A A^T)^{-1/2}, so that Q A A^T Q^T = I,
    Ent(AX || gamma) = Ent(QAX || gamma) + Tr(A A^T)/2 - n/2 + logdet(Q);
    the residual of that identity is returned, estimated from the same draws.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n, d = A.shape
    if n > 2:
        raise ValueError("lemma1_residual supports n <= 2")
    AAt = A @ A.T
    Q = inverse_sqrt_sym(AAt)
    y = draw_replicas(DataMatrixSource(dist, None, d), cfg) @ A.T
    trace = float(np.trace(AAt))
    ent_ax = _rel_entropy_estimate(y, trace, k_neighbors)
    ent_qax = _rel_entropy_estimate(y @ Q.T, float(n), k_neighbors)
    _, logdet_q = np.linalg.slogdet(Q)
    return ent_ax - ent_qax - 0.5 * trace + 0.5 * n - logdet_q


def tail_curve(source: SampleSource, event_scalar: Callable[[np.ndarray], np.ndarray],
               thresholds: Sequence[float], cfg: McConfig) -> TailCurve:
    """Empirical P(scalar < s) for each threshold, from one pass over the replicas."""
    s = np.asarray(thresholds, dtype=float)
    if s.size > 1 and np.any(np.diff(s) < 0):
        raise ValueError("thresholds must be ascending")
    vals = np.sort(sample_statistic(source, event_scalar, cfg))
    probs = np.searchsorted(vals, s, side="left") / vals.size
    return TailCurve(thresholds=s, probabilities=probs)


@dataclass(frozen=True)
class EntropyBoundSamples:
    epsilon: np.ndarray
    gram_zeta: np.ndarray
    bound: np.ndarray
    estimate: np.ndarray


def entropy_bound_check(dist: UnivariateLogConcave, n: int, d: int, c: float, x_cfg: McConfig,
                        y_samples: int, k_neighbors: int = 4) -> EntropyBoundSamples:
    """Entropy bound against a k-NN estimate, for each of ``x_cfg.replicas`` data matrices.

    For every sampled X, A comes from its projection-Gram summary and
    Ent(AY || gamma_n) is estimated from ``y_samples`` fresh vectors Y with
    i.i.d. entries from ``dist``, on streams derived from (master_seed, index).
    """
    xs = draw_replicas(DataMatrixSource(dist, n, d), x_cfg)
    eps, zeta, bound, est = (np.empty(len(xs)) for _ in range(4))
    for i, X in enumerate(xs):
        summary = projection_gram_summary(X, c)
        eps[i], zeta[i] = summary.epsilon, summary.gram_zeta
        bound[i] = thm2_entropy_bound(summary.epsilon, summary.gram_zeta, n, d, c,
                                      dist.rel_ent_gaussian)
        y_cfg = McConfig(y_samples, derive_seed(x_cfg.master_seed, "y", i), x_cfg.workers)
        est[i] = projected_rel_entropy(summary.A, dist, y_cfg, k_neighbors)
    return EntropyBoundSamples(eps, zeta, bound, est)
