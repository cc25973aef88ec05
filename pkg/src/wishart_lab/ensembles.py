"""Data matrices and the two hollow symmetric ensembles.

Matrices are plain ``numpy`` arrays: a data matrix is ``(n, d)``, a hollow
matrix is ``(n, n)`` with zero diagonal. The transforms broadcast over leading
batch axes so Monte Carlo code can build a whole block of replicas at once.
"""
from __future__ import annotations

import math

import numpy as np

from .distributions import UnivariateLogConcave, sample
from .errors import DimensionError
from .rng import RngStream

__all__ = [
    "RngStream",
    "sample_data_matrix",
    "wishart_hollow",
    "gaussian_hollow",
    "hollow_from_upper",
    "is_hollow_symmetric",
    "MAX_ENTRIES",
]

MAX_ENTRIES = 1 << 31


def _check_dims(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise DimensionError(f"dimensions must be positive, got n={n}, d={d}")
    if n * d > MAX_ENTRIES:
        raise DimensionError(f"n*d = {n * d} exceeds the {MAX_ENTRIES} entry limit")


def sample_data_matrix(dist: UnivariateLogConcave, n: int, d: int, stream: RngStream,
                       out: np.ndarray | None = None) -> np.ndarray:
    """n x d matrix of i.i.d. draws from ``dist``, filled row-major."""
    _check_dims(n, d)
    if out is None:
        out = np.empty((n, d))
    sample(dist, n * d, stream, out=out)
    return out


def wishart_hollow(X: np.ndarray) -> np.ndarray:
    """(X X^T - diag(X X^T)) / sqrt(d), for X of shape (..., n, d).

    Only the strict upper triangle is computed; the lower triangle is its
    exact mirror, so symmetry and the zero diagonal hold bit-for-bit.
    """
    X = np.asarray(X, dtype=float)
    d = X.shape[-1]
    G = np.matmul(X, np.swapaxes(X, -1, -2))
    U = np.triu(G, 1)
    U /= math.sqrt(d)
    return U + np.swapaxes(U, -1, -2)


def hollow_from_upper(values: np.ndarray, n: int) -> np.ndarray:
    """Build hollow symmetric matrices from strict-upper-triangle entries.

    ``values`` has shape (..., n(n-1)/2) in row-major upper-triangle order.
    """
    values = np.asarray(values, dtype=float)
    iu = np.triu_indices(n, 1)
    out = np.zeros(values.shape[:-1] + (n, n))
    out[..., iu[0], iu[1]] = values
    out[..., iu[1], iu[0]] = values
    return out


def gaussian_hollow(n: int, stream: RngStream) -> np.ndarray:
    """Symmetric n x n matrix, zero diagonal, i.i.d. N(0,1) above the diagonal."""
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    m = n * (n - 1) // 2
    return hollow_from_upper(stream.generator.standard_normal(m), n)


def is_hollow_symmetric(W: np.ndarray) -> bool:
    W = np.asarray(W)
    return bool(np.array_equal(W, np.swapaxes(W, -1, -2))
                and not np.any(np.diagonal(W, axis1=-2, axis2=-1)))
