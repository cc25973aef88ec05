"""Deterministic linear algebra on ensemble samples.

The symmetric eigendecomposition is the only factorization used here: it
gives the Gram spectrum, the log-determinant and the inverse square root, so
near-singular inputs are handled the same way everywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SingularGram

EIGEN_FLOOR = 1e-12
DEGENERATE_DENOMINATOR = 1e-14


def cubic_trace(W: np.ndarray) -> np.ndarray | float:
    """Tr(W^3), broadcasting over leading axes of W."""
    W = np.asarray(W, dtype=float)
    W2 = np.matmul(W, W)
    # Tr(W^2 W) = sum_ij (W^2)_ij W_ji
    out = np.einsum("...ij,...ji->...", W2, W)
    return float(out) if out.ndim == 0 else out


def cubic_trace_triangles(W: np.ndarray) -> float:
    """6 * sum over i<j<k of W_ij W_jk W_ki; equals Tr(W^3) for hollow W."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if n < 3:
        return 0.0
    i, j, k = np.array(list(itertools.combinations(range(n), 3))).T
    return float(6.0 * np.sum(W[i, j] * W[j, k] * W[k, i]))


def gram_matrix(X: np.ndarray) -> np.ndarray:
    """(1/d) X X^T for X of shape (..., n, d)."""
    X = np.asarray(X, dtype=float)
    return np.matmul(X, np.swapaxes(X, -1, -2)) / X.shape[-1]


def gram_eigenvalues(X: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of (1/d) X X^T, clipped at zero; never raises."""
    return np.maximum(np.linalg.eigvalsh(gram_matrix(X)), 0.0)


@dataclass(frozen=True)
class GramSpectrum:
    lambda_min: float
    lambda_max: float
    logdet: float
    eigenvalues: np.ndarray


def lambda_min_floored(X: np.ndarray) -> np.ndarray:
    """Smallest Gram eigenvalue over a stack, floored at EIGEN_FLOOR.

    Floored values sit below every threshold of interest, so a numerically
    singular replica counts as an observed small-ball event.
    """
    return np.maximum(gram_eigenvalues(X)[..., 0], EIGEN_FLOOR)


def gram_spectrum(X: np.ndarray) -> GramSpectrum:
    """Spectrum and log-determinant of (1/d) X X^T for a wide data matrix."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n > d:
        raise ValueError(f"gram_spectrum needs n <= d, got n={n}, d={d}")
    ev = gram_eigenvalues(X)
    if ev[0] <= EIGEN_FLOOR:
        raise SingularGram(f"lambda_min = {ev[0]:.3e} is below {EIGEN_FLOOR:g}")
    return GramSpectrum(lambda_min=float(ev[0]), lambda_max=float(ev[-1]),
                        logdet=float(np.sum(np.log(ev))), eigenvalues=ev)


def neg_logdet(X: np.ndarray) -> np.ndarray:
    """-log det((1/d) X X^T) over a stack of data matrices."""
    ev = gram_eigenvalues(X)
    if np.any(ev[..., 0] <= EIGEN_FLOOR):
        raise SingularGram("a Gram matrix in the batch is singular at working precision")
    return -np.sum(np.log(ev), axis=-1)


def deviation_norms(X: np.ndarray):
    """(|Tr(I - G)|, ||I - G||_HS^2, ||G - I||) for G = (1/d) X X^T.

    Broadcasts over leading axes; returns floats for a single matrix.
    """
    dev = 1.0 - np.linalg.eigvalsh(gram_matrix(X))
    trace_dev = np.abs(np.sum(dev, axis=-1))
    hs_dev_sq = np.sum(dev * dev, axis=-1)
    op_dev = np.max(np.abs(dev), axis=-1)
    if np.ndim(trace_dev) == 0:
        return float(trace_dev), float(hs_dev_sq), float(op_dev)
    return trace_dev, hs_dev_sq, op_dev


def inverse_sqrt_sym(G: np.ndarray) -> np.ndarray:
    """Symmetric inverse square root of a positive definite matrix."""
    G = np.asarray(G, dtype=float)
    lam, V = np.linalg.eigh(G)
    if lam[0] <= EIGEN_FLOOR:
        raise SingularGram(f"lambda_min = {lam[0]:.3e} is below {EIGEN_FLOOR:g}")
    Q = (V / np.sqrt(lam)) @ V.T
    return 0.5 * (Q + Q.T)


def orthonormal_rows(X: np.ndarray) -> np.ndarray:
    """A = (X X^T)^{-1/2} X, whose rows are orthonormal."""
    X = np.asarray(X, dtype=float)
    return inverse_sqrt_sym(X @ X.T) @ X


class RowContraction(NamedTuple):
    U: float
    W: float
    V: float
    M: float
    C: float


@dataclass(frozen=True)
class ProjectionGramSummary:
    epsilon: float
    gram_zeta: float
    U: np.ndarray
    W: np.ndarray
    V: np.ndarray
    M: np.ndarray
    C: np.ndarray
    n: int
    d: int
    A: np.ndarray

    @property
    def per_row(self) -> list[RowContraction]:
        return [RowContraction(*map(float, r)) for r in zip(self.U, self.W, self.V, self.M, self.C)]

    @property
    def B(self) -> np.ndarray:
        return self.A.T @ self.A


def contraction_terms(A: np.ndarray, c: float):
    """Per-row (U, W, V, M, C) for an orthonormal-row A and spectral gap c."""
    A = np.asarray(A, dtype=float)
    B = A.T @ A
    diag = np.diag(B)
    off_sq = B * B
    np.fill_diagonal(off_sq, 0.0)
    A2 = A * A
    one_minus = 1.0 - diag
    U = A2 @ one_minus
    W = A2 @ (one_minus * one_minus)
    V = A2 @ off_sq.sum(axis=1)
    M = np.einsum("ij,jk,ik->i", A, off_sq, A)
    denom = c * W + 2.0 * V
    safe = denom > DEGENERATE_DENOMINATOR
    C = np.ones_like(U)
    C[safe] = 1.0 - c * U[safe] ** 2 / denom[safe]
    return B, U, W, V, M, C


def projection_gram_summary(X: np.ndarray, c: float) -> ProjectionGramSummary:
    """Epsilon, zeta and the per-row contraction coefficients of B = A^T A."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n > d:
        raise ValueError(f"projection_gram_summary needs n <= d, got n={n}, d={d}")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"spectral gap c must lie in (0, 1], got {c}")
    A = orthonormal_rows(X)
    B, U, W, V, M, C = contraction_terms(A, c)
    off = np.abs(B - np.diag(np.diag(B)))
    return ProjectionGramSummary(epsilon=float(np.max(np.diag(B))),
                                 gram_zeta=float(np.max(off)) if d > 1 else 0.0,
                                 U=U, W=W, V=V, M=M, C=C, n=n, d=d, A=A)
