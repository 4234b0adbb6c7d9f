"""Off-diagonality measures and separation scores."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, NotPositiveDefiniteError


@dataclass(frozen=True)
class JointDiagScore:
    least_squares: float
    pham: Optional[float] = None


def offdiag(a):
    """Copy of ``a`` with the diagonal set to zero (last two axes)."""
    out = np.array(a, dtype=float, copy=True)
    if out.shape[-1] != out.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {out.shape}")
    idx = np.arange(out.shape[-1])
    out[..., idx, idx] = 0.0
    return out


def diag_part(a):
    """Diagonal part ``a - offdiag(a)`` as a matrix."""
    a = np.asarray(a, dtype=float)
    return a - offdiag(a)


def column_offdiag_sq(b):
    """Per-column off-diagonal mass ``sum_k ||offdiag(B_k)(:, j)||_2^2`` of a stack."""
    sq = offdiag(b) ** 2
    return sq.sum(axis=tuple(range(sq.ndim - 1)))


def least_squares_measure(family, q):
    """``sum_k ||offdiag(Q^T A_k Q)||_F^2``."""
    return float((offdiag(family.conjugate(q)) ** 2).sum())


def pham_measure(family, q):
    """Log-det (Kullback-Leibler) off-diagonality measure.

    ``1/(2n) * sum_k [log det diag(B_k) - log det B_k]`` with ``B_k = Q^T A_k Q``.
    Each term is evaluated as ``-log det`` of the unit-diagonal rescaling of
    ``B_k`` via a Cholesky factorization, so it is exactly zero for diagonal
    ``B_k``.  A failed factorization (or a nonpositive diagonal) raises
    :class:`NotPositiveDefiniteError` naming the offending ``k``.
    """
    b = family.conjugate(q)
    n = family.n
    total = 0.0
    for k, bk in enumerate(b):
        dg = np.diagonal(bk)
        if np.any(dg <= 0):
            raise NotPositiveDefiniteError(k)
        root = np.sqrt(dg)
        corr = bk / np.outer(root, root)
        np.fill_diagonal(corr, 1.0)
        try:
            chol = np.linalg.cholesky(corr)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(k) from None
        total -= 2.0 * np.log(np.diagonal(chol)).sum()
    return float(total / (2 * n))


def score(family, q):
    """Both measures; ``pham`` is ``None`` unless every ``Q^T A_k Q`` is positive definite."""
    try:
        pham = pham_measure(family, q)
    except NotPositiveDefiniteError:
        pham = None
    return JointDiagScore(least_squares_measure(family, q), pham)


def moreau_amari(m):
    """Moreau-Amari index of ``M = B A``.

    ``1/(2n(n-1)) * sum_i (sum_j |M_ij| / max_j |M_ij| + sum_j |M_ji| / max_j |M_ji| - 2)``.
    Zero exactly for scaled permutation matrices, at most one otherwise.
    """
    m = np.abs(np.asarray(m, dtype=float))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n < 2:
        raise ValueError("Moreau-Amari index needs n >= 2")
    row_max = m.max(axis=1)
    col_max = m.max(axis=0)
    if np.any(row_max == 0) or np.any(col_max == 0):
        raise ValueError("Moreau-Amari index undefined for an all-zero row or column")
    rows = (m.sum(axis=1) / row_max - 1.0).sum()
    cols = (m.sum(axis=0) / col_max - 1.0).sum()
    return float((rows + cols) / (2 * n * (n - 1)))
