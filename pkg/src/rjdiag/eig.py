"""Symmetric eigendecomposition with fixed ordering and sign conventions.

Two backends are available.  ``"lapack"`` (the default) calls
:func:`numpy.linalg.eigh`; ``"jacobi"`` is a cyclic Jacobi rotation method.
Both are post-processed identically: eigenvalues ascending, each eigenvector
flipped so that its largest-magnitude entry (first one on ties) is positive,
and the residual/orthogonality bounds below are checked before returning.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .matfam import OrthogonalMatrix

RESIDUAL_TOL = 1e-10
SYMMETRY_TOL = 1e-10
MAX_SWEEPS = 100

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenDecomposition:
    q: OrthogonalMatrix
    eigenvalues: np.ndarray

    @property
    def lam(self):
        return self.eigenvalues


def symmetric_eig(a, method="lapack", check=True):
    """Eigendecomposition ``A Q = Q diag(lam)`` of a symmetric matrix.

    Parameters
    ----------
    a : ndarray, shape (n, n)
        Symmetric input.  Asymmetry above ``1e-10`` relative is an error.
    method : {"lapack", "jacobi"}
        Backend.
    check : bool
        Verify ``||A Q - Q diag(lam)||_F <= 1e-10 max(1, ||A||_F)``.  A violation
        raises :class:`ConvergenceError`.

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues and matching sign-normalized eigenvectors.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    norm = float(np.linalg.norm(a))
    if np.linalg.norm(a - a.T) > SYMMETRY_TOL * max(norm, np.finfo(float).tiny):
        raise ValueError("input matrix is not symmetric")

    if method == "lapack":
        if not np.all(np.isfinite(a)):
            raise ConvergenceError("non-finite input to eigensolver")
        try:
            lam, q = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"eigh failed: {exc}") from exc
    elif method == "jacobi":
        lam, q = jacobi_eig(a)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")

    order = np.argsort(lam, kind="stable")
    lam, q = lam[order], q[:, order]
    q = _fix_signs(q)

    if check:
        resid = np.linalg.norm(a @ q - q * lam)
        if not resid <= RESIDUAL_TOL * max(1.0, norm):
            raise ConvergenceError(f"eigen-residual {resid:.3g} exceeds tolerance")
    lam.setflags(write=False)
    return EigenDecomposition(OrthogonalMatrix(q), lam)


def _fix_signs(q):
    pivot = np.argmax(np.abs(q), axis=0)
    signs = np.where(q[pivot, np.arange(q.shape[1])] < 0, -1.0, 1.0)
    return q * signs


def jacobi_eig(a, max_sweeps=MAX_SWEEPS):
    """Cyclic-by-row Jacobi eigenvalue iteration.

    Returns unsorted ``(eigenvalues, eigenvectors)``.  Raises
    :class:`ConvergenceError` if the off-diagonal mass has not dropped to
    roundoff level after ``max_sweeps`` full sweeps.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = np.linalg.norm(a)
    target = _EPS * scale

    for sweep in range(max_sweeps):
        if _off_norm(a) <= target:
            return a.diagonal().copy(), v
        rotated = False
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                app, arr = a[p, p], a[r, r]
                # off-diagonal entry negligible next to both diagonal entries
                if sweep > 3 and abs(app) + 100.0 * abs(apr) == abs(app) and abs(arr) + 100.0 * abs(apr) == abs(arr):
                    a[p, r] = a[r, p] = 0.0
                    continue
                theta = (arr - app) / (2.0 * apr)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp, cr = a[:, p].copy(), a[:, r]
                a[:, p] = c * cp - s * cr
                a[:, r] = s * cp + c * cr
                rp, rr = a[p, :].copy(), a[r, :]
                a[p, :] = c * rp - s * rr
                a[r, :] = s * rp + c * rr
                a[p, r] = a[r, p] = 0.0
                vp, vr = v[:, p].copy(), v[:, r]
                v[:, p] = c * vp - s * vr
                v[:, r] = s * vp + c * vr
                rotated = True
        if not rotated:
            return a.diagonal().copy(), v
    if _off_norm(a) <= target:
        return a.diagonal().copy(), v
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _off_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))
