"""Randomized joint diagonalization (RJD).

Each trial draws ``mu ~ N(0, I_d)``, eigendecomposes ``A(mu) = sum_k mu_k A_k``
and scores the eigenvector matrix by its total off-diagonal mass over the
family.  The best of ``L`` trials is returned.

All ``L`` trials consume one seeded Philox stream sequentially, ``d`` normals
per trial, so the trials of ``rjd(f, L, s)`` are a prefix of those of
``rjd(f, L + 1, s)``.
"""

from dataclasses import dataclass

import numpy as np

from . import _seeding
from .eig import symmetric_eig
from .errors import ConvergenceError, DimensionMismatchError
from .matfam import OrthogonalMatrix, random_linear_combination
from .metrics import column_offdiag_sq

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class GaussianVector:
    mu: np.ndarray
    seed: int


@dataclass(frozen=True)
class TrialResult:
    q: OrthogonalMatrix
    total_offdiag_sq: float
    column_residual_sq: np.ndarray
    mu: GaussianVector

    @property
    def error(self):
        """``sqrt`` of the least-squares measure, the usual reported error."""
        return float(np.sqrt(self.total_offdiag_sq))


def run_trial(family, mu, seed=0, method="lapack"):
    """One trial: diagonalize ``A(mu)`` and score the eigenvectors on the family."""
    mu = np.asarray(mu, dtype=float)
    eig = symmetric_eig(random_linear_combination(family, mu), method=method)
    cols = column_offdiag_sq(family.conjugate(eig.q.q))
    cols.setflags(write=False)
    mu = mu.copy()
    mu.setflags(write=False)
    return TrialResult(eig.q, float(cols.sum()), cols, GaussianVector(mu, seed))


def rjd(family, trials, seed, select="offdiag", method="lapack"):
    """Randomized joint diagonalization with ``trials`` independent Gaussian draws.

    Parameters
    ----------
    family : SymmetricFamily
    trials : int
        Number of trials ``L >= 1``.
    seed : int
        Unsigned 64-bit seed; outputs are bit-identical for identical
        ``(family, trials, seed)``.
    select : {"offdiag", "diag"}
        ``"offdiag"`` picks the smallest total off-diagonal mass;
        ``"diag"`` the largest diagonal mass (see :func:`select_by_diag`).
        Ties go to the lowest trial index either way.
    method : str
        Eigensolver backend passed to :func:`rjdiag.eig.symmetric_eig`.

    Returns
    -------
    best : TrialResult
    all_trials : list of TrialResult
        In trial order.
    """
    if int(trials) < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = _seeding.stream(seed)
    results = []
    for i in range(int(trials)):
        mu = rng.standard_normal(family.d)
        try:
            results.append(run_trial(family, mu, seed, method))
        except ConvergenceError as exc:
            raise ConvergenceError(exc.reason, trial=i, level=exc.level) from exc
    if select == "offdiag":
        best = select_by_offdiag(results)
    elif select == "diag":
        best = select_by_diag(results, family)
    else:
        raise ValueError(f"unknown selection rule {select!r}")
    return results[best], results


def select_by_offdiag(trials):
    """Index of the smallest ``total_offdiag_sq`` (first on exact ties)."""
    if not trials:
        raise ValueError("no trials to select from")
    return int(np.argmin([t.total_offdiag_sq for t in trials]))


def select_by_diag(trials, family):
    """Index maximizing ``sum_k ||diag(Q_i^T A_k Q_i)||_F^2``.

    Since ``||A_k||_F^2`` splits into diagonal plus off-diagonal mass, this is
    the same trial as the off-diagonal argmin.  Scores within ``1e-12``
    relative of the maximum count as tied and the lowest index wins.
    """
    if not trials:
        raise ValueError("no trials to select from")
    scores = np.empty(len(trials))
    for i, t in enumerate(trials):
        if t.q.n != family.n:
            raise DimensionMismatchError(f"trial {i} has n={t.q.n}, family has n={family.n}")
        b = family.conjugate(t.q.q)
        scores[i] = (np.diagonal(b, axis1=1, axis2=2) ** 2).sum()
    top = scores.max()
    return int(np.flatnonzero(scores >= top - TIE_RTOL * abs(top))[0])


def eigenvalue_vectors(family, q):
    """Rayleigh-quotient eigenvalue vectors: row ``i`` is ``((Q^T A_k Q)_ii)_k``.

    Returns an ``(n, d)`` array; exact eigenvalue vectors when ``Q`` jointly
    diagonalizes the family.
    """
    b = family.conjugate(q)
    return np.diagonal(b, axis1=1, axis2=2).T.copy()
