"""Deflation-based randomized joint diagonalization (DRJD).

At every level ``L`` single-trial RJDs are run.  The threshold is twice the
smallest per-column residual seen across all trials; the trial accepting the
most columns under that threshold wins, its accepted columns are kept and the
family is restricted to the span of the rejected ones for the next level.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _seeding
from .errors import ConvergenceError
from .matfam import OrthogonalMatrix
from .metrics import column_offdiag_sq
from .rjd import rjd

#: Thresholds never drop below ``(ROUNDOFF_FACTOR * n * eps)^2 * sum_k ||A_k||_F^2``.
ROUNDOFF_FACTOR = 10.0


@dataclass(frozen=True)
class DeflationLevel:
    dimension: int
    threshold: float
    accepted: int
    trial_index: int


@dataclass(frozen=True)
class DeflationTrace:
    levels: tuple = field(default_factory=tuple)

    @property
    def depth(self):
        return len(self.levels)


def column_residuals(family, q):
    """``sum_k ||offdiag(Q^T A_k Q)(:, j)||_2^2`` for every column ``j``."""
    return column_offdiag_sq(family.conjugate(q))


def level_seed(seed, level):
    """Seed for deflation ``level``; level 0 reuses ``seed`` itself."""
    return seed if level == 0 else _seeding.derive_seed(seed, level)


def _roundoff_floor(family):
    eps = np.finfo(float).eps
    return (ROUNDOFF_FACTOR * family.n * eps) ** 2 * family.frobenius_sq()


def drjd(family, trials, seed, method="lapack"):
    """Deflation-based RJD.

    Returns the orthogonal diagonalizer and a :class:`DeflationTrace`.  The
    caller's ``trials`` is reused at every level; level ``l`` draws from
    ``level_seed(seed, l)``.
    """
    if int(trials) < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    levels = []
    blocks = []
    basis = np.eye(family.n)
    current = family
    level = 0
    while True:
        n = current.n
        if n == 1:
            levels.append(DeflationLevel(1, 0.0, 1, 0))
            blocks.append(basis)
            break
        try:
            _, results = rjd(current, trials, level_seed(seed, level), method=method)
        except ConvergenceError as exc:
            raise ConvergenceError(exc.reason, trial=exc.trial, level=level) from exc
        t = max(2.0 * min(float(r.column_residual_sq.min()) for r in results), _roundoff_floor(current))
        counts = [int((r.column_residual_sq <= t).sum()) for r in results]
        best = int(np.argmax(counts))
        q = results[best].q.q
        ok = results[best].column_residual_sq <= t
        levels.append(DeflationLevel(n, t, counts[best], best))
        blocks.append(basis @ q[:, ok])
        if ok.all():
            break
        q_fail = q[:, ~ok]
        basis = basis @ q_fail
        current = current.restrict(q_fail)
        level += 1
    out = np.hstack(blocks)
    assert out.shape == (family.n, family.n)
    return OrthogonalMatrix(out), DeflationTrace(tuple(levels))
