"""Synthetic families, eigenvalue-vector clustering and the failure-probability experiment."""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import _io, _seeding
from .matfam import OrthogonalMatrix, SymmetricFamily
from .rjd import rjd

LAWS = ("uniform(0.01,1.01)", "uniform(-1,1)")
EPSILON_FLOOR = 1e-15
WILSON_Z = 1.959963984540054
CSV_HEADER = ("R", "L", "failures", "repeats", "freq", "ci_lo", "ci_hi")


@dataclass(frozen=True)
class FamilySpec:
    """Generative model for a (nearly) commuting family.

    ``eigenvalue_law`` is one of :data:`LAWS` or an explicit ``(n, d)`` table of
    eigenvalue vectors.  When left as ``None`` it is ``"uniform(0.01,1.01)"``
    for positive-definite families and ``"uniform(-1,1)"`` otherwise.
    """

    n: int
    d: int
    positive_definite: bool = False
    eigenvalue_law: Union[str, np.ndarray, None] = None
    noise_epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be positive")
        if not self.noise_epsilon >= 0:
            raise ValueError("noise_epsilon must be nonnegative")
        law = self.eigenvalue_law
        if law is None:
            law = LAWS[0] if self.positive_definite else LAWS[1]
        elif isinstance(law, str):
            if law not in LAWS:
                raise ValueError(f"unknown eigenvalue law {law!r}")
        else:
            law = np.array(law, dtype=float)
            if law.shape != (self.n, self.d):
                raise ValueError(f"explicit eigenvalue table must be ({self.n}, {self.d}), got {law.shape}")
            law.setflags(write=False)
        object.__setattr__(self, "eigenvalue_law", law)
        _seeding.check_seed(self.seed)


@dataclass(frozen=True)
class GroundTruth:
    q0: OrthogonalMatrix
    lambdas: np.ndarray


def haar_orthogonal(n, rng):
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix with ``diag(R) > 0``."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.where(np.diagonal(r) < 0, -1.0, 1.0)


def generate_commuting(spec):
    """Exactly commuting family ``A_k = Q0 diag(lambda[:, k]) Q0^T``.

    Returns the family and its :class:`GroundTruth`.  Any ``noise_epsilon`` in
    ``spec`` is ignored here; see :func:`generate_family`.
    """
    rng = _seeding.stream(spec.seed, 0)
    q0 = haar_orthogonal(spec.n, rng)
    law = spec.eigenvalue_law
    if isinstance(law, str):
        lo, hi = (0.01, 1.01) if law == LAWS[0] else (-1.0, 1.0)
        lambdas = rng.uniform(lo, hi, size=(spec.n, spec.d))
    else:
        lambdas = np.array(law)
    mats = np.einsum("ij,jk,lj->kil", q0, lambdas, q0)
    lambdas.setflags(write=False)
    return SymmetricFamily(mats), GroundTruth(OrthogonalMatrix(q0), lambdas)


def add_noise(family, epsilon, seed):
    """Add symmetric Gaussian noise with aggregate Frobenius norm exactly ``epsilon``."""
    if not epsilon >= 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        return family
    g = _seeding.stream(seed, 1).standard_normal(family.matrices.shape)
    e = (g + g.transpose(0, 2, 1)) / 2
    e *= epsilon / math.sqrt(float((e**2).sum()))
    return SymmetricFamily(family.matrices + e)


def generate_family(spec):
    """Commuting family from ``spec`` plus its noise; returns ``(family, truth)``."""
    family, truth = generate_commuting(spec)
    return add_noise(family, spec.noise_epsilon, _seeding.derive_seed(spec.seed, 1)), truth


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster labels ``1..m`` per eigenvalue vector, numbered by first member."""

    k_of: np.ndarray
    m: int
    delta: float

    def sizes(self):
        return np.bincount(self.k_of, minlength=self.m + 1)[1:]


def cluster_eigenvalue_vectors(lambdas, delta):
    """Single-linkage clustering of the rows of ``lambdas`` at distance ``delta``.

    Starting from the first unlabeled vector, all vectors within ``delta`` of
    any cluster member are added until the cluster stops growing; then the
    next unlabeled vector seeds a new cluster.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    pts = np.atleast_2d(np.asarray(lambdas, dtype=float))
    n = pts.shape[0]
    close = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1) <= delta
    labels = np.zeros(n, dtype=int)
    m = 0
    for i in range(n):
        if labels[i]:
            continue
        m += 1
        labels[i] = m
        frontier = [i]
        while frontier:
            j = frontier.pop()
            new = np.flatnonzero(close[j] & (labels == 0))
            labels[new] = m
            frontier.extend(new.tolist())
    labels.setflags(write=False)
    return ClusterAssignment(labels, m, float(delta))


def default_r_values():
    """``R = 1 + 10^(j/6)`` for ``j = 0..12``: ``R - 1`` spans 1 to 100."""
    return tuple(1.0 + 10.0 ** (j / 6) for j in range(13))


@dataclass(frozen=True)
class ExperimentGrid:
    n: int = 10
    d: int = 5
    epsilon: float = 1e-5
    L: int = 1
    repeats: int = 100_000
    r_values: Sequence[float] = field(default_factory=default_r_values)
    seed: int = 0
    positive_definite: bool = False

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if not self.r_values or any(not r > 1 for r in self.r_values):
            raise ValueError("every R must exceed 1")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")
        object.__setattr__(self, "r_values", tuple(sorted(float(r) for r in self.r_values)))
        _seeding.check_seed(self.seed)


@dataclass(frozen=True)
class FailureRow:
    R: float
    L: int
    failures: int
    repeats: int
    freq: float
    ci_lo: float
    ci_hi: float


def wilson_interval(k, n, z=WILSON_Z):
    """Wilson score interval for ``k`` successes out of ``n``."""
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def experiment_family(grid):
    """The single fixed (family, noise) realization used by every repeat."""
    spec = FamilySpec(grid.n, grid.d, positive_definite=grid.positive_definite,
                      noise_epsilon=grid.epsilon, seed=_seeding.derive_seed(grid.seed, 0))
    return generate_family(spec)[0]


def failure_errors(grid, family=None):
    """``sqrt(L(Q))`` of RJD with ``grid.L`` trials, one value per repeat.

    Repeat ``r`` uses the seed ``derive_seed(grid.seed, 1, r)``.
    """
    if family is None:
        family = experiment_family(grid)
    errs = np.empty(grid.repeats)
    for r in range(grid.repeats):
        best, _ = rjd(family, grid.L, _seeding.derive_seed(grid.seed, 1, r))
        errs[r] = best.error
    return errs


def failure_probability_experiment(grid, errors=None):
    """Empirical failure frequency of RJD for every ``R`` in the grid.

    A run fails when ``sqrt(L(Q)) >= R * epsilon``; ``epsilon`` is floored at
    ``1e-15`` so exact inputs stay meaningful.  Rows are in increasing ``R``.
    """
    if errors is None:
        errors = failure_errors(grid)
    eps = max(grid.epsilon, EPSILON_FLOOR)
    rows = []
    for r in grid.r_values:
        k = int((errors >= r * eps).sum())
        lo, hi = wilson_interval(k, grid.repeats)
        rows.append(FailureRow(r, grid.L, k, grid.repeats, k / grid.repeats, lo, hi))
    return rows


def loglog_slope(rows, lo=10.0, hi=100.0, min_failures=30):
    """Least-squares slope of ``log freq`` against ``log(R - 1)``.

    Only rows with ``lo <= R - 1 <= hi`` and at least ``min_failures``
    failures are used.  Returns ``(slope, points_used)``; slope is ``nan`` with
    fewer than two points.
    """
    pts = [(math.log(r.R - 1), math.log(r.freq)) for r in rows
           if lo * (1 - 1e-9) <= r.R - 1 <= hi * (1 + 1e-9) and r.failures >= min_failures]
    if len(pts) < 2:
        return float("nan"), len(pts)
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0]), len(pts)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_io.fmt(r.R), r.L, r.failures, r.repeats, _io.fmt(r.freq), _io.fmt(r.ci_lo), _io.fmt(r.ci_hi)])
    return buf.getvalue()
