"""Applications: cumulant-based blind source separation and single-topic-model recovery."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _io, _seeding
from .drjd import drjd
from .errors import RankDeficiencyError
from .matfam import SymmetricFamily
from .rjd import rjd
from .synth import haar_orthogonal

RANK_RTOL = 1e-12
NEGATIVE_TOL = 1e-8


@dataclass(frozen=True)
class SignalMatrix:
    """Observed signals, one row per time sample and one column per channel."""

    samples: np.ndarray

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"signals must be a 2-D (T, n) array, got shape {x.shape}")
        if x.shape[0] <= x.shape[1]:
            raise ValueError(f"need more samples than channels, got T={x.shape[0]}, n={x.shape[1]}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def T(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[1]


@dataclass(frozen=True)
class TopicModel:
    """Topic weights ``omega`` (length k) and word distributions ``m`` (n x k, column-stochastic)."""

    omega: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        m = np.array(self.m, dtype=float)
        if omega.ndim != 1 or m.ndim != 2 or m.shape[1] != omega.size:
            raise ValueError("omega must have length k and m shape (n, k)")
        if m.shape[1] > m.shape[0]:
            raise ValueError("need k <= n")
        if np.any(omega <= 0) or abs(omega.sum() - 1) > 1e-9:
            raise ValueError("omega must be a positive probability vector")
        if np.any(m < 0) or np.any(np.abs(m.sum(axis=0) - 1) > 1e-9):
            raise ValueError("columns of m must be probability vectors")
        omega.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "m", m)

    @property
    def k(self):
        return self.omega.size

    @property
    def n(self):
        return self.m.shape[0]


def whiten(cov, rank):
    """Whitening map ``W = Lambda_k^(-1/2) U_k^T`` from the top ``rank`` eigenpairs.

    ``W cov W^T = I_k``.  Rows come in decreasing eigenvalue order.  Raises
    :class:`RankDeficiencyError` when the ``rank``-th eigenvalue is at most
    ``1e-12 * trace(cov)``.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0]
    if not 1 <= rank <= n:
        raise ValueError(f"rank must be in [1, {n}], got {rank}")
    lam, u = np.linalg.eigh((cov + cov.T) / 2)
    lam, u = lam[::-1][:rank], u[:, ::-1][:, :rank]
    if not lam[-1] > RANK_RTOL * np.trace(cov):
        raise RankDeficiencyError(f"covariance has rank < {rank} (eigenvalue {lam[-1]:.3g})")
    return u.T / np.sqrt(lam)[:, None]


def _whitening_pinv(cov, rank):
    lam, u = np.linalg.eigh((cov + cov.T) / 2)
    lam, u = lam[::-1][:rank], u[:, ::-1][:, :rank]
    return u * np.sqrt(lam)


def probe_matrices(n, count=None, seed=0):
    """Symmetric probe matrices for :func:`cumulant_matrices`.

    The default is the ``n(n+1)/2`` symmetrized canonical basis
    ``(E_ij + E_ji) / 2`` (diagonal first, then upper triangle by row).  A
    smaller ``count`` truncates that list; a larger one appends random
    symmetric Gaussian probes drawn from ``seed``.
    """
    basis = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 0.5
            basis.append(e)
    if count is None:
        count = len(basis)
    if count < 1:
        raise ValueError("need at least one probe matrix")
    if count <= len(basis):
        return basis[:count]
    g = _seeding.stream(seed, 2).standard_normal((count - len(basis), n, n))
    return basis + list((g + g.transpose(0, 2, 1)) / 2)


def cumulant_matrices(x, probes):
    """Fourth-order cumulant matrices ``Q_x(M)_ij = sum_kl cum(x_i, x_j, x_k, x_l) M_kl``.

    Signals are centered first.  For zero-mean data and symmetric ``M`` with
    ``C = E[x x^T]`` and ``q_t = x_t^T M x_t``::

        Q_x(M) = E[q x x^T] - C tr(M C) - 2 C M C

    which is the plug-in (1/T) estimator.  Requires ``T >= 10 n^2``.
    """
    if not isinstance(x, SignalMatrix):
        x = SignalMatrix(x)
    t, n = x.T, x.n
    if t < 10 * n * n:
        raise ValueError(f"T={t} samples is too few for n={n} channels; need at least 10*n^2 = {10 * n * n}")
    z = x.samples - x.samples.mean(axis=0)
    c = z.T @ z / t
    out = []
    for m in probes:
        m = np.asarray(m, dtype=float)
        if m.shape != (n, n):
            raise ValueError(f"probe has shape {m.shape}, expected ({n}, {n})")
        m = (m + m.T) / 2
        q = np.einsum("ti,ij,tj->t", z, m, z)
        mom = (z * q[:, None]).T @ z / t
        cm = c @ m @ c
        out.append(mom - c * np.trace(m @ c) - cm - cm.T)
    return SymmetricFamily(np.array(out))


def _jd(family, algo, trials, seed):
    if algo == "rjd":
        return rjd(family, trials, seed)[0].q.q
    if algo == "drjd":
        return drjd(family, trials, seed)[0].q
    raise ValueError(f"unknown joint diagonalizer {algo!r}")


def bss_separate(x, probe_count=None, jd="rjd", trials=3, seed=0):
    """Unmixing matrix ``B = Q^T W`` from whitening and joint diagonalization.

    ``W`` whitens the empirical covariance of ``x`` and ``Q`` jointly
    diagonalizes the cumulant matrices of the whitened signals.
    """
    if not isinstance(x, SignalMatrix):
        x = SignalMatrix(x)
    z = x.samples - x.samples.mean(axis=0)
    w = whiten(z.T @ z / x.T, x.n)
    probes = probe_matrices(x.n, probe_count, seed)
    family = cumulant_matrices(SignalMatrix(z @ w.T), probes)
    q = _jd(family, jd, trials, seed)
    return q.T @ w


def demo_mixture(samples=100_000, seed=0, n_laplace=3, n_gaussian=1):
    """Synthetic BSS problem: i.i.d. unit-variance Laplace sources plus Gaussian channels.

    Returns ``(x, mixing, sources)`` where ``x = sources @ mixing.T`` and the
    mixing matrix is Haar-random orthogonal.
    """
    rng = _seeding.stream(seed, 3)
    n = n_laplace + n_gaussian
    s = np.hstack([rng.laplace(scale=1 / np.sqrt(2), size=(samples, n_laplace)),
                   rng.standard_normal((samples, n_gaussian))])
    a = haar_orthogonal(n, rng)
    return SignalMatrix(s @ a.T), a, s


def topic_moments_exact(model):
    """Exact moments ``M2 = sum_i w_i mu_i mu_i^T`` and the ``n`` slices of ``M3``.

    Slice ``j`` of ``M3`` is ``sum_i w_i mu_i[j] mu_i mu_i^T``.
    """
    mu, w = model.m, model.omega
    m2 = (mu * w) @ mu.T
    slices = np.einsum("i,ji,ai,bi->jab", w, mu, mu, mu)
    m2 = (m2 + m2.T) / 2
    slices = (slices + slices.transpose(0, 2, 1)) / 2
    return m2, list(slices)


def topic_recover(m2, m3_slices, k, jd="rjd", trials=3, seed=0):
    """Recover ``(omega, mu_1..mu_k)`` from second and third moments.

    With ``W`` whitening ``M2`` to rank ``k``, the vectors
    ``u_i = sqrt(w_i) W mu_i`` are orthonormal and ``W S_j W^T`` has eigenvalue
    ``mu_i[j]`` along ``u_i``.  Jointly diagonalizing ``{I_k, W S_j W^T}``
    therefore yields the ``u_i``; mapping back with ``P = U_k Lambda_k^(1/2)``
    gives ``P u_i = sqrt(w_i) mu_i``, and since ``mu_i`` sums to one,
    ``sqrt(w_i) = 1^T P u_i``.
    """
    m2 = np.asarray(m2, dtype=float)
    w = whiten(m2, k)
    p = _whitening_pinv(m2, k)
    family = SymmetricFamily(np.array([np.eye(k)] + [w @ np.asarray(s) @ w.T for s in m3_slices]))
    u = _jd(family, jd, trials, seed)
    scaled = p @ u
    z = scaled.sum(axis=0)
    mu = scaled / z
    omega = z**2
    if mu.min() < -NEGATIVE_TOL:
        raise ValueError(f"recovered topic has negative word probability {mu.min():.3g}; input is not a valid moment pair")
    mu = np.clip(mu, 0.0, None)
    mu /= mu.sum(axis=0)
    omega /= omega.sum()
    order = np.argsort(-omega, kind="stable")
    return TopicModel(omega[order], mu[:, order])


def topic_errors(truth, estimate):
    """Max absolute errors ``(omega, mu)`` after optimal topic matching."""
    cost = np.abs(truth.m[:, :, None] - estimate.m[:, None, :]).max(axis=0)
    rows, cols = linear_sum_assignment(cost)
    w_err = float(np.abs(truth.omega[rows] - estimate.omega[cols]).max())
    mu_err = float(np.abs(truth.m[:, rows] - estimate.m[:, cols]).max())
    return w_err, mu_err


def random_topic_model(n, k, seed=0):
    rng = _seeding.stream(seed, 4)
    return TopicModel(rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(n), size=k).T)


def load_topic_model(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return TopicModel(doc["omega"], np.array(doc["mu"], dtype=float).T)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: expected {{'omega': [...], 'mu': [[...], ...]}}") from exc


def save_topic_model(model, path):
    Path(path).write_text(_io.dumps({"omega": model.omega, "mu": model.m.T}) + "\n", encoding="utf-8")


def load_signals(path):
    return SignalMatrix(np.loadtxt(path, delimiter=",", ndmin=2))


def save_signals(x, path):
    samples = x.samples if isinstance(x, SignalMatrix) else np.asarray(x)
    Path(path).write_text("".join(",".join(_io.fmt(v) for v in row) + "\n" for row in samples), encoding="utf-8")
