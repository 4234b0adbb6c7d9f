"""Matrix families: data model, validation, file I/O and commutator diagnostics."""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _io
from .errors import AsymmetryError, DimensionMismatchError, FamilyFormatError

#: Relative asymmetry accepted (and removed by symmetrization) on input.
SYMMETRY_REJECT_TOL = 1e-6
ORTHOGONALITY_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SymmetricFamily:
    """An ordered family of ``d`` real symmetric ``n x n`` matrices.

    ``matrices`` is stored as a read-only ``(d, n, n)`` array.  Inputs whose
    relative asymmetry ``max_k ||A_k - A_k^T||_F / max_k ||A_k||_F`` is at most
    ``1e-6`` are replaced by ``(A + A^T) / 2``; anything worse is rejected.
    """

    matrices: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrices, dtype=float)
        if a.ndim == 2:
            a = a[None]
        if a.ndim != 3 or a.shape[0] < 1 or a.shape[1] < 1 or a.shape[1] != a.shape[2]:
            raise DimensionMismatchError(f"expected a (d, n, n) stack of square matrices, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise FamilyFormatError("family contains non-finite entries")
        at = a.transpose(0, 2, 1)
        asym = np.sqrt(((a - at) ** 2).sum(axis=(1, 2))).max()
        if asym > 0:
            scale = np.sqrt((a**2).sum(axis=(1, 2))).max()
            if asym > SYMMETRY_REJECT_TOL * scale:
                raise AsymmetryError(f"relative asymmetry {asym / scale:.3g} exceeds {SYMMETRY_REJECT_TOL:g}")
            a = (a + at) / 2
        object.__setattr__(self, "matrices", _frozen(a))

    @property
    def n(self):
        return self.matrices.shape[1]

    @property
    def d(self):
        return self.matrices.shape[0]

    def __len__(self):
        return self.d

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, k):
        return self.matrices[k]

    def frobenius_sq(self):
        """Return ``sum_k ||A_k||_F^2``."""
        return float((self.matrices**2).sum())

    def conjugate(self, q):
        """Return the ``(d, m, m)`` stack ``Q^T A_k Q`` for an ``n x m`` matrix ``Q``."""
        q = np.asarray(getattr(q, "q", q), dtype=float)
        if q.ndim != 2 or q.shape[0] != self.n:
            raise DimensionMismatchError(f"Q has shape {q.shape}, family has n={self.n}")
        return q.T @ self.matrices @ q

    def restrict(self, q):
        """Family ``{Q^T A_k Q}``, symmetrized; ``Q`` has orthonormal columns."""
        return SymmetricFamily(self.conjugate(q))

    def __eq__(self, other):
        if not isinstance(other, SymmetricFamily):
            return NotImplemented
        return self.matrices.shape == other.matrices.shape and bool(np.array_equal(self.matrices, other.matrices))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class OrthogonalMatrix:
    """A square matrix verified to satisfy ``||Q^T Q - I||_F <= 1e-10 sqrt(n)``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DimensionMismatchError(f"orthogonal matrix must be square, got shape {q.shape}")
        n = q.shape[0]
        dev = orthogonality_defect(q)
        if not dev <= ORTHOGONALITY_TOL * math.sqrt(n):
            raise ValueError(f"matrix is not orthogonal: ||Q^T Q - I||_F = {dev:.3g}")
        object.__setattr__(self, "q", _frozen(q))

    @property
    def n(self):
        return self.q.shape[0]

    @property
    def T(self):
        return self.q.T

    def __array__(self, dtype=None, copy=None):
        return self.q if dtype is None else self.q.astype(dtype)


@dataclass(frozen=True)
class NoiseBudget:
    """Aggregate Frobenius norm bound ``(sum_k ||E_k||_F^2)^(1/2) <= epsilon``."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")


def orthogonality_defect(q):
    q = np.asarray(q, dtype=float)
    return float(np.linalg.norm(q.T @ q - np.eye(q.shape[1])))


def load_family(path):
    """Read a family file ``{"n": n, "d": d, "matrices": [[n*n floats], ...]}``."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not {"n", "d", "matrices"} <= doc.keys():
        raise FamilyFormatError(f"{path}: expected an object with keys 'n', 'd', 'matrices'")
    n, d, mats = doc["n"], doc["d"], doc["matrices"]
    if not (isinstance(n, int) and isinstance(d, int)) or n < 1 or d < 1:
        raise FamilyFormatError(f"{path}: 'n' and 'd' must be positive integers")
    if not isinstance(mats, list) or len(mats) != d:
        raise DimensionMismatchError(f"{path}: expected {d} matrices, found {len(mats) if isinstance(mats, list) else 0}")
    rows = []
    for k, m in enumerate(mats):
        if not isinstance(m, list) or len(m) != n * n:
            raise DimensionMismatchError(f"{path}: matrix {k} must have n*n = {n * n} entries")
        try:
            rows.append(np.array(m, dtype=float))
        except (TypeError, ValueError) as exc:
            raise FamilyFormatError(f"{path}: matrix {k} has non-numeric entries") from exc
    return SymmetricFamily(np.stack(rows).reshape(d, n, n))


def save_family(family, path):
    doc = {"n": family.n, "d": family.d, "matrices": [m.ravel() for m in family.matrices]}
    Path(path).write_text(_io.dumps(doc) + "\n", encoding="utf-8")


def commutator_norms(family):
    """Pairwise ``||A_j A_k - A_k A_j||_F`` as a symmetric ``d x d`` matrix."""
    a = family.matrices
    prod = np.einsum("jab,kbc->jkac", a, a)
    comm = prod - prod.transpose(1, 0, 2, 3)
    out = np.sqrt((comm**2).sum(axis=(2, 3)))
    out = np.triu(out, 1)
    return out + out.T


def random_linear_combination(family, mu):
    """Return ``sum_k mu_k A_k``.

    Only the upper triangle is accumulated and then mirrored, so the result is
    exactly symmetric.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (family.d,):
        raise DimensionMismatchError(f"mu has shape {mu.shape}, family has d={family.d}")
    m = np.tensordot(mu, family.matrices, axes=1)
    upper = np.triu(m)
    return upper + np.triu(m, 1).T
