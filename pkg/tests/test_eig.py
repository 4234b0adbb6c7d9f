import math

import numpy as np
import pytest

from rjdiag.eig import jacobi_eig, symmetric_eig
from rjdiag.errors import ConvergenceError

from conftest import random_symmetric

METHODS = ["lapack", "jacobi"]


def _charpoly_roots_3x3(a):
    """Eigenvalues of a symmetric 3x3 matrix from its characteristic polynomial."""
    tr = np.trace(a)
    minors = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0] + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0] + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
    det = (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
           - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
           + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))
    # trigonometric solution of the depressed cubic (all roots real)
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    q = tr / 3
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2 * p1
    p = math.sqrt(p2 / 6)
    b = (a - q * np.eye(3)) / p
    r = np.clip(np.linalg.det(b) / 2, -1, 1)
    phi = math.acos(r) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    roots = np.sort([e1, 3 * q - e1 - e3, e3])
    # cross-check against the polynomial coefficients themselves
    assert np.allclose(np.polyval([1, -tr, minors, -det], roots), 0, atol=1e-9 * max(1, abs(det), abs(tr) ** 3))
    return roots


@pytest.mark.parametrize("method", METHODS)
def test_diagonal_input(method):
    e = symmetric_eig(np.diag([3.0, 1.0, 2.0]), method)
    np.testing.assert_array_equal(e.lam, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(e.q.q, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])


@pytest.mark.parametrize("method", METHODS)
def test_2x2_closed_form(method):
    e = symmetric_eig(np.array([[0.0, 1.0], [1.0, 0.0]]), method)
    np.testing.assert_allclose(e.lam, [-1.0, 1.0], atol=1e-15)
    s = 1 / math.sqrt(2)
    # sign convention: largest-magnitude entry positive, first one on ties
    np.testing.assert_allclose(e.q.q, [[s, s], [-s, s]], atol=1e-15)


@pytest.mark.parametrize("method", METHODS)
def test_identity(method):
    e = symmetric_eig(np.eye(5), method)
    np.testing.assert_allclose(e.lam, np.ones(5))
    assert np.linalg.norm(e.q.q - np.eye(5)) <= 1e-12 or np.linalg.norm(np.eye(5) @ e.q.q - e.q.q * e.lam) <= 1e-10


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("n", [1, 2, 7, 40])
def test_residual_orthogonality_reconstruction(method, n, rng):
    for _ in range(3):
        a = random_symmetric(rng, n) * 10.0 ** rng.integers(-3, 4)
        e = symmetric_eig(a, method)
        q, lam = e.q.q, e.lam
        scale = max(1.0, np.linalg.norm(a))
        assert np.linalg.norm(a @ q - q * lam) <= 1e-10 * scale
        assert np.linalg.norm(a - (q * lam) @ q.T) <= 1e-10 * scale
        assert np.linalg.norm(q.T @ q - np.eye(n)) <= 1e-10 * math.sqrt(n)
        assert np.all(np.diff(lam) >= 0)


def test_lapack_backward_stability_n200(rng):
    a = random_symmetric(rng, 200)
    e = symmetric_eig(a)
    assert np.linalg.norm(a - (e.q.q * e.lam) @ e.q.q.T) <= 1e-10 * np.linalg.norm(a)


@pytest.mark.parametrize("method", METHODS)
def test_matches_characteristic_polynomial_3x3(method, rng):
    for _ in range(200):
        a = random_symmetric(rng, 3)
        np.testing.assert_allclose(symmetric_eig(a, method).lam, _charpoly_roots_3x3(a), atol=1e-8, rtol=0)


@pytest.mark.parametrize("method", METHODS)
def test_deterministic(method, rng):
    a = random_symmetric(rng, 12)
    e1, e2 = symmetric_eig(a, method), symmetric_eig(a.copy(), method)
    assert np.array_equal(e1.q.q, e2.q.q) and np.array_equal(e1.lam, e2.lam)


def test_backends_agree(rng):
    a = random_symmetric(rng, 15)
    np.testing.assert_allclose(symmetric_eig(a, "jacobi").lam, symmetric_eig(a).lam, atol=1e-12)


def test_sign_convention(rng):
    q = symmetric_eig(random_symmetric(rng, 9)).q.q
    pivots = np.argmax(np.abs(q), axis=0)
    assert np.all(q[pivots, np.arange(9)] > 0)


def test_zero_matrix():
    e = symmetric_eig(np.zeros((4, 4)), "jacobi")
    np.testing.assert_array_equal(e.lam, np.zeros(4))


def test_rejects_asymmetric():
    with pytest.raises(ValueError):
        symmetric_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_jacobi_iteration_cap(rng):
    with pytest.raises(ConvergenceError):
        jacobi_eig(random_symmetric(rng, 6), max_sweeps=1)


def test_unknown_method():
    with pytest.raises(ValueError):
        symmetric_eig(np.eye(2), "qr")
