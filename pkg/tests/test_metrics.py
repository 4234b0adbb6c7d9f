import itertools
import math

import numpy as np
import pytest

from rjdiag.errors import NotPositiveDefiniteError
from rjdiag.matfam import SymmetricFamily
from rjdiag.metrics import diag_part, least_squares_measure, moreau_amari, offdiag, pham_measure, score
from rjdiag.synth import haar_orthogonal

from conftest import random_symmetric


def _amari_bruteforce(m):
    n = len(m)
    total = 0.0
    for i in range(n):
        row = [abs(m[i][j]) for j in range(n)]
        col = [abs(m[j][i]) for j in range(n)]
        total += sum(row) / max(row) + sum(col) / max(col) - 2
    return total / (2 * n * (n - 1))


def test_offdiag_examples(rng):
    np.testing.assert_array_equal(offdiag(np.diag([1.0, 2, 3])), np.zeros((3, 3)))
    np.testing.assert_array_equal(offdiag([[1, 2], [3, 4]]), [[0, 2], [3, 0]])
    a = rng.standard_normal((5, 5))
    np.testing.assert_array_equal(offdiag(offdiag(a)), offdiag(a))
    np.testing.assert_array_equal(offdiag(a) + diag_part(a), a)


def test_least_squares_examples():
    assert least_squares_measure(SymmetricFamily(np.diag([1.0, 5.0])), np.eye(2)) == 0
    swap = SymmetricFamily(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert least_squares_measure(swap, np.eye(2)) == 2.0
    s = 1 / math.sqrt(2)
    q = np.array([[s, s], [-s, s]])
    assert least_squares_measure(swap, q) <= 1e-20


def test_least_squares_signed_permutation_invariance(rng):
    f = SymmetricFamily(np.array([random_symmetric(rng, 6) for _ in range(3)]))
    q = haar_orthogonal(6, rng)
    p = np.eye(6)[rng.permutation(6)] * rng.choice([-1.0, 1.0], 6)
    assert least_squares_measure(f, q @ p) == pytest.approx(least_squares_measure(f, q), rel=1e-12)


def test_pham_examples():
    assert pham_measure(SymmetricFamily(np.diag([1.0, 3.0])), np.eye(2)) == 0
    value = pham_measure(SymmetricFamily(np.array([[2.0, 1.0], [1.0, 2.0]])), np.eye(2))
    # n = 2: 1/(2n) * (log(2*2) - log(4 - 1))
    assert value == pytest.approx(0.25 * math.log(4 / 3), rel=1e-14)


def test_pham_rejects_indefinite():
    f = SymmetricFamily(np.array([np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]])]))
    with pytest.raises(NotPositiveDefiniteError) as info:
        pham_measure(f, np.eye(2))
    assert info.value.k == 1
    assert score(f, np.eye(2)).pham is None


def test_pham_nonnegative(rng):
    for _ in range(50):
        g = rng.standard_normal((3, 5, 5))
        f = SymmetricFamily(g @ g.transpose(0, 2, 1) + 0.1 * np.eye(5))
        assert pham_measure(f, haar_orthogonal(5, rng)) >= -1e-12


def test_moreau_amari_examples():
    assert moreau_amari(np.eye(3)) == 0
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert moreau_amari(np.diag([5.0, -3.0]) @ swap) == 0
    # all-ones 2x2: each row and column term is 2/1 - 1 = 1, total 4 / (2*2*1)
    assert _amari_bruteforce([[1, 1], [1, 1]]) == 1.0
    assert moreau_amari(np.ones((2, 2))) == 1.0


def test_moreau_amari_matches_bruteforce(rng):
    for n in range(2, 7):
        m = rng.standard_normal((n, n))
        assert moreau_amari(m) == pytest.approx(_amari_bruteforce(m.tolist()), rel=1e-13)


def test_moreau_amari_invariances(rng):
    m = rng.standard_normal((5, 5))
    p1, p2 = np.eye(5)[rng.permutation(5)], np.eye(5)[rng.permutation(5)]
    assert moreau_amari(p1 @ m @ p2) == pytest.approx(moreau_amari(m), rel=1e-13)
    assert moreau_amari(-3.7 * m) == pytest.approx(moreau_amari(m), rel=1e-13)


def test_moreau_amari_all_scaled_permutations():
    for perm in itertools.permutations(range(4)):
        p = np.eye(4)[list(perm)] * np.array([1.0, -2.0, 0.5, 7.0])
        assert moreau_amari(p) == 0


def test_moreau_amari_zero_row():
    with pytest.raises(ValueError):
        moreau_amari(np.array([[1.0, 0.0], [0.0, 0.0]]))
