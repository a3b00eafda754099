from fractions import Fraction

import numpy as np

from xmaslink import _rational as rat


def test_rank_simple():
    assert rat.rank([[1, 0], [0, 1]]) == 2
    assert rat.rank([[1, 2], [2, 4]]) == 1
    assert rat.rank([[0, 0], [0, 0]]) == 0


def test_rank_matches_numpy_on_random_integers():
    rng = np.random.default_rng(2)
    for _ in range(50):
        m = rng.integers(-4, 5, size=(rng.integers(1, 6), rng.integers(1, 6)))
        assert rat.rank(m.tolist()) == np.linalg.matrix_rank(m.astype(float))


def test_nullspace_orthogonal_to_rows():
    rng = np.random.default_rng(3)
    for _ in range(50):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(rows, 7))
        m = rng.integers(-5, 6, size=(rows, cols)).tolist()
        basis = rat.nullspace(m)
        assert len(basis) == cols - rat.rank(m)
        for v in basis:
            for row in m:
                assert sum(Fraction(a) * b for a, b in zip(row, v)) == 0


def test_primitive_scaling():
    assert rat.primitive([Fraction(1, 2), Fraction(-1, 3)]) == [3, -2]
    assert rat.primitive([2, 4, -6]) == [1, 2, -3]
    assert rat.primitive([-2, 4]) == [1, -2]  # first nonzero positive
    assert rat.primitive([0, 0]) == [0, 0]


def test_smallest_integer_vectors_order():
    basis = [[Fraction(1), Fraction(0), Fraction(1)],
             [Fraction(0), Fraction(1), Fraction(0)]]
    vecs = rat.smallest_integer_vectors(basis)
    assert vecs[0] == (0, 1, 0)
    assert sum(abs(x) for x in vecs[0]) <= sum(abs(x) for x in vecs[1])
    # entry bound filters
    bounded = rat.smallest_integer_vectors(basis, coeff_bound=3, entry_bound=1)
    assert all(max(abs(x) for x in v) <= 1 for v in bounded)


def test_matmul_int_exact():
    a = [[1, -1], [0, -2], [1, 1]]
    r = [[-1, 0, 1], [0, -2, 0]]
    assert rat.matmul_int(r, a) == [[0, 2], [0, 4]]
