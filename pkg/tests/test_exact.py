import random
from fractions import Fraction

import pytest

from cornerscat.exact import GR_I, GR_ONE, GaussianRational, GRMatrix


def _rand_gr(rng):
    return GaussianRational(
        Fraction(rng.randint(-9, 9), rng.randint(1, 7)),
        Fraction(rng.randint(-9, 9), rng.randint(1, 7)),
    )


def test_field_axioms_on_samples():
    rng = random.Random(1)
    for _ in range(200):
        a, b, c = (_rand_gr(rng) for _ in range(3))
        assert a + b == b + a
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        if not b.is_zero():
            assert (a / b) * b == a
    assert GR_I * GR_I == GaussianRational(-1)


def test_conjugation_involution_and_power():
    rng = random.Random(2)
    for _ in range(50):
        a = _rand_gr(rng)
        assert a.conj().conj() == a
        assert (a * a.conj()).im == 0
        assert a**3 == a * a * a
    with pytest.raises(ZeroDivisionError):
        GR_ONE / GaussianRational(0)


def _det_brute(m: GRMatrix) -> GaussianRational:
    n, _ = m.shape
    if n == 1:
        return m[0, 0]
    total = GaussianRational(0)
    for j in range(n):
        minor = GRMatrix(
            [[m[i, k] for k in range(n) if k != j] for i in range(1, n)]
        )
        term = m[0, j] * _det_brute(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def test_bareiss_det_matches_cofactor_expansion():
    rng = random.Random(3)
    for n in (2, 3, 4):
        for _ in range(30):
            m = GRMatrix([[_rand_gr(rng) for _ in range(n)] for _ in range(n)])
            assert m.det() == _det_brute(m)


def test_rank_on_constructed_matrices():
    rng = random.Random(4)
    for _ in range(40):
        rows = rng.randint(2, 5)
        cols = rng.randint(2, 5)
        r = rng.randint(0, min(rows, cols))
        # rank-r product of full-rank factors
        A = GRMatrix([[_rand_gr(rng) for _ in range(r)] for _ in range(rows)])
        B = GRMatrix([[_rand_gr(rng) for _ in range(cols)] for _ in range(r)])
        if r == 0:
            M = GRMatrix.zeros(rows, cols)
        else:
            M = A @ B
        assert M.rank() <= r
        if r and A.rank() == r and B.rank() == r:
            assert M.rank() == r


def test_inverse_and_solve():
    rng = random.Random(5)
    for _ in range(30):
        while True:
            m = GRMatrix([[_rand_gr(rng) for _ in range(3)] for _ in range(3)])
            if not m.det().is_zero():
                break
        assert m @ m.inverse() == GRMatrix.identity(3)
        rhs = GRMatrix.column([_rand_gr(rng) for _ in range(3)])
        x = m.solve(rhs)
        assert m @ x == rhs


def test_matrix_algebra_basics():
    m = GRMatrix([[1, GR_I], [0, 2]])
    assert m.transpose().rows[0][1] == GaussianRational(0)
    assert m.conj()[0, 1] == GaussianRational(0, -1)
    assert (m.scale(2))[1, 1] == GaussianRational(4)
    assert (m + m) == m.scale(2)
    assert (m - m) == GRMatrix.zeros(2, 2)
