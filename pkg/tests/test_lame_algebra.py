import random
from fractions import Fraction

import pytest

from cornerscat.exact import GR_I, GR_ONE, GaussianRational, GRMatrix
from cornerscat.lame_algebra import (
    SymbolPoint,
    ab_parameters,
    b_matrix,
    b_matrix_identities,
    coupled_quadratic_form,
    lame_symbol,
    rank_one_update_determinant,
    squared_symbol_factorizations,
)


def _rand_frac(rng, lo=-9, hi=9):
    return Fraction(rng.randint(lo, hi), rng.randint(1, 7))


def _rand_point(rng) -> SymbolPoint:
    while True:
        mu = Fraction(rng.randint(1, 10), rng.randint(1, 5))
        lm = _rand_frac(rng)
        if lm + mu <= 0:
            continue
        e1, e2 = _rand_frac(rng), _rand_frac(rng)
        if e1 == 0 and e2 == 0:
            continue
        return SymbolPoint(lm, mu, e1, e2)


def test_rank_one_update_500_random_instances():
    rng = random.Random(11)
    checked = 0
    while checked < 500:
        A = GRMatrix([[_rand_frac(rng) for _ in range(2)] for _ in range(2)])
        if A.det().is_zero():
            continue
        U = GRMatrix.column([_rand_frac(rng), _rand_frac(rng)])
        V = GRMatrix.column([_rand_frac(rng), _rand_frac(rng)])
        lhs, rhs = rank_one_update_determinant(A, U, V)
        assert lhs == rhs
        checked += 1


def test_rank_one_update_trivial_and_singular():
    I = GRMatrix.identity(2)
    z = GRMatrix.column([0, 0])
    lhs, rhs = rank_one_update_determinant(I, z, z)
    assert lhs == rhs == GR_ONE
    with pytest.raises(ValueError):
        rank_one_update_determinant(GRMatrix.zeros(2, 2), z, z)


def test_rank_one_update_symbol_structure():
    # the rank-one route to the symbol determinant: A = mu |eta|^2 I and
    # U = V = sqrt(lam + mu) Theta, realized with (lam + mu) = s^2 rational
    rng = random.Random(12)
    for _ in range(50):
        s = _rand_frac(rng, 1, 9)
        mu = Fraction(rng.randint(1, 9))
        lm = s * s - mu
        e1, e2 = _rand_frac(rng), Fraction(rng.randint(1, 9))
        eta_sq = e1 * e1 + e2 * e2
        A = GRMatrix.identity(2).scale(mu * eta_sq)
        U = GRMatrix.column([s * e1, s * e2])
        lhs, rhs = rank_one_update_determinant(A, U, U)
        assert lhs == rhs
        expected = GaussianRational((1 + (lm + mu) / mu) * (mu * eta_sq) ** 2)
        assert rhs == expected


def test_symbol_at_unit_point():
    p = SymbolPoint(Fraction(1), Fraction(1), Fraction(1), Fraction(0))
    sym = lame_symbol(p)
    assert sym.L == GRMatrix([[3, 0], [0, 1]])
    assert sym.det_L == GaussianRational(3)
    assert sym.eigenvalues == (GaussianRational(3), GaussianRational(1))
    assert sym.P == GRMatrix([[0, 1], [1, 0]])
    assert sym.verify().passed


def test_symbol_invariants_200_random_points():
    rng = random.Random(13)
    for _ in range(200):
        p = _rand_point(rng)
        sym = lame_symbol(p)
        rep = sym.verify()
        assert rep.passed, rep.details
        # P is symmetric, so the displayed two-sided product is literal
        assert sym.P == sym.P.transpose()


def test_symbol_rejects_zero_eta():
    with pytest.raises(ValueError):
        SymbolPoint(Fraction(1), Fraction(1), Fraction(0), Fraction(0))


def test_b_matrix_identities_unit_parameters():
    rep = b_matrix_identities(Fraction(1), Fraction(1))
    assert rep.passed
    a, b = ab_parameters(1, 1)
    assert (a, b) == (9, 1)
    B = b_matrix(1, 1)
    j = GRMatrix([[GR_ONE, GR_I], [GR_I, -GR_ONE]])
    assert B @ B.transpose() == j.scale(8)
    mixed = B @ B.conj().transpose() + B.conj() @ B.transpose()
    assert mixed == GRMatrix.identity(2).scale(20)


def test_b_matrix_identities_fractional_parameters():
    rep = b_matrix_identities(Fraction(-1, 2), Fraction(1))
    assert rep.passed
    a, b = ab_parameters(Fraction(-1, 2), 1)
    assert (a, b) == (Fraction(9, 4), 1)


def test_a_never_equals_b_for_admissible_parameters():
    rng = random.Random(14)
    for _ in range(100):
        p = _rand_point(rng)
        a, b = ab_parameters(p.lmbda, p.mu)
        assert a - b == (p.lmbda + p.mu) * (p.lmbda + 3 * p.mu)
        assert a != b


def test_squared_symbol_factorizations_random_points():
    rng = random.Random(15)
    for _ in range(200):
        rep = squared_symbol_factorizations(_rand_point(rng))
        assert rep.passed, rep.details


def test_lambda_symbols_special_directions():
    # eta = (1, 0): both Lambda symbols equal 1; eta = (0, 1): -i and i
    p = SymbolPoint(Fraction(1), Fraction(1), Fraction(1), Fraction(0))
    assert squared_symbol_factorizations(p).details["laplacian_symbol"]
    q = SymbolPoint(Fraction(1), Fraction(1), Fraction(0), Fraction(1))
    assert squared_symbol_factorizations(q).details["laplacian_symbol"]


def test_coupled_form_matches_closed_shape():
    rng = random.Random(16)
    for _ in range(25):
        while True:
            mu = Fraction(rng.randint(1, 9), rng.randint(1, 4))
            lm = _rand_frac(rng)
            if lm + mu > 0:
                break
        a, b = ab_parameters(lm, mu)
        n20, n11, n02 = coupled_quadratic_form(lm, mu)
        assert n20 == GRMatrix([[0, 0], [0, a - b]])
        assert n11 == GRMatrix([[0, a + b], [a + b, 0]])
        assert n02 == GRMatrix([[a - b, 0], [0, 0]])


def test_coupling_matrix_determinant():
    rng = random.Random(17)
    for _ in range(50):
        while True:
            mu = Fraction(rng.randint(1, 9), rng.randint(1, 4))
            lm = _rand_frac(rng)
            if lm + mu > 0:
                break
        a, b = ab_parameters(lm, mu)
        m = GRMatrix([[a - b, a + b], [a + b, a - b]])
        assert m.det() == GaussianRational(-4 * a * b)
        assert not m.det().is_zero()
