import json
import random
from fractions import Fraction

import pytest

from cornerscat.corner_induction import (
    basis_change_matrix,
    boundary_rows,
    certify_induction,
    certify_order,
    chain_step,
    lambda_sum_diff_coeffs,
    pde_rows,
    reference_reduction_diff,
)
from cornerscat.exact import GaussianRational, GRMatrix
from cornerscat.lame_algebra import ab_parameters


def _col(row, t, j, order):
    return row.coeffs[t * (order + 1) + j]


def test_sum_diff_coefficients():
    assert lambda_sum_diff_coeffs(2, 0) == [1, 2, 1]
    assert lambda_sum_diff_coeffs(0, 2) == [1, -2, 1]
    assert lambda_sum_diff_coeffs(1, 1) == [-1, 0, 1]
    assert lambda_sum_diff_coeffs(3, 1) == [-1, -2, 0, 2, 1]


def test_boundary_rows_low_orders_full_rank():
    # the Cauchy data alone pins the whole jet through order 3
    for n in range(4):
        rows = boundary_rows(n)
        m = GRMatrix([r.coeffs for r in rows])
        assert m.rank() == 2 * (n + 1)


def test_boundary_rows_order_one_structure():
    rows = boundary_rows(1)
    per_t = [r for r in rows if _col(r, 0, 0, 1) or _col(r, 0, 1, 1)]
    coeffs = sorted(tuple(int(c.re) for c in r.coeffs[:2]) for r in per_t)
    assert coeffs == [(1, -1), (1, 1)]


def test_boundary_rows_order_four_annihilate_extremes_modulo_middle():
    # the four boundary rows at order 4 imply x3 = x1 = 0, x4 = x0 = -3 x2
    rows = boundary_rows(4)[:4]
    m = GRMatrix([[r.coeffs[j] for j in range(5)] for r in rows])
    kernel_vec = GRMatrix.column([-3, 0, 1, 0, -3])
    assert (m @ kernel_vec) == GRMatrix.zeros(4, 1)
    assert m.rank() == 4


def test_pde_rows_empty_below_order_four():
    assert pde_rows(3, 9, 1) == []


def test_pde_rows_order_four_coefficients():
    # two coupled rows: (a-b) on W1 at j=1 with (a+b) on W2 at j=2, and
    # (a+b) on W1 at j=2 with (a-b) on W2 at j=3
    a, b = ab_parameters(1, 1)
    rows = pde_rows(4, a, b)
    assert len(rows) == 2
    r0, r1 = rows
    assert _col(r0, 0, 1, 4) == GaussianRational(a - b)
    assert _col(r0, 1, 2, 4) == GaussianRational(a + b)
    assert sum(1 for c in r0.coeffs if not c.is_zero()) == 2
    assert _col(r1, 0, 2, 4) == GaussianRational(a + b)
    assert _col(r1, 1, 3, 4) == GaussianRational(a - b)
    assert sum(1 for c in r1.coeffs if not c.is_zero()) == 2


def test_pde_rows_order_five_elimination():
    # at order 5 the four coupled rows pair into systems with determinant
    # -4ab, forcing the once-shifted middle monomials to vanish
    a, b = ab_parameters(Fraction(2), Fraction(3))
    rows = pde_rows(5, a, b)
    assert len(rows) == 4
    monomials = [
        tuple((t, j) for t in range(2) for j in range(6) if not _col(r, t, j, 5).is_zero())
        for r in rows
    ]
    assert ((0, 1), (1, 2)) in monomials
    assert ((0, 2), (1, 3)) in monomials
    assert ((0, 3), (1, 4)) in monomials
    assert ((0, 2), (1, 3)) in monomials


def test_pde_row_count_matches_shift_count():
    a, b = ab_parameters(1, 1)
    for n in range(4, 12):
        assert len(pde_rows(n, a, b)) == 2 * (n - 3)


def test_certify_orders_through_16():
    a, b = ab_parameters(1, 1)
    for n in range(17):
        cert = certify_order(n, a, b)
        assert cert.full_rank, f"order {n} rank {cert.rank} of {cert.n_unknowns}"


def test_certify_rejects_inadmissible_without_probe():
    with pytest.raises(ValueError):
        certify_order(4, 1, 1)
    with pytest.raises(ValueError):
        certify_order(4, -1, 1)


def test_degeneracy_probes():
    # the vanishing-coefficient probes break full rank at low order,
    # certifying that the constraints genuinely use a+b != 0 and ab != 0
    assert not certify_order(4, 1, -1, probe=True).full_rank  # a + b = 0
    assert not certify_order(4, 0, 0, probe=True).full_rank  # both coefficients gone
    assert certify_order(4, 1, 0, probe=True).full_rank
    assert not certify_order(5, 1, 0, probe=True).full_rank  # coupling determinant -4ab = 0
    assert not certify_order(5, 0, 1, probe=True).full_rank


def test_equal_nonzero_coefficients_do_not_degrade_rank():
    # setting a = b (nonzero) keeps every middle monomial pinned through the
    # (a+b)-weighted rows, so the certificate stays at full rank; recorded
    # because it is easy to mistake a = b for a degeneracy of the coupling
    # determinant -4ab, which only vanishes with a or b
    for n in range(4, 8):
        assert certify_order(n, 9, 9, probe=True).full_rank


def test_basis_change_invertible_through_16():
    for n in range(17):
        m = basis_change_matrix(n)
        assert m.rank() == n + 1


def test_chain_bookkeeping():
    step = chain_step(2, {0, 1, 2})
    assert step.vanishing_u0_order == 0
    assert step.licensed_coupled_order == 4
    step = chain_step(7, set(range(8)))
    assert step.vanishing_u0_order == 5
    with pytest.raises(ValueError):
        chain_step(5, {0, 1, 2})
    with pytest.raises(ValueError):
        chain_step(1)


def test_full_certificate_random_parameters():
    rng = random.Random(21)
    for _ in range(5):
        while True:
            mu = Fraction(rng.randint(1, 9), rng.randint(1, 4))
            lm = Fraction(rng.randint(-6, 9), rng.randint(1, 5))
            if lm + mu > 0:
                break
        cert = certify_induction(lm, mu, max_order=10)
        assert cert.passed
        assert all(c.full_rank for c in cert.orders)
        assert cert.chain[-1].licensed_coupled_order >= 12
        payload = json.loads(cert.to_json())
        assert payload["passed"]
        assert len(payload["orders"]) == 11
        assert all(o["pivot_hash"] for o in payload["orders"])


def test_certificate_rejects_bad_parameters():
    with pytest.raises(ValueError):
        certify_induction(Fraction(-2), Fraction(1), 4)


def test_reference_reductions_match_derivation():
    # tabulated order-4/5/6 normal forms agree entrywise with the
    # independently solved boundary systems
    expected = {
        4: [[-3], [0], [0], [-3]],
        5: [[0, -5], [-1, 0], [0, -1], [-5, 0]],
        6: [[-5, 0, -10], [0, Fraction(-5, 3), 0], [0, Fraction(-5, 3), 0], [-10, 0, -5]],
    }
    for order, mat in expected.items():
        diff = reference_reduction_diff(order)
        assert diff.matches
        assert [list(r) for r in diff.derived] == [[Fraction(x) for x in row] for row in mat]
        assert all(x == 0 for row in diff.entry_diffs for x in row)
        payload = diff.to_dict()
        assert payload["matches"]


def test_reference_reduction_rejects_other_orders():
    with pytest.raises(ValueError):
        reference_reduction_diff(7)
