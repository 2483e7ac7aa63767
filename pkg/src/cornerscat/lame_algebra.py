"""Exact verification of the Lamé symbol algebra.

Everything here is computed over Gaussian rationals, so each identity either
holds exactly or the report flags it.  Covered material:

* the rank-one determinant update ``det(A + U V^T) = (1 + V^T A^{-1} U) det(A)``;
* the symbol ``L = mu |eta|^2 I + (lambda + mu) Theta Theta^T`` with its exact
  determinant, eigenvalues and the symmetric diagonalizer ``P``;
* the matrix ``B`` entering the Wirtinger-type splitting of the squared
  operator, and its product identities;
* the two factorizations of the squared symbol ``L^2`` (through ``P_1 P_2``
  and through the Lambda-operator quadratic form).

The quadratic form in the complex field combination ``W_1 = w_1 - i w_2``,
``W_2 = w_1 + i w_2`` is exported for the corner induction machinery, which
uses it as the single source of truth for its coupled constraint rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import GR_I, GR_ONE, GaussianRational, GRMatrix, RationalLike, _as_fraction

__all__ = [
    "SymbolPoint",
    "LameSymbol",
    "rank_one_update_determinant",
    "lame_symbol",
    "b_matrix",
    "b_matrix_identities",
    "ab_parameters",
    "squared_symbol_factorizations",
    "coupled_quadratic_form",
    "AlgebraReport",
]


def _check_lame(lmbda: Fraction, mu: Fraction) -> None:
    if mu <= 0:
        raise ValueError(f"shear modulus must be positive, got {mu}")
    if lmbda + mu <= 0:
        raise ValueError(f"lambda + mu must be positive, got {lmbda + mu}")


@dataclass(frozen=True)
class SymbolPoint:
    """Rational elastic constants plus a nonzero rational frequency vector."""

    lmbda: Fraction
    mu: Fraction
    eta1: Fraction
    eta2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lmbda", _as_fraction(self.lmbda))
        object.__setattr__(self, "mu", _as_fraction(self.mu))
        object.__setattr__(self, "eta1", _as_fraction(self.eta1))
        object.__setattr__(self, "eta2", _as_fraction(self.eta2))
        _check_lame(self.lmbda, self.mu)
        if self.eta1 == 0 and self.eta2 == 0:
            raise ValueError("eta must be nonzero")

    @property
    def eta_sq(self) -> Fraction:
        return self.eta1 * self.eta1 + self.eta2 * self.eta2


@dataclass(frozen=True)
class AlgebraReport:
    """Outcome of one exact identity check."""

    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


def rank_one_update_determinant(
    A: GRMatrix, U: GRMatrix, V: GRMatrix
) -> tuple[GaussianRational, GaussianRational]:
    """Both sides of the rank-one determinant update, computed independently.

    Returns ``(det(A + U V^T), (1 + V^T A^{-1} U) det(A))``; the caller owns
    the equality assertion.  ``A`` must be invertible.
    """
    det_a = A.det()
    if det_a.is_zero():
        raise ValueError("A must be invertible")
    lhs = (A + (U @ V.transpose())).det()
    inner = (V.transpose() @ A.inverse() @ U)[0, 0]
    rhs = (GR_ONE + inner) * det_a
    return lhs, rhs


@dataclass(frozen=True)
class LameSymbol:
    """The 2x2 symbol of the elastostatic operator at a rational point."""

    point: SymbolPoint
    L: GRMatrix
    det_L: GaussianRational
    eigenvalues: tuple[GaussianRational, GaussianRational]
    P: GRMatrix

    def verify(self) -> AlgebraReport:
        p = self.point
        s = p.eta_sq
        checks = {
            "determinant": self.det_L == self.L.det(),
            "det_closed_form": self.det_L
            == GaussianRational((p.lmbda + 2 * p.mu) * p.mu * s * s),
            "diagonalization": self.L
            == self.P @ GRMatrix([[p.mu, 0], [0, p.lmbda + 2 * p.mu]]) @ self.P,
            "P_squared": self.P @ self.P == GRMatrix.identity(2).scale(s),
            "eigenvectors": all(
                self.L @ col == col.scale(lam)
                for col, lam in zip(self._p_columns(), self.eigenvalues[::-1])
            ),
        }
        return AlgebraReport("lame_symbol", all(checks.values()), checks)

    def _p_columns(self) -> list[GRMatrix]:
        return [GRMatrix.column([self.P[0, j], self.P[1, j]]) for j in (0, 1)]


def lame_symbol(p: SymbolPoint) -> LameSymbol:
    """Assemble the symbol, its determinant, eigenvalues and diagonalizer.

    Column one of ``P`` is the shear eigenvector, column two the
    compressional one; ``P`` is symmetric and squares to ``|eta|^2 I``.
    """
    s = p.eta_sq
    theta = GRMatrix.column([p.eta1, p.eta2])
    L = GRMatrix.identity(2).scale(p.mu * s) + (theta @ theta.transpose()).scale(
        p.lmbda + p.mu
    )
    det_L = GaussianRational((p.lmbda + 2 * p.mu) * p.mu * s * s)
    eigs = (
        GaussianRational((p.lmbda + 2 * p.mu) * s),
        GaussianRational(p.mu * s),
    )
    P = GRMatrix([[-p.eta2, p.eta1], [p.eta1, p.eta2]])
    return LameSymbol(p, L, det_L, eigs, P)


def ab_parameters(lmbda: RationalLike, mu: RationalLike) -> tuple[Fraction, Fraction]:
    """The squared-moduli pair ``a = (lambda + 2 mu)^2``, ``b = mu^2``."""
    lmbda = _as_fraction(lmbda)
    mu = _as_fraction(mu)
    return (lmbda + 2 * mu) ** 2, mu * mu


def b_matrix(lmbda: RationalLike, mu: RationalLike) -> GRMatrix:
    lmbda = _as_fraction(lmbda)
    mu = _as_fraction(mu)
    lp2m = lmbda + 2 * mu
    return GRMatrix(
        [
            [GaussianRational(0, -mu), GaussianRational(lp2m)],
            [GaussianRational(mu), GaussianRational(0, lp2m)],
        ]
    )


def b_matrix_identities(lmbda: RationalLike, mu: RationalLike) -> AlgebraReport:
    """Exact product identities of ``B`` with its conjugate and transpose."""
    lmbda = _as_fraction(lmbda)
    mu = _as_fraction(mu)
    _check_lame(lmbda, mu)
    a, b = ab_parameters(lmbda, mu)
    B = b_matrix(lmbda, mu)
    Bc = B.conj()
    j_plus = GRMatrix([[GR_ONE, GR_I], [GR_I, -GR_ONE]])
    checks = {
        "B_Bt": B @ B.transpose() == j_plus.scale(a - b),
        "Bbar_Bbart": Bc @ Bc.transpose() == j_plus.conj().scale(a - b),
        "mixed_products": B @ Bc.transpose() + Bc @ B.transpose()
        == GRMatrix.identity(2).scale(2 * (a + b)),
        "a_minus_b_factorization": a - b == (lmbda + mu) * (lmbda + 3 * mu),
    }
    return AlgebraReport(
        "b_matrix_identities",
        all(checks.values()),
        {**checks, "a": str(a), "b": str(b)},
    )


def _lambda_pair(p: SymbolPoint) -> tuple[GaussianRational, GaussianRational]:
    l1 = GaussianRational(p.eta1, -p.eta2)
    l2 = GaussianRational(p.eta1, p.eta2)
    return l1, l2


def squared_symbol_factorizations(p: SymbolPoint) -> AlgebraReport:
    """Check both factorizations of the squared symbol, exactly.

    The squared symbol ``L @ L`` must agree with the Laplacian-split form
    ``|eta|^2 P_1 P_2`` and with the quarter-sum quadratic form in
    ``Lambda_1 = eta_1 - i eta_2``, ``Lambda_2 = eta_1 + i eta_2``.
    """
    sym = lame_symbol(p)
    L2 = sym.L @ sym.L
    diag = GRMatrix([[p.mu, 0], [0, p.lmbda + 2 * p.mu]])
    P1 = sym.P @ diag
    P2 = diag @ sym.P
    split_form = (P1 @ P2).scale(p.eta_sq)

    l1, l2 = _lambda_pair(p)
    B = b_matrix(p.lmbda, p.mu)
    Bc = B.conj()
    quad = (
        (B @ B.transpose()).scale(l1 * l1)
        + (B @ Bc.transpose() + Bc @ B.transpose()).scale(l1 * l2)
        + (Bc @ Bc.transpose()).scale(l2 * l2)
    )
    lambda_form = quad.scale(l1 * l2 / 4)

    checks = {
        "laplacian_split": L2 == split_form,
        "lambda_quadratic": L2 == lambda_form,
        "laplacian_symbol": l1 * l2 == GaussianRational(p.eta_sq),
        "tangential_from_lambda": (l1 + l2) / 2 == GaussianRational(p.eta1)
        and GR_I * (l1 - l2) / 2 == GaussianRational(p.eta2),
        "p1_halfsum": P1
        == (B.scale(l1) + Bc.scale(l2)).scale(Fraction(1, 2)),
        "p2_halfsum": P2
        == (B.transpose().scale(l1) + Bc.transpose().scale(l2)).scale(Fraction(1, 2)),
    }
    return AlgebraReport("squared_symbol_factorizations", all(checks.values()), checks)


def coupled_quadratic_form(
    lmbda: RationalLike, mu: RationalLike
) -> list[GRMatrix]:
    """Quadratic form of the squared symbol in the complex field combinations.

    Returns the three constant 2x2 matrices ``[N20, N11, N02]`` such that the
    squared operator applied to ``w``, rewritten in the variables
    ``(W_1, W_2) = (w_1 - i w_2, w_1 + i w_2)`` and stripped of the common
    ``Lambda_1 Lambda_2 / 4`` prefactor and of the row recombination scale,
    reads ``Lambda_1^2 N20 + Lambda_1 Lambda_2 N11 + Lambda_2^2 N02`` acting
    on ``(W_1, W_2)^T``.  Generated from the B-matrix products; nothing here
    is transcribed from the solved constraint systems that consume it.
    """
    B = b_matrix(lmbda, mu)
    Bc = B.conj()
    coeffs = [
        B @ B.transpose(),
        B @ Bc.transpose() + Bc @ B.transpose(),
        Bc @ Bc.transpose(),
    ]
    # S maps (w_1, w_2) to (W_1, W_2); rows are recombined with S-bar/2 so
    # the coupled rows come out with the conventional (a -/+ b) coefficients.
    S = GRMatrix([[1, GaussianRational(0, -1)], [1, GR_I]])
    S_inv = S.inverse()
    C = S.conj().scale(Fraction(1, 2))
    return [C @ M @ S_inv for M in coeffs]
