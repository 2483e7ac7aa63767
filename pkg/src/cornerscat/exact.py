"""Exact complex-rational scalars and small dense matrices.

Scalars are Gaussian rationals (rational real and imaginary parts backed by
``fractions.Fraction``), so every identity checked on top of them is exact:
there are no tolerances anywhere in this module.

Determinants and ranks use fraction-free (Bareiss) elimination.  Rows are
first scaled to Gaussian integers, after which every intermediate entry is a
minor of the scaled matrix; the exact divisions required by the Bareiss
recurrence are checked at runtime.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction]
ScalarLike = Union[int, Fraction, "GaussianRational"]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- coercion ----------------------------------------------------------
    @staticmethod
    def of(x: ScalarLike) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(_as_fraction(x))

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: ScalarLike) -> "GaussianRational":
        return self + (-GaussianRational.of(other))

    def __rsub__(self, other: ScalarLike) -> "GaussianRational":
        return GaussianRational.of(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other: ScalarLike) -> "GaussianRational":
        return GaussianRational.of(other) / self

    def __pow__(self, k: int) -> "GaussianRational":
        if not isinstance(k, int) or k < 0:
            raise TypeError("only nonnegative integer powers are supported")
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            o = GaussianRational.of(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    # -- conversion --------------------------------------------------------
    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self) -> str:
        if self.im == 0:
            return f"GR({self.re})"
        return f"GR({self.re}{'+' if self.im >= 0 else ''}{self.im}i)"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def _gi_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gi_sub(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] - b[0], a[1] - b[1])


def _gi_exact_div(a: tuple[int, int], d: tuple[int, int]) -> tuple[int, int]:
    """Exact division of Gaussian integers; raises if the quotient is not integral."""
    n2 = d[0] * d[0] + d[1] * d[1]
    num = _gi_mul(a, (d[0], -d[1]))
    qr, rr = divmod(num[0], n2)
    qi, ri = divmod(num[1], n2)
    if rr != 0 or ri != 0:
        raise ArithmeticError("non-exact division in fraction-free elimination")
    return (qr, qi)


def _rows_to_gaussian_int(rows: Sequence[Sequence[GaussianRational]]) -> list[list[tuple[int, int]]]:
    """Scale each row by the lcm of its denominators (rank is unchanged)."""
    out: list[list[tuple[int, int]]] = []
    for row in rows:
        scale = 1
        for e in row:
            for q in (e.re.denominator, e.im.denominator):
                scale = scale * q // _gcd(scale, q)
        out.append([(int(e.re * scale), int(e.im * scale)) for e in row])
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def gaussian_int_rank(rows: list[list[tuple[int, int]]], record_pivots: list | None = None) -> int:
    """Column rank by fraction-free elimination with full pivot search."""
    m = [list(r) for r in rows]
    nr = len(m)
    if nr == 0:
        return 0
    nc = len(m[0])
    prev = (1, 0)
    rank = 0
    r = 0
    for c in range(nc):
        pr = None
        for i in range(r, nr):
            if m[i][c] != (0, 0):
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        if record_pivots is not None:
            record_pivots.append(piv)
        for i in range(r + 1, nr):
            mic = m[i][c]
            for j in range(c + 1, nc):
                num = _gi_sub(_gi_mul(piv, m[i][j]), _gi_mul(mic, m[r][j]))
                m[i][j] = num if prev == (1, 0) else _gi_exact_div(num, prev)
            m[i][c] = (0, 0)
        prev = piv
        rank += 1
        r += 1
        if r == nr:
            break
    return rank


class GRMatrix:
    """Dense matrix over GaussianRational with exact operations."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[ScalarLike]]):
        data = tuple(tuple(GaussianRational.of(e) for e in row) for row in rows)
        if data and any(len(r) != len(data[0]) for r in data):
            raise ValueError("ragged rows")
        object.__setattr__(self, "rows", data)

    def __setattr__(self, name, value):
        raise AttributeError("GRMatrix is immutable")

    # -- constructors ------------------------------------------------------
    @staticmethod
    def identity(n: int) -> "GRMatrix":
        return GRMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(nr: int, nc: int) -> "GRMatrix":
        return GRMatrix([[0] * nc for _ in range(nr)])

    @staticmethod
    def column(entries: Sequence[ScalarLike]) -> "GRMatrix":
        return GRMatrix([[e] for e in entries])

    # -- shape and access ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij: tuple[int, int]) -> GaussianRational:
        return self.rows[ij[0]][ij[1]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GRMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.rows)

    # -- algebra -------------------------------------------------------------
    def __add__(self, other: "GRMatrix") -> "GRMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return GRMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "GRMatrix") -> "GRMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return GRMatrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __matmul__(self, other: "GRMatrix") -> "GRMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        ot = list(zip(*other.rows)) if other.rows else []
        out = []
        for row in self.rows:
            out.append(
                [sum((a * b for a, b in zip(row, col)), GR_ZERO) for col in ot]
            )
        return GRMatrix(out)

    def scale(self, s: ScalarLike) -> "GRMatrix":
        c = GaussianRational.of(s)
        return GRMatrix([[c * e for e in row] for row in self.rows])

    def transpose(self) -> "GRMatrix":
        return GRMatrix(list(zip(*self.rows)) if self.rows else [])

    def conj(self) -> "GRMatrix":
        return GRMatrix([[e.conj() for e in row] for row in self.rows])

    # -- elimination ---------------------------------------------------------
    def det(self) -> GaussianRational:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of non-square matrix")
        if n == 0:
            return GR_ONE
        a = [list(row) for row in self.rows]
        sign = GR_ONE
        prev = GR_ONE
        for c in range(n - 1):
            pr = None
            for i in range(c, n):
                if not a[i][c].is_zero():
                    pr = i
                    break
            if pr is None:
                return GR_ZERO
            if pr != c:
                a[c], a[pr] = a[pr], a[c]
                sign = -sign
            piv = a[c][c]
            for i in range(c + 1, n):
                for j in range(c + 1, n):
                    a[i][j] = (piv * a[i][j] - a[i][c] * a[c][j]) / prev
                a[i][c] = GR_ZERO
            prev = piv
        return sign * a[n - 1][n - 1]

    def rank(self, record_pivots: list | None = None) -> int:
        return gaussian_int_rank(_rows_to_gaussian_int(self.rows), record_pivots)

    def inverse(self) -> "GRMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of non-square matrix")
        a = [list(row) + list(GRMatrix.identity(n).rows[i]) for i, row in enumerate(self.rows)]
        for c in range(n):
            pr = None
            for i in range(c, n):
                if not a[i][c].is_zero():
                    pr = i
                    break
            if pr is None:
                raise ZeroDivisionError("singular matrix")
            a[c], a[pr] = a[pr], a[c]
            piv = a[c][c]
            a[c] = [e / piv for e in a[c]]
            for i in range(n):
                if i != c and not a[i][c].is_zero():
                    f = a[i][c]
                    a[i] = [e - f * p for e, p in zip(a[i], a[c])]
        return GRMatrix([row[n:] for row in a])

    def solve(self, rhs: "GRMatrix") -> "GRMatrix":
        return self.inverse() @ rhs

    # -- conversion ----------------------------------------------------------
    def to_complex_list(self) -> list[list[complex]]:
        return [[e.to_complex() for e in row] for row in self.rows]

    def __repr__(self) -> str:
        return f"GRMatrix({[list(map(repr, r)) for r in self.rows]})"
