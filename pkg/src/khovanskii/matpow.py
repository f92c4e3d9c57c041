"""Exact integer matrix powers, by repeated squaring and by Cayley-Hamilton.

The Cayley-Hamilton route writes A**n as a combination of I, A, ..., A**(k-1)
whose coefficients come from a scalar linear recurrence driven by the
characteristic polynomial.  For 3x3 matrices this is

    A**n = a[n-1] A + a[n-2] adj(A) + (a[n] - t a[n-1]) I

with a[n] = t a[n-1] - s a[n-2] + d a[n-3], a[0] = 1, a[-1] = a[-2] = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Iterator, Sequence, Union

from .errors import DomainError


@dataclass(frozen=True)
class SquareMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.rows)
        if k == 0 or any(len(r) != k for r in self.rows):
            raise DomainError("matrix must be square and non-empty")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "SquareMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, k: int) -> "SquareMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))

    @classmethod
    def diag(cls, values: Sequence[int]) -> "SquareMatrix":
        k = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(k)) for i in range(k)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def entry(self, i: int, j: int) -> int:
        """1-based entry access, matching the A_{n,i,j} convention."""
        return self.rows[i - 1][j - 1]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j - 1] for r in self.rows)

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.dim))

    def __matmul__(self, other: "SquareMatrix") -> "SquareMatrix":
        if other.dim != self.dim:
            raise DomainError("dimension mismatch")
        cols = list(zip(*other.rows))
        return SquareMatrix(tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
            for row in self.rows))

    def __add__(self, other: "SquareMatrix") -> "SquareMatrix":
        return SquareMatrix(tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def scale(self, c: int) -> "SquareMatrix":
        return SquareMatrix(tuple(tuple(c * x for x in r) for r in self.rows))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def mat_pow(A: SquareMatrix, n: int) -> SquareMatrix:
    """A**n by binary exponentiation; A**0 is the identity."""
    if n < 0:
        raise DomainError(f"exponent must be >= 0, got {n}")
    result = SquareMatrix.identity(A.dim)
    base = A
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


@dataclass(frozen=True)
class CharPoly3:
    """X^3 = t X^2 - s X + d."""

    t: int
    s: int
    d: int


@dataclass(frozen=True)
class CharPolyK:
    """T^k - s_1 T^(k-1) + s_2 T^(k-2) - ... + (-1)^k s_k."""

    s: tuple[int, ...]

    def __post_init__(self):
        if len(self.s) < 1:
            raise DomainError("characteristic polynomial needs degree >= 1")

    @property
    def k(self) -> int:
        return len(self.s)

    @classmethod
    def from3(cls, cp: CharPoly3) -> "CharPolyK":
        return cls((cp.t, cp.s, cp.d))


CharPoly = Union[CharPoly3, CharPolyK]


def _require_dim3(A: SquareMatrix) -> None:
    if A.dim != 3:
        raise DomainError(f"expected a 3x3 matrix, got {A.dim}x{A.dim}")


def det3(A: SquareMatrix) -> int:
    _require_dim3(A)
    (a, b, c), (d, e, f), (g, h, i) = A.rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def char_poly_3(A: SquareMatrix) -> CharPoly3:
    _require_dim3(A)
    (a, b, c), (d, e, f), (g, h, i) = A.rows
    s = (a * e - b * d) + (a * i - c * g) + (e * i - f * h)
    return CharPoly3(a + e + i, s, det3(A))


def adjugate_3(A: SquareMatrix) -> SquareMatrix:
    _require_dim3(A)
    (a, b, c), (d, e, f), (g, h, i) = A.rows
    return SquareMatrix((
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    ))


def char_poly(A: SquareMatrix) -> CharPolyK:
    """Elementary symmetric functions s_1..s_k of the eigenvalues (Faddeev-LeVerrier).

    Every division in the recursion is exact for integer matrices.
    """
    k = A.dim
    ident = SquareMatrix.identity(k)
    M = SquareMatrix(tuple((0,) * k for _ in range(k)))
    c = 1  # coefficient of X^(k-j+1) in det(XI - A)
    s = []
    for j in range(1, k + 1):
        M = A @ M + ident.scale(c)
        num = -(A @ M).trace()
        if num % j:
            raise ArithmeticError("non-integral characteristic coefficient")
        c = num // j
        s.append((-1) ** j * c)
    return CharPolyK(tuple(s))


def a_seq_closed_form(cp: CharPoly3, n: int) -> int:
    """a_n as the binomial double sum over 2i + 3j <= n."""
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    if n == 0:
        return 1
    t, s, d = cp.t, cp.s, cp.d
    total = 0
    for j in range(n // 3 + 1):
        for i in range((n - 3 * j) // 2 + 1):
            total += ((-1) ** i * comb(i + j, j) * comb(n - i - 2 * j, i + j)
                      * t ** (n - 2 * i - 3 * j) * s**i * d**j)
    return total


def _recurrence_weights(cp: CharPoly) -> tuple[int, ...]:
    # a_n = sum_j w_j a_{n-j}, w_j = (-1)^(j-1) s_j
    s = (cp.t, cp.s, cp.d) if isinstance(cp, CharPoly3) else cp.s
    return tuple((-1) ** j * sj for j, sj in enumerate(s))


@dataclass(frozen=True)
class CoefficientSequence:
    params: CharPoly
    values: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not self.values or self.values[0] != 1:
            raise DomainError("coefficient sequences start at a_0 = 1")

    def __getitem__(self, n: int) -> int:
        """a_n, with a_n = 0 for negative n."""
        return self.values[n] if n >= 0 else 0

    def __len__(self) -> int:
        return len(self.values)


def a_seq_extend(seq: CoefficientSequence, upto: int) -> CoefficientSequence:
    """Extend with the Cayley-Hamilton recurrence so that a_upto is present."""
    if upto < len(seq) - 1:
        raise DomainError(f"sequence already extends past {upto}")
    w = _recurrence_weights(seq.params)
    vals = list(seq.values)
    for n in range(len(vals), upto + 1):
        vals.append(sum(wj * vals[n - 1 - j] for j, wj in enumerate(w) if n - 1 - j >= 0))
    return CoefficientSequence(seq.params, tuple(vals))


def coefficient_sequence(cp: CharPoly, upto: int) -> CoefficientSequence:
    return a_seq_extend(CoefficientSequence(cp), upto)


def _weight_tuples(k: int, n: int) -> Iterator[tuple[int, ...]]:
    """All (i_2, ..., i_k) >= 0 with 2 i_2 + 3 i_3 + ... + k i_k <= n."""
    def rec(j: int, budget: int):
        if j > k:
            yield ()
            return
        for i in range(budget // j + 1):
            for rest in rec(j + 1, budget - j * i):
                yield (i,) + rest
    yield from rec(2, n)


def general_a_n(cp: CharPolyK, n: int) -> int:
    """a(n) as the multinomial sum over (i_2, ..., i_k).

    c(i, n) = (n - i_2 - 2 i_3 - ...)! / (i_2! ... i_k! (n - 2 i_2 - 3 i_3 - ...)!)
    multiplies s_1^(n - 2 i_2 - 3 i_3 - ...) prod_j ((-1)^(j-1) s_j)^(i_j); the
    s_1 exponent is the number of s_1 factors, as in the 3x3 double sum.
    """
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    k = cp.k
    if k == 1:
        return cp.s[0] ** n
    total = 0
    for idx in _weight_tuples(k, n):
        weighted = sum(i * (j + 2) for j, i in enumerate(idx))
        lowered = sum(i * (j + 1) for j, i in enumerate(idx))
        c = factorial(n - lowered)
        for i in idx:
            c //= factorial(i)
        c //= factorial(n - weighted)
        term = c * cp.s[0] ** (n - weighted)
        for j, i in enumerate(idx, start=2):
            term *= ((-1) ** (j - 1) * cp.s[j - 1]) ** i
        total += term
    return total


@dataclass(frozen=True)
class CayleyCoefficients:
    """A**n = b[k-1] A**(k-1) + ... + b[0] I."""

    k: int
    b: tuple[int, ...]
    n: int


def cayley_coefficients(cp: CharPolyK, n: int, seq: CoefficientSequence | None = None) -> CayleyCoefficients:
    """b_j = sum_{i=0}^{k-1-j} (-1)^i s_i a(n-j-i), with s_0 = 1."""
    k = cp.k
    if n < k:
        raise DomainError(f"need n >= {k}, got {n}")
    if seq is None or len(seq) <= n:
        seq = coefficient_sequence(cp, n)
    s = (1,) + cp.s
    b = tuple(sum((-1) ** i * s[i] * seq[n - j - i] for i in range(k - j)) for j in range(k))
    return CayleyCoefficients(k, b, n)


def power_via_cayley(A: SquareMatrix, n: int) -> SquareMatrix:
    """A**n from the characteristic-polynomial recurrence, without powering A."""
    k = A.dim
    if n < k:
        raise DomainError(f"need n >= dim = {k}, got {n}")
    if k == 3:
        cp = char_poly_3(A)
        a = coefficient_sequence(cp, n)
        return (A.scale(a[n - 1]) + adjugate_3(A).scale(a[n - 2])
                + SquareMatrix.identity(3).scale(a[n] - cp.t * a[n - 1]))
    coeffs = cayley_coefficients(char_poly(A), n)
    result = SquareMatrix.identity(k).scale(coeffs.b[0])
    power = SquareMatrix.identity(k)
    for j in range(1, k):
        power = power @ A
        result = result + power.scale(coeffs.b[j])
    return result
