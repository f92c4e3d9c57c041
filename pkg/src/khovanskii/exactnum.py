"""Exact arithmetic substrate.

Integers are Python ``int`` and rationals are ``fractions.Fraction`` (always
in lowest terms).  This module adds what the standard library lacks:

* ``integer_root_floor`` -- exact floor of an m-th root;
* ``Interval`` -- closed rational intervals with outward rounding for roots;
* ``FixedReal`` -- a binary fixed-point value with a guaranteed error radius;
* ``adaptive_compare`` -- sign decisions against expressions in ``alpha**(1/m)``
  that raise instead of guessing when precision runs out.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .errors import DomainError, UnresolvedComparison

Rational = Union[int, Fraction]

START_BITS = 128
DEFAULT_CAP = 4096
CAP_ENV = "KHOVANSKII_PRECISION_CAP"


def precision_cap() -> int:
    """The adaptive precision cap, overridable through the environment."""
    raw = os.environ.get(CAP_ENV)
    if not raw:
        return DEFAULT_CAP
    cap = int(raw)
    if cap < 1:
        raise DomainError(f"{CAP_ENV} must be positive, got {raw!r}")
    return cap


def integer_root_floor(x: int, m: int) -> int:
    """Return r with r**m <= x < (r+1)**m.

    Negative x is accepted for odd m.
    """
    if m < 2:
        raise DomainError(f"root order must be >= 2, got {m}")
    if x < 0:
        if m % 2 == 0:
            raise DomainError(f"even root of negative number {x}")
        r = integer_root_floor(-x, m)
        return -r if r**m == -x else -r - 1
    if x < 2:
        return x
    if m == 2:
        return math.isqrt(x)
    # Newton from above; the iterate decreases monotonically to the floor.
    r = 1 << -(-x.bit_length() // m)
    while True:
        nxt = ((m - 1) * r + x // r ** (m - 1)) // m
        if nxt >= r:
            break
        r = nxt
    while r**m > x:
        r -= 1
    while (r + 1) ** m <= x:
        r += 1
    return r


def integer_root_ceil(x: int, m: int) -> int:
    r = integer_root_floor(x, m)
    return r if r**m == x else r + 1


def exact_root(x: int, m: int) -> int | None:
    """The integer m-th root of x if x is a perfect m-th power, else None."""
    if x < 0 and m % 2 == 0:
        return None
    r = integer_root_floor(x, m)
    return r if r**m == x else None


def _floor_q(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil_q(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


class Interval:
    """Closed interval [lo, hi] with rational endpoints.

    Arithmetic is exact on the endpoints, so results always contain the true
    value of the expression being evaluated.  Mixed arithmetic with ``int``
    and ``Fraction`` is supported, which lets one expression callable serve
    both exact and interval evaluation.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Rational, hi: Rational | None = None):
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @staticmethod
    def _coerce(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval(x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x: Rational) -> bool:
        return self.lo <= x <= self.hi

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other) -> "Interval":
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, e: int) -> "Interval":
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        if e == 0:
            return Interval(1)
        lo, hi = self.lo**e, self.hi**e
        if e % 2:
            return Interval(lo, hi)
        if self.lo >= 0:
            return Interval(lo, hi)
        if self.hi <= 0:
            return Interval(hi, lo)
        return Interval(0, max(lo, hi))

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi))

    def root(self, m: int, bits: int) -> "Interval":
        """Outward-rounded m-th root, endpoints on the 2**-bits grid."""
        if self.lo < 0:
            if m % 2 == 0:
                raise DomainError("even root of an interval reaching below zero")
            return -((-self).root(m, bits))
        scale = 1 << (m * bits)
        lo = integer_root_floor(_floor_q(self.lo * scale), m)
        hi = integer_root_ceil(_ceil_q(self.hi * scale), m)
        return Interval(Fraction(lo, 1 << bits), Fraction(hi, 1 << bits))

    def sqrt(self, bits: int) -> "Interval":
        return self.root(2, bits)


@dataclass(frozen=True)
class FixedReal:
    """Binary fixed-point real: ``mantissa * 2**-bits``.

    The represented quantity v satisfies |v - mantissa * 2**-bits| < 2**-bits,
    or equals it when ``exact`` is set.
    """

    mantissa: int
    bits: int
    exact: bool = False

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("precision must be non-negative")

    @classmethod
    def from_rational(cls, q: Rational, bits: int) -> "FixedReal":
        q = Fraction(q)
        scaled = q * (1 << bits)
        if scaled.denominator == 1:
            return cls(scaled.numerator, bits, exact=True)
        return cls(round(scaled), bits)

    @classmethod
    def from_interval(cls, iv: Interval, bits: int) -> "FixedReal":
        """Round an enclosure to ``bits``; it must be narrower than 2**-(bits+1)."""
        if iv.lo == iv.hi:
            return cls.from_rational(iv.lo, bits)
        if iv.width * (1 << (bits + 1)) >= 1:
            raise ValueError(f"enclosure too wide for {bits}-bit result")
        return cls(round(iv.mid * (1 << bits)), bits)

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.bits)

    def interval(self) -> Interval:
        if self.exact:
            return Interval(self.value)
        ulp = Fraction(1, 1 << self.bits)
        return Interval(self.value - ulp, self.value + ulp)

    def to_fraction(self) -> Fraction:
        return self.value

    def __float__(self) -> float:
        return float(self.value)

    def decimal(self, digits: int | None = None) -> str:
        if digits is None:
            digits = max(1, int(self.bits * 0.30103))
        return decimal_str(self.value, digits)

    def __str__(self) -> str:
        return self.decimal()


def decimal_str(q: Rational, digits: int) -> str:
    """Round q to ``digits`` places after the point, exactly (half away from zero)."""
    q = Fraction(q)
    sign = "-" if q < 0 else ""
    scaled = abs(q) * 10**digits
    n = _floor_q(scaled + Fraction(1, 2))
    whole, frac = divmod(n, 10**digits)
    if digits == 0:
        return f"{sign}{whole}"
    if n == 0:
        sign = ""
    return f"{sign}{whole}.{frac:0{digits}d}"


def fixed_nth_root(alpha: int, m: int, bits: int) -> FixedReal:
    """alpha**(1/m) truncated to ``bits`` fractional bits (error < 2**-bits)."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if m < 2:
        raise DomainError(f"root order must be >= 2, got {m}")
    scaled = alpha << (m * bits)
    r = integer_root_floor(scaled, m)
    return FixedReal(r, bits, exact=r**m == scaled)


def root_interval(alpha: int, m: int, bits: int) -> Interval:
    r = fixed_nth_root(alpha, m, bits)
    if r.exact:
        return Interval(r.value)
    return Interval(r.value, Fraction(r.mantissa + 1, 1 << r.bits))


class RootPolynomial:
    """Element of Q[x]/(x^m - alpha), evaluated at x = alpha^(1/m).

    Evaluation at the real root is a ring homomorphism, so an expression that
    reduces to a rational here has exactly that real value.  Division needs
    the divisor to be a unit of the ring; otherwise ``ZeroDivisionError``.
    """

    __slots__ = ("c", "alpha", "m")

    def __init__(self, coeffs, alpha: int, m: int):
        c = [Fraction(x) for x in coeffs][:m]
        c += [Fraction(0)] * (m - len(c))
        self.c = tuple(c)
        self.alpha = alpha
        self.m = m

    @classmethod
    def generator(cls, alpha: int, m: int) -> "RootPolynomial":
        return cls([0, 1], alpha, m)

    def _lift(self, x) -> "RootPolynomial":
        if isinstance(x, RootPolynomial):
            return x
        if isinstance(x, (int, Fraction)):
            return RootPolynomial([x], self.alpha, self.m)
        raise TypeError(f"cannot combine with {type(x).__name__}")

    def rational(self) -> Fraction | None:
        return self.c[0] if not any(self.c[1:]) else None

    def __neg__(self):
        return RootPolynomial([-x for x in self.c], self.alpha, self.m)

    def __add__(self, other):
        o = self._lift(other)
        return RootPolynomial([x + y for x, y in zip(self.c, o.c)], self.alpha, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        m = self.m
        out = [Fraction(0)] * m
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(o.c):
                    if y:
                        k = i + j
                        if k >= m:
                            out[k - m] += self.alpha * x * y
                        else:
                            out[k] += x * y
        return RootPolynomial(out, self.alpha, self.m)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = self._lift(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "RootPolynomial":
        modulus = [Fraction(-self.alpha)] + [Fraction(0)] * (self.m - 1) + [Fraction(1)]
        g, s = _poly_xgcd(list(self.c), modulus)
        if len(g) != 1 or g[0] == 0:
            raise ZeroDivisionError("not a unit in Q[x]/(x^m - alpha)")
        return RootPolynomial([x / g[0] for x in s], self.alpha, self.m)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = _trim(list(a))
    b = _trim(list(b))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, y in enumerate(b):
            a[i + shift] -= f * y
        _trim(a)
    return q, a


def _poly_sub_mul(a: list, q: list, b: list) -> list:
    out = list(a) + [Fraction(0)] * max(0, len(q) + len(b) - len(a))
    for i, x in enumerate(q):
        for j, y in enumerate(b):
            out[i + j] -= x * y
    return _trim(out)


def _poly_xgcd(a: list, b: list) -> tuple[list, list]:
    """(g, s) with s*a = g (mod b)."""
    r0, r1 = _trim(list(a)), _trim(list(b))
    s0, s1 = [Fraction(1)], []
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub_mul(s0, q, s1)
    return r0, s0


def _identically(expr: Expr, lhs: Fraction, alpha: int, m: int) -> bool:
    try:
        v = expr(RootPolynomial.generator(alpha, m))
    except (TypeError, ZeroDivisionError, AttributeError):
        return False
    if not isinstance(v, RootPolynomial):
        return Fraction(v) == lhs
    return v.rational() == lhs


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


Expr = Callable[..., object]


def evaluate(expr: Expr, alpha: int, m: int, bits: int):
    """Evaluate ``expr(alpha**(1/m))``.

    Returns a ``Fraction`` when alpha is a perfect m-th power, otherwise an
    ``Interval`` enclosing the value, computed from a ``bits``-bit enclosure of
    the root.
    """
    r = exact_root(alpha, m)
    if r is not None:
        v = expr(Fraction(r))
        return v if isinstance(v, Interval) else Fraction(v)
    return Interval._coerce(expr(root_interval(alpha, m, bits)))


def adaptive_compare(lhs: Rational, expr: Expr, alpha: int, m: int = 3, *,
                     start_bits: int = START_BITS, cap: int | None = None) -> Ordering:
    """Three-way comparison of ``lhs`` against ``expr(alpha**(1/m))``.

    ``expr`` receives either an exact ``Fraction`` (perfect powers) or an
    ``Interval`` and must work with both.  EQUAL is returned only when the
    identity is exact: alpha is a perfect power, or the expression reduces to
    ``lhs`` in Q[x]/(x^m - alpha).  Otherwise precision doubles from
    ``start_bits`` until the enclosure excludes ``lhs``.
    """
    lhs = Fraction(lhs)
    if exact_root(alpha, m) is not None:
        v = evaluate(expr, alpha, m, 0)
        if isinstance(v, Interval):
            raise TypeError("exact comparisons need an expression without inner roots")
        return Ordering((lhs > v) - (lhs < v))
    if _identically(expr, lhs, alpha, m):
        return Ordering.EQUAL
    cap = precision_cap() if cap is None else cap
    bits = min(start_bits, cap)
    while True:
        try:
            iv = evaluate(expr, alpha, m, bits)
        except ZeroDivisionError:
            iv = None
        if iv is not None:
            if lhs < iv.lo:
                return Ordering.LESS
            if lhs > iv.hi:
                return Ordering.GREATER
        if bits >= cap:
            raise UnresolvedComparison(
                f"comparison not separated at {bits} bits (alpha={alpha}, m={m})", bits=bits)
        bits = min(2 * bits, cap)


def enclose(expr: Expr, alpha: int, m: int, width_bits: int, *,
            start_bits: int = START_BITS, cap: int | None = None):
    """Evaluate ``expr`` until the enclosure is narrower than 2**-width_bits.

    Returns an exact ``Fraction`` for perfect powers, else an ``Interval``.
    """
    if exact_root(alpha, m) is not None:
        return evaluate(expr, alpha, m, 0)
    cap = precision_cap() if cap is None else cap
    target = Fraction(1, 1 << width_bits)
    bits = min(max(start_bits, width_bits + 16), cap)
    while True:
        try:
            iv = evaluate(expr, alpha, m, bits)
            if iv.width < target:
                return iv
        except ZeroDivisionError:
            pass
        if bits >= cap:
            raise UnresolvedComparison(
                f"enclosure wider than 2^-{width_bits} at {bits} bits", bits=bits)
        bits = min(2 * bits, cap)


def adaptive_floor(expr: Expr, alpha: int, m: int = 3, *, cap: int | None = None) -> int:
    """floor(expr(alpha**(1/m))), raising if an integer boundary cannot be excluded."""
    if exact_root(alpha, m) is not None:
        return _floor_q(evaluate(expr, alpha, m, 0))
    cap = precision_cap() if cap is None else cap
    bits = min(START_BITS, cap)
    while True:
        try:
            iv = evaluate(expr, alpha, m, bits)
            lo = _floor_q(iv.lo)
            if lo == _floor_q(iv.hi):
                return lo
        except ZeroDivisionError:
            pass
        if bits >= cap:
            raise UnresolvedComparison(f"floor not resolved at {bits} bits", bits=bits)
        bits = min(2 * bits, cap)
