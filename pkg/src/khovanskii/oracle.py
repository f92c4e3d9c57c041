"""Reference real roots by exact rational bisection.

Nothing here touches matrices or the coefficient recurrences, so these values
can be used to check them.  Coefficients are listed low degree first:
``[a_0, a_1, ..., a_m]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError
from .exactnum import FixedReal, Interval


def poly_eval(coeffs: Sequence[int], x):
    """Horner evaluation; works for Fraction, int and Interval arguments."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class RootQuery:
    coeffs: tuple[int, ...]
    lo: Fraction
    hi: Fraction
    bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError("bracket must satisfy lo <= hi")
        flo = poly_eval(self.coeffs, self.lo)
        fhi = poly_eval(self.coeffs, self.hi)
        if self.lo == self.hi:
            if flo != 0:
                raise DomainError("degenerate bracket is not a root")
        elif flo != 0 and fhi != 0 and _sign(flo) == _sign(fhi):
            raise DomainError(f"no sign change on [{self.lo}, {self.hi}]")


def bisect_root(q: RootQuery) -> FixedReal:
    """Root in [lo, hi] to within 2**-bits, found by exact bisection."""
    f = q.coeffs
    lo, hi = Fraction(q.lo), Fraction(q.hi)
    flo = poly_eval(f, lo)
    if flo == 0:
        return FixedReal.from_rational(lo, q.bits)
    fhi = poly_eval(f, hi)
    if fhi == 0:
        return FixedReal.from_rational(hi, q.bits)
    s_lo = _sign(flo)
    target = Fraction(1, 1 << (q.bits + 2))
    while hi - lo >= target:
        mid = (lo + hi) / 2
        fm = poly_eval(f, mid)
        if fm == 0:
            return FixedReal.from_rational(mid, q.bits)
        if _sign(fm) == s_lo:
            lo = mid
        else:
            hi = mid
    return FixedReal.from_interval(Interval(lo, hi), q.bits)


def bracket_real_root(coeffs: Sequence[int], resolution_bits: int = 10) -> tuple[Fraction, Fraction] | None:
    """A sign-change bracket inside the Cauchy bound, scanning from the right.

    Returns the bracket around the largest root found by sampling on a grid of
    step 2**-resolution_bits * B, or None when no sign change (or exact zero) is
    seen.  None means inconclusive, not that no real root exists.
    """
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise DomainError("need a polynomial of degree >= 1 with nonzero leading coefficient")
    lead = coeffs[-1]
    B = 1 + max(Fraction(abs(c), abs(lead)) for c in coeffs[:-1])
    steps = 1 << resolution_bits
    h = B / steps
    prev_x = B
    prev_f = poly_eval(coeffs, prev_x)
    if prev_f == 0:
        return prev_x, prev_x
    for i in range(2 * steps - 1, -1, -1):
        x = -B + i * h
        fx = poly_eval(coeffs, x)
        if fx == 0:
            return x, x
        if _sign(fx) != _sign(prev_f):
            return x, prev_x
        prev_x, prev_f = x, fx
    return None


def real_root(coeffs: Sequence[int], bits: int) -> FixedReal | None:
    """Bracket then bisect; None when no bracket is found."""
    br = bracket_real_root(coeffs)
    if br is None:
        return None
    return bisect_root(RootQuery(tuple(coeffs), br[0], br[1], bits))


def nth_root_oracle(alpha: int, m: int, bits: int) -> FixedReal:
    """alpha**(1/m) by bisection of x^m - alpha on [0, alpha + 1]."""
    coeffs = (-alpha,) + (0,) * (m - 1) + (1,)
    return bisect_root(RootQuery(coeffs, Fraction(0), Fraction(alpha + 1), bits))
