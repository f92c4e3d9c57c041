"""The real root of x^3 - p x - q from powers of [[1, p, q], [1, 1, 0], [0, 1, 1]].

Supported regime: integers p > 0, q > 0 with 27 q^2 - 4 p^3 > 0 (a single
real root, dominant in modulus).  A general cubic a x^3 + b x^2 + c x + d is
brought there by y = 3a x + b, and by y -> -y when that fixes the sign of q.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator

from .errors import DomainError, UnsupportedRegime
from .exactnum import FixedReal, Interval
from .matpow import CharPoly3, SquareMatrix, coefficient_sequence
from .report import ConvergenceReport, build_rows, final_third_rate


@dataclass(frozen=True)
class CubicProblem:
    p: int
    q: int

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise UnsupportedRegime(f"need p > 0 and q > 0, got p={self.p}, q={self.q}")
        if 27 * self.q**2 - 4 * self.p**3 <= 0:
            raise UnsupportedRegime(
                f"27q^2 - 4p^3 = {27 * self.q**2 - 4 * self.p**3} <= 0: more than one real root")

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        """x^3 - p x - q, low degree first."""
        return (-self.q, -self.p, 0, 1)


@dataclass(frozen=True)
class GeneralCubic:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("leading coefficient must be nonzero")

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.d, self.c, self.b, self.a)


@dataclass(frozen=True)
class DepressedCubic:
    """y^3 + P y + Q with y = 3a x + b; ``problem`` is set when supported."""

    P: int
    Q: int
    a: int
    b: int
    sign: int
    problem: CubicProblem | None
    reason: str = ""

    def back_map(self, z):
        """Root z of the supported problem -> root x of the original cubic."""
        return (self.sign * z - self.b) / (3 * self.a)

    def require(self) -> CubicProblem:
        if self.problem is None:
            raise UnsupportedRegime(self.reason, P=self.P, Q=self.Q)
        return self.problem


def depress(g: GeneralCubic) -> DepressedCubic:
    a, b, c, d = g.a, g.b, g.c, g.d
    P = 9 * a * c - 3 * b * b
    Q = 2 * b**3 - 9 * a * b * c + 27 * a * a * d
    p, q, sign = -P, -Q, 1
    if q < 0:
        q, sign = -q, -1
    try:
        prob = CubicProblem(p, q)
        reason = ""
    except UnsupportedRegime as exc:
        prob, reason = None, str(exc)
    return DepressedCubic(P, Q, a, b, sign, prob, reason)


def cubic_matrix(prob: CubicProblem) -> SquareMatrix:
    return SquareMatrix(((1, prob.p, prob.q), (1, 1, 0), (0, 1, 1)))


def cubic_char_poly(prob: CubicProblem) -> CharPoly3:
    return CharPoly3(3, 3 - prob.p, prob.q + 1 - prob.p)


def make_cubic_iter(prob: CubicProblem) -> Iterator[tuple[int, Fraction | None]]:
    """Yield (n, -1 + a_n/a_{n-1}) for n = 1, 2, ...; None when a_{n-1} = 0."""
    cp = cubic_char_poly(prob)
    x, y, z = 0, 0, 1  # a_{-2}, a_{-1}, a_0
    n = 0
    while True:
        x, y, z = y, z, cp.t * z - cp.s * y + cp.d * x
        n += 1
        yield n, (None if y == 0 else Fraction(z, y) - 1)


def cubic_approximants(prob: CubicProblem, upto: int) -> list[tuple[int, Fraction | None]]:
    out = []
    for n, r in make_cubic_iter(prob):
        if n > upto:
            break
        out.append((n, r))
    return out


def printed_sum(prob: CubicProblem, n: int) -> int:
    """The double sum for a_n written with (3-p)^i instead of (p-3)^i.

    Kept for the regression test documenting that it disagrees with the
    characteristic-polynomial recurrence whenever p != 3.
    """
    p, q = prob.p, prob.q
    return sum(comb(i + j, j) * comb(n - i - 2 * j, i + j) * 3 ** (n - 2 * i - 3 * j)
               * (3 - p) ** i * (q - p + 1) ** j
               for j in range(n // 3 + 1) for i in range((n - 3 * j) // 2 + 1))


def cubic_power_matrix(prob: CubicProblem, n: int) -> SquareMatrix:
    """A**n assembled from the coefficient sequence (n >= 1)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    p, q = prob.p, prob.q
    a = coefficient_sequence(cubic_char_poly(prob), n)
    eps = (1 - p + q) * a[n - 3] + (p - 2) * a[n - 2] + a[n - 1]
    diff = a[n - 1] - a[n - 2]
    return SquareMatrix((
        (eps, (q - p) * a[n - 2] + p * a[n - 1], q * diff),
        (diff, eps, q * a[n - 2]),
        (a[n - 2], diff, eps - p * a[n - 2]),
    ))


@dataclass(frozen=True)
class CubicCardano:
    """The cube-root pair with alpha^3 + beta^3 = q and 3 alpha beta = p."""

    alpha_part: FixedReal
    beta_part: FixedReal


def _cardano_intervals(prob: CubicProblem, w: int):
    p, q = prob.p, prob.q
    sqrt_d = Interval(81 * q * q - 12 * p**3).sqrt(w)
    cbrt_two_thirds = Interval(Fraction(2, 3)).root(3, w)
    cbrt_18 = Interval(18).root(3, w)
    plus = (9 * q + sqrt_d).root(3, w)
    minus = (9 * q - sqrt_d).root(3, w)
    root = p * cbrt_two_thirds / plus + plus / cbrt_18
    alpha = p * cbrt_two_thirds / minus
    beta = minus / cbrt_18
    return root, alpha, beta


def _refine(prob: CubicProblem, bits: int, pick: int) -> Interval:
    w = bits + 24
    while True:
        iv = _cardano_intervals(prob, w)[pick]
        if iv.width * (1 << (bits + 2)) < 1:
            return iv
        w *= 2


def cardano_reference(prob: CubicProblem, bits: int = 128) -> FixedReal:
    """The closed-form real root, evaluated with outward-rounded radicals."""
    return FixedReal.from_interval(_refine(prob, bits, 0), bits)


def cardano_parts(prob: CubicProblem, bits: int = 128) -> CubicCardano:
    return CubicCardano(FixedReal.from_interval(_refine(prob, bits, 1), bits),
                        FixedReal.from_interval(_refine(prob, bits, 2), bits))


def eigen_moduli(prob: CubicProblem, bits: int = 128) -> tuple[Interval, Interval]:
    """Enclosures of gamma_1 = 1 + alpha + beta and |gamma_2| = |gamma_3|."""
    w = bits + 24
    _, al, be = _cardano_intervals(prob, w)
    g1 = 1 + al + be
    mod2_sq = (1 - (al + be) / 2) ** 2 + Fraction(3, 4) * (al - be) ** 2
    return g1, mod2_sq.sqrt(w)


def predicted_rate(prob: CubicProblem, bits: int = 64) -> FixedReal:
    """|gamma_2| / gamma_1, the geometric rate of the entry-ratio iteration."""
    w = bits + 24
    while True:
        g1, g2 = eigen_moduli(prob, w)
        iv = g2 / g1
        if iv.width * (1 << (bits + 2)) < 1:
            return FixedReal.from_interval(iv, bits)
        w *= 2


def _oracle_target(coeffs, bits: int) -> Interval:
    from .oracle import real_root  # reference path, kept out of the module namespace
    root = real_root(coeffs, bits + 4)
    if root is None:
        raise DomainError("no real root bracketed for the reference value")
    return root.interval()


def convergence_report(cubic: CubicProblem | GeneralCubic, iters: int,
                       precision_bits: int = 256) -> ConvergenceReport:
    """Approximants for n = 1 .. iters with errors against a bisection root.

    A general cubic is depressed first; its approximants are mapped back, so
    the table is in the original variable.
    """
    if iters < 1:
        raise DomainError(f"iters must be >= 1, got {iters}")
    if isinstance(cubic, GeneralCubic):
        dep = depress(cubic)
        prob = dep.require()
        approx = [(n, None if r is None else dep.back_map(r)) for n, r in cubic_approximants(prob, iters)]
        problem = {"a": cubic.a, "b": cubic.b, "c": cubic.c, "d": cubic.d, "p": prob.p, "q": prob.q}
        method = "depress y = 3a x + b, then -1 + a_n/a_{n-1}, mapped back"
    else:
        prob = cubic
        approx = cubic_approximants(prob, iters)
        problem = {"p": prob.p, "q": prob.q}
        method = "-1 + a_n/a_{n-1}"
    rows = build_rows(approx, _oracle_target(cubic.coeffs, precision_bits), precision_bits)
    return ConvergenceReport(
        rows=rows, precision_bits=precision_bits,
        rate_estimate=final_third_rate(rows),
        predicted_rate=predicted_rate(prob),
        problem=problem, method=method,
        status="ok" if rows[-1].value is not None else "inconclusive",
    )
