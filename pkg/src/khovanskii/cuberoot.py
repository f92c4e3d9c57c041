"""Cube roots of integers from powers of the 3x3 Khovanskii matrix.

For alpha > 1 and an integer shift a, the matrix

    A = [[a, alpha, alpha],
         [1, a,     alpha],
         [1, 1,     a    ]]

has A**n = [[g, alpha*r, alpha*d], [d, g, alpha*r], [r, d, g]] where g, d, r
are short combinations of the scalar sequence a_n driven by the
characteristic polynomial X^3 = 3a X^2 - (3a^2 - 3alpha) X + (a^3 + alpha -
3a alpha + alpha^2).  The ratio d/r tends to alpha**(1/3) whenever
a > -alpha**(2/3) / (1 + alpha**(1/3)).

Everything that touches alpha**(1/3) goes through interval enclosures from
``exactnum``; approximants themselves are exact fractions.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator

from . import exactnum
from .errors import DomainError, ParameterOutOfRange, VerificationFailure
from .exactnum import FixedReal, Interval, Ordering
from .matpow import CharPoly3, SquareMatrix, coefficient_sequence
from .report import ConvergenceReport, build_rows, final_third_rate


class DominanceWarning(UserWarning):
    """The dominant eigenvalue does not strictly exceed the others in modulus."""


def cube_matrix(alpha: int, a: int) -> SquareMatrix:
    return SquareMatrix(((a, alpha, alpha), (1, a, alpha), (1, 1, a)))


def cube_char_poly(alpha: int, a: int) -> CharPoly3:
    return CharPoly3(3 * a, 3 * a * a - 3 * alpha, a**3 + alpha - 3 * a * alpha + alpha**2)


def _acond_bound(r):
    return -(r * r) / (1 + r)


def check_acond(alpha: int, a: int) -> bool:
    """a > -alpha^(2/3) / (1 + alpha^(1/3)), decided exactly or adaptively."""
    return exactnum.adaptive_compare(a, _acond_bound, alpha, 3) is Ordering.GREATER


def _beta1(a):
    return lambda r: a + r + r * r


def _beta2_abs_sq(alpha: int, a: int):
    # beta_2 * beta_3 with r^3 = alpha substituted
    return lambda r: a * a - a * r + r * r - a * r * r - alpha + alpha * r


def h_expr(alpha: int, a: int):
    """h(a) = |beta_2 / beta_1|^2 as a function of r = alpha^(1/3)."""
    num = _beta2_abs_sq(alpha, a)
    return lambda r: num(r) / (a + r + r * r) ** 2


def abar_expr(alpha: int):
    return lambda r: (r + alpha) / (1 + r)


def dominance_margin(alpha: int, a: int, bits: int = 128) -> FixedReal:
    """beta_1 - |beta_2| for the 3x3 matrix."""
    num = _beta2_abs_sq(alpha, a)
    b1 = _beta1(a)

    def margin(r):
        sq = num(r)
        if isinstance(sq, Interval):
            return b1(r) - abs(sq).sqrt(bits + 8)
        return b1(r) - Interval(sq).sqrt(bits + 8)

    return FixedReal.from_interval(Interval._coerce(
        exactnum.enclose(margin, alpha, 3, bits + 2)), bits)


@dataclass(frozen=True)
class CubeRootProblem:
    alpha: int
    a: int


@dataclass(frozen=True)
class CubeRootIterState:
    """Window (a_{n-2}, a_{n-1}, a_n) of the coefficient sequence."""

    problem: CubeRootProblem
    n: int
    window: tuple[int, int, int]

    def approximant(self) -> Fraction | None:
        """r_n = 1 + (alpha-1) a_{n-1} / (a_n - (a-1) a_{n-1}); None when the denominator vanishes."""
        _, prev, cur = self.window
        a, alpha = self.problem.a, self.problem.alpha
        den = cur - (a - 1) * prev
        if den == 0:
            return None
        return 1 + Fraction((alpha - 1) * prev, den)


def make_cuberoot_iter(alpha: int, a: int, *, check_dominance: bool = True) -> CubeRootIterState:
    if alpha <= 1:
        raise DomainError(f"alpha must be an integer > 1, got {alpha}")
    if not check_acond(alpha, a):
        raise ParameterOutOfRange(
            f"a = {a} does not exceed -alpha^(2/3)/(1 + alpha^(1/3)) for alpha = {alpha}",
            bound="-alpha^(2/3)/(1+alpha^(1/3))")
    if check_dominance and dominance_margin(alpha, a, 64).mantissa <= 0:
        warnings.warn(f"no strict eigenvalue dominance for alpha={alpha}, a={a}", DominanceWarning)
    seq = coefficient_sequence(cube_char_poly(alpha, a), 2)
    return CubeRootIterState(CubeRootProblem(alpha, a), 2, seq.values[:3])


def step(state: CubeRootIterState) -> tuple[CubeRootIterState, Fraction | None]:
    """Advance one index; the approximant is None on a zero denominator."""
    cp = cube_char_poly(state.problem.alpha, state.problem.a)
    x, y, z = state.window
    nxt = CubeRootIterState(state.problem, state.n + 1, (y, z, cp.t * z - cp.s * y + cp.d * x))
    return nxt, nxt.approximant()


def approximants(alpha: int, a: int, upto: int) -> Iterator[tuple[int, Fraction | None]]:
    """(n, r_n) for n = 2 .. upto."""
    state = make_cuberoot_iter(alpha, a)
    yield state.n, state.approximant()
    while state.n < upto:
        state, r = step(state)
        yield state.n, r


def exact_cube_root(alpha: int) -> int | None:
    return exactnum.exact_root(alpha, 3)


def is_exact(alpha: int, r: Fraction) -> bool:
    """True when r equals alpha's integer cube root as a rational identity."""
    k = exact_cube_root(alpha)
    return k is not None and r == k


def gamma_delta_rho(alpha: int, a: int, n: int, seq=None) -> tuple[int, int, int]:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cp = cube_char_poly(alpha, a)
    if seq is None or len(seq) < n:
        seq = coefficient_sequence(cp, n)
    gamma = cp.d * seq[n - 3] - 2 * (a * a - alpha) * seq[n - 2] + a * seq[n - 1]
    delta = (alpha - a) * seq[n - 2] + seq[n - 1]
    rho = (1 - a) * seq[n - 2] + seq[n - 1]
    return gamma, delta, rho


def power_matrix_form(alpha: int, a: int, n: int) -> SquareMatrix:
    """A**n assembled from gamma_n, delta_n, rho_n (n >= 1)."""
    g, d, r = gamma_delta_rho(alpha, a, n)
    return SquareMatrix(((g, alpha * r, alpha * d), (d, g, alpha * r), (r, d, g)))


def ratio_limit_general(alpha: int, a: int, ij: tuple[int, int], uv: tuple[int, int],
                        n: int) -> Fraction | None:
    """A_{n,i,j} / A_{n,u,v}; tends to alpha^((j+u-i-v)/3). None on a zero denominator."""
    for x in (*ij, *uv):
        if not 1 <= x <= 3:
            raise DomainError(f"index {x} out of range 1..3")
    if not check_acond(alpha, a):
        raise ParameterOutOfRange(f"a = {a} violates the lower bound for alpha = {alpha}")
    An = power_matrix_form(alpha, a, n)
    den = An.entry(*uv)
    if den == 0:
        return None
    return Fraction(An.entry(*ij), den)


@dataclass(frozen=True)
class OptimalParamReport:
    alpha: int
    abar: FixedReal
    candidates: tuple[int, int]
    chosen: int
    h_at_chosen: FixedReal
    predicted_rate: FixedReal
    eta: FixedReal
    h_candidates: tuple[FixedReal, FixedReal] = field(default=None)


def optimal_a(alpha: int, bits: int = 128) -> OptimalParamReport:
    """Pick the integer next to abar = (alpha^(1/3) + alpha)/(1 + alpha^(1/3)) with smaller h.

    Ties go to the smaller integer.
    """
    if alpha <= 1:
        raise DomainError(f"alpha must be an integer > 1, got {alpha}")
    abar = abar_expr(alpha)
    lo = exactnum.adaptive_floor(abar, alpha, 3)
    cands = (lo, lo + 1)
    h0, h1 = h_expr(alpha, cands[0]), h_expr(alpha, cands[1])
    order = exactnum.adaptive_compare(0, lambda r: h1(r) - h0(r), alpha, 3)
    chosen = cands[1] if order is Ordering.GREATER else cands[0]

    h_star = h_expr(alpha, chosen)

    def rate(r):
        return Interval._coerce(h_star(r)).sqrt(bits + 8)

    return OptimalParamReport(
        alpha=alpha,
        abar=_fixed(alpha, bits, abar),
        candidates=cands,
        chosen=chosen,
        h_at_chosen=_fixed(alpha, bits, h_star),
        predicted_rate=_fixed(alpha, bits, rate),
        eta=_fixed(alpha, bits, lambda r: chosen - abar(r)),
        h_candidates=(_fixed(alpha, bits, h0), _fixed(alpha, bits, h1)),
    )


def g_eta_expr(alpha: int, eta_of_r):
    """g(eta) with beta_2 beta_3 / beta_1^2 = 1/4 + 3/4 g(eta)."""
    def g(r):
        eta = eta_of_r(r)
        s = 1 + r + r * r
        num = s * 4 * alpha + (1 + r) * eta * (4 * r * r - eta - r * eta)
        den = (2 * s * r + (1 + r) * eta) ** 2
        return -num / den
    return g


def delta1_abs_sq_expr(alpha: int, a: int):
    """|delta_1|^2 where beta_2/beta_1 = -omega/2 + delta_1/alpha^(1/3), in real form."""
    def f(r):
        b1 = a + r + r * r
        re = a - (r + r * r) / 2 - b1 / 4
        im_sq = Fraction(3, 4) * (r - r * r + b1 / 2) ** 2
        return r * r * (re * re + im_sq) / (b1 * b1)
    return f


def main_term_signature(n: int) -> int:
    """(omega-1) omega ((-omega/2)^n - (-omega^2/2)^n) * 2^n, which is real: -3, 0 or 3."""
    k = n % 6
    if k in (1, 2):
        return -3
    if k in (4, 5):
        return 3
    return 0


@dataclass(frozen=True)
class ErrorModelReport:
    alpha: int
    a: int
    n: int
    lhs: FixedReal
    main_term: FixedReal
    residual_bound: FixedReal
    signature: int
    K_n: FixedReal
    holds: bool

    @property
    def signature_applies(self) -> bool:
        """The mod-6 signature statement needs alpha > 2^(4n)."""
        return self.alpha > 2 ** (4 * self.n)


def error_model_check(alpha: int, n: int, *, a: int | None = None, bits: int = 192,
                      strict: bool = False) -> ErrorModelReport:
    """Compare A_{n,2,1}/A_{n,3,1} - alpha^(1/3) against the closed-form main term.

    The residual must satisfy |lhs - main_term| <= 8n/2^n + 48 alpha^(1/3)/4^n.
    """
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    if a is None:
        a = optimal_a(alpha).chosen
    _, d, r = gamma_delta_rho(alpha, a, n)
    if r == 0:
        raise VerificationFailure(f"A_{{{n},3,1}} vanishes", details={"alpha": alpha, "a": a, "n": n})
    q = Fraction(d, r)
    sig = main_term_signature(n)
    two_n = 1 << n

    def lhs(x):
        return q - x

    def main(x):
        return Fraction(sig, two_n) * x

    def residual(x):
        return abs(q - x - main(x))

    def bound(x):
        return Fraction(8 * n, two_n) + 48 * x / two_n**2

    def k_n(x):
        return two_n * (two_n * (q / x - 1) - sig)

    def margin(x):
        return bound(x) - residual(x)

    verdict = exactnum.adaptive_compare(0, margin, alpha, 3)
    holds = verdict is not Ordering.GREATER

    report = ErrorModelReport(
        alpha=alpha, a=a, n=n,
        lhs=_fixed(alpha, bits, lhs),
        main_term=_fixed(alpha, bits, main),
        residual_bound=_fixed(alpha, bits, bound),
        signature=sig,
        K_n=_fixed(alpha, bits, k_n),
        holds=holds,
    )
    if strict and not holds:
        raise VerificationFailure(
            f"error bound violated at alpha={alpha}, n={n}", details=report.__dict__)
    return report


def _fixed(alpha: int, bits: int, expr) -> FixedReal:
    return FixedReal.from_interval(Interval._coerce(exactnum.enclose(expr, alpha, 3, bits + 2)), bits)


def predicted_rate(alpha: int, a: int, bits: int = 64) -> FixedReal:
    """sqrt(h(a)) = |beta_2| / beta_1, the geometric rate of r_n for this shift."""
    h = h_expr(alpha, a)
    return _fixed(alpha, bits, lambda r: Interval._coerce(h(r)).sqrt(bits + 8))


def convergence_report(alpha: int, a: int, iters: int, precision_bits: int = 256) -> ConvergenceReport:
    """Table of r_2 .. r_iters with errors against alpha^(1/3) at ``precision_bits``."""
    if iters < 2:
        raise DomainError(f"iters must be >= 2, got {iters}")
    rows = build_rows(approximants(alpha, a, iters), exactnum.root_interval(alpha, 3, precision_bits + 8),
                      precision_bits)
    return ConvergenceReport(
        rows=rows, precision_bits=precision_bits,
        rate_estimate=final_third_rate(rows),
        predicted_rate=predicted_rate(alpha, a),
        problem={"alpha": alpha, "a": a},
        method="r_n = 1 + (alpha-1) a_{n-1} / (a_n - (a-1) a_{n-1})",
        status="ok" if rows[-1].value is not None else "inconclusive",
    )


def _ratio(num: int, den: int) -> Fraction | None:
    return None if den == 0 else Fraction(num, den)


def corollary_a1_sum(alpha: int, n: int) -> int:
    if n == 0:
        return 1
    return sum(comb(i + j, j) * comb(n - i - 2 * j, i + j) * 3 ** (n - i - 3 * j) * (alpha - 1) ** (i + 2 * j)
               for j in range(n // 3 + 1) for i in range((n - 3 * j) // 2 + 1))


def corollary_a1(alpha: int, n: int) -> Fraction:
    """The a = 1 specialisation: 1 + (alpha - 1) a_{n-1} / a_n."""
    if alpha < 1 or n < 1:
        raise DomainError("need alpha >= 1 and n >= 1")
    return 1 + (alpha - 1) * Fraction(corollary_a1_sum(alpha, n - 1), corollary_a1_sum(alpha, n))


def corollary_a0_sums(alpha: int, n: int) -> tuple[int, int]:
    a_n = sum(comb(2 * n + i, 2 * n - 2 * i) * 3 ** (3 * i) * alpha ** (2 * n + i) * (alpha + 1) ** (2 * n - 2 * i)
              for i in range(n + 1))
    b_n = sum(comb(2 * n + i, 2 * n - 2 * i - 1) * 3 ** (3 * i + 1) * alpha ** (2 * n + i)
              * (alpha + 1) ** (2 * n - 2 * i - 1)
              for i in range(n))
    return a_n, b_n


def corollary_a0(alpha: int, n: int) -> Fraction:
    """The a = 0 specialisation sampled at index 6n: 1 + (alpha - 1)/(a_n/b_n + 1)."""
    if alpha < 1 or n < 1:
        raise DomainError("need alpha >= 1 and n >= 1")
    a_n, b_n = corollary_a0_sums(alpha, n)
    return 1 + (alpha - 1) * Fraction(b_n, a_n + b_n)


def corollary_alpha_sq_sum(alpha: int, n: int) -> int:
    return sum(comb(n - 2 * i, i) * 3 ** (n - 3 * i) * alpha ** (n - i) * (alpha - 1) ** (2 * i)
               for i in range(n // 3 + 1))


def corollary_alpha_sq(alpha: int, n: int) -> Fraction:
    """alpha -> alpha^2, a = alpha: converges to alpha^(2/3)."""
    if alpha < 1 or n < 1:
        raise DomainError("need alpha >= 1 and n >= 1")
    cur, prev = corollary_alpha_sq_sum(alpha, n), corollary_alpha_sq_sum(alpha, n - 1)
    return 1 + (alpha * alpha - 1) * Fraction(prev, cur - (alpha - 1) * prev)
