"""m-th roots of positive integers from entry ratios of an m x m matrix.

The matrix has ``a`` on the diagonal, ``alpha`` above it and ``1`` below.  For
a > 0 its eigenvalue a + alpha^(1/m) + ... + alpha^((m-1)/m) strictly dominates,
and A_{n,i,j} / A_{n,u,v} -> alpha^((j+u-i-v)/m).

Powers are exact (repeated squaring).  The complex eigen-decomposition is only
used to verify those exact entries and to measure the dominance margin; it is
evaluated with mpmath at a stated binary precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import exactnum
from .errors import DomainError, ParameterOutOfRange
from .exactnum import FixedReal
from .matpow import SquareMatrix, mat_pow
from .report import ConvergenceReport, build_rows, final_third_rate

DEFAULT_MAX_N = 4096


@dataclass(frozen=True)
class MthRootProblem:
    alpha: int
    m: int
    a: int

    def __post_init__(self):
        if self.alpha < 1:
            raise DomainError(f"alpha must be >= 1, got {self.alpha}")
        if self.m < 2:
            raise DomainError(f"m must be >= 2, got {self.m}")
        if self.a <= 0:
            raise ParameterOutOfRange(f"a must be positive, got {self.a}", bound="a > 0")


def heuristic_a(alpha: int, m: int) -> int:
    """ceil(alpha^(1/m)): a default shift with no optimality claim."""
    return max(1, exactnum.integer_root_ceil(alpha, m))


def build_matrix(prob: MthRootProblem) -> SquareMatrix:
    m, a, alpha = prob.m, prob.a, prob.alpha
    return SquareMatrix(tuple(
        tuple(a if i == j else (alpha if j > i else 1) for j in range(m))
        for i in range(m)))


def default_pair(m: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Entry pair whose ratio tends to alpha^(1/m)."""
    return ((1, 2), (1, 1)) if m == 2 else ((2, 1), (3, 1))


def _check_index(prob: MthRootProblem, *idx: int) -> None:
    for x in idx:
        if not 1 <= x <= prob.m:
            raise DomainError(f"index {x} out of range 1..{prob.m}")


def ratio(prob: MthRootProblem, ij: tuple[int, int], uv: tuple[int, int], n: int,
          power: SquareMatrix | None = None) -> Fraction | None:
    """Exact A_{n,i,j} / A_{n,u,v}; None when the denominator entry is zero."""
    _check_index(prob, *ij, *uv)
    An = power if power is not None else mat_pow(build_matrix(prob), n)
    den = An.entry(*uv)
    if den == 0:
        return None
    return Fraction(An.entry(*ij), den)


def limit_exponent(m: int, ij: tuple[int, int], uv: tuple[int, int]) -> Fraction:
    (i, j), (u, v) = ij, uv
    return Fraction(j + u - i - v, m)


def _mp_fraction(x, bits: int) -> FixedReal:
    return FixedReal(int(mpmath.nint(x * mpmath.mpf(2) ** bits)), bits)


@dataclass(frozen=True)
class MthRootDiag:
    eigen_values: tuple[tuple[FixedReal, FixedReal], ...]
    dominance_margin: FixedReal
    subdominant_ratio: FixedReal


def _eigen(prob: MthRootProblem):
    m = prob.m
    w = mpmath.exp(2j * mpmath.pi / m)
    r = mpmath.root(mpmath.mpf(prob.alpha), m)
    betas = [prob.a + sum((w ** (i - 1) * r) ** j for j in range(1, m)) for i in range(1, m + 1)]
    return w, r, betas


def diagonalize(prob: MthRootProblem, bits: int = 128) -> MthRootDiag:
    with mpmath.workprec(bits + 32):
        _, _, betas = _eigen(prob)
        b1 = mpmath.re(betas[0])
        sub = max(abs(b) for b in betas[1:])
        return MthRootDiag(
            eigen_values=tuple((_mp_fraction(mpmath.re(b), bits), _mp_fraction(mpmath.im(b), bits))
                               for b in betas),
            dominance_margin=_mp_fraction(b1 - sub, bits),
            subdominant_ratio=_mp_fraction(sub / b1, bits),
        )


@dataclass(frozen=True)
class ClosedFormCheck:
    n: int
    eval_bits: int
    tolerance_bits: int
    max_relative_error: float
    inverse_error: float
    ok: bool
    worst_entry: tuple[int, int]


def entry_closed_form_check(prob: MthRootProblem, n: int, tolerance_bits: int = 100,
                            eval_bits: int = 192) -> ClosedFormCheck:
    """Compare every exact entry of A**n with the eigen-sum

        A_{n,i,j} = alpha^((j-i)/m) / m * sum_k w^((m-k+1)(i-j)) beta_k^n,

    and check the stated inverse of the diagonaliser,
    (M^-1)_{i,j} = 1 / (m M_{j,i}) with M_{i,j} = alpha^((m-i)/m) w^((m-j+1) i).
    Errors are relative to max(1, |entry|).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    m = prob.m
    exact = mat_pow(build_matrix(prob), n)
    with mpmath.workprec(eval_bits):
        w, r, betas = _eigen(prob)
        powers = [b**n for b in betas]
        worst, worst_at = mpmath.mpf(0), (1, 1)
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                s = sum(w ** ((m - k + 1) * (i - j)) * powers[k - 1] for k in range(1, m + 1))
                val = r ** (j - i) / m * s
                e = exact.entry(i, j)
                err = abs(val - e) / max(1, abs(e))
                if err > worst:
                    worst, worst_at = err, (i, j)

        def M(i, j):
            return r ** (m - i) * w ** ((m - j + 1) * i)

        inv_err = mpmath.mpf(0)
        for i in range(1, m + 1):
            for k in range(1, m + 1):
                s = sum(M(i, j) / (m * M(k, j)) for j in range(1, m + 1))
                inv_err = max(inv_err, abs(s - (1 if i == k else 0)))
        tol = mpmath.mpf(2) ** -tolerance_bits
        ok = bool(worst <= tol and inv_err <= tol)
        return ClosedFormCheck(n, eval_bits, tolerance_bits, float(worst), float(inv_err), ok, worst_at)


def approximate_root(prob: MthRootProblem, target_bits: int = 64, *, max_n: int = DEFAULT_MAX_N,
                     precision_bits: int = 256) -> tuple[Fraction, ConvergenceReport]:
    """Square A repeatedly until successive ratios agree to ``target_bits``."""
    alpha, m = prob.alpha, prob.m
    problem = {"alpha": alpha, "m": m, "a": prob.a}
    k = exactnum.exact_root(alpha, m)
    oracle = exactnum.root_interval(alpha, m, precision_bits + 8)
    if k is not None:
        report = ConvergenceReport(build_rows([(0, Fraction(k))], oracle, precision_bits), precision_bits,
                                   problem=problem, method="perfect-power", status="exact")
        return Fraction(k), report
    ij, uv = default_pair(m)
    P = build_matrix(prob)
    n = 1
    approx = [(n, ratio(prob, ij, uv, n, P))]
    tol = Fraction(1, 1 << target_bits)
    status = "unconverged"
    achieved = None
    while 2 * n <= max_n:
        P = P @ P
        n *= 2
        r = ratio(prob, ij, uv, n, P)
        prev = approx[-1][1]
        approx.append((n, r))
        if r is not None and prev is not None:
            gap = abs(r - prev)
            achieved = None if gap == 0 else -(gap.numerator.bit_length() - gap.denominator.bit_length())
            if gap < tol:
                status = "converged"
                break
    rows = build_rows(approx, oracle, precision_bits)
    diag = diagonalize(prob, 64)
    report = ConvergenceReport(
        rows=rows, precision_bits=precision_bits,
        rate_estimate=final_third_rate(rows),
        predicted_rate=diag.subdominant_ratio,
        problem=problem, method=f"ratio A{ij}/A{uv} by repeated squaring",
        status=status,
        extra={"achieved_bits": achieved, "max_n": max_n, "target_bits": target_bits},
    )
    return report.last_value(), report
