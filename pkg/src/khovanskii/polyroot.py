"""A real root of a general polynomial from a (k, l)-parameterised matrix.

For f(x) = a_m x^m + ... + a_0 the m x m matrix below is built so that, if the
ratios A_{n,i,1}/A_{n,m,1} have limits beta_i, then beta_m = 1,
beta_{m-1} beta_{m-2} = 1, beta_{i+1} = beta_{m-1} beta_i and f(beta_{m-1}) = 0.
Its rows are read off the fixed-point equations for those limits:

    row i (1 <= i <= m-3):  k at (i, i),          l a_m at (i, i+1)
    row m-2:                k at (m-2, m-2),      l a_m at (m-2, m)
    row m-1:                -l a_0 .. -l a_{m-3} in columns 1..m-2,
                            k - l a_{m-1} at (m-1, m-1), -l a_{m-2} at (m-1, m)
    row m:                  l a_m at (m, m-1),    k at (m, m)

Nothing guarantees convergence, so outcomes are classified, not assumed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .exactnum import FixedReal
from .matpow import SquareMatrix
from .oracle import RootQuery, bisect_root, poly_eval
from .report import ConvergenceReport, build_rows, error_json, final_third_rate, fixed_json


@dataclass(frozen=True)
class GeneralPolyProblem:
    coeffs: tuple[int, ...]  # a_0 .. a_m
    k: int
    l: int

    def __post_init__(self):
        if len(self.coeffs) < 3:
            raise DomainError("degree must be >= 2")
        if self.coeffs[-1] == 0:
            raise DomainError("leading coefficient a_m must be nonzero")
        if self.k == 0 or self.l == 0:
            raise DomainError("k and l must be nonzero")

    @property
    def m(self) -> int:
        return len(self.coeffs) - 1


def build_general_matrix(prob: GeneralPolyProblem) -> SquareMatrix:
    m, k, l, a = prob.m, prob.k, prob.l, prob.coeffs
    A = [[0] * m for _ in range(m)]
    for i in range(m - 3):
        A[i][i] = k
        A[i][i + 1] = l * a[m]
    if m >= 3:
        A[m - 3][m - 3] = k
        A[m - 3][m - 1] = l * a[m]
    row = A[m - 2]
    for j in range(m - 2):
        row[j] = -l * a[j]
    row[m - 2] = k - l * a[m - 1]
    row[m - 1] = -l * a[m - 2]
    A[m - 1][m - 2] = l * a[m]
    A[m - 1][m - 1] = k
    return SquareMatrix.of(A)


class Outcome(enum.Enum):
    CONVERGED = "converged"
    OSCILLATING = "oscillating"
    DIVERGED = "diverged"
    STRUCTURAL_FAILURE = "structural-failure"


@dataclass(frozen=True)
class LimitVector:
    betas: tuple[Fraction, ...] | None
    converged: bool
    outcome: Outcome
    n: int
    residual: FixedReal | None = None
    identity_errors: dict = field(default_factory=dict)
    oracle_root: FixedReal | None = None
    history: tuple[tuple[int, Fraction | None], ...] = ()

    @property
    def root(self) -> Fraction | None:
        return None if self.betas is None else self.betas[-2]


def _ratios(P: SquareMatrix) -> tuple[Fraction, ...] | None:
    col = P.column(1)
    if col[-1] == 0:
        return None
    return tuple(Fraction(x, col[-1]) for x in col)


def _log2_abs(q: Fraction) -> float:
    if q == 0:
        return -math.inf
    return math.log2(abs(q.numerator)) - math.log2(q.denominator)


def identity_errors(betas: Sequence[Fraction]) -> dict:
    """Deviations from beta_m = 1, beta_{m-1} beta_{m-2} = 1, beta_{i+1} = beta_{m-1} beta_i."""
    m = len(betas)
    root = betas[m - 2]
    errs = {"beta_m": abs(betas[m - 1] - 1)}
    if m >= 3:
        errs["pair"] = abs(root * betas[m - 3] - 1)
    for i in range(m - 3):
        errs[f"chain_{i + 1}"] = abs(betas[i + 1] - root * betas[i])
    return errs


def _nearest_oracle_root(coeffs: Sequence[int], x: Fraction, bits: int) -> FixedReal | None:
    delta = Fraction(1, 1 << 20)
    for _ in range(40):
        lo, hi = x - delta, x + delta
        flo, fhi = poly_eval(coeffs, lo), poly_eval(coeffs, hi)
        if flo == 0 or fhi == 0 or (flo > 0) != (fhi > 0):
            return bisect_root(RootQuery(tuple(coeffs), lo, hi, bits))
        delta *= 2
    return None


def iterate_general(prob: GeneralPolyProblem, max_n: int = 4096, agree_bits: int = 48) -> LimitVector:
    """Square A until all m column ratios agree between n and 2n to ``agree_bits``.

    A zero denominator at n moves on to n+1 (up to m+1 times in a row) before
    the run is declared a structural failure.
    """
    if max_n < 4:
        raise DomainError("max_n must be >= 4")
    A = build_general_matrix(prob)
    tol = Fraction(1, 1 << agree_bits)
    P = A @ A @ A @ A
    n = 4
    prev = None
    sizes: list[float] = []
    history: list[tuple[int, Fraction | None]] = []
    while True:
        cur = _ratios(P)
        misses = 0
        while cur is None:
            history.append((n, None))
            misses += 1
            if misses > prob.m + 1 or n + 1 > max_n:
                return LimitVector(None, False, Outcome.STRUCTURAL_FAILURE, n, history=tuple(history))
            P = P @ A
            n += 1
            cur = _ratios(P)
        history.append((n, cur[-2]))
        sizes.append(max(_log2_abs(x) for x in cur))
        if prev is not None and all(abs(x - y) < tol for x, y in zip(cur, prev)):
            return _converged(prob, cur, n, agree_bits, tuple(history))
        prev = cur
        if 2 * n > max_n:
            break
        P = P @ P
        n *= 2
    diverging = (len(sizes) >= 3 and sizes[-1] > sizes[-2] > sizes[-3]
                 and sizes[-1] > agree_bits)
    return LimitVector(prev, False, Outcome.DIVERGED if diverging else Outcome.OSCILLATING, n,
                       history=tuple(history))


def _converged(prob: GeneralPolyProblem, betas: tuple[Fraction, ...], n: int, agree_bits: int,
               history: tuple) -> LimitVector:
    bits = 2 * agree_bits + 16
    root = betas[-2]
    residual = FixedReal.from_rational(abs(poly_eval(prob.coeffs, root)), bits)
    errs = {name: FixedReal.from_rational(v, bits) for name, v in identity_errors(betas).items()}
    return LimitVector(betas, True, Outcome.CONVERGED, n, residual, errs,
                       _nearest_oracle_root(prob.coeffs, root, bits), history)


@dataclass(frozen=True)
class ScanCell:
    k: int
    l: int
    result: LimitVector


def parameter_scan(coeffs: Sequence[int], k_range: Iterable[int], l_range: Iterable[int], *,
                   max_n: int = 4096, agree_bits: int = 48) -> list[ScanCell]:
    """Run iterate_general on every nonzero (k, l) pair, in grid order."""
    coeffs = tuple(int(c) for c in coeffs)
    l_values = [l for l in l_range if l != 0]
    cells = []
    for k in k_range:
        if k == 0:
            continue
        for l in l_values:
            prob = GeneralPolyProblem(coeffs, k, l)
            cells.append(ScanCell(k, l, iterate_general(prob, max_n, agree_bits)))
    return cells


def limit_json(lv: LimitVector, bits: int) -> dict:
    digits = min(40, int(bits * 0.30103))
    return {
        "outcome": lv.outcome.value,
        "converged": lv.converged,
        "n": lv.n,
        "betas": None if lv.betas is None else [fixed_json(FixedReal.from_rational(x, bits), digits)
                                                 for x in lv.betas],
        "residual": error_json(lv.residual),
        "identity_errors": {k: error_json(v) for k, v in lv.identity_errors.items()},
        "oracle_root": fixed_json(lv.oracle_root, digits),
    }


def convergence_report(prob: GeneralPolyProblem, *, max_n: int = 4096, agree_bits: int = 48,
                       precision_bits: int = 256) -> ConvergenceReport:
    """beta_{m-1} at each visited n, with errors against the oracle root it lands next to."""
    lv = iterate_general(prob, max_n, agree_bits)
    target = None
    near = lv.oracle_root if lv.converged else None
    if near is not None:
        target = _nearest_oracle_root(prob.coeffs, near.value, precision_bits + 4).interval()
    rows = build_rows(lv.history, target, precision_bits)
    return ConvergenceReport(
        rows=rows, precision_bits=precision_bits,
        rate_estimate=final_third_rate(rows),
        problem={"coeffs": list(prob.coeffs), "k": prob.k, "l": prob.l},
        method="A_{n,m-1,1}/A_{n,m,1} by repeated squaring",
        status="converged" if lv.converged else lv.outcome.value,
        extra={"limit": limit_json(lv, precision_bits), "agree_bits": agree_bits, "max_n": max_n},
    )
