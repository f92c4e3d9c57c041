"""Verification suites: exact identities and oracle comparisons over fixed and seeded grids.

Every suite is a pure function of its seed.  Output lists counts and measured
quantities only (no timings), so two runs with the same seed print the same
bytes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import cubic, cuberoot, exactnum, matpow, mthroot, oracle, polyroot
from .matpow import SquareMatrix
from .report import fit_rate, sci_str

CUBE_ALPHAS = (2, 3, 5, 10, 100, 1000)
CUBIC_PAIRS = ((1, 1), (2, 3), (5, 7), (9, 27))
MTH_GRID_M = (2, 3, 4, 5, 6)
MTH_GRID_ALPHA = (2, 10, 50)
CLOSED_FORM_NS = (1, 2, 3, 4, 5, 8, 13, 21, 34, 55, 64)
SIGNATURE_NS = range(3, 9)
K_BOUND = 61


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, cond: bool, what: str) -> bool:
        self.checks += 1
        if not cond:
            self.failures.append(what)
        return cond

    def note(self, line: str) -> None:
        self.notes.append(line)

    def render(self) -> str:
        head = f"[{self.name}] checks={self.checks} failures={len(self.failures)} " \
               f"status={'ok' if self.ok else 'FAIL'}"
        lines = [head] + [f"  {n}" for n in self.notes]
        lines += [f"  FAILED: {f}" for f in self.failures[:20]]
        if len(self.failures) > 20:
            lines.append(f"  ... {len(self.failures) - 20} more failures")
        return "\n".join(lines)


def _rng(seed: int, suite: str) -> random.Random:
    return random.Random(f"{seed}/{suite}")


def _random_matrix(rng: random.Random, k: int, lo: int = -5, hi: int = 5) -> SquareMatrix:
    return SquareMatrix.of([[rng.randint(lo, hi) for _ in range(k)] for _ in range(k)])


def suite_cayley(seed: int) -> SuiteResult:
    res = SuiteResult("cayley")
    rng = _rng(seed, "cayley")
    for idx in range(200):
        A = _random_matrix(rng, 3)
        res.check(A @ matpow.adjugate_3(A) == SquareMatrix.identity(3).scale(matpow.det3(A)),
                  f"A Adj(A) != det(A) I for matrix #{idx} {A.tolist()}")
        P = A @ A
        for n in range(3, 13):
            P = P @ A
            res.check(matpow.power_via_cayley(A, n) == P, f"power_via_cayley mismatch #{idx} n={n}")
    res.note("200 random 3x3 matrices in [-5,5], n=3..12: Cayley-Hamilton power equals repeated product")

    triples = [(rng.randint(-5, 5), rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(60)]
    for t, s, d in triples:
        cp = matpow.CharPoly3(t, s, d)
        seq = matpow.coefficient_sequence(cp, 40)
        for n in range(41):
            res.check(matpow.a_seq_closed_form(cp, n) == seq[n], f"closed form != recurrence at {(t, s, d)} n={n}")
    res.note("60 seeded (t,s,d) triples, n<=40: binomial double sum equals the recurrence")

    for k in (2, 3, 4):
        for _ in range(10):
            cp = matpow.CharPolyK(tuple(rng.randint(-4, 4) for _ in range(k)))
            seq = matpow.coefficient_sequence(cp, 25)
            for n in range(26):
                res.check(matpow.general_a_n(cp, n) == seq[n], f"general_a_n mismatch s={cp.s} n={n}")
        for _ in range(10):
            A = _random_matrix(rng, k)
            for n in (k, k + 1, 2 * k + 3):
                res.check(matpow.power_via_cayley(A, n) == matpow.mat_pow(A, n),
                          f"{k}x{k} power_via_cayley mismatch n={n}")
    res.note("k=2,3,4: multinomial a(n) equals the order-k recurrence for n<=25; kxk Cayley powers exact")
    return res


def suite_cuberoot(seed: int) -> SuiteResult:
    res = SuiteResult("cuberoot")
    for alpha in CUBE_ALPHAS:
        rep = cuberoot.optimal_a(alpha)
        a = rep.chosen
        target = exactnum.root_interval(alpha, 3, 264)
        errs = {}
        r80 = None
        for n, r in cuberoot.approximants(alpha, a, 80):
            if r is None:
                continue
            err = exactnum.FixedReal.from_interval(abs(r - target), 256)
            if 24 <= n <= 60:
                errs[n] = err
            if n == 80:
                r80 = err
        res.check(r80 is not None and r80.value < Fraction(1, 10**8), f"alpha={alpha}: |r_80 - cbrt| not < 1e-8")
        rate = fit_rate(sorted(errs.items()))
        pred = float(rep.predicted_rate)
        res.check(rate is not None and abs(rate - pred) <= 0.1 * pred,
                  f"alpha={alpha}: fitted rate {rate} vs sqrt(h)={pred}")
        holds = all(cuberoot.error_model_check(alpha, n, a=a).holds for n in range(3, 41))
        res.check(holds, f"alpha={alpha}: error model violated for some n in [3,40]")
        res.note(f"alpha={alpha}: a*={a} sqrt(h)={pred:.6f} fitted={rate:.6f} "
                 f"|r_80-cbrt|={sci_str(r80.value, 4)} error-model={'ok' if holds else 'FAIL'}")

    for n in SIGNATURE_NS:
        alpha = 2 ** (4 * n) + 1
        rep = cuberoot.error_model_check(alpha, n, a=cuberoot.optimal_a(alpha).chosen)
        res.check(abs(rep.K_n.value) < K_BOUND, f"n={n}: |K_n| = {float(rep.K_n)} not < {K_BOUND}")
        res.note(f"mod-6 signature n={n}: sign={rep.signature:+d} K_n={rep.K_n.decimal(4)}")

    rng = _rng(seed, "cuberoot")
    for _ in range(4):
        alpha = rng.randint(2, 20000)
        a = cuberoot.optimal_a(alpha).chosen
        res.check(cuberoot.dominance_margin(alpha, a).mantissa > 0, f"alpha={alpha}: no dominance at a={a}")
        for n in (1, 2, 7, 15):
            res.check(cuberoot.power_matrix_form(alpha, a, n) == matpow.mat_pow(cuberoot.cube_matrix(alpha, a), n),
                      f"alpha={alpha}, a={a}: power form != A^n at n={n}")
        r = cuberoot.make_cuberoot_iter(alpha, a)
        for _ in range(60):
            r, approx = cuberoot.step(r)
        err = abs(approx - exactnum.root_interval(alpha, 3, 128)).hi
        res.check(err < Fraction(1, 10**6), f"alpha={alpha}: r_62 error {float(err)}")
        res.note(f"seeded alpha={alpha}: a*={a}, power form exact, |r_62-cbrt| < {sci_str(err, 3)}")
    return res


def suite_cubic(seed: int) -> SuiteResult:
    res = SuiteResult("cubic")
    rng = _rng(seed, "cubic")
    pairs = list(CUBIC_PAIRS)
    while len(pairs) < len(CUBIC_PAIRS) + 3:
        p, q = rng.randint(1, 12), rng.randint(1, 30)
        if 27 * q * q - 4 * p**3 > 0 and (p, q) not in pairs:
            pairs.append((p, q))
    for p, q in pairs:
        prob = cubic.CubicProblem(p, q)
        root = oracle.bisect_root(oracle.RootQuery(prob.coeffs, Fraction(0), Fraction(p + q + 1), 128))
        r80 = cubic.cubic_approximants(prob, 80)[-1][1]
        ok_iter = res.check(r80 is not None and abs(r80 - root.value) < Fraction(1, 10**6),
                            f"(p,q)={(p, q)}: iteration not within 1e-6 by n=80")
        card = cubic.cardano_reference(prob, 128)
        gap = abs(card.value - root.value)
        res.check(gap < Fraction(1, 1 << 100), f"(p,q)={(p, q)}: Cardano vs bisection {float(gap)}")
        A = cubic.cubic_matrix(prob)
        P = SquareMatrix.identity(3)
        exact = True
        for n in range(1, 26):
            P = P @ A
            exact &= res.check(cubic.cubic_power_matrix(prob, n) == P, f"(p,q)={(p, q)}: power form n={n}")
        res.note(f"(p,q)={(p, q)}: root={root.decimal(20)} iteration={'ok' if ok_iter else 'FAIL'} "
                 f"|cardano-bisect|={sci_str(gap, 3)} powers n<=25 {'exact' if exact else 'MISMATCH'}")
    return res


def suite_mthroot(seed: int) -> SuiteResult:
    res = SuiteResult("mthroot")
    for m in MTH_GRID_M:
        for alpha in MTH_GRID_ALPHA:
            for a in sorted({1, mthroot.heuristic_a(alpha, m)}):
                prob = mthroot.MthRootProblem(alpha, m, a)
                diag = mthroot.diagonalize(prob)
                res.check(diag.dominance_margin.mantissa > 0, f"{(m, alpha, a)}: dominance margin not positive")
                ij, uv = mthroot.default_pair(m)
                target = exactnum.root_interval(alpha, m, 64)
                P, n, hit = mthroot.build_matrix(prob), 1, None
                while n <= 1024:
                    r = mthroot.ratio(prob, ij, uv, n, P)
                    if r is not None and abs(r - target).hi < Fraction(1, 10**4):
                        hit = n
                        break
                    P, n = P @ P, 2 * n
                res.check(hit is not None, f"{(m, alpha, a)}: ratio not within 1e-4 by n=1024")
                bad = [n for n in CLOSED_FORM_NS if not mthroot.entry_closed_form_check(prob, n).ok]
                res.check(not bad, f"{(m, alpha, a)}: eigen-sum mismatch at n={bad}")
                res.note(f"m={m} alpha={alpha} a={a}: margin={diag.dominance_margin.decimal(6)} "
                         f"within 1e-4 at n={hit} eigen-sum ok={not bad}")
    rng = _rng(seed, "mthroot")
    for _ in range(3):
        alpha = rng.randint(2, 500)
        a = rng.randint(1, 6)
        if not cuberoot.check_acond(alpha, a):
            continue
        prob = mthroot.MthRootProblem(alpha, 3, a)
        cube = dict(cuberoot.approximants(alpha, a, 24))
        P = mthroot.build_matrix(prob)
        same = True
        for n in range(2, 26):
            P = P @ mthroot.build_matrix(prob)
            if n - 1 in cube:
                same &= res.check(mthroot.ratio(prob, (2, 1), (3, 1), n, P) == cube[n - 1],
                                  f"m=3 alpha={alpha} a={a}: ratio at n={n} != cube-root r_{n - 1}")
        res.note(f"m=3 alpha={alpha} a={a}: entry ratios equal cube-root approximants exactly: {same}")
    return res


def suite_polyroot(seed: int) -> SuiteResult:
    res = SuiteResult("polyroot")
    f = (-1, -1, 0, 1)
    cells = polyroot.parameter_scan(f, range(1, 9), range(1, 3))
    tol = Fraction(1, 1 << 48)
    good = 0
    for c in cells:
        lv = c.result
        if lv.converged:
            ok = (lv.residual.value < Fraction(1, 10**6)
                  and all(e.value < tol for e in lv.identity_errors.values()))
            good += res.check(ok, f"x^3-x-1 k={c.k} l={c.l}: converged but identities/residual fail")
    res.check(good >= 1, "x^3-x-1: no converged cell")
    res.note(f"x^3-x-1 over k=1..8, l=1..2: {good}/{len(cells)} converged with identities to 48 bits")

    cells = polyroot.parameter_scan((1, 0, 1), range(1, 9), range(1, 3))
    outcomes = sorted({c.result.outcome.value for c in cells})
    res.check(all(not c.result.converged for c in cells), "x^2+1: a cell claimed convergence")
    res.note(f"x^2+1 over k=1..8, l=1..2: none converged (outcomes: {', '.join(outcomes)})")

    rng = _rng(seed, "polyroot")
    for _ in range(3):
        k, l = rng.randint(1, 6), rng.choice((1, 2))
        c = rng.choice((-3, -2, 2, 3))
        base = polyroot.iterate_general(polyroot.GeneralPolyProblem(f, k, l), 512)
        scaled = polyroot.iterate_general(polyroot.GeneralPolyProblem(f, c * k, c * l), 512)
        res.check(base.history == scaled.history and base.outcome == scaled.outcome,
                  f"homogeneity fails for (k,l)={(k, l)}, c={c}")
        res.note(f"(k,l)={(k, l)} vs x{c}: identical ratio history ({len(base.history)} steps)")

    for _ in range(3):
        # (x - r)(x^2 + 1) has a single real root r
        r = rng.randint(1, 5)
        poly = (-r, 1, -r, 1)
        cells = polyroot.parameter_scan(poly, range(1, 7), (1,), max_n=1024)
        conv = [c for c in cells if c.result.converged]
        for c in conv:
            res.check(abs(c.result.root - r) < Fraction(1, 10**6), f"{poly}: converged away from root {r}")
        res.note(f"(x-{r})(x^2+1): {len(conv)}/{len(cells)} converged, all to {r}")
    return res


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "cayley": suite_cayley,
    "cuberoot": suite_cuberoot,
    "cubic": suite_cubic,
    "mthroot": suite_mthroot,
    "polyroot": suite_polyroot,
}


def run_suites(name: str, seed: int) -> list[SuiteResult]:
    names = list(SUITES) if name == "all" else [name]
    return [SUITES[n](seed) for n in names]


def render(results: list[SuiteResult], seed: int) -> str:
    total = sum(r.checks for r in results)
    failed = sum(len(r.failures) for r in results)
    body = "\n".join(r.render() for r in results)
    tail = f"seed={seed} suites={len(results)} checks={total} failures={failed} " \
           f"status={'ok' if failed == 0 else 'FAIL'}"
    return f"{body}\n{tail}\n"
