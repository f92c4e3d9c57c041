"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL ...`` line to the terminal
(capture is bypassed), so ``pytest -v tests/test_acceptance.py`` shows the
verdicts next to pytest's own status. The module can also be run directly:
``python tests/test_acceptance.py``.
"""
import itertools
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from khovanskii import cubic, cuberoot, exactnum, mthroot, polyroot
from khovanskii.exactnum import FixedReal
from khovanskii.matpow import (CharPoly3, CharPolyK, SquareMatrix, a_seq_closed_form, a_seq_extend,
                               coefficient_sequence, general_a_n, mat_pow, power_via_cayley)
from khovanskii.oracle import RootQuery, bisect_root, poly_eval
from khovanskii.report import fit_rate

CUBE_ALPHAS = (2, 3, 5, 10, 100, 1000)


class Verdict:
    def __init__(self):
        self.started = time.perf_counter()
        self.failures = []
        self.detail = ""

    def check(self, ok, message):
        if not ok:
            self.failures.append(message)

    def line(self, number):
        status = "FAIL" if self.failures else "PASS"
        extra = f" ({self.failures[0]}; {len(self.failures)} failing)" if self.failures else ""
        elapsed = time.perf_counter() - self.started
        return f"criterion {number}: {status} in {elapsed:.1f}s {self.detail}{extra}".rstrip()


@pytest.fixture
def verdict(request):
    """Collects failures for one criterion and prints a single summary line."""
    v = Verdict()
    yield v
    line = v.line(request.node.get_closest_marker("criterion").args[0])
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line)


def finish(v):
    assert not v.failures, v.failures[:5]


@pytest.mark.criterion(1)
def test_criterion_01_cayley_hamilton_powers(verdict):
    rng = random.Random(1)
    count = 0
    for _ in range(250):
        A = SquareMatrix.of([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)])
        P = mat_pow(A, 2)
        for n in range(3, 13):
            P = P @ A
            verdict.check(power_via_cayley(A, n) == P == mat_pow(A, n), f"A={A.rows} n={n}")
            count += 1
    verdict.detail = f"[250 matrices, {count} powers]"
    finish(verdict)


@pytest.mark.criterion(2)
def test_criterion_02_closed_form_vs_recurrence(verdict):
    count = 0
    for t, s, d in itertools.product(range(-5, 6), repeat=3):
        cp = CharPoly3(t, s, d)
        seq = a_seq_extend(coefficient_sequence(cp, 0), 40)
        for n in range(41):
            verdict.check(a_seq_closed_form(cp, n) == seq[n], f"(t,s,d)={(t, s, d)} n={n}")
            count += 1
    verdict.detail = f"[1331 triples, {count} values]"
    finish(verdict)


@pytest.mark.criterion(3)
def test_criterion_03_general_order_k(verdict):
    rng = random.Random(3)
    count = 0
    for k in (2, 3, 4):
        for _ in range(40):
            s = tuple(rng.randint(-4, 4) for _ in range(k))
            seq = coefficient_sequence(CharPolyK(s), 25)
            for n in range(26):
                got = general_a_n(CharPolyK(s), n)
                verdict.check(got == seq[n], f"k={k} s={s} n={n}")
                if k == 3:
                    verdict.check(got == a_seq_closed_form(CharPoly3(*s), n), f"k=3 closed form s={s} n={n}")
                count += 1
    verdict.detail = f"[{count} values]"
    finish(verdict)


@pytest.mark.criterion(4)
def test_criterion_04_cube_root_convergence_and_rate(verdict):
    worst = 0.0
    for alpha in CUBE_ALPHAS:
        a = cuberoot.optimal_a(alpha).chosen
        target = exactnum.root_interval(alpha, 3, 264)  # guard bits for 256-bit rounding
        rs = dict(cuberoot.approximants(alpha, a, 80))
        err80 = abs(rs[80] - target).hi
        verdict.check(err80 < Fraction(1, 10**8), f"alpha={alpha}: |r_80 - root| = {float(err80):.3g}")
        pts = [(n, FixedReal.from_interval(abs(rs[n] - target), 256)) for n in range(24, 61)]
        rate = fit_rate(pts)
        predicted = float(cuberoot.predicted_rate(alpha, a))
        rel = abs(rate - predicted) / predicted
        worst = max(worst, rel)
        verdict.check(rel <= 0.10, f"alpha={alpha} a={a}: fitted {rate:.5f} vs sqrt(h) {predicted:.5f}")
    verdict.detail = f"[worst rate deviation {worst:.2%}]"
    finish(verdict)


@pytest.mark.criterion(5)
def test_criterion_05_error_model(verdict):
    count = 0
    for alpha in CUBE_ALPHAS:
        for n in range(3, 41):
            rep = cuberoot.error_model_check(alpha, n)
            verdict.check(rep.holds, f"alpha={alpha} n={n}")
            count += 1
    verdict.detail = f"[{count} points]"
    finish(verdict)


@pytest.mark.criterion(6)
def test_criterion_06_mod6_signature(verdict):
    expected = {0: 0, 1: -3, 2: -3, 3: 0, 4: 3, 5: 3}
    ks = []
    for n in range(3, 9):
        alpha = 2 ** (4 * n) + 1
        rep = cuberoot.error_model_check(alpha, n, bits=192)
        verdict.check(rep.signature == expected[n % 6], f"n={n}: signature {rep.signature}")
        # |2^n (ratio / alpha^(1/3) - 1) - sig| < 61 / 2^n  <=>  |K_n| < 61
        verdict.check(abs(rep.K_n.value) + Fraction(1, 1 << rep.K_n.bits) < 61, f"n={n}: K_n={float(rep.K_n)}")
        ks.append(f"{float(rep.K_n):.2f}")
    verdict.detail = f"[K_3..K_8 = {', '.join(ks)}]"
    finish(verdict)


@pytest.mark.criterion(7)
def test_criterion_07_cubic(verdict):
    for p, q in ((1, 1), (2, 3), (5, 7), (9, 27)):
        prob = cubic.CubicProblem(p, q)
        root = bisect_root(RootQuery((-q, -p, 0, 1), Fraction(0), Fraction(p + q + 1), 160))
        seq = coefficient_sequence(cubic.cubic_char_poly(prob), 80)
        r80 = -1 + Fraction(seq[80], seq[79])
        verdict.check(abs(r80 - root.value) < Fraction(1, 10**6), f"(p,q)=({p},{q}): r_80 off")
        verdict.check(dict(cubic.cubic_approximants(prob, 80))[80] == r80, f"(p,q)=({p},{q}): approximant mismatch")
        card = cubic.cardano_reference(prob, 128)
        verdict.check(abs(card.value - root.value) < Fraction(1, 1 << 100), f"(p,q)=({p},{q}): Cardano off")
        A = cubic.cubic_matrix(prob)
        P = SquareMatrix.identity(3)
        for n in range(1, 26):
            P = P @ A
            verdict.check(cubic.cubic_power_matrix(prob, n) == P, f"(p,q)=({p},{q}) n={n}: power matrix")
    verdict.detail = "[4 cubics]"
    finish(verdict)


@pytest.mark.criterion(8)
def test_criterion_08_mth_roots(verdict):
    configs = 0
    for m in (2, 3, 4, 5, 6):
        for alpha in (2, 10, 50):
            for a in sorted({1, exactnum.integer_root_ceil(alpha, m)}):
                configs += 1
                prob = mthroot.MthRootProblem(alpha, m, a)
                tag = f"m={m} alpha={alpha} a={a}"
                verdict.check(mthroot.diagonalize(prob).dominance_margin.mantissa > 0, f"{tag}: margin")
                target = exactnum.root_interval(alpha, m, 128)
                ij, uv = mthroot.default_pair(m)
                A = mthroot.build_matrix(prob)
                P, n, hit = A, 1, None
                while n <= 1024:
                    r = mthroot.ratio(prob, ij, uv, n, P)
                    if r is not None and abs(r - target).hi < Fraction(1, 10**4):
                        hit = n
                        break
                    P, n = P @ P, 2 * n
                verdict.check(hit is not None, f"{tag}: no n <= 1024 within 1e-4")
                for n in range(1, 65):
                    verdict.check(mthroot.entry_closed_form_check(prob, n).ok, f"{tag} n={n}: closed form")
                if m == 3:
                    P = A
                    for n in range(2, 41):
                        P = P @ A
                        _, d, rho = cuberoot.gamma_delta_rho(alpha, a, n)
                        r = dict(cuberoot.approximants(alpha, a, n))[n - 1] if n - 1 >= 2 else Fraction(d, rho)
                        got = mthroot.ratio(prob, ij, uv, n, P)
                        verdict.check(got == Fraction(d, rho) == r, f"{tag} n={n}: cube-root mismatch")
    verdict.detail = f"[{configs} configurations]"
    finish(verdict)


@pytest.mark.criterion(9)
def test_criterion_09_general_polynomial(verdict):
    coeffs = (-1, -1, 0, 1)
    cells = polyroot.parameter_scan(coeffs, range(1, 9), range(1, 3))
    good = []
    for c in cells:
        lv = c.result
        if not lv.converged:
            continue
        residual = abs(poly_eval(coeffs, lv.root))
        errs = polyroot.identity_errors(lv.betas)
        if residual < Fraction(1, 10**6) and errs["beta_m"] < Fraction(1, 1 << 48) \
                and errs["pair"] < Fraction(1, 1 << 48):
            good.append((c.k, c.l))
    verdict.check(len(good) >= 1, "x^3 - x - 1: no converged cell with the identities")
    try:
        bad = polyroot.parameter_scan((1, 0, 1), range(1, 9), range(1, 3))
        verdict.check(all(not c.result.converged for c in bad), "x^2 + 1: a cell claims convergence")
    except Exception as exc:  # the criterion requires no error to escape
        verdict.check(False, f"x^2 + 1 raised {exc!r}")
    verdict.detail = f"[{len(good)}/{len(cells)} cells converged for x^3 - x - 1]"
    finish(verdict)


def _verify_output():
    # separate interpreters, so hash randomization and import order cannot leak in
    proc = subprocess.run([sys.executable, "-m", "khovanskii", "verify", "--suite", "all", "--seed", "7"],
                          capture_output=True, check=False)
    return proc.returncode, proc.stdout


@pytest.mark.criterion(10)
def test_criterion_10_determinism(verdict):
    code1, out1 = _verify_output()
    code2, out2 = _verify_output()
    verdict.check(code1 == code2 == 0, f"exit codes {code1}, {code2}")
    verdict.check(out1 == out2, "outputs differ")
    verdict.detail = f"[{len(out1)} bytes, identical={out1 == out2}]"
    finish(verdict)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
