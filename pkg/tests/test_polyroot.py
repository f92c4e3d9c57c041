from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from khovanskii import polyroot
from khovanskii.errors import DomainError
from khovanskii.matpow import SquareMatrix
from khovanskii.polyroot import GeneralPolyProblem, Outcome, build_general_matrix, iterate_general

PLASTIC = (-1, -1, 0, 1)


def test_matrix_for_plastic_polynomial():
    A = build_general_matrix(GeneralPolyProblem(PLASTIC, 3, 1))
    assert A == SquareMatrix.of([[3, 0, 1], [1, 3, 1], [0, 1, 3]])


def test_matrix_degree_two():
    A = build_general_matrix(GeneralPolyProblem((1, 2, 3), 3, 1))
    assert A == SquareMatrix.of([[1, -1], [3, 3]])


def test_validation():
    with pytest.raises(DomainError):
        GeneralPolyProblem(PLASTIC, 0, 1)
    with pytest.raises(DomainError):
        GeneralPolyProblem(PLASTIC, 1, 0)
    with pytest.raises(DomainError):
        GeneralPolyProblem((1, 2, 0), 1, 1)
    with pytest.raises(DomainError):
        iterate_general(GeneralPolyProblem(PLASTIC, 1, 1), max_n=3)


def _symbolic(m):
    a = sp.symbols(f"a0:{m + 1}")
    k, l, x = sp.symbols("k l x")
    beta = sp.symbols(f"b1:{m}")
    A = sp.Matrix(m, m, lambda i, j: 0)
    # numerically built matrix, re-instantiated symbolically entry by entry via a probe
    probe = GeneralPolyProblem(tuple(range(101, 102 + m)), 7, 3)
    M = build_general_matrix(probe)
    for i in range(m):
        for j in range(m):
            A[i, j] = _symbolic_entry(M[i, j], a, k, l, probe)
    return a, k, l, x, beta, A


def _symbolic_entry(value, a, k, l, probe):
    """Invert the probe encoding: each entry is 0, k, l*a_j, -l*a_j or k - l*a_j."""
    if value == 0:
        return 0
    if value == probe.k:
        return k
    for j, c in enumerate(probe.coeffs):
        if value == probe.l * c:
            return l * a[j]
        if value == -probe.l * c:
            return -l * a[j]
        if value == probe.k - probe.l * c:
            return k - l * a[j]
    raise AssertionError(f"unexpected entry {value}")


@pytest.mark.parametrize("m", [4, 5])
def test_fixed_point_system_matches_displayed_equations(m):
    a, k, l, x, beta, A = _symbolic(m)
    v = sp.Matrix(list(beta) + [1])
    Av = A * v
    den = l * a[m] * beta[m - 2] + k
    assert sp.simplify(Av[m - 1] - den) == 0
    for i in range(1, m - 2):  # 1 <= i <= m-3
        expected = (k * beta[i - 1] + l * a[m] * beta[i]) / den
        assert sp.simplify(Av[i - 1] / den - expected) == 0
    assert sp.simplify(Av[m - 3] / den - (k * beta[m - 3] + l * a[m]) / den) == 0
    row = -l * sum(a[j] * beta[j] for j in range(m - 2)) + (k - l * a[m - 1]) * beta[m - 2] - l * a[m - 2]
    assert sp.simplify(Av[m - 2] - row) == 0

    # fixed points beta_i = Av_i / Av_m force the chain beta_c = x^(c-m+1), beta_{m-1} = x,
    # and the remaining equation is -l f(x) / x^(m-2)
    sub = {beta[c - 1]: x ** (c - m + 1) for c in range(1, m - 1)}
    sub[beta[m - 2]] = x
    for i in range(1, m - 1):
        assert sp.simplify((Av[i - 1] - beta[i - 1] * Av[m - 1]).subs(sub)) == 0
    f = sum(a[j] * x**j for j in range(m + 1))
    residual = (Av[m - 2] - beta[m - 2] * Av[m - 1]).subs(sub)
    assert sp.simplify(residual + l * f / x ** (m - 2)) == 0


def test_plastic_polynomial_converges():
    lv = iterate_general(GeneralPolyProblem(PLASTIC, 3, 1))
    assert lv.converged and lv.outcome is Outcome.CONVERGED
    assert abs(lv.root - Fraction(132471795724, 10**11)) < Fraction(1, 10**10)
    assert lv.residual.value < Fraction(1, 10**6)
    assert abs(lv.betas[1] * lv.betas[0] - 1) < Fraction(1, 1 << 48)
    assert lv.betas[2] == 1
    assert abs(lv.oracle_root.value - lv.root) < Fraction(1, 1 << 48)


def test_scan_plastic_has_converged_cell():
    cells = polyroot.parameter_scan(PLASTIC, range(1, 9), range(1, 3))
    assert len(cells) == 16
    assert any(c.result.converged for c in cells)
    for c in cells:
        if c.result.converged:
            assert c.result.residual.value < Fraction(1, 10**6)


def test_no_real_roots_never_converges():
    cells = polyroot.parameter_scan((1, 0, 1), range(-3, 9), range(-2, 3))
    assert cells and all(not c.result.converged for c in cells)
    assert all(c.result.outcome in (Outcome.OSCILLATING, Outcome.DIVERGED, Outcome.STRUCTURAL_FAILURE)
               for c in cells)


def test_structural_failure_when_denominator_stays_zero():
    # a_0 = 0 makes e_1 an eigenvector (first column is k e_1), so A_{n,m,1} = 0 for all n
    lv = iterate_general(GeneralPolyProblem((0, -1, 0, 1), 2, 1), 64)
    assert lv.outcome is Outcome.STRUCTURAL_FAILURE
    assert not lv.converged and lv.betas is None
    assert all(r is None for _, r in lv.history)


@given(st.integers(1, 6), st.integers(1, 3), st.sampled_from([-3, -2, 2, 5]))
@settings(max_examples=15, deadline=None)
def test_ratio_homogeneity(k, l, c):
    base = iterate_general(GeneralPolyProblem(PLASTIC, k, l), 256)
    scaled = iterate_general(GeneralPolyProblem(PLASTIC, c * k, c * l), 256)
    assert base.history == scaled.history
    assert base.outcome == scaled.outcome


def test_quartic_root():
    lv = iterate_general(GeneralPolyProblem((-2, 0, 0, 0, 1), 5, 1), 1024)
    assert lv.converged
    assert abs(lv.root**4 - 2) < Fraction(1, 10**12)
    for name, err in lv.identity_errors.items():
        assert err.value < Fraction(1, 1 << 48), name


def test_report_shape():
    rep = polyroot.convergence_report(GeneralPolyProblem(PLASTIC, 3, 1))
    assert rep.status == "converged"
    assert rep.rows[-1].abs_error.value < Fraction(1, 10**20)
    rep = polyroot.convergence_report(GeneralPolyProblem((1, 0, 1), 1, 1), max_n=64)
    assert rep.status != "converged"
    assert all(row.abs_error is None for row in rep.rows)
