from fractions import Fraction

import pytest

from khovanskii import cuberoot, exactnum, mthroot
from khovanskii.errors import DomainError, ParameterOutOfRange
from khovanskii.matpow import SquareMatrix, mat_pow
from khovanskii.mthroot import MthRootProblem


def test_build_matrix_examples():
    assert mthroot.build_matrix(MthRootProblem(4, 2, 1)) == SquareMatrix.of([[1, 4], [1, 1]])
    assert mthroot.build_matrix(MthRootProblem(2, 4, 3)) == SquareMatrix.of(
        [[3, 2, 2, 2], [1, 3, 2, 2], [1, 1, 3, 2], [1, 1, 1, 3]])
    assert mthroot.build_matrix(MthRootProblem(7, 3, 2)) == cuberoot.cube_matrix(7, 2)


def test_problem_validation():
    with pytest.raises(ParameterOutOfRange):
        MthRootProblem(2, 3, 0)
    with pytest.raises(DomainError):
        MthRootProblem(2, 1, 1)
    with pytest.raises(DomainError):
        MthRootProblem(0, 3, 1)


def test_ratio_examples():
    prob = MthRootProblem(4, 2, 1)
    assert mthroot.ratio(prob, (1, 2), (1, 1), 2) == Fraction(8, 5)
    assert mthroot.ratio(prob, (1, 2), (1, 1), 4) == Fraction(80, 41)
    assert mthroot.ratio(prob, (2, 1), (2, 1), 9) == 1
    with pytest.raises(DomainError):
        mthroot.ratio(prob, (3, 1), (1, 1), 2)


def test_exponent_law_common_limit():
    prob = MthRootProblem(10, 4, 2)
    n = 256
    P = mat_pow(mthroot.build_matrix(prob), n)
    pairs = [((2, 1), (3, 1)), ((3, 1), (4, 1)), ((1, 2), (1, 1)), ((2, 3), (2, 2))]
    for ij, uv in pairs:
        assert mthroot.limit_exponent(4, ij, uv) == Fraction(1, 4)
    vals = [mthroot.ratio(prob, ij, uv, n, P) for ij, uv in pairs]
    assert max(vals) - min(vals) < Fraction(1, 10**4)


def test_closed_form_small_case():
    chk = mthroot.entry_closed_form_check(MthRootProblem(4, 2, 1), 2)
    assert chk.ok and chk.max_relative_error < 1e-40


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_closed_form_passes_up_to_64(m):
    for alpha in (2, 50):
        prob = MthRootProblem(alpha, m, mthroot.heuristic_a(alpha, m))
        for n in (1, 7, 32, 64):
            assert mthroot.entry_closed_form_check(prob, n).ok


def test_closed_form_detects_a_wrong_entry(monkeypatch):
    prob = MthRootProblem(10, 3, 2)
    real = mthroot.mat_pow

    def corrupted(A, n):
        P = real(A, n).tolist()
        P[0][0] += 1
        return SquareMatrix.of(P)

    monkeypatch.setattr(mthroot, "mat_pow", corrupted)
    assert not mthroot.entry_closed_form_check(prob, 5).ok


def test_dominance_margin_grid():
    for m in (2, 3, 4, 5, 6):
        for alpha in (2, 10, 50):
            for a in {1, mthroot.heuristic_a(alpha, m)}:
                assert mthroot.diagonalize(MthRootProblem(alpha, m, a)).dominance_margin.mantissa > 0


def test_m3_ratio_equals_cube_root_path():
    for alpha, a in ((2, 1), (10, 4), (100, 3)):
        prob = MthRootProblem(alpha, 3, a)
        P = mthroot.build_matrix(prob)
        for n in range(2, 30):
            P = P @ mthroot.build_matrix(prob)
            _, d, r = cuberoot.gamma_delta_rho(alpha, a, n)
            assert mthroot.ratio(prob, (2, 1), (3, 1), n, P) == Fraction(d, r)


def test_approximate_root_examples():
    value, rep = mthroot.approximate_root(MthRootProblem(4, 2, 1))
    assert value == 2 and rep.status == "exact"
    for alpha, m, a in ((2, 5, 1), (10, 4, 2)):
        value, rep = mthroot.approximate_root(MthRootProblem(alpha, m, a))
        assert rep.status == "converged"
        assert abs(value - exactnum.root_interval(alpha, m, 128)).hi < Fraction(1, 10**15)
        assert rep.rows[-1].n <= 1024


def test_approximate_root_reports_unconverged():
    _, rep = mthroot.approximate_root(MthRootProblem(50, 6, 1), 64, max_n=8)
    assert rep.status == "unconverged"
    assert rep.extra["max_n"] == 8
