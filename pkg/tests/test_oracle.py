from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from khovanskii import exactnum
from khovanskii.errors import DomainError
from khovanskii.oracle import RootQuery, bisect_root, bracket_real_root, nth_root_oracle, poly_eval, real_root


def test_bisect_cube_root_of_two():
    v = bisect_root(RootQuery((-2, 0, 0, 1), Fraction(1), Fraction(2), 64))
    ulp = Fraction(1, 1 << 64)
    assert (v.value - ulp) ** 3 < 2 < (v.value + ulp) ** 3


def test_bisect_plastic_number_residual():
    f = (-1, -1, 0, 1)
    v = bisect_root(RootQuery(f, Fraction(1), Fraction(2), 128))
    assert abs(poly_eval(f, v.value)) < Fraction(1, 1 << 125)
    assert exactnum.decimal_str(v.value, 10) == "1.3247179572"


def test_bisect_exact_hit():
    v = bisect_root(RootQuery((-5, 1), Fraction(0), Fraction(10), 32))
    assert v.exact and v.value == 5


def test_no_sign_change_is_domain_error():
    with pytest.raises(DomainError):
        RootQuery((1, 0, 1), Fraction(-1), Fraction(1), 10)


def test_brackets():
    lo, hi = bracket_real_root((-1, -1, 0, 1))
    assert lo <= Fraction(13247, 10000) <= hi
    assert bracket_real_root((1, 0, 1)) is None
    lo, hi = bracket_real_root((-8, 0, 0, 1))
    assert lo <= 2 <= hi


@given(st.integers(min_value=1, max_value=10**9), st.integers(min_value=2, max_value=6))
def test_perfect_powers_match_integer_root(k, m):
    k = k % 1000 + 1
    assert nth_root_oracle(k**m, m, 40).value == exactnum.integer_root_floor(k**m, m)


@given(st.integers(min_value=2, max_value=10**6), st.integers(min_value=2, max_value=5))
def test_refinement_agrees(alpha, m):
    a, b = nth_root_oracle(alpha, m, 48), nth_root_oracle(alpha, m, 48 + 64)
    assert abs(a.value - b.value) < Fraction(1, 1 << 48)


def test_real_root_none_without_bracket():
    assert real_root((1, 0, 1), 32) is None
