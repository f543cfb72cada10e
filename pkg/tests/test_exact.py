from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import pytest
from hypothesis import given, settings, strategies as st

from biharm.exact import (
    BracketError,
    EndpointRootError,
    IntPolynomial,
    RootBracket,
    as_exact,
    grid_sign_changes,
    interpolate,
    isolate_root,
    poly_eval,
    sign,
    sturm_count,
)
from biharm.exponents import h_value, printed_sextic

X2M1 = IntPolynomial([-1, 0, 1])

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)


def test_poly_eval_examples():
    assert poly_eval(X2M1, 2) == 3
    assert poly_eval(IntPolynomial([]), Fraction(7, 3)) == 0
    assert IntPolynomial([0, 0]).is_zero()


def test_printed_sextic_at_one_matches_hand_sum():
    # coefficients at n = 20 summed by hand: -9216 - 15776 + 19456 + 94080 - 152832 + 75776 - 12288
    assert printed_sextic(20).descending() == (-9216, -15776, 19456, 94080, -152832, 75776, -12288)
    assert poly_eval(printed_sextic(20), 1) == -800


def test_sturm_trivial_counts():
    assert sturm_count(X2M1, 0, 2) == 1
    assert sturm_count(IntPolynomial([1, 0, 1]), -10, 10) == 0
    assert sturm_count(X2M1, -2, 2) == 2


def test_sturm_printed_sextic_matches_dense_scan():
    poly = printed_sextic(20)
    low, high = Fraction(1), Fraction(3, 2)
    assert sturm_count(poly, low, high) == grid_sign_changes(poly, low, high, 10_000)


def test_sturm_rejects_bad_input():
    with pytest.raises(ValueError):
        sturm_count(X2M1, 2, 0)
    with pytest.raises(ValueError):
        sturm_count(IntPolynomial([]), 0, 1)


def test_sturm_nudges_root_endpoints():
    # x^2 - 1 has roots at both ends of [-1, 1]; nudged inward there are none inside
    assert sturm_count(X2M1, -1, 1) == 0
    assert sturm_count(X2M1, 1, 3) == 0


def test_sturm_endpoint_error_when_nudges_exhausted():
    # roots at 1 + k/2^16 * 2 for k = 0..8 keep the lower endpoint on a root
    step = Fraction(2, 2**16)
    poly = IntPolynomial([1])
    for k in range(9):
        r = 1 + k * step
        poly = poly * IntPolynomial.from_rational([-r, Fraction(1)])
    with pytest.raises(EndpointRootError):
        sturm_count(poly, 1, 3)


def test_isolate_sqrt2_against_integer_oracle():
    b = isolate_root(lambda x: x * x - 2, RootBracket.from_function(lambda x: x * x - 2, 1, 2), 1e-12)
    assert b.width <= Fraction(1e-12)
    assert b.low**2 < 2 < b.high**2
    k = 45
    lo = Fraction(isqrt(2 * 4**k), 2**k)  # floor(sqrt 2 * 2^k) / 2^k
    assert lo <= b.high and b.low <= lo + Fraction(1, 2**k)
    assert abs(float(b.midpoint) - 1.4142135623730951) < 1e-12


def test_isolate_linear_exact_midpoint_zero():
    f = lambda x: x - 1
    b = isolate_root(f, RootBracket.from_function(f, 0, 2), Fraction(1, 1000))
    assert b.contains(1) and b.width <= Fraction(1, 1000)
    assert sign(f(b.low)) == -1 and sign(f(b.high)) == 1


def test_isolate_h20_bracket():
    f = lambda g: h_value(20, g)
    assert h_value(20, Fraction("1.335")) > 0 and h_value(20, Fraction("1.34")) < 0
    b = isolate_root(f, RootBracket.from_function(f, Fraction(4, 3), Fraction(3, 2)), 1e-12)
    assert Fraction("1.335") < b.low < b.high < Fraction("1.340")


def test_isolate_errors():
    f = lambda x: x - 1
    br = RootBracket.from_function(f, 0, 2)
    with pytest.raises(BracketError):
        isolate_root(f, br, 0)
    with pytest.raises(BracketError):
        isolate_root(f, br, -1)
    with pytest.raises(BracketError):
        RootBracket.from_function(f, 2, 3)
    with pytest.raises(BracketError):
        RootBracket(Fraction(2), Fraction(1), -1, 1)


def test_interpolate_recovers_polynomial():
    target = [Fraction(3), Fraction(-1, 2), Fraction(0), Fraction(5, 7)]
    nodes = [Fraction(k) for k in range(5)]
    values = [sum(c * x**i for i, c in enumerate(target)) for x in nodes]
    assert interpolate(nodes, values) == target


def test_as_exact_conversions():
    assert as_exact("4/3") == Fraction(4, 3)
    assert as_exact("1.335") == Fraction(267, 200)
    assert as_exact(0.5) == Fraction(1, 2)
    assert as_exact(7) == Fraction(7)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("+-*/"), rationals), min_size=1, max_size=30), rationals)
def test_rationals_stay_reduced(ops, start):
    acc = start
    for op, x in ops:
        if op == "/" and x == 0:
            continue
        acc = {"+": acc + x, "-": acc - x, "*": acc * x, "/": acc / x if x else acc}[op]
        assert acc.denominator > 0
        assert gcd(abs(acc.numerator), acc.denominator) == 1


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=7), min_size=1, max_size=6, unique=True),
    st.integers(min_value=1, max_value=5),
)
def test_sturm_matches_dense_grid_on_constructed_roots(roots, lead):
    poly = IntPolynomial([lead])
    for r in roots:
        poly = poly * IntPolynomial([-r.numerator, r.denominator])
    low, high = Fraction(-7, 2) + Fraction(1, 997), Fraction(7, 2) - Fraction(1, 991)
    expected = sum(1 for r in roots if low < r < high)
    assert sturm_count(poly, low, high) == expected
    # the grid misses no root: roots have denominators <= 7, grid spacing is far finer
    assert grid_sign_changes(poly, low, high, 4001) == expected


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(min_value=-5, max_value=5, max_denominator=1000),
    st.integers(min_value=1, max_value=40),
)
def test_isolate_root_nests_and_halves(root, k):
    f = lambda x: x - root
    start = RootBracket.from_function(f, root - Fraction(3, 2) - Fraction(1, 7), root + 2)
    tol = Fraction(1, 2**k)
    b = isolate_root(f, start, tol)
    assert b.width <= tol
    assert start.low <= b.low < b.high <= start.high
    assert sign(f(b.low)) * sign(f(b.high)) == -1


def test_isolate_root_halves_each_step():
    calls = []

    def f(x):
        calls.append(x)
        return x * x - 3

    start = RootBracket.from_function(f, 1, 2)
    calls.clear()
    tol = Fraction(1, 2**20)
    b = isolate_root(f, start, tol)
    # exactly one evaluation per halving from width 1 down to 2^-20
    assert len(calls) == 20 and b.width == tol
