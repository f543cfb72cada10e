from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from biharm.exact import grid_sign_changes, sturm_count
from biharm.exponents import (
    E_value,
    cleared_polynomial,
    closing_condition,
    discrepancy_report,
    exponent_report,
    exponent_reports,
    feasibility_sample,
    feasibility_scan,
    gamma0,
    h_value,
    p_of_gamma,
    p_star,
    p_star_search,
    printed_h_at_gamma0,
    printed_quartic,
    printed_sextic,
    theta_of,
)

G, N = sp.symbols("g n")


def _sym_h():
    p = (8 * G + N - 4) / (N - 4)
    return p * (1 - 4 * (G - 1) ** 2) - G**2 / (2 * G - 1) + 8 * G**2 * (G - 1) ** 2 / ((4 * G - 3 + p) * (p + 1))


def _sym_cleared(n):
    """Cleared form derived symbolically (independent of the interpolation code path)."""
    p = (8 * G + n - 4) / sp.Integer(n - 4)
    expr = _sym_h().subs(N, n) * (2 * G - 1) * (4 * G - 3 + p) * (p + 1) * (n - 4) ** 3
    poly = sp.Poly(sp.cancel(sp.together(expr)), G)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def to_sym(x: Fraction):
    return sp.Rational(x.numerator, x.denominator)


# -- scalar formulas ---------------------------------------------------------


def test_p_of_gamma_examples():
    assert p_of_gamma(20, Fraction(4, 3)) == Fraction(5, 3)
    assert p_of_gamma(12, 1) == 2
    for n in range(9, 40):
        assert p_of_gamma(n, gamma0(n)) == Fraction(n, n - 8)


def test_theta_examples():
    assert theta_of(Fraction(6, 5), Fraction(13, 10)) == Fraction(4, 7)
    assert abs(theta_of(1.2, 1.3) - 4 / 7) < 1e-15
    for eps in (Fraction(1, 10**k) for k in range(1, 8)):
        t = theta_of(Fraction(5, 4), 1 + eps)
        assert t < 1
    assert 1 - theta_of(Fraction(5, 4), 1 + Fraction(1, 10**9)) < Fraction(1, 10**8)
    with pytest.raises(ZeroDivisionError):
        theta_of(1, 1)


def test_E_matches_symbolic_oracle():
    e_sym = lambda g, p: (
        p * (1 - 4 * (g - 1) ** 2) - g**2 / (2 * g - 1) + 8 * g**2 * (g - 1) ** 2 / ((4 * g - 3 + p) * (p + 1))
    )
    for g, p in [(Fraction(4, 3), Fraction(5, 3)), (Fraction(6, 5), Fraction(13, 10)), (Fraction(7, 5), Fraction(9, 4))]:
        assert to_sym(E_value(g, p)) == e_sym(to_sym(g), to_sym(p))
    assert E_value(Fraction(4, 3), Fraction(5, 3)) == Fraction(1, 135)
    assert E_value(1, 3) == 2


def test_h_gamma0_closed_form():
    # independent symbolic simplification of h at gamma0
    hg0 = sp.factor(sp.simplify(_sym_h().subs(G, (N - 4) / (N - 8))))
    quartic = N**4 - 18 * N**3 - 56 * N**2 + 384 * N - 512
    assert sp.simplify(hg0 - 8 * quartic / (N * (N - 8) ** 3 * (N + 4))) == 0
    for n in (9, 19, 20, 57):
        assert h_value(n, gamma0(n)) == Fraction(8 * printed_quartic(n), n * (n - 8) ** 3 * (n + 4))
    # the printed closed form carries a different normalisation
    assert printed_h_at_gamma0(20) == 512 and h_value(20, Fraction(4, 3)) == Fraction(1, 135)


def test_quartic_values():
    assert printed_quartic(20) == 768
    assert printed_quartic(19) == -6573
    assert printed_quartic(9) == -8153


# -- cleared polynomial -------------------------------------------------------


@pytest.mark.parametrize("n", [9, 13, 19, 20, 21, 50])
def test_cleared_polynomial_matches_symbolic(n):
    assert cleared_polynomial(n).coeffs == _sym_cleared(n)


def test_cleared_polynomial_structure():
    c = cleared_polynomial(20)
    assert c.descending() == (-36864, -47104, 77824, 376320, -611328, 303104, -49152)
    for n in range(9, 60):
        assert cleared_polynomial(n).leading == -2048 * (n - 2)
        assert printed_sextic(n).leading == 512 * (2 - n)


def test_cleared_is_four_times_printed_except_degree_five():
    for n in range(9, 40):
        c, pr = cleared_polynomial(n).coeffs, printed_sextic(n).coeffs
        for k in range(7):
            # the printed x^5 coefficient has 670n where the derivation gives 720n
            assert c[k] - 4 * pr[k] == (800 * n if k == 5 else 0)


# -- p* ------------------------------------------------------------------------


def test_pstar_n20():
    b = p_star(20, 1e-12)
    assert b.width <= Fraction(1e-12)
    assert Fraction("1.335") < b.low and b.high < Fraction("1.340")
    res = p_star_search(20)
    assert res.certified_smallest


def test_pstar_is_smallest_by_sturm():
    for n in (20, 25, 40, 100):
        b = p_star(n)
        # no root of the cleared form between gamma0 and the bracket
        assert sturm_count(cleared_polynomial(n), gamma0(n), b.low) == 0
        assert gamma0(n) < b.midpoint < Fraction(3, 2)


def test_pstar_absent_below_20():
    for n in (9, 12, 19):
        assert p_star(n) is None
    with pytest.raises(ValueError):
        p_star(8)


def test_report_fields():
    r = exponent_report(20)
    assert r.p_wy == Fraction(5, 3) and r.gamma0 == Fraction(4, 3)
    assert r.p_max > r.p_wy and Fraction("0.0008") < r.epsilon_n < Fraction("0.0034")
    assert r.p_max == 1 + 8 * r.p_star.high / 16
    r8 = exponent_report(8)
    assert r8.p_wy is None and r8.gamma0 is None and r8.p_star is None


def test_reports_order_independent_of_workers():
    ns = [20, 23, 9, 31]
    assert exponent_reports(ns, workers=1) == exponent_reports(ns, workers=3)


# -- feasibility grid ------------------------------------------------------------


def test_feasibility_scan_shape_and_order():
    rows = feasibility_scan(20, 4, 3)
    assert len(rows) == 12
    assert [r.gamma for r in rows[:3]] == [rows[0].gamma] * 3
    assert all(1 < r.gamma < Fraction(3, 2) for r in rows)
    assert rows == feasibility_scan(20, 4, 3, workers=2)


@settings(max_examples=300, deadline=None)
@given(
    st.integers(min_value=9, max_value=200),
    st.fractions(min_value=1, max_value=Fraction(3, 2), max_denominator=500).filter(lambda g: 1 < g < Fraction(3, 2)),
    st.fractions(min_value=1, max_value=10, max_denominator=500).filter(lambda p: p > 1),
)
def test_feasibility_invariants(n, g, p):
    s = feasibility_sample(n, g, p)
    assert s.q == 2 * g - 1
    assert 2 * (1 - s.theta) + (2 * g + p - 1) * s.theta == 2 * g
    assert s.admissible == (s.cond_E and s.cond_52)
    assert closing_condition(n, g, p) == s.cond_52


# -- appendix audit ------------------------------------------------------------


def test_discrepancy_report_n20():
    rep = discrepancy_report(20)
    assert rep.verdict == "inconsistent"
    row = next(r for r in rep.sign_table if r.gamma == Fraction(4, 3))
    assert row.printed_sign == -1 and row.h_sign == 1
    assert rep.scale == 4
    assert rep.mismatched_degrees == (5,)
    assert rep.deltas[5] == 200 * 20  # cleared/4 minus printed at degree 5


def test_verdict_inconsistent_whenever_signs_disagree():
    for n in (9, 15, 20, 33):
        rep = discrepancy_report(n, 32)
        if rep.sign_mismatches:
            assert rep.verdict == "inconsistent"


def test_printed_sextic_has_no_root_where_h_changes_sign():
    poly = printed_sextic(20)
    assert sturm_count(poly, 1, Fraction(3, 2)) == 0
    assert grid_sign_changes(lambda g: h_value(20, g), Fraction(4, 3), Fraction(3, 2), 200) == 1
