import time
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from solitonkit import diffalg as da
from solitonkit.errors import DivisionByZeroError

SYMS = {n: sp.Symbol(n) for n in ("x", "c", "m", "K", "lam", "a0", "a1", "a2", "a3")}


def to_sympy(r):
    return sp.sympify(str(r).replace("^", "**"), locals=SYMS)


def sympy_derive(e):
    """The same derivation written independently: d/dx plus a_i -> a_{i+1}."""
    out = sp.diff(e, SYMS["x"])
    for i in range(3):
        out += sp.diff(e, SYMS[f"a{i}"]) * SYMS[f"a{i + 1}"]
    return out


def same(r, e):
    return sp.simplify(to_sympy(r) - e) == 0


x, c, m = da.var("x"), da.var("c"), da.var("m")
a0, a1 = da.alpha(0), da.alpha(1)

atoms = st.sampled_from([x, c, m, a0, a1, da.const(2), da.const(Fraction(-1, 3))])


@st.composite
def polys(draw, depth=2):
    if depth == 0:
        return draw(atoms)
    left = draw(polys(depth=depth - 1))
    right = draw(polys(depth=depth - 1))
    op = draw(st.sampled_from(["+", "-", "*"]))
    return {"+": left + right, "-": left - right, "*": left * right}[op]


@st.composite
def rats(draw):
    num = draw(polys())
    den = draw(polys())
    if to_sympy(den) == 0:
        den = den + da.const(7)
    if to_sympy(den) == 0:
        den = da.const(1)
    return num / den


@settings(max_examples=40, deadline=None)
@given(a=rats(), b=rats())
def test_arithmetic_matches_sympy(a, b):
    assert same(a + b, to_sympy(a) + to_sympy(b))
    assert same(a * b, to_sympy(a) * to_sympy(b))
    if not b.is_zero():
        assert same(a / b, to_sympy(a) / to_sympy(b))


@settings(max_examples=40, deadline=None)
@given(a=rats())
def test_derive_matches_independent_derivation(a):
    assert same(a.derive(), sympy_derive(to_sympy(a)))


@settings(max_examples=40, deadline=None)
@given(a=rats(), b=rats())
def test_leibniz_rule(a, b):
    assert (a * b).derive() == a.derive() * b + a * b.derive()


@settings(max_examples=40, deadline=None)
@given(a=rats())
def test_canonical_form_roundtrip_is_idempotent(a):
    text = str(a)
    again = da.parse_rat(text)
    assert again == a
    assert str(again) == text


@settings(max_examples=30, deadline=None)
@given(a=polys(), b=polys(), g=polys())
def test_gcd_matches_sympy_up_to_units(a, b, g):
    ag, bg = (a * g).num, (b * g).num
    if ag.is_zero() or bg.is_zero():
        return
    ours = to_sympy(da.DiffRat(da.poly_gcd(ag, bg)))
    theirs = sp.gcd(sp.expand(to_sympy(a * g)), sp.expand(to_sympy(b * g)))
    assert sp.simplify(ours / theirs).is_number


def test_common_factors_cancel():
    r = ((x - c) * (x + m)) / ((x - c) * (x * x + 1))
    assert str(r) == str((x + m) / (x * x + 1))
    assert str(-r) == str((-x - m) / (x * x + 1))


def test_constant_denominators_fold_into_the_numerator():
    assert da.const(1) / da.const(4) == da.const(Fraction(1, 4)) == da.parse_rat("1/4")
    assert ((x + 1) / 4).den == da.parse_rat("1").num


def test_gcd_routes_agree():
    p = (x * a1 - 3 * m + c) * (x * x + a0 * c + 2)
    cases = [
        (p * (a1 + x) * (a1 + x), p * (m - c + 1)),
        ((x - c) ** 3 * (a0 + 1), (x - c) ** 2 * (a0 - m) * (a0 + 1)),
        (p, p * p),
    ]
    for u, v in cases:
        u, v = u.num, v.num
        assert da.poly_gcd(u, v) == da._prs_gcd(u, v)


def test_repeated_factor_derivative_is_fast():
    start = time.perf_counter()
    num = (-27 * a1 + 54 * m - 54) * (3 * a1 - 3 * a0 + 3 * x - 1)
    den = ((3 * a1 + 188) * (3 * a1 + 3 * a0 + 21)) ** 2
    r = num / den
    assert (r.derive() * den - num.derive() + num * den.derive() / den).is_zero()
    assert time.perf_counter() - start < 5.0


def test_division_by_zero():
    with pytest.raises(DivisionByZeroError):
        x / da.const(0)
    with pytest.raises(ZeroDivisionError):
        x / (x - x)


def test_evaluate():
    r = (x * x + a0) / (x - c)
    assert r.evaluate({"x": 3, "c": 1, "a0": Fraction(1, 2)}) == Fraction(19, 4)


def test_goldens_and_runtime():
    start = time.perf_counter()
    results = da.golden_identities()
    elapsed = time.perf_counter() - start
    for name, computed, expected in results:
        assert str(computed) == str(expected), name
    assert elapsed < 5.0


def test_first_order_reduction_quasi_coefficients():
    cs = da.first_order_reduction_symbolic("quasi")
    lam, K = da.var("lam"), da.var("K")
    assert cs.p == (m / (x - c) - a0)
    assert cs.q == -(K + (x - c) * lam) / (x - c)
    den, num = da.delem_quantities(cs)
    assert den == a1 * (x - c) ** 2 and num.is_zero()


def test_conformal_reduction_q_is_rhs_over_lead():
    cs = da.first_order_reduction_symbolic("conformal")
    lead = cs.first.d1
    assert lead == (x - c) * (x - 2 * c) / x
    assert cs.q == cs.first.rhs / lead


def test_alpha_family_solves_alpha_ode():
    assert da.substitute_alpha(da.alpha_ode_expr(), da.alpha_family_expr()).is_zero()
    assert da.substitute_alpha(da.alpha_ode_expr(), da.alpha_family_expr(C=3)).is_zero()
    assert not da.substitute_alpha(da.alpha_ode_expr(), 1 / x).is_zero()


def test_substitute_alpha_rejects_alpha_in_replacement():
    with pytest.raises(ValueError):
        da.substitute_alpha(a1, a0 * x)
