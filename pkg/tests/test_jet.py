import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from solitonkit import jet as jm

X, Y = sp.symbols("x y")
POINT = np.array([0.3, -0.7])


def _sympy_derivs(expr, order):
    """Derivative tensors of a sympy expression at POINT, the independent oracle."""
    subs = {X: POINT[0], Y: POINT[1]}
    out = [float(expr.subs(subs))]
    cur = [expr]
    for _ in range(order):
        cur = [sp.diff(e, v) for e in cur for v in (X, Y)]
        out.append(np.array([float(e.subs(subs)) for e in cur]).reshape((2,) * (len(out))))
    return out


CASES = [
    (lambda x: jm.exp(x[0] * x[1]), sp.exp(X * Y)),
    (lambda x: jm.log(2 + x[0] ** 2 + jm.sin(x[1])), sp.log(2 + X**2 + sp.sin(Y))),
    (lambda x: jm.sqrt(1 + x[0] ** 2) / (3 + x[1]), sp.sqrt(1 + X**2) / (3 + Y)),
    (lambda x: jm.tanh(x[0] - 2 * x[1]) * jm.cosh(x[1]), sp.tanh(X - 2 * Y) * sp.cosh(Y)),
    (lambda x: jm.atanh(x[0] / 2) + jm.asinh(x[1]) ** 3, sp.atanh(X / 2) + sp.asinh(Y) ** 3),
    (lambda x: jm.power(1.5 + x[0], 2.5) * jm.tan(x[1] / 3), (sp.Rational(3, 2) + X) ** sp.Rational(5, 2) * sp.tan(Y / 3)),
]


@pytest.mark.parametrize("fn, expr", CASES)
def test_jet_matches_symbolic_derivatives(fn, expr):
    jet = fn(jm.variables(POINT, 3))
    for j, want in enumerate(_sympy_derivs(expr, 3)):
        np.testing.assert_allclose(jet.c[j], want, rtol=1e-11, atol=1e-12)


def test_matrix_inverse_jet():
    x = jm.variables(POINT, 2)
    m = jm.stack([jm.stack([2 + x[0] ** 2, x[1]]), jm.stack([x[1], 1 + jm.exp(x[0])])])
    prod = jm.einsum("ij,jk->ik", m, jm.inv(m))
    np.testing.assert_allclose(prod.c[0], np.eye(2), atol=1e-14)
    for j in (1, 2):
        np.testing.assert_allclose(prod.c[j], 0.0, atol=1e-13)


def test_grad_lowers_order():
    x = jm.variables(POINT, 2)
    g = jm.grad(x[0] ** 2 * x[1])
    assert g.order == 1
    np.testing.assert_allclose(g.value, [2 * POINT[0] * POINT[1], POINT[0] ** 2])


def test_log_of_negative_raises():
    with pytest.raises(Exception):
        jm.log(jm.variables(np.array([-1.0]), 1)[0])


finite = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(a=finite, b=finite, p=finite, q=finite)
def test_leibniz_product_rule(a, b, p, q):
    x = jm.variables(np.array([p, q]), 3)
    f = jm.sin(a * x[0] + x[1])
    g = jm.exp(b * x[1]) + x[0]
    fg = f * g
    gf, gg = jm.grad(f), jm.grad(g)
    rhs = gf * g.truncate(2) + f.truncate(2) * gg
    for j in range(3):
        np.testing.assert_allclose(jm.grad(fg).c[j], rhs.c[j], atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(p=finite, q=finite)
def test_exp_log_roundtrip(p, q):
    x = jm.variables(np.array([p, q]), 3)
    u = 1.5 + jm.sin(x[0]) * jm.cos(x[1])
    back = jm.exp(jm.log(u))
    for j in range(4):
        np.testing.assert_allclose(back.c[j], u.c[j], atol=1e-11)
