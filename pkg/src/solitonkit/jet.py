"""Truncated multivariate Taylor jets with tensor values.

A :class:`Jet` stores a tensor-valued function together with its partial
derivatives up to a fixed order at one point of an ``n``-dimensional chart.
Component ``c[j]`` has shape ``value_shape + (n,) * j`` and holds the full
(symmetric) derivative tensor, so ``c[2][..., a, b]`` is the second partial
with respect to coordinates ``a`` and ``b``.  Derivative axes always trail
the value axes.

Arithmetic propagates derivatives exactly by the Leibniz rule, elementwise
functions by a truncated Taylor composition.  The same field callables can
therefore be evaluated on plain floats (for finite differences) and on jets
(for exact derivatives), as long as they use the functions exported here
(``exp``, ``log``, ...) instead of :mod:`math`.
"""

from __future__ import annotations

import math
import string
from itertools import combinations

import numpy as np

__all__ = [
    "Jet",
    "variables",
    "constant",
    "grad",
    "einsum",
    "inv",
    "stack",
    "concatenate",
    "block_diag",
    "compose",
    "value",
    "order_of",
    "exp",
    "log",
    "sqrt",
    "sin",
    "cos",
    "tan",
    "sinh",
    "cosh",
    "tanh",
    "atanh",
    "asinh",
    "power",
]

_LETTERS = string.ascii_letters


class Jet:
    """Tensor value plus partial derivatives up to ``order``."""

    __slots__ = ("c", "nvars")
    __array_ufunc__ = None  # keep numpy from broadcasting over jets

    def __init__(self, coeffs, nvars):
        self.c = [np.asarray(a, dtype=float) for a in coeffs]
        self.nvars = int(nvars)

    @property
    def order(self):
        return len(self.c) - 1

    @property
    def shape(self):
        return self.c[0].shape

    @property
    def ndim(self):
        return self.c[0].ndim

    @property
    def value(self):
        return self.c[0]

    def __repr__(self):
        return f"Jet(shape={self.shape}, order={self.order}, nvars={self.nvars})"

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[: order + 1], self.nvars)

    def deriv(self, j):
        """Derivative tensor of order ``j``."""
        return self.c[j]

    # value-axis manipulation -------------------------------------------------

    def __getitem__(self, idx):
        return Jet([a[idx] for a in self.c], self.nvars)

    def __len__(self):
        return self.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        k = self.ndim
        if not axes:
            axes = tuple(reversed(range(k)))
        return Jet(
            [a.transpose(tuple(axes) + tuple(range(k, a.ndim))) for a in self.c],
            self.nvars,
        )

    @property
    def T(self):
        return self.transpose()

    def sum(self, axis=None):
        k = self.ndim
        if axis is None:
            axis = tuple(range(k))
        return Jet([a.sum(axis=axis) for a in self.c], self.nvars)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        n = self.nvars
        return Jet([a.reshape(tuple(shape) + (n,) * j) for j, a in enumerate(self.c)], n)

    # arithmetic --------------------------------------------------------------

    def __neg__(self):
        return Jet([-a for a in self.c], self.nvars)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            _check_vars(self, other)
            k = min(self.order, other.order)
            return Jet([self.c[j] + other.c[j] for j in range(k + 1)], self.nvars)
        other = np.asarray(other, dtype=float)
        out = list(self.c)
        out[0] = out[0] + other
        if out[0].shape != self.shape:
            out = [np.broadcast_to(a, out[0].shape + a.shape[self.ndim:]) if j else a
                   for j, a in enumerate(out)]
        return Jet(out, self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return _leibniz(self, other, _outer_mul)
        other = np.asarray(other, dtype=float)
        return Jet([_scale(a, other, j, self.nvars) for j, a in enumerate(self.c)], self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * power(other, -1)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return power(self, -1) * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return exp(log(self) * exponent)
        return power(self, exponent)

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def __matmul__(self, other):
        return einsum(_matmul_spec(self, other), self, other)

    def __rmatmul__(self, other):
        return einsum(_matmul_spec(other, self), other, self)


def _check_vars(a, b):
    if a.nvars != b.nvars:
        raise ValueError(f"jets over {a.nvars} and {b.nvars} variables do not mix")


def _matmul_spec(a, b):
    na, nb = np.ndim(a.value if isinstance(a, Jet) else a), np.ndim(b.value if isinstance(b, Jet) else b)
    if na == 2 and nb == 2:
        return "ij,jk->ik"
    if na == 2 and nb == 1:
        return "ij,j->i"
    if na == 1 and nb == 2:
        return "i,ij->j"
    if na == 1 and nb == 1:
        return "i,i->"
    raise ValueError("matmul supports only vectors and matrices")


def _scale(a, const, j, n):
    """Multiply derivative component ``a`` (order ``j``) by a constant array."""
    if const.ndim == 0:
        return a * const
    return a * const.reshape(const.shape + (1,) * j)


def _outer_mul(ai, bk, i, k):
    # result axes: broadcast(value) + a-derivs (i) + b-derivs (k)
    ai = ai.reshape(ai.shape + (1,) * k)
    bk = bk.reshape(bk.shape[: bk.ndim - k] + (1,) * i + bk.shape[bk.ndim - k:])
    return ai * bk


def _leibniz(a, b, pair):
    """Generic product rule.

    ``pair(ai, bk, i, k)`` must return an array whose trailing ``i + k`` axes
    are the derivative axes of ``ai`` followed by those of ``bk``.
    """
    _check_vars(a, b)
    order = min(a.order, b.order)
    out = []
    for j in range(order + 1):
        acc = None
        for i in range(j + 1):
            term = pair(a.c[i], b.c[j - i], i, j - i)
            base = term.ndim - j
            for subset in combinations(range(j), i):
                rest = [p for p in range(j) if p not in subset]
                perm = list(range(base))
                src = {p: base + t for t, p in enumerate(subset)}
                src.update({p: base + i + t for t, p in enumerate(rest)})
                perm += [src[p] for p in range(j)]
                piece = term.transpose(perm) if j else term
                acc = piece if acc is None else acc + piece
        out.append(acc)
    return Jet(out, a.nvars)


# constructors ----------------------------------------------------------------


def variables(point, order):
    """Identity jet of the chart coordinates at ``point``."""
    point = np.asarray(point, dtype=float)
    n = point.shape[0]
    coeffs = [point.copy()]
    if order >= 1:
        coeffs.append(np.eye(n))
    for j in range(2, order + 1):
        coeffs.append(np.zeros((n,) * (j + 1)))
    return Jet(coeffs, n)


def constant(val, order, nvars):
    val = np.asarray(val, dtype=float)
    return Jet([val] + [np.zeros(val.shape + (nvars,) * j) for j in range(1, order + 1)], nvars)


def value(x):
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def order_of(x):
    return x.order if isinstance(x, Jet) else 0


def grad(x):
    """Jet of the first derivative: value shape gains one trailing axis."""
    if x.order < 1:
        raise ValueError("cannot differentiate an order-0 jet")
    return Jet(x.c[1:], x.nvars)


def _promote(items):
    jets = [it for it in items if isinstance(it, Jet)]
    if not jets:
        return None
    n = jets[0].nvars
    order = min(j.order for j in jets)
    out = []
    for it in items:
        if isinstance(it, Jet):
            _check_vars(it, jets[0])
            out.append(it.truncate(order))
        else:
            out.append(constant(it, order, n))
    return out


def stack(items, axis=0):
    """Stack jets (or numbers) along a new value axis."""
    items = list(items)
    if items and all(isinstance(it, (list, tuple)) for it in items):
        items = [stack(it, axis=0) for it in items]
    jets = _promote(items)
    if jets is None:
        return np.stack([np.asarray(it, dtype=float) for it in items], axis=axis)
    k = jets[0].order
    return Jet([np.stack([jt.c[j] for jt in jets], axis=axis) for j in range(k + 1)], jets[0].nvars)


def concatenate(items, axis=0):
    items = list(items)
    jets = _promote(items)
    if jets is None:
        return np.concatenate([np.asarray(it, dtype=float) for it in items], axis=axis)
    k = jets[0].order
    return Jet([np.concatenate([jt.c[j] for jt in jets], axis=axis) for j in range(k + 1)], jets[0].nvars)


def block_diag(a, b):
    """Block-diagonal matrix from two square matrix jets (or arrays)."""
    na, nb = value(a).shape[0], value(b).shape[0]
    za = np.zeros((na, nb))
    top = concatenate([a, za], axis=1)
    bottom = concatenate([za.T, b], axis=1)
    return concatenate([top, bottom], axis=0)


# contractions ------------------------------------------------------------------


def _parse_spec(spec):
    lhs, out = spec.replace(" ", "").split("->")
    return lhs.split(","), out


def einsum(spec, *operands):
    """``numpy.einsum`` on value axes, carrying derivatives along.

    Supports one or two operands; either may be a plain array.
    """
    ins, out = _parse_spec(spec)
    if len(ins) != len(operands):
        raise ValueError("operand count does not match subscripts")
    used = set("".join(ins) + out)
    free = [ch for ch in _LETTERS if ch not in used]
    if len(operands) == 1:
        (a,) = operands
        if not isinstance(a, Jet):
            return np.einsum(spec, a)
        comps = []
        for j, cj in enumerate(a.c):
            d = "".join(free[:j])
            comps.append(np.einsum(f"{ins[0]}{d}->{out}{d}", cj))
        return Jet(comps, a.nvars)
    a, b = operands
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.einsum(spec, a, b)
    if not isinstance(b, Jet):
        b = np.asarray(b, dtype=float)
        comps = []
        for j, cj in enumerate(a.c):
            d = "".join(free[:j])
            comps.append(np.einsum(f"{ins[0]}{d},{ins[1]}->{out}{d}", cj, b))
        return Jet(comps, a.nvars)
    if not isinstance(a, Jet):
        a = np.asarray(a, dtype=float)
        comps = []
        for j, cj in enumerate(b.c):
            d = "".join(free[:j])
            comps.append(np.einsum(f"{ins[0]},{ins[1]}{d}->{out}{d}", a, cj))
        return Jet(comps, b.nvars)

    def pair(ai, bk, i, k):
        da = "".join(free[:i])
        db = "".join(free[i:i + k])
        return np.einsum(f"{ins[0]}{da},{ins[1]}{db}->{out}{da}{db}", ai, bk)

    return _leibniz(a, b, pair)


def inv(m):
    """Inverse of a square-matrix jet, solved order by order."""
    if not isinstance(m, Jet):
        return np.linalg.inv(m)
    x0 = np.linalg.inv(m.value)
    n = m.nvars
    size = x0.shape[0]
    comps = [x0]
    for j in range(1, m.order + 1):
        trial = Jet(comps + [np.zeros((size, size) + (n,) * j)], n)
        prod = einsum("ij,jk->ik", m.truncate(j), trial)
        comps.append(-np.einsum("ij,jk...->ik...", x0, prod.c[j]))
    return Jet(comps, n)


def compose(taylor, inner):
    """Chain a function's derivative tensors with an inner jet.

    ``taylor`` is a jet over ``d`` variables (the outer function expanded at
    ``inner.value``); ``inner`` is a jet with value shape ``(d,)`` over the
    chart variables.  Returns the jet of the composite.
    """
    if not isinstance(inner, Jet):
        return taylor.value
    order = min(taylor.order, inner.order)
    shape = taylor.shape
    delta = Jet([np.zeros_like(inner.c[0])] + inner.c[1:order + 1], inner.nvars)
    result = constant(taylor.c[0], order, inner.nvars)
    power_jet = None
    free = list(_LETTERS)
    vs = "".join(free[: len(shape)])
    fact = 1.0
    for j in range(1, order + 1):
        fact *= j
        if power_jet is None:
            power_jet = delta
        else:
            letters = "".join(free[len(shape): len(shape) + j - 1])
            new = free[len(shape) + j - 1]
            power_jet = einsum(f"{letters},{new}->{letters}{new}", power_jet, delta)
        letters = "".join(free[len(shape): len(shape) + j])
        term = einsum(f"{vs}{letters},{letters}->{vs}", taylor.c[j], power_jet)
        result = result + term * (1.0 / fact)
    return result


# elementwise functions -----------------------------------------------------------


def _taylor_apply(x, derivs):
    """Apply an elementwise function given its derivatives at ``x.value``.

    ``derivs[k]`` is the k-th derivative evaluated elementwise.
    """
    order = x.order
    delta = Jet([np.zeros_like(x.c[0])] + x.c[1:], x.nvars)
    out = constant(derivs[0], order, x.nvars)
    power_jet = None
    fact = 1.0
    for k in range(1, order + 1):
        fact *= k
        power_jet = delta if power_jet is None else power_jet * delta
        out = out + power_jet * (derivs[k] / fact)
    return out


def _elementwise(np_fn, deriv_fn):
    def fn(x):
        if isinstance(x, Jet):
            return _taylor_apply(x, deriv_fn(x.value, x.order))
        if isinstance(x, (int, float)):
            return float(np_fn(float(x)))
        return np_fn(np.asarray(x, dtype=float))

    fn.__name__ = np_fn.__name__
    return fn


def _exp_derivs(v, k):
    e = np.exp(v)
    return [e] * (k + 1)


def _log_derivs(v, k):
    if np.any(v <= 0):
        raise ValueError("log of non-positive value")
    out = [np.log(v)]
    for j in range(1, k + 1):
        out.append((-1.0) ** (j - 1) * math.factorial(j - 1) / v ** j)
    return out


def _sin_derivs(v, k):
    cyc = [np.sin(v), np.cos(v), -np.sin(v), -np.cos(v)]
    return [cyc[j % 4] for j in range(k + 1)]


def _cos_derivs(v, k):
    cyc = [np.cos(v), -np.sin(v), -np.cos(v), np.sin(v)]
    return [cyc[j % 4] for j in range(k + 1)]


def _power_derivs(a):
    def derivs(v, k):
        out = []
        coef = 1.0
        for j in range(k + 1):
            if coef == 0.0:
                out.append(np.zeros_like(v))
            else:
                e = a - j
                if float(e).is_integer():
                    out.append(coef * v ** int(e) if e >= 0 else coef / v ** int(-e))
                else:
                    out.append(coef * v ** e)
            coef *= a - j
        return out

    return derivs


exp = _elementwise(np.exp, _exp_derivs)
log = _elementwise(np.log, _log_derivs)
sin = _elementwise(np.sin, _sin_derivs)
cos = _elementwise(np.cos, _cos_derivs)


def power(x, a):
    if not isinstance(x, Jet):
        return np.asarray(x, dtype=float) ** a if np.ndim(x) else float(x) ** a
    if isinstance(a, (int, np.integer)) or float(a).is_integer():
        a = int(a)
        if a == 0:
            return constant(np.ones(x.shape), x.order, x.nvars)
        if a == 1:
            return x
        if a == 2:
            return x * x
        if a < 0 and np.any(x.value == 0):
            raise ZeroDivisionError("negative power of a jet with zero value")
    return _taylor_apply(x, _power_derivs(float(a))(x.value, x.order))


def sqrt(x):
    return power(x, 0.5)


def tan(x):
    return sin(x) / cos(x)


def sinh(x):
    return (exp(x) - exp(-x)) * 0.5


def cosh(x):
    return (exp(x) + exp(-x)) * 0.5


def tanh(x):
    if not isinstance(x, Jet):
        return np.tanh(x) if np.ndim(x) else math.tanh(x)
    return 1.0 - 2.0 / (exp(2.0 * x) + 1.0)


def atanh(x):
    if not isinstance(x, Jet):
        return np.arctanh(x) if np.ndim(x) else math.atanh(x)
    return 0.5 * log((1.0 + x) / (1.0 - x))


def asinh(x):
    if not isinstance(x, Jet):
        return np.arcsinh(x) if np.ndim(x) else math.asinh(x)
    return log(x + sqrt(x * x + 1.0))
