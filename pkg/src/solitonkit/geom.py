"""Chart-based tensor calculus on top of Taylor jets.

Fields are plain callables of the chart coordinates.  A :class:`Frame`
evaluates a metric once at a point with derivatives up to a chosen order
and caches the connection and curvature derived from it; every covariant
operation here consumes a frame plus field jets.  Index conventions:

* ``gamma[k, i, j]`` is the Christoffel symbol of the second kind;
* derivative axes of jets trail the value axes, so ``grad(T)[a, b, c]`` is
  the partial of ``T[a, b]`` along coordinate ``c``;
* ``(1,1)``-tensors are matrices acting on column vectors, ``A[a, b]`` with
  ``a`` the contravariant slot.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import jet as jm
from .errors import DegenerateMetricError, DomainError, JetOrderError
from .jet import Jet

__all__ = [
    "ScalarField",
    "VectorField",
    "GradientField",
    "Sym2Field",
    "MetricField",
    "AlmostComplexField",
    "Frame",
    "christoffel",
    "hessian",
    "laplacian",
    "gradient",
    "ricci",
    "scalar_curvature",
    "lie_derivative_metric",
    "divergence_sym2",
    "interior_product",
    "functional_dependence_defect",
    "sym",
    "g_operator_norm",
    "sup_norm",
    "covector_norm",
    "two_form",
    "two_form_norm",
]


# fields ------------------------------------------------------------------------


class _Field:
    kind = "field"

    def __init__(self, fn, dim, name=None):
        self.fn = fn
        self.dim = int(dim)
        self.name = name

    def __call__(self, x):
        return self.fn(x)

    def evaluate(self, frame):
        out = self.fn(frame.x)
        if not isinstance(out, Jet):
            out = jm.constant(out, frame.order, frame.n)
        return out

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label} dim={self.dim}>"


class ScalarField(_Field):
    """Smooth real function of the chart coordinates."""

    kind = "scalar"

    @classmethod
    def constant(cls, c, dim, name=None):
        c = float(c)
        return cls(lambda x: c, dim, name=name)


class VectorField(_Field):
    """Vector field given by its contravariant components."""

    kind = "vector"


class GradientField(VectorField):
    """The field ``scale * grad_g f``; depends on the metric of the frame."""

    def __init__(self, f, scale=None, name=None):
        super().__init__(None, f.dim, name=name)
        self.f = f
        self.scale = scale

    def __call__(self, x):
        raise TypeError("gradient fields need a metric; evaluate them through a Frame")

    def evaluate(self, frame):
        w = frame.gradient(frame.eval(self.f))
        if self.scale is not None:
            w = w * frame.eval(self.scale)
        return w


class Sym2Field(_Field):
    """Symmetric covariant 2-tensor field."""

    kind = "sym2"


class MetricField(Sym2Field):
    """Riemannian metric on an axis-aligned coordinate box."""

    kind = "metric"

    def __init__(self, fn, dim, box=None, name=None):
        super().__init__(fn, dim, name=name)
        if box is not None:
            lo, hi = (np.asarray(b, dtype=float) for b in box)
            if lo.shape != (self.dim,) or hi.shape != (self.dim,) or np.any(lo >= hi):
                raise ValueError("box must be (lower, upper) with lower < upper per axis")
            box = (lo, hi)
        self.box = box

    @classmethod
    def flat(cls, dim, box=None, name="flat"):
        eye = np.eye(dim)
        return cls(lambda x: eye, dim, box=box, name=name)

    @classmethod
    def conformally_flat(cls, factor, dim, box=None, name=None):
        """Metric ``factor(x) * identity``."""
        eye = np.eye(dim)
        return cls(lambda x: factor(x) * eye, dim, box=box, name=name)


class AlmostComplexField(_Field):
    """(1,1)-tensor field ``J`` with ``J^2 = -Id``."""

    kind = "complex"

    @classmethod
    def standard(cls, dim):
        """Constant ``J`` in coordinates ``(x1, y1, x2, y2, ...)``: ``J d/dx = d/dy``."""
        if dim % 2:
            raise ValueError("complex structure needs even dimension")
        blk = np.array([[0.0, -1.0], [1.0, 0.0]])
        mat = np.kron(np.eye(dim // 2), blk)
        return cls(lambda x: mat, dim, name="J")


# frame -------------------------------------------------------------------------


class Frame:
    """Metric jet at one chart point, with cached connection and curvature.

    ``order`` is the number of metric derivatives carried.  Christoffel
    symbols need 1, Ricci needs 2, and divergences of Ricci need 3.
    """

    def __init__(self, metric, point, order=3):
        point = np.asarray(point, dtype=float)
        if point.shape != (metric.dim,):
            raise ValueError(f"point has shape {point.shape}, chart dimension is {metric.dim}")
        if not np.all(np.isfinite(point)):
            raise ValueError("point coordinates must be finite")
        self.metric = metric
        self.point = point
        self.n = metric.dim
        self.order = int(order)
        self.x = jm.variables(point, self.order)
        try:
            g = metric.evaluate(self)
        except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
            raise DomainError(f"metric evaluation failed at {point}: {exc}") from exc
        if not all(np.all(np.isfinite(c)) for c in g.c):
            raise DomainError(f"metric is not finite at {point}")
        g = 0.5 * (g + g.transpose(1, 0))
        eig = np.linalg.eigvalsh(g.value)
        if eig[0] <= 0.0 or eig[0] <= 1e-14 * abs(eig[-1]):
            raise DegenerateMetricError(f"metric not positive-definite at {point} (min eig {eig[0]:.3g})")
        self.g = g
        self._cache = {}

    def eval(self, field):
        """Jet of ``field`` at this frame's point (cached per field object)."""
        key = id(field)
        hit = self._cache.get(key)
        if hit is not None and hit[0] is field:
            return hit[1]
        try:
            out = field.evaluate(self)
        except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
            raise DomainError(f"{field!r} failed at {self.point}: {exc}") from exc
        self._cache[key] = (field, out)
        return out

    def _need(self, jt, order, what):
        if jt.order < order:
            raise JetOrderError(f"{what} needs {order} derivatives, have {jt.order}")

    @cached_property
    def ginv(self):
        return jm.inv(self.g)

    @cached_property
    def gamma(self):
        self._need(self.g, 1, "Christoffel symbols")
        dg = jm.grad(self.g)  # dg[a, b, c] = d_c g_ab
        first = 0.5 * (dg.transpose(1, 2, 0) + dg.transpose(2, 1, 0) - dg)
        # first[i, j, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
        return jm.einsum("kl,ijl->kij", self.ginv, first)

    @cached_property
    def ricci(self):
        self._need(self.g, 2, "Ricci curvature")
        gam = self.gamma
        dgam = jm.grad(gam)  # dgam[k, i, j, m] = d_m gamma^k_ij
        ric = (
            jm.einsum("kijk->ij", dgam)
            - jm.einsum("kikj->ij", dgam)
            + jm.einsum("kkl,lij->ij", gam, gam)
            - jm.einsum("kjl,lik->ij", gam, gam)
        )
        return 0.5 * (ric + ric.transpose(1, 0))

    @cached_property
    def scalar_curvature(self):
        return jm.einsum("ij,ij->", self.ginv, self.ricci)

    # covariant calculus on jets ---------------------------------------------

    def gradient(self, f):
        self._need(f, 1, "gradient")
        return jm.einsum("ab,b->a", self.ginv, jm.grad(f))

    def hessian(self, f):
        self._need(f, 2, "Hessian")
        df = jm.grad(f)
        h = jm.grad(df) - jm.einsum("cab,c->ab", self.gamma, df)
        return 0.5 * (h + h.transpose(1, 0))

    def laplacian(self, f):
        return jm.einsum("ab,ab->", self.ginv, self.hessian(f))

    def inner(self, a, b):
        """g(grad a, grad b) for scalar jets."""
        return jm.einsum("a,a->", jm.grad(a), self.gradient(b))

    def nabla_vector(self, w):
        """(nabla w)[a, b] = nabla_b w^a."""
        self._need(w, 1, "covariant derivative of a vector field")
        return jm.grad(w) + jm.einsum("abc,c->ab", self.gamma, w)

    def lie_derivative_metric(self, w):
        nw = self.nabla_vector(w)
        return jm.einsum("bd,da->ab", self.g, nw) + jm.einsum("ad,db->ab", self.g, nw)

    def nabla_sym2(self, t):
        """(nabla T)[a, b, c] = (nabla_c T)(a, b)."""
        self._need(t, 1, "covariant derivative of a 2-tensor")
        gam = self.gamma
        return (
            jm.grad(t)
            - jm.einsum("dca,db->abc", gam, t)
            - jm.einsum("dcb,ad->abc", gam, t)
        )

    def divergence_sym2(self, t):
        return jm.einsum("ca,abc->b", self.ginv, self.nabla_sym2(t))

    def nabla_endomorphism(self, a):
        """(nabla A)[p, q, c] = (nabla_c A)^p_q for a (1,1)-tensor jet."""
        self._need(a, 1, "covariant derivative of an endomorphism")
        gam = self.gamma
        return (
            jm.grad(a)
            + jm.einsum("pcd,dq->pqc", gam, a)
            - jm.einsum("dcq,pd->pqc", gam, a)
        )

    def raise_first(self, t):
        """T^a_b = g^{ac} T_cb."""
        return jm.einsum("ac,cb->ab", self.ginv, t)


def _frame(g, p, order):
    if isinstance(g, Frame):
        if g.order < order:
            raise JetOrderError(f"frame carries {g.order} metric derivatives, need {order}")
        return g
    if isinstance(p, Frame):
        if p.order < order:
            raise JetOrderError(f"frame carries {p.order} metric derivatives, need {order}")
        return p
    return Frame(g, p, order=order)


def _field_jet(frame, field):
    return field if isinstance(field, Jet) else frame.eval(field)


# public point operations ---------------------------------------------------------


def christoffel(g, p=None):
    """Christoffel symbols ``gamma[k, i, j]`` at ``p``."""
    return _frame(g, p, 1).gamma.value


def hessian(g, f, p=None):
    fr = _frame(g, p, 2)
    return fr.hessian(_field_jet(fr, f)).value


def laplacian(g, f, p=None):
    fr = _frame(g, p, 2)
    return float(fr.laplacian(_field_jet(fr, f)).value)


def gradient(g, f, p=None):
    fr = _frame(g, p, 2)
    return fr.gradient(_field_jet(fr, f)).value


def ricci(g, p=None):
    return _frame(g, p, 2).ricci.value


def scalar_curvature(g, p=None):
    return float(_frame(g, p, 2).scalar_curvature.value)


def lie_derivative_metric(g, w, p=None):
    fr = _frame(g, p, 2)
    return fr.lie_derivative_metric(_field_jet(fr, w)).value


def divergence_sym2(g, t, p=None):
    """Divergence ``g^{ca} (nabla_c T)(a, .)`` of a symmetric 2-tensor field."""
    fr = _frame(g, p, 2)
    return fr.divergence_sym2(_field_jet(fr, t)).value


def interior_product(t, v, p=None, g=None):
    """``T(v, .)``.  ``t`` and ``v`` may be arrays, jets or fields."""
    if isinstance(t, (Sym2Field, VectorField)) or isinstance(v, (Sym2Field, VectorField)):
        fr = _frame(g, p, 1)
        t = _field_jet(fr, t)
        v = _field_jet(fr, v)
    t, v = jm.value(t), jm.value(v)
    return np.einsum("ab,a->b", t, v)


def functional_dependence_defect(a, b):
    """Norm of ``a ^ b`` for two covectors: ``sqrt(sum_{i<j} (a_i b_j - a_j b_i)^2)``.

    Zero iff the covectors are linearly dependent; 1 for ``dx, dy``.
    """
    a = np.asarray(jm.value(a), dtype=float)
    b = np.asarray(jm.value(b), dtype=float)
    w = np.outer(a, b) - np.outer(b, a)
    return float(np.sqrt(0.5 * np.sum(w * w)))


# norms ---------------------------------------------------------------------------


def sym(t):
    t = np.asarray(t, dtype=float)
    return 0.5 * (t + t.T)


def sup_norm(t):
    t = np.asarray(t, dtype=float)
    return float(np.max(np.abs(t))) if t.size else 0.0


def g_operator_norm(t, g):
    """Largest |eigenvalue| of ``g^{-1} T`` for symmetric ``T``."""
    t = sym(t)
    low = np.linalg.cholesky(np.asarray(g, dtype=float))
    li = np.linalg.inv(low)
    m = li @ t @ li.T
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (m + m.T)))))


def covector_norm(a, ginv):
    a = np.asarray(a, dtype=float)
    return float(np.sqrt(max(a @ np.asarray(ginv) @ a, 0.0)))


def two_form(a, b):
    """``a ^ b`` as an antisymmetric matrix ``a_i b_j - a_j b_i``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.outer(a, b) - np.outer(b, a)


def two_form_norm(w, ginv):
    ginv = np.asarray(ginv, dtype=float)
    val = 0.5 * np.einsum("ik,jl,ij,kl->", ginv, ginv, w, w)
    return float(np.sqrt(max(val, 0.0)))
