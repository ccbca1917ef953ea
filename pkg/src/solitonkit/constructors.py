"""Derived metrics and the closed-form right-hand sides that predict their curvature.

* conformal rescalings ``ghat = tau^-2 g`` with the classical formulas for
  the Hessian, Laplacian and Ricci tensor of ``ghat`` written in terms of
  ``g``;
* warped products ``gbar = g_B + ell^2 g_F`` (base coordinates first) with
  block formulas for Ricci and for Hessians of base functions;
* Kähler metrics in real coordinates from a potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jet as jm
from .errors import DomainError
from .geom import AlmostComplexField, Frame, MetricField, ScalarField, _frame
from .jet import Jet

__all__ = [
    "ConformalPair",
    "conformal_rescale",
    "conformal_ricci_rhs",
    "conformal_hessian_rhs",
    "conformal_laplacian_rhs",
    "odot",
    "WarpedProduct",
    "WarpedBlocks",
    "warped_product",
    "warped_block_formulas",
    "KahlerChart",
    "kahler_from_potential",
    "box_probe_points",
]


def odot(a, b):
    """Symmetric product ``(a (x) b + b (x) a) / 2`` of two covectors."""
    if isinstance(a, Jet) or isinstance(b, Jet):
        return 0.5 * (jm.einsum("a,b->ab", a, b) + jm.einsum("a,b->ab", b, a))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 0.5 * (np.outer(a, b) + np.outer(b, a))


def box_probe_points(box, count=64):
    """Corners plus an interior Halton set of an axis-aligned box."""
    from scipy.stats import qmc

    lo, hi = box
    dim = len(lo)
    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * dim, indexing="ij")).reshape(dim, -1).T
    inner = qmc.Halton(d=dim, scramble=False).random(count)
    unit = np.vstack([corners, inner])
    return lo + unit * (hi - lo)


def _positive(val, what, x):
    v = np.asarray(jm.value(val), dtype=float)
    if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
        raise DomainError(f"{what} must be positive, got {v} at {np.asarray(jm.value(x))}")


def _check_positive_on_box(field, box, what):
    if box is None:
        return
    for p in box_probe_points(box):
        _positive(field(p), what, p)


# conformal rescaling -----------------------------------------------------------


@dataclass(frozen=True)
class ConformalPair:
    """``g``, a positive factor ``tau`` and ``ghat = tau^-2 g``."""

    g: MetricField
    tau: ScalarField
    ghat: MetricField


def conformal_rescale(g, tau, name=None):
    """Return the pair ``(g, tau, tau^-2 g)``.

    ``tau`` is checked on the probe points of ``g.box`` (when a box is set)
    and again at every evaluation.
    """
    _check_positive_on_box(tau, g.box, "conformal factor tau")

    def ghat(x):
        t = tau(x)
        _positive(t, "conformal factor tau", x)
        return g(x) * t ** -2.0

    label = name or (f"{g.name}/tau^2" if g.name else None)
    return ConformalPair(g, tau, MetricField(ghat, g.dim, box=g.box, name=label))


def _conformal_data(frame, tau):
    t = frame.eval(tau)
    _positive(t.value, "conformal factor tau", frame.point)
    return t


def conformal_ricci_rhs(g, tau, p=None):
    """``Ric + (n-2) tau^-1 nabla d tau + [tau^-1 Lap tau - (n-1) tau^-2 |grad tau|^2] g``."""
    fr = _frame(g, p, 2)
    n = fr.n
    t = _conformal_data(fr, tau)
    tv = float(t.value)
    hess = fr.hessian(t).value
    lap = float(fr.laplacian(t).value)
    grad2 = float(fr.inner(t, t).value)
    return fr.ricci.value + (n - 2) / tv * hess + (lap / tv - (n - 1) * grad2 / tv**2) * fr.g.value


def conformal_hessian_rhs(g, tau, f, p=None):
    """``nabla df + tau^-1 [2 dtau . df - g(grad tau, grad f) g]`` (``.`` symmetric product)."""
    fr = _frame(g, p, 2)
    t = _conformal_data(fr, tau)
    fj = fr.eval(f)
    dt, df = jm.grad(t).value, jm.grad(fj).value
    cross = float(fr.inner(t, fj).value)
    return fr.hessian(fj).value + (2 * odot(dt, df) - cross * fr.g.value) / float(t.value)


def conformal_laplacian_rhs(g, tau, f, p=None):
    """``tau^2 Lap f - (n-2) tau g(grad tau, grad f)``."""
    fr = _frame(g, p, 2)
    t = _conformal_data(fr, tau)
    fj = fr.eval(f)
    tv = float(t.value)
    return tv**2 * float(fr.laplacian(fj).value) - (fr.n - 2) * tv * float(fr.inner(t, fj).value)


# warped products ---------------------------------------------------------------


@dataclass(frozen=True)
class WarpedProduct:
    """``gbar = g_B + ell^2 g_F`` on the product chart, base coordinates first."""

    g_base: MetricField
    g_fiber: MetricField
    ell: ScalarField
    gbar: MetricField

    @property
    def b(self):
        return self.g_base.dim

    @property
    def k(self):
        return self.g_fiber.dim

    def split(self, p):
        p = np.asarray(p, dtype=float)
        return p[: self.b], p[self.b:]

    def join(self, p_base, p_fiber):
        return np.concatenate([np.asarray(p_base, dtype=float), np.asarray(p_fiber, dtype=float)])

    def lift(self, field, name=None):
        """Pull a base scalar field back to the product chart."""
        b = self.b
        return ScalarField(lambda x: field(x[:b]), self.b + self.k, name=name or field.name)


def warped_product(g_base, g_fiber, ell, name=None):
    if ell.dim != g_base.dim:
        raise ValueError("warping function must live on the base chart")
    _check_positive_on_box(ell, g_base.box, "warping function ell")
    b, k = g_base.dim, g_fiber.dim

    def gbar(x):
        xb, xf = x[:b], x[b:]
        e = ell(xb)
        _positive(e, "warping function ell", xb)
        gb = g_base(xb)
        gf = g_fiber(xf)
        if not isinstance(e, Jet) and not isinstance(gb, Jet) and not isinstance(gf, Jet):
            out = np.zeros((b + k, b + k))
            out[:b, :b] = gb
            out[b:, b:] = e**2 * np.asarray(gf)
            return out
        return jm.block_diag(gb, gf * e**2.0)

    box = None
    if g_base.box is not None and g_fiber.box is not None:
        box = (
            np.concatenate([g_base.box[0], g_fiber.box[0]]),
            np.concatenate([g_base.box[1], g_fiber.box[1]]),
        )
    label = name or "warped"
    return WarpedProduct(g_base, g_fiber, ell, MetricField(gbar, b + k, box=box, name=label))


@dataclass(frozen=True)
class WarpedBlocks:
    """Ricci and Hessian blocks of a warped product, from base/fiber data only.

    ``ricci_fiber`` and ``hess_fiber`` are expressed as matrices on the
    fiber chart (already multiplied by ``ell^2 g_F`` where applicable).
    """

    ell: float
    ell_sharp: float
    ricci_base: np.ndarray
    ricci_mixed: np.ndarray
    ricci_fiber: np.ndarray
    hess_base: np.ndarray
    hess_mixed: np.ndarray
    hess_fiber: np.ndarray
    gbar_fiber: np.ndarray
    d_grad_f_ell: float

    def ricci(self):
        return _assemble(self.ricci_base, self.ricci_mixed, self.ricci_fiber)

    def hessian(self):
        return _assemble(self.hess_base, self.hess_mixed, self.hess_fiber)


def _assemble(base, mixed, fiber):
    return np.block([[base, mixed], [mixed.T, fiber]])


def warped_block_formulas(wp, f, p_base, p_fiber):
    """Block formulas for ``Ric(gbar)`` and ``nabla-bar df`` with ``f`` a base function.

    ``Ric(x,y) = Ric_B - (k/ell) nabla d ell``, ``Ric(x,v) = 0``,
    ``Ric(v,w) = Ric_F - ell_sharp gbar(v,w)`` with
    ``ell_sharp = ell^-1 Lap ell + (k-1) ell^-2 |grad ell|^2``; and
    ``nabla-bar df`` has blocks ``nabla_B df``, ``0``, ``ell^-1 d_{grad f} ell gbar``.
    """
    k = wp.k
    fb = Frame(wp.g_base, p_base, order=2)
    ff = Frame(wp.g_fiber, p_fiber, order=2)
    e = fb.eval(wp.ell)
    ev = float(e.value)
    if ev <= 0.0:
        raise DomainError(f"warping function ell must be positive, got {ev}")
    fj = fb.eval(f)
    hess_ell = fb.hessian(e).value
    lap_ell = float(fb.laplacian(e).value)
    grad2 = float(fb.inner(e, e).value)
    ell_sharp = lap_ell / ev + (k - 1) * grad2 / ev**2
    gbar_f = ev**2 * ff.g.value
    d_grad_f_ell = float(fb.inner(fj, e).value)
    mixed = np.zeros((wp.b, k))
    return WarpedBlocks(
        ell=ev,
        ell_sharp=ell_sharp,
        ricci_base=fb.ricci.value - (k / ev) * hess_ell,
        ricci_mixed=mixed,
        ricci_fiber=ff.ricci.value - ell_sharp * gbar_f,
        hess_base=fb.hessian(fj).value,
        hess_mixed=mixed.copy(),
        hess_fiber=(d_grad_f_ell / ev) * gbar_f,
        gbar_fiber=gbar_f,
        d_grad_f_ell=d_grad_f_ell,
    )


# Kähler metrics -----------------------------------------------------------------


@dataclass(frozen=True)
class KahlerChart:
    """Kähler metric on a chart of ``C^m`` in real coordinates ``(x1, y1, ...)``."""

    m: int
    potential: ScalarField
    g: MetricField
    J: AlmostComplexField


def kahler_from_potential(m, potential, box=None, name=None):
    """Metric ``g = (H + J^T H J) / 4`` with ``H`` the real Hessian of the potential.

    This is the real form of ``i d dbar K`` for the standard ``J``; it gives
    the flat metric for ``K = |z|^2``.  The potential is expanded two orders
    beyond the requested metric order, so curvature stays exact.
    """
    dim = 2 * int(m)
    if potential.dim != dim:
        raise ValueError(f"potential has dimension {potential.dim}, expected {dim}")
    J = AlmostComplexField.standard(dim)
    jmat = J(np.zeros(dim))

    def hermitian_part(h):
        if isinstance(h, Jet):
            return 0.25 * (h + _conj(h, jmat))
        return 0.25 * (h + jmat.T @ h @ jmat)

    def metric(x):
        x0 = np.asarray(jm.value(x), dtype=float)
        order = jm.order_of(x)
        kj = potential(jm.variables(x0, order + 2))
        if not isinstance(kj, Jet):
            kj = jm.constant(kj, order + 2, dim)
        hess = jm.grad(jm.grad(kj))
        g = hermitian_part(hess)
        eig = np.linalg.eigvalsh(0.5 * (g.value + g.value.T))
        if eig[0] <= 0.0:
            raise DomainError(f"potential is not strictly plurisubharmonic at {x0}")
        if isinstance(x, Jet):
            return jm.compose(g, x)
        return g.value

    if box is not None:
        for p in box_probe_points((np.asarray(box[0], float), np.asarray(box[1], float))):
            metric(p)
    return KahlerChart(int(m), potential, MetricField(metric, dim, box=box, name=name or "kahler"), J)


def _conj(h, jmat):
    """``J^T H J`` for a jet-valued matrix ``H``."""
    return jm.einsum("ab,bc->ac", jmat.T, jm.einsum("ab,bc->ac", h, jmat))
