"""Pointwise residuals of the soliton-type equations and the vector-field classifiers.

Every evaluator returns a plain array (or float, or small record) at one
chart point.  Tensor residuals are symmetric matrices in chart
coordinates; :func:`measure` turns them into the two norms reported
everywhere, the entrywise sup-norm and the ``g``-operator norm used for
pass/fail decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import jet as jm
from .constructors import WarpedProduct, odot, warped_block_formulas
from .errors import DomainError, ExcludedPointError, PreconditionError
from .geom import (
    AlmostComplexField,
    Frame,
    GradientField,
    MetricField,
    ScalarField,
    covector_norm,
    functional_dependence_defect,
    g_operator_norm,
    sup_norm,
    two_form,
    two_form_norm,
)
from .jet import Jet

__all__ = [
    "SolitonScenario",
    "ConformalSolitonScenario",
    "QuasiSolitonScenario",
    "RicciHessianScenario",
    "ResidualReport",
    "QuasiResidual",
    "measure",
    "endomorphism_norm",
    "soliton_residual",
    "soliton_scalar_raw",
    "soliton_scalar_residual",
    "fit_scalar_constant",
    "conformal_gamma",
    "conf_soliton_residual",
    "lie_combination",
    "lie_form_residual",
    "two_form_gamma",
    "two_form_residual",
    "two_form_scalar_residual",
    "gamma_star",
    "hermitian_defect",
    "commutator_residual",
    "killing_residual",
    "conformal_field_residual",
    "holomorphy_residual",
    "span_alignment",
    "quasi_soliton_residual",
    "special_qs_residual",
    "ricci_hessian_residual",
    "dY_identity_residuals",
    "rels_wedge_identities",
    "IDENTITY_NAMES",
    "gamma_from_mu",
]

DEFAULT_PRECONDITION_TOL = 1e-8


# scenarios -----------------------------------------------------------------------


@dataclass
class SolitonScenario:
    """Plain gradient soliton data ``(g, f, lam)`` and optional scalar constant ``a``."""

    g: MetricField
    f: ScalarField
    lam: float
    a: Optional[float] = None


@dataclass
class ConformalSolitonScenario:
    """``g`` with ``ghat = tau^-2 g`` a soliton with potential ``f`` (possibly off-shell)."""

    g: MetricField
    tau: ScalarField
    f: ScalarField
    lam: float
    a: Optional[float] = None
    J: Optional[AlmostComplexField] = None

    @property
    def n(self):
        return self.g.dim

    @cached_property
    def mu(self):
        tau = self.tau
        return ScalarField(lambda x: jm.log(tau(x)), self.n, name="mu")

    @cached_property
    def theta(self):
        tau, f, n = self.tau, self.f, self.n
        return ScalarField(lambda x: f(x) + (n - 2) * jm.log(tau(x)), n, name="theta")

    @cached_property
    def psi(self):
        tau, f, n = self.tau, self.f, self.n
        # 2 theta - (n-2) mu
        return ScalarField(lambda x: 2 * f(x) + (n - 2) * jm.log(tau(x)), n, name="psi")

    @cached_property
    def v(self):
        return GradientField(self.tau, name="v")

    @cached_property
    def w(self):
        tau = self.tau
        return GradientField(self.f, scale=ScalarField(lambda x: tau(x) ** 2.0, self.n), name="w")

    @cached_property
    def ghat(self):
        from .constructors import conformal_rescale

        return conformal_rescale(self.g, self.tau).ghat

    def hat(self):
        """The soliton data of ``ghat``."""
        return SolitonScenario(self.ghat, self.f, self.lam, self.a)


@dataclass
class QuasiSolitonScenario:
    """Warped product ``g_B + ell^2 g_F`` with base potential ``f``.

    ``f_profile`` optionally gives ``f`` as a function of ``ell`` (for the
    special equation); it must accept floats and 1-variable jets.
    """

    wp: WarpedProduct
    f: ScalarField
    lam: float
    nu: float
    f_profile: Optional[Callable] = None

    @property
    def k(self):
        return self.wp.k

    @cached_property
    def f_lifted(self):
        return self.wp.lift(self.f)

    def product(self):
        return SolitonScenario(self.wp.gbar, self.f_lifted, self.lam)


@dataclass
class RicciHessianScenario:
    """``Ric + alpha nabla d sigma = gamma g`` data.

    ``mu`` is an optional function of ``sigma`` (given as a field) used by
    the last wedge identity and by :func:`gamma_from_mu`; it defaults to 0.
    """

    g: MetricField
    sigma: ScalarField
    alpha: ScalarField
    gamma: ScalarField
    J: Optional[AlmostComplexField] = None
    mu: Optional[ScalarField] = None
    lam: float = 0.0
    precondition_tol: float = DEFAULT_PRECONDITION_TOL

    @property
    def n(self):
        return self.g.dim


@dataclass
class ResidualReport:
    scenario: str
    equation: str
    points: np.ndarray
    values: np.ndarray
    sup_values: np.ndarray
    tol: float
    expect_pass: bool = True
    fitted: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def max(self):
        """Largest finite residual (NaN entries mark points that failed to evaluate)."""
        vals = np.asarray(self.values, dtype=float)
        vals = vals[~np.isnan(vals)]
        return float(vals.max()) if vals.size else float("nan")

    @property
    def inconclusive(self):
        return bool(np.isnan(np.asarray(self.values, dtype=float)).any())

    @property
    def passed(self):
        return self.max < self.tol

    @property
    def ok(self):
        """Observed status agrees with the expectation."""
        return self.passed == self.expect_pass


# norms ---------------------------------------------------------------------------


def measure(t, g):
    """``(g-operator norm, sup norm)`` of a residual.

    Scalars use ``|t|`` for both; covectors use the ``g``-norm; symmetric
    matrices use :func:`g_operator_norm`.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        return abs(float(t)), abs(float(t))
    if t.ndim == 1:
        return covector_norm(t, np.linalg.inv(g)), sup_norm(t)
    return g_operator_norm(t, g), sup_norm(t)


def endomorphism_norm(e, g):
    """Spectral norm of a (1,1)-tensor in a ``g``-orthonormal frame."""
    low = np.linalg.cholesky(np.asarray(g, dtype=float))
    m = low.T @ np.asarray(e, dtype=float) @ np.linalg.inv(low.T)
    return float(np.linalg.norm(m, 2))


def _frame(metric, p, order=2):
    if isinstance(p, Frame):
        return p
    return Frame(metric, p, order=order)


def _jmat(J, frame):
    return np.asarray(jm.value(frame.eval(J)), dtype=float)


# the soliton pair ---------------------------------------------------------------


def _as_soliton(s):
    if isinstance(s, ConformalSolitonScenario):
        return s.hat()
    return s


def soliton_residual(s, p):
    """``Ric + nabla df - lam g`` (for a conformal scenario, of ``ghat``)."""
    s = _as_soliton(s)
    fr = _frame(s.g, p)
    fj = fr.eval(s.f)
    return fr.ricci.value + fr.hessian(fj).value - s.lam * fr.g.value


def soliton_scalar_raw(s, p):
    """``Lap f - |grad f|^2 + 2 lam f`` (the constant ``a`` not subtracted)."""
    s = _as_soliton(s)
    fr = _frame(s.g, p)
    fj = fr.eval(s.f)
    return float(fr.laplacian(fj).value - fr.inner(fj, fj).value + 2 * s.lam * fj.value)


def soliton_scalar_residual(s, p, a=None):
    s = _as_soliton(s)
    a = s.a if a is None else a
    if a is None:
        raise ValueError("scalar constant a is neither given nor fitted")
    return soliton_scalar_raw(s, p) - a


def fit_scalar_constant(raw_values, anchor=None):
    """Constant minimizing the sup of ``|raw - a|``: the midrange, or ``raw[anchor]``."""
    raw = np.asarray(raw_values, dtype=float)
    if anchor is not None:
        return float(raw[anchor])
    return float(0.5 * (raw.max() + raw.min()))


# conformally-soliton forms --------------------------------------------------------


@dataclass
class _ConfData:
    fr: Frame
    t: Jet
    fj: Jet

    @property
    def tv(self):
        return float(self.t.value)


def _conf(s, p):
    fr = _frame(s.g, p)
    t = fr.eval(s.tau)
    if float(t.value) <= 0.0:
        raise DomainError(f"tau must be positive, got {float(t.value)} at {fr.point}")
    return _ConfData(fr, t, fr.eval(s.f))


def conformal_gamma(s, p):
    """``tau^-2 [lam + (n-1) |grad tau|^2] - tau^-1 [Lap tau - g(grad tau, grad f)]``."""
    d = _conf(s, p)
    fr, t, fj, tv = d.fr, d.t, d.fj, d.tv
    n = fr.n
    grad2 = float(fr.inner(t, t).value)
    lap = float(fr.laplacian(t).value)
    cross = float(fr.inner(t, fj).value)
    return (s.lam + (n - 1) * grad2) / tv**2 - (lap - cross) / tv


def conf_soliton_residual(s, p):
    """``Ric + (n-2) tau^-1 nabla d tau + nabla df + 2 tau^-1 dtau . df - gamma g``."""
    d = _conf(s, p)
    fr, t, fj, tv = d.fr, d.t, d.fj, d.tv
    n = fr.n
    dt, df = jm.grad(t).value, jm.grad(fj).value
    return (
        fr.ricci.value
        + (n - 2) / tv * fr.hessian(t).value
        + fr.hessian(fj).value
        + 2 / tv * odot(dt, df)
        - conformal_gamma(s, fr) * fr.g.value
    )


def lie_combination(s, p):
    """``alpha L_v g + beta L_w g`` with ``alpha = (n-2)/(2 tau)``, ``beta = 1/(2 tau^2)``."""
    d = _conf(s, p)
    fr, tv = d.fr, d.tv
    n = fr.n
    lv = fr.lie_derivative_metric(fr.eval(s.v)).value
    lw = fr.lie_derivative_metric(fr.eval(s.w)).value
    return (n - 2) / (2 * tv) * lv + lw / (2 * tv**2)


def lie_form_residual(s, p):
    fr = _frame(s.g, p)
    return fr.ricci.value + lie_combination(s, fr) - conformal_gamma(s, fr) * fr.g.value


def two_form_gamma(s, p):
    """``lam e^{-2 mu} - Lap mu + g(grad theta, grad mu)``."""
    fr = _frame(s.g, p)
    mu, th = fr.eval(s.mu), fr.eval(s.theta)
    return float(
        s.lam * np.exp(-2 * mu.value) - fr.laplacian(mu).value + fr.inner(th, mu).value
    )


def two_form_residual(s, p):
    """``Ric + nabla d theta + d mu . d psi - gamma g``."""
    fr = _frame(s.g, p)
    mu, th, ps = fr.eval(s.mu), fr.eval(s.theta), fr.eval(s.psi)
    return (
        fr.ricci.value
        + fr.hessian(th).value
        + odot(jm.grad(mu).value, jm.grad(ps).value)
        - two_form_gamma(s, fr) * fr.g.value
    )


def two_form_scalar_residual(s, p, a=None):
    """``e^{2 mu} [Lap f - g(grad theta, grad f)] + 2 lam f - a``."""
    a = s.a if a is None else a
    if a is None:
        raise ValueError("scalar constant a is neither given nor fitted")
    fr = _frame(s.g, p)
    mu, th, fj = fr.eval(s.mu), fr.eval(s.theta), fr.eval(s.f)
    body = fr.laplacian(fj).value - fr.inner(th, fj).value
    return float(np.exp(2 * mu.value) * body + 2 * s.lam * fj.value - a)


def gamma_star(t_without_gamma, g):
    """Pointwise least-squares ``gamma``: ``tr_g(T) / n`` for ``T - gamma g``."""
    g = np.asarray(g, dtype=float)
    return float(np.sum(np.linalg.inv(g) * t_without_gamma) / g.shape[0])


# classifiers ----------------------------------------------------------------------


def hermitian_defect(t, J, p=None, g=None):
    """``||T(J., J.) - T||_sup``.  ``t`` and ``J`` may be arrays or fields."""
    if not isinstance(t, np.ndarray) or not isinstance(J, np.ndarray):
        fr = _frame(g, p)
        t = np.asarray(jm.value(fr.eval(t)) if not isinstance(t, np.ndarray) else t)
        J = _jmat(J, fr) if not isinstance(J, np.ndarray) else J
    return sup_norm(J.T @ t @ J - t)


def _lie(x, g, p):
    fr = _frame(g, p)
    return fr, fr.lie_derivative_metric(fr.eval(x)).value


def killing_residual(x, g, p):
    fr, lx = _lie(x, g, p)
    return g_operator_norm(lx, fr.g.value)


def conformal_field_residual(x, g, p):
    """Norm of the traceless part of ``L_x g``."""
    fr, lx = _lie(x, g, p)
    gv = fr.g.value
    tr = np.sum(np.linalg.inv(gv) * lx) / fr.n
    return g_operator_norm(lx - tr * gv, gv)


def commutator_residual(x, J, g, p):
    """Norm of ``[(L_x g)^sharp, J]``."""
    fr, lx = _lie(x, g, p)
    gv = fr.g.value
    a = np.linalg.solve(gv, lx)
    jv = _jmat(J, fr)
    return endomorphism_norm(a @ jv - jv @ a, gv)


def holomorphy_residual(x, J, g, p):
    """Norm of ``[nabla x, J]``; the Lie derivative of ``J`` when ``J`` is parallel."""
    fr = _frame(g, p)
    nx = fr.nabla_vector(fr.eval(x)).value
    jv = _jmat(J, fr)
    return endomorphism_norm(nx @ jv - jv @ nx, fr.g.value)


def span_alignment(v, w, J, g, p):
    """Sine of the largest principal angle between ``span{v, Jv}`` and ``span{w, Jw}``."""
    fr = _frame(g, p)
    gv = fr.g.value
    vv = np.asarray(jm.value(fr.eval(v)), dtype=float)
    wv = np.asarray(jm.value(fr.eval(w)), dtype=float)
    jv = _jmat(J, fr)
    low = np.linalg.cholesky(gv)
    scale = np.sqrt(np.max(np.abs(np.diag(gv))))
    bases = []
    for u in (vv, wv):
        if np.linalg.norm(low.T @ u) <= 1e-12 * max(scale, 1.0):
            raise ExcludedPointError(f"zero vector at {fr.point}; span undefined")
        frame = low.T @ np.column_stack([u, jv @ u])
        q, r = np.linalg.qr(frame)
        rank = int(np.sum(np.abs(np.diag(r)) > 1e-12 * np.abs(r[0, 0])))
        bases.append(q[:, :rank])
    qa, qb = bases
    resid = qa - qb @ (qb.T @ qa)
    other = qb - qa @ (qa.T @ qb)
    return float(max(np.linalg.norm(resid, 2), np.linalg.norm(other, 2)))


# warped products -----------------------------------------------------------------


@dataclass
class QuasiResidual:
    base: np.ndarray
    fiber: np.ndarray
    scalar: float
    blocks: object

    def assembled(self):
        """Full product-chart residual ``diag(base, fiber + scalar g_F)``."""
        gf = self.blocks.gbar_fiber / self.blocks.ell**2
        b, k = self.base.shape[0], self.fiber.shape[0]
        out = np.zeros((b + k, b + k))
        out[:b, :b] = self.base
        out[b:, b:] = self.fiber + self.scalar * gf
        return out


def quasi_soliton_residual(q, p_base, p_fiber):
    """Base, fiber and scalar residuals of the warped-soliton system.

    ``Ric_B - (k/ell) nabla d ell + nabla df - lam g_B``, ``Ric_F - nu g_F``
    and ``nu + ell d_{grad f} ell - ell^2 ell_sharp - lam ell^2``.
    """
    bl = warped_block_formulas(q.wp, q.f, p_base, p_fiber)
    fb = Frame(q.wp.g_base, p_base, order=2)
    ff = Frame(q.wp.g_fiber, p_fiber, order=2)
    e = bl.ell
    base = bl.ricci_base + bl.hess_base - q.lam * fb.g.value
    fiber = ff.ricci.value - q.nu * ff.g.value
    scalar = q.nu + e * bl.d_grad_f_ell - e**2 * bl.ell_sharp - q.lam * e**2
    return QuasiResidual(base, fiber, float(scalar), bl)


def _profile_derivs(profile, ell0):
    """``(F, F', F'')`` of a one-variable profile at ``ell0``."""
    out = profile(jm.variables(np.array([ell0]), 2)[0])
    if not isinstance(out, Jet):
        return float(out), 0.0, 0.0
    return float(out.c[0]), float(out.c[1][0]), float(out.c[2][0, 0])


def special_qs_residual(q, p_base, tol=DEFAULT_PRECONDITION_TOL):
    """``Ric + (F'(ell) - k/ell) nabla d ell + F''(ell) d ell (x) d ell - lam g``.

    Requires ``q.f_profile`` and ``df ^ d ell = 0`` at the point.
    """
    if q.f_profile is None:
        raise PreconditionError("special quasi-soliton residual needs an f(ell) profile")
    fb = Frame(q.wp.g_base, p_base, order=2)
    e = fb.eval(q.wp.ell)
    fj = fb.eval(q.f)
    defect = functional_dependence_defect(jm.grad(fj).value, jm.grad(e).value)
    if defect > tol:
        raise PreconditionError(f"df ^ d ell = {defect:.3g} exceeds {tol:g} at {fb.point}")
    ev = float(e.value)
    if ev <= 0:
        raise DomainError(f"warping function ell must be positive, got {ev}")
    _, f1, f2 = _profile_derivs(q.f_profile, ev)
    de = jm.grad(e).value
    return (
        fb.ricci.value
        + (f1 - q.k / ev) * fb.hessian(e).value
        + f2 * np.outer(de, de)
        - q.lam * fb.g.value
    )


# Ricci-Hessian equation and its consequences -------------------------------------


def ricci_hessian_residual(r, p):
    """``Ric + alpha nabla d sigma - gamma g``."""
    fr = _frame(r.g, p)
    a = float(fr.eval(r.alpha).value)
    gm = float(fr.eval(r.gamma).value)
    return fr.ricci.value + a * fr.hessian(fr.eval(r.sigma)).value - gm * fr.g.value


def dY_identity_residuals(g, sigma, p):
    """``(2 i_{grad sigma} Ric + dY, 2 delta nabla d sigma - dY)`` with ``Y = Lap sigma``."""
    fr = Frame(g, p, order=3) if not isinstance(p, Frame) else p
    sj = fr.eval(sigma)
    ric = fr.ricci.value
    dY = jm.grad(fr.laplacian(sj)).value
    grad = fr.gradient(sj).value
    div = fr.divergence_sym2(fr.hessian(sj)).value
    return 2 * ric.T @ grad + dY, 2 * div - dY


@dataclass
class _RHData:
    fr: Frame
    a: float
    gm: float
    Y: float
    Q: float
    s: float
    dsig: np.ndarray
    dY: np.ndarray
    dQ: np.ndarray
    ds: np.ndarray
    dgam: np.ndarray
    adot: float
    mudot: float
    muddot: float


def _rh_data(r, p):
    fr = Frame(r.g, p, order=3) if not isinstance(p, Frame) else p
    sj = fr.eval(r.sigma)
    aj = fr.eval(r.alpha)
    gj = fr.eval(r.gamma)
    Yj = fr.laplacian(sj)
    Qj = fr.inner(sj, sj)
    Q = float(Qj.value)
    if Q <= 1e-24:
        raise ExcludedPointError(f"d sigma vanishes at {fr.point}")
    adot = float(fr.inner(aj, sj).value) / Q
    if r.mu is not None:
        mj = fr.eval(r.mu)
        mdot = fr.inner(mj, sj) / Qj
        mudot = float(mdot.value)
        muddot = float(fr.inner(mdot, sj).value) / Q
    else:
        mudot = muddot = 0.0
    return _RHData(
        fr=fr,
        a=float(aj.value),
        gm=float(gj.value),
        Y=float(Yj.value),
        Q=Q,
        s=float(fr.scalar_curvature.value),
        dsig=jm.grad(sj).value,
        dY=jm.grad(Yj).value,
        dQ=jm.grad(Qj).value,
        ds=jm.grad(fr.scalar_curvature).value,
        dgam=jm.grad(gj).value,
        adot=adot,
        mudot=mudot,
        muddot=muddot,
    )


IDENTITY_NAMES = ("i", "ii", "iii", "iv", "a", "b", "c", "d")


def rels_wedge_identities(r, p, check_preconditions=True):
    """Residual norms of the trace/differential identities and their wedge consequences.

    Returns ``(values, flags)``: ``values[name]`` is the norm of the
    residual (absolute value, covector ``g``-norm or 2-form ``g``-norm), and
    ``flags`` records the precondition measurements (holomorphy of
    ``grad sigma`` and the Ricci-Hessian residual) and whether each passed.
    """
    d = _rh_data(r, p)
    fr, n = d.fr, r.n
    ginv = fr.ginv.value
    a, Y, gm = d.a, d.Y, d.gm
    cov = {
        "ii": a * d.dY + Y * d.adot * d.dsig + d.ds - n * d.dgam,
        "iii": a * d.dY + d.adot * d.dQ + d.ds - 2 * d.dgam,
        "iv": a * d.dQ - d.dY - 2 * gm * d.dsig,
        "a": Y * d.adot * d.dsig - d.adot * d.dQ - (n - 2) * d.dgam,
    }
    sq = two_form(d.dsig, d.dQ)
    gs = two_form(d.dgam, d.dsig)
    forms = {
        "b": d.adot * sq - (n - 2) * gs,
        "c": d.adot * sq - 2 * gs,
        "d": gs
        - (a * d.mudot - d.muddot) * two_form(d.dQ, d.dsig)
        + d.mudot * two_form(d.dY, d.dsig),
    }
    values = {"i": abs(a * Y + d.s - n * gm)}
    values.update({k: covector_norm(v, ginv) for k, v in cov.items()})
    values.update({k: two_form_norm(v, ginv) for k, v in forms.items()})
    flags = {}
    if check_preconditions:
        tol = r.precondition_tol
        rh = g_operator_norm(ricci_hessian_residual(r, fr), fr.g.value)
        flags["ricci_hessian"] = rh
        flags["ricci_hessian_ok"] = rh < tol
        if r.J is not None:
            hol = holomorphy_residual(GradientField(r.sigma), r.J, r.g, fr)
            flags["holomorphy"] = hol
            flags["holomorphy_ok"] = hol < tol
        else:
            flags["holomorphy"] = float("nan")
            flags["holomorphy_ok"] = False
    return {k: float(values[k]) for k in IDENTITY_NAMES}, flags


def gamma_from_mu(r, p):
    """``lam e^{-2 mu} - mu' Y + (alpha mu' - mu'') Q`` (dots are d/d sigma)."""
    d = _rh_data(r, p)
    mu = float(d.fr.eval(r.mu).value) if r.mu is not None else 0.0
    return r.lam * np.exp(-2 * mu) - d.mudot * d.Y + (d.a * d.mudot - d.muddot) * d.Q
