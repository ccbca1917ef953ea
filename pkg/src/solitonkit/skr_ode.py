"""One-variable ODE layer for functions of a special Kähler-Ricci potential.

Profiles are plain callables of one real variable.  They must accept a
float and a one-variable :class:`~solitonkit.jet.Jet`, which is how
derivatives are taken here (exactly, to rounding).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from . import diffalg as da
from . import jet as jm
from .errors import DomainError, IntervalSplitError, SingularityError
from .jet import Jet

__all__ = [
    "SKRParams",
    "PhiProfile",
    "CoeffSystem",
    "DelemResult",
    "SigmaProfile",
    "derivatives",
    "skr_system_residual",
    "y_q_from_phi",
    "reduce_to_first_order",
    "delem_solve",
    "rk_oracle",
    "sigma_reparam",
    "alpha_family",
    "alpha_ode_residual",
    "warp_profile_consistency",
    "family_constant_from_external",
]

DEGENERATE_TOL = 1e-11
GRID_POINTS = 64
SINGULAR_EPS = 1e-12


def derivatives(fn, s0, order=2):
    """``[fn(s0), fn'(s0), ..., fn^(order)(s0)]`` via a one-variable jet."""
    if fn is None:
        return [0.0] * (order + 1)
    if not callable(fn):
        return [float(fn)] + [0.0] * order
    out = fn(jm.variables(np.array([float(s0)]), order)[0])
    if not isinstance(out, Jet):
        return [float(out)] + [0.0] * order
    return [float(out.c[j].reshape(-1)[0]) for j in range(order + 1)]


@dataclass(frozen=True)
class SKRParams:
    m: int
    c: float
    K: float
    lam: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m}")

    def exact(self):
        """Constants as exact rationals for substitution into DiffRat expressions."""
        return {
            "m": da.const(int(self.m)),
            "c": da.const(Fraction(self.c)),
            "K": da.const(Fraction(self.K)),
            "lam": da.const(Fraction(self.lam)),
        }


@dataclass
class PhiProfile:
    """Hessian-eigenvalue profile ``phi(sigma)`` on ``interval`` (excluding ``sigma = c``)."""

    fn: Callable
    interval: Optional[tuple] = None
    irreducible: bool = False

    def __call__(self, s):
        return self.fn(s)

    def derivs(self, s0, order=2):
        return derivatives(self.fn, s0, order)


def _check_not_c(s0, c):
    if abs(s0 - c) <= SINGULAR_EPS * max(1.0, abs(c)):
        raise SingularityError(f"evaluation at the singular value sigma = c = {c}")


def skr_system_residual(phi, alpha, gamma, prm, s0):
    """Residuals of the two second-order equations for ``phi`` at ``s0``.

    ``(s-c)^2 phi'' + (s-c)[m - (s-c) alpha] phi' - m phi - K`` and
    ``-(s-c) phi'' + [alpha (s-c) - (m+1)] phi' + alpha phi - gamma``.
    """
    _check_not_c(s0, prm.c)
    f0, f1, f2 = derivatives(phi, s0, 2)
    a = derivatives(alpha, s0, 0)[0]
    g = derivatives(gamma, s0, 0)[0]
    u = s0 - prm.c
    m = prm.m
    r1 = u * u * f2 + u * (m - u * a) * f1 - m * f0 - prm.K
    r2 = -u * f2 + (a * u - (m + 1)) * f1 + a * f0 - g
    return r1, r2


def y_q_from_phi(phi, prm, s0):
    """``Y = 2m phi + 2(s-c) phi'`` and ``Q = 2(s-c) phi``."""
    _check_not_c(s0, prm.c)
    f0, f1 = derivatives(phi, s0, 1)
    u = s0 - prm.c
    return 2 * prm.m * f0 + 2 * u * f1, 2 * u * f0


@dataclass
class CoeffSystem:
    """``A phi'' + B phi' + C phi = D`` with ``phi' + p phi = q``.

    Coefficients are callables of ``sigma`` (jet-capable).  ``exact`` holds
    the DiffRat version when available, ``interval`` the grid range used for
    numeric degeneracy tests.
    """

    A: Callable
    B: Callable
    C: Callable
    D: Callable
    p: Callable
    q: Callable
    exact: Optional[da.CoeffSystem] = None
    interval: Optional[tuple] = None
    label: str = ""

    def values(self, s0, order=0):
        return {k: derivatives(getattr(self, k), s0, order) for k in "ABCDpq"}


def _const(v):
    v = float(v)
    return lambda s: v


def _from_exact(rat):
    """Numeric callable of ``x`` from a DiffRat free of other generators."""
    left = rat.variables() - {"x"}
    if left:
        raise ValueError(f"expression still contains {sorted(left)}")
    num, den = rat.num, rat.den

    def fn(s):
        return num.evaluate({"x": s}) / den.evaluate({"x": s})

    return fn


def reduce_to_first_order(prm, alpha, variant="quasi", gamma=None, interval=None):
    """First-order reduction of the SKR pair.

    ``alpha`` is a callable of ``sigma`` or an exact DiffRat in ``x``; in the
    latter case the returned system also carries the exact coefficients.
    ``variant="quasi"`` uses right side ``gamma`` (default ``lam``) in the
    second equation; ``"conformal"`` substitutes the conformal ``gamma`` expressed
    through ``phi``.
    """
    if variant not in ("quasi", "conformal"):
        raise ValueError(f"unknown variant {variant!r}")
    m, c, K, lam = prm.m, prm.c, prm.K, prm.lam
    if isinstance(alpha, (da.DiffRat, da.DiffPoly)):
        if gamma is not None and not isinstance(gamma, da.DiffRat):
            raise TypeError("an exact alpha needs gamma as a DiffRat (or None)")
        sym = da.first_order_reduction_symbolic(variant, gamma=gamma)
        mapping = prm.exact()
        exact_alpha = da.to_rat(alpha).subs(mapping)
        names = ("A", "B", "C", "D", "p", "q")
        exact = da.CoeffSystem(
            *(da.substitute_alpha(getattr(sym, k).subs(mapping), exact_alpha) for k in names)
        )
        funcs = {k: _from_exact(getattr(exact, k)) for k in names}
        return CoeffSystem(**funcs, exact=exact, interval=interval, label=variant)

    a = alpha if callable(alpha) else _const(alpha)
    A = lambda s: (s - c) * (s - c)
    B = lambda s: (s - c) * (m - (s - c) * a(s))
    C = _const(-m)
    D = _const(K)
    if variant == "quasi":
        g = gamma if callable(gamma) else _const(lam if gamma is None else gamma)
        p = lambda s: m / (s - c) - a(s)
        q = lambda s: -(K + (s - c) * g(s)) / (s - c)
    else:
        def lead(s):
            return (s - c) * (s - 2 * c) / s

        def zeroth(s):
            return -(lead(s) * a(s) + (2 * (s - c) * (s - c) - m * s * (s - 2 * c)) / (s * s))

        p = lambda s: zeroth(s) / lead(s)
        q = lambda s: (K * s * s + lam * s - lam * c) / (s * s) / lead(s)
    return CoeffSystem(A, B, C, D, p, q, interval=interval, label=variant)


@dataclass
class DelemResult:
    """Outcome of the closed-form solver at one point.

    ``status`` is ``"ok"``, ``"degenerate"`` (denominator identically zero)
    or ``"singular"`` (denominator zero at this point only).
    """

    status: str
    value: Optional[float]
    den: float
    num: float
    exact: bool = False
    exact_den: Optional[da.DiffRat] = None
    exact_num: Optional[da.DiffRat] = None


def _delem_numeric(cs, s0):
    A, B, C, D = (derivatives(getattr(cs, k), s0, 0)[0] for k in "ABCD")
    p0, p1 = derivatives(cs.p, s0, 1)
    q0, q1 = derivatives(cs.q, s0, 1)
    den = A * (p0 * p0 - p1) - B * p0 + C
    num = D - A * (q1 - p0 * q0) - B * q0
    return den, num


def delem_solve(cs, s0, grid=None):
    """``phi = (D - A(q' - pq) - Bq) / (A(p^2 - p') - Bp + C)`` or a degeneracy flag.

    With exact coefficients the dichotomy is decided exactly; otherwise the
    denominator counts as identically zero when it stays below
    ``DEGENERATE_TOL`` on ``GRID_POINTS`` points of ``cs.interval`` (or of
    ``grid``).
    """
    if cs.exact is not None:
        eden, enum = da.delem_quantities(cs.exact)
        den, num = _delem_numeric(cs, s0)
        if eden.is_zero():
            return DelemResult("degenerate", None, 0.0, num, True, eden, enum)
        den_v = _from_exact(eden)(s0)
        num_v = _from_exact(enum)(s0) if not enum.is_zero() else 0.0
        if abs(den_v) < DEGENERATE_TOL:
            return DelemResult("singular", None, den_v, num_v, True, eden, enum)
        return DelemResult("ok", num_v / den_v, den_v, num_v, True, eden, enum)

    den, num = _delem_numeric(cs, s0)
    if grid is None and cs.interval is not None:
        grid = np.linspace(cs.interval[0], cs.interval[1], GRID_POINTS)
    if grid is not None:
        dens = np.array([_delem_numeric(cs, s)[0] for s in grid])
        if np.all(np.abs(dens) < DEGENERATE_TOL):
            return DelemResult("degenerate", None, den, num)
    if abs(den) < DEGENERATE_TOL:
        return DelemResult("singular", None, den, num)
    return DelemResult("ok", num / den, den, num)


def rk_oracle(cs, s_start, phi0, s_eval, second_order=False, rtol=1e-10, atol=1e-12):
    """Integrate the system numerically from ``phi(s_start) = phi0``.

    First-order mode integrates ``phi' = q - p phi``.  Second-order mode
    integrates ``phi'' = (D - B phi' - C phi) / A`` with ``phi'`` initialised
    from the first-order equation.
    """
    s_eval = np.atleast_1d(np.asarray(s_eval, dtype=float))
    ev = lambda name, s: derivatives(getattr(cs, name), s, 0)[0]
    lo, hi = min(s_start, s_eval.min()), max(s_start, s_eval.max())

    def solve(t_end, t_eval):
        if second_order:
            dphi0 = ev("q", s_start) - ev("p", s_start) * phi0

            def rhs(s, y):
                return [y[1], (ev("D", s) - ev("B", s) * y[1] - ev("C", s) * y[0]) / ev("A", s)]

            y0 = [phi0, dphi0]
        else:
            def rhs(s, y):
                return [ev("q", s) - ev("p", s) * y[0]]

            y0 = [phi0]
        sol = solve_ivp(rhs, (s_start, t_end), y0, method="RK45", rtol=rtol, atol=atol,
                        t_eval=t_eval, dense_output=False)
        if not sol.success:
            raise RuntimeError(f"integration failed: {sol.message}")
        return sol.y[0]

    out = np.empty_like(s_eval)
    right = s_eval >= s_start
    if np.any(right):
        order = np.argsort(s_eval[right])
        vals = solve(hi, s_eval[right][order])
        tmp = np.empty_like(vals)
        tmp[order] = vals
        out[right] = tmp
    if np.any(~right):
        order = np.argsort(-s_eval[~right])
        vals = solve(lo, s_eval[~right][order])
        tmp = np.empty_like(vals)
        tmp[order] = vals
        out[~right] = tmp
    return out


# reparametrization -------------------------------------------------------------


@dataclass
class SigmaProfile:
    """Integrated ``sigma(t)`` with ``sigma(t0) = 0``, ``sigma'(t0) = 1``."""

    t0: float
    interval: tuple
    solution: object
    theta: Callable
    mu: Callable
    n: int
    fd_step: float = 1e-2
    notes: dict = field(default_factory=dict)

    def sigma(self, t):
        return self.solution(t)[0]

    def sigma_dot(self, t):
        return self.solution(t)[1]

    def sigma_ddot(self, t):
        """Five-point central difference of the dense ``sigma'`` output."""
        h = self.fd_step
        sd = self.sigma_dot
        return (-sd(t + 2 * h) + 8 * sd(t + h) - 8 * sd(t - h) + sd(t - 2 * h)) / (12 * h)

    def defect(self, t):
        """``theta_ss + 2 mu_s theta_s - (n-2) mu_s^2`` with derivatives in ``sigma``."""
        _, th1, th2 = derivatives(self.theta, t, 2)
        _, mu1, _ = derivatives(self.mu, t, 2)
        s1 = self.sigma_dot(t)
        s2 = self.sigma_ddot(t)
        th_s = th1 / s1
        th_ss = (th2 - th_s * s2) / s1**2
        mu_s = mu1 / s1
        return th_ss + 2 * mu_s * th_s - (self.n - 2) * mu_s**2

    def defect_points(self, count=33):
        a, b = self.interval
        margin = 2 * self.fd_step
        return np.linspace(a + margin, b - margin, count)


def sigma_reparam(theta, mu, n, interval, t0=None, rtol=1e-10, atol=1e-13, check_points=257):
    """Solve ``sigma''/sigma' = [theta'' + 2 mu' theta' - (n-2) mu'^2] / theta'``.

    ``theta`` and ``mu`` are profiles of ``t``; ``mu=None`` means ``mu = 0``.
    Raises :class:`IntervalSplitError` if ``theta'`` vanishes on the interval.
    """
    a, b = (float(v) for v in interval)
    if not a < b:
        raise ValueError("interval must be increasing")
    t0 = a if t0 is None else float(t0)
    if not a <= t0 <= b:
        raise ValueError("t0 must lie in the interval")
    mu = mu if mu is not None else (lambda t: 0.0)
    probe = np.linspace(a, b, check_points)
    thd = np.array([derivatives(theta, t, 1)[1] for t in probe])
    if np.any(thd == 0.0) or np.any(np.sign(thd) != np.sign(thd[0])):
        bad = probe[np.argmax(np.sign(thd) != np.sign(thd[0]))] if np.any(thd != 0) else a
        raise IntervalSplitError(f"theta' changes sign or vanishes near t = {bad:.6g}; split the interval")

    def ratio(t):
        _, th1, th2 = derivatives(theta, t, 2)
        _, mu1 = derivatives(mu, t, 1)
        return (th2 + 2 * mu1 * th1 - (n - 2) * mu1 * mu1) / th1

    def rhs(t, y):
        return [y[1], y[1] * ratio(t)]

    pieces = []
    for end in (b, a):
        if end == t0:
            continue
        sol = solve_ivp(rhs, (t0, end), [0.0, 1.0], method="RK45", rtol=rtol, atol=atol,
                        dense_output=True)
        if not sol.success:
            raise RuntimeError(f"integration failed: {sol.message}")
        if np.any(sol.y[1] <= 0.0):
            raise IntervalSplitError("sigma' lost positivity during integration")
        pieces.append((min(t0, end), max(t0, end), sol.sol))

    def solution(t):
        for lo, hi, s in pieces:
            if lo <= t <= hi:
                return s(t)
        raise DomainError(f"t = {t} outside the integration interval [{a}, {b}]")

    return SigmaProfile(t0, (a, b), solution, theta, mu, int(n))


# the alpha family and warp constraints ---------------------------------------------


def _check_tau(tau0, c):
    for bad in (0.0, 2 * c):
        if abs(tau0 - bad) <= SINGULAR_EPS * max(1.0, abs(c)):
            raise SingularityError(f"tau = {tau0} is singular for the alpha family (0 or 2c)")


def alpha_family(n, c, C, tau0):
    """``(n-2)/tau + C/(tau (tau - 2c))``."""
    if isinstance(tau0, Jet):
        _check_tau(float(tau0.value), c)
    else:
        _check_tau(float(tau0), c)
    return (n - 2) / tau0 + C / (tau0 * (tau0 - 2 * c))


def alpha_ode_residual(alpha, n, c, tau0):
    """``(tau - 2c) tau alpha' + 2 (tau - c) alpha + 2 - 2m`` with ``m = n/2``."""
    _check_tau(float(tau0), c)
    a0, a1 = derivatives(alpha, tau0, 1)
    return (tau0 - 2 * c) * tau0 * a1 + 2 * (tau0 - c) * a0 + 2 - n


def family_constant_from_external(a, c):
    """Constant ``C`` of the alpha family matching the external form with ``k = -1/(2c)``: ``C = -2ac``."""
    return -2 * a * c


def warp_profile_consistency(f_profile, ell_profile, k, s0, tau=None):
    """Residuals of the two warp constraints at ``s0``.

    First: ``alpha~ ell'' + f'' ell'^2`` with ``alpha~ = f'(ell) - k/ell``.
    Second: ``mu (ell'' + 2 ell'/tau) + ell'^2 chi`` with ``mu = alpha~``,
    ``chi = f''(ell)`` and ``tau = s0`` unless given.  Primes on ``ell`` are
    derivatives in the profile variable, primes on ``f`` are in ``ell``.
    """
    l0, l1, l2 = derivatives(ell_profile, s0, 2)
    if l0 <= 0:
        raise DomainError(f"warping function must be positive, got {l0}")
    _, f1, f2 = derivatives(f_profile, l0, 2)
    at = f1 - k / l0
    t = s0 if tau is None else tau
    if t == 0:
        raise SingularityError("tau = 0 in the second warp constraint")
    first = at * l2 + f2 * l1 * l1
    second = at * (l2 + 2 * l1 / t) + l1 * l1 * f2
    return first, second
