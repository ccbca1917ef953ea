from fractions import Fraction

import numpy as np
import pytest

from solitonkit import diffalg as da
from solitonkit import jet as jm
from solitonkit import skr_ode as S
from solitonkit.errors import IntervalSplitError, SingularityError

from skr_systems import SYSTEMS, constructed_system

PRM = S.SKRParams(3, 1.0, 0.5, 0.25)


@pytest.mark.parametrize("case", range(len(SYSTEMS)))
def test_delem_matches_rk_oracle(case):
    phi, A, B, C, p = SYSTEMS[case]
    cs = constructed_system(phi, A, B, C, p, (0.1, 1.9))
    grid = np.linspace(0.1, 1.9, 9)
    res = [S.delem_solve(cs, s) for s in grid]
    assert all(r.status == "ok" for r in res)
    vals = np.array([r.value for r in res])
    exact = np.array([float(phi(s)) for s in grid])
    np.testing.assert_allclose(vals, exact, atol=1e-9)
    first = S.rk_oracle(cs, grid[0], vals[0], grid)
    second = S.rk_oracle(cs, grid[0], vals[0], grid, second_order=True)
    assert np.abs(vals - first).max() < 1e-6
    assert np.abs(vals - second).max() < 1e-6


def test_delem_simple_example():
    one = lambda s: 1.0 + 0 * s
    zero = lambda s: 0 * s
    cs = S.CoeffSystem(one, zero, zero, zero, one, one, interval=(0, 1))
    r = S.delem_solve(cs, 0.5)
    assert r.status == "ok" and r.value == pytest.approx(1.0)


def test_exact_back_substitution_is_zero():
    x = da.var("x")
    phi = 1 / (x + 1)
    A, B, C, p = x, da.const(1), x * x, x
    D = A * phi.derive().derive() + B * phi.derive() + C * phi
    q = phi.derive() + p * phi
    den, num = da.delem_quantities(da.CoeffSystem(A, B, C, D, p, q))
    sol = num / den
    assert (sol - phi).is_zero()
    assert (A * sol.derive().derive() + B * sol.derive() + C * sol - D).is_zero()
    assert (sol.derive() + p * sol - q).is_zero()


def test_first_system_with_constant_alpha_is_degenerate():
    assert S.delem_solve(S.reduce_to_first_order(PRM, 0.7, "quasi", interval=(2, 4)), 3.0).status == "degenerate"
    exact = S.reduce_to_first_order(PRM, da.const(Fraction(7, 10)), "quasi")
    r = S.delem_solve(exact, 3.0)
    assert r.status == "degenerate" and r.exact and r.exact_num.is_zero()


def test_first_system_with_nonconstant_alpha():
    r = S.delem_solve(S.reduce_to_first_order(PRM, da.var("x"), "quasi"), 3.0)
    # alpha' (sigma - c)^2 at sigma = 3, c = 1
    assert r.status == "ok" and r.den == pytest.approx(4.0)
    assert r.exact_num.is_zero() and r.value == 0.0


def test_second_system_with_family_alpha_is_degenerate():
    x = da.var("x")
    n, C = 6, Fraction(3, 2)
    al = Fraction(n - 2) / x + C / (x * (x - 2))
    assert S.delem_solve(S.reduce_to_first_order(PRM, al, "conformal"), 3.0).status == "degenerate"
    numeric = S.reduce_to_first_order(PRM, lambda s: S.alpha_family(6, 1.0, 1.5, s), "conformal", interval=(2.5, 4))
    assert S.delem_solve(numeric, 3.0).status == "degenerate"


def test_singular_value_raises():
    with pytest.raises(SingularityError):
        S.skr_system_residual(lambda s: s, 1.0, 0.0, PRM, 1.0)
    with pytest.raises(SingularityError):
        S.alpha_family(6, 1.0, 0.0, 2.0)


def test_y_q_identity():
    phi = lambda s: jm.exp(s) / (1 + s * s) if isinstance(s, jm.Jet) else np.exp(s) / (1 + s * s)
    for s0 in (1.5, 2.3, -0.4):
        h = 1e-5
        qp = (S.y_q_from_phi(phi, PRM, s0 + h)[1] - S.y_q_from_phi(phi, PRM, s0 - h)[1]) / (2 * h)
        f0, f1 = S.derivatives(phi, s0, 1)
        assert qp == pytest.approx(2 * f0 + 2 * (s0 - PRM.c) * f1, rel=1e-8)


def test_sigma_reparam_defect():
    prof = S.sigma_reparam(lambda t: jm.exp(t) + t, lambda t: 0.3 * jm.sin(t), 4, (0.0, 1.0))
    assert max(abs(prof.defect(t)) for t in prof.defect_points()) < 1e-7
    ts = np.linspace(0, 1, 11)
    assert np.all(np.diff([prof.sigma(t) for t in ts]) > 0)


def test_sigma_reparam_affine_when_mu_vanishes():
    prof = S.sigma_reparam(lambda t: jm.exp(t) + t, None, 4, (0.0, 1.0))
    for t in np.linspace(0, 1, 9):
        assert prof.sigma(t) == pytest.approx((np.exp(t) + t - 1) / 2, abs=1e-9)
    lin = S.sigma_reparam(lambda t: 3 * t, None, 4, (0.0, 1.0), t0=0.25)
    assert lin.sigma(0.75) == pytest.approx(0.5, abs=1e-12)


def test_sigma_reparam_splits_at_critical_theta():
    with pytest.raises(IntervalSplitError):
        S.sigma_reparam(lambda t: (t - 0.5) ** 2, None, 4, (0.0, 1.0))


def test_alpha_family_solves_its_ode():
    assert S.alpha_family(6, 1.0, 0.0, 3.0) == pytest.approx(4 / 3)
    for C in (0.0, 2.0, -1.25):
        for t in (0.5, 3.3, -2.0):
            assert abs(S.alpha_ode_residual(lambda s: S.alpha_family(6, 1.0, C, s), 6, 1.0, t)) < 1e-12
    assert abs(S.alpha_ode_residual(lambda s: 1 / s, 6, 1.0, 3.0)) > 0.1
    assert S.family_constant_from_external(0.5, 2.0) == -2.0


def test_warp_constraints():
    f = lambda l: jm.log(l) * 2 if isinstance(l, jm.Jet) else 2 * np.log(l)
    const = lambda s: 1.5 + 0 * s
    assert S.warp_profile_consistency(f, const, 2, 0.3) == (0.0, 0.0)
    # f'(ell) = k/ell makes alpha~ vanish, leaving f'' ell'^2 != 0
    first, _ = S.warp_profile_consistency(f, lambda s: 1 + s * s, 2, 0.5)
    assert abs(first) > 0.1
