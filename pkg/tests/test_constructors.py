import numpy as np
import pytest

from solitonkit import constructors as C
from solitonkit import geom as G
from solitonkit import jet as jm
from solitonkit.errors import DomainError

FLAT2 = G.MetricField.flat(2)
RNG = np.random.default_rng(4)


def _r2(x):
    return (x * x).sum()


def test_odot_is_half_symmetrized():
    a, b = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    np.testing.assert_allclose(C.odot(a, b), [[0, 1], [1, 0]])


def test_conformal_rescale_of_flat_gives_sphere_chart():
    tau = G.ScalarField(lambda x: (1 + _r2(x)) / 2, 2)
    pair = C.conformal_rescale(FLAT2, tau)
    for p in RNG.uniform(-2, 2, (5, 2)):
        np.testing.assert_allclose(pair.ghat(p), 4 / (1 + p @ p) ** 2 * np.eye(2), rtol=1e-14)


def test_conformal_rescale_by_y_gives_halfplane():
    tau = G.ScalarField(lambda x: x[1], 2)
    pair = C.conformal_rescale(G.MetricField.flat(2, box=(np.array([-1, 0.5]), np.array([1, 2]))), tau)
    p = np.array([0.3, 0.8])
    np.testing.assert_allclose(pair.ghat(p), np.eye(2) / 0.64)
    np.testing.assert_allclose(G.ricci(pair.ghat, p), -pair.ghat(p), atol=1e-13)


def test_conformal_rescale_rejects_nonpositive_factor_on_box():
    tau = G.ScalarField(lambda x: x[0], 2)
    g = G.MetricField.flat(2, box=(np.array([-1.0, -1.0]), np.array([1.0, 1.0])))
    with pytest.raises(DomainError):
        C.conformal_rescale(g, tau)


def test_conformal_formulas_on_off_shell_data():
    g = G.MetricField(lambda x: jm.stack([jm.stack([2 + jm.sin(x[0]), 0.3 * x[1]]),
                                          jm.stack([0.3 * x[1], 1 + x[0] ** 2])]), 2)
    tau = G.ScalarField(lambda x: 1.5 + jm.cos(x[0] * x[1]), 2)
    f = G.ScalarField(lambda x: jm.exp(x[0]) - x[1] ** 3, 2)
    ghat = C.conformal_rescale(g, tau).ghat
    for p in RNG.uniform(-1, 1, (4, 2)):
        np.testing.assert_allclose(G.ricci(ghat, p), C.conformal_ricci_rhs(g, tau, p), atol=1e-12)
        np.testing.assert_allclose(G.hessian(ghat, f, p), C.conformal_hessian_rhs(g, tau, f, p), atol=1e-12)
        assert G.laplacian(ghat, f, p) == pytest.approx(C.conformal_laplacian_rhs(g, tau, f, p), abs=1e-11)


def test_warped_tanh_gives_cigar():
    wp = C.warped_product(G.MetricField.flat(1), G.MetricField.flat(1), G.ScalarField(lambda x: jm.tanh(x[0]), 1))
    r, th = 0.8, 1.1
    np.testing.assert_allclose(wp.gbar(np.array([r, th])), np.diag([1.0, np.tanh(r) ** 2]))
    # Gauss curvature -ell''/ell = 2 sech^2 r
    ric = G.ricci(wp.gbar, np.array([r, th]))
    np.testing.assert_allclose(ric, 2 / np.cosh(r) ** 2 * wp.gbar(np.array([r, th])), atol=1e-13)


def test_warped_exp_gives_hyperbolic_space():
    for k in (2, 3):
        wp = C.warped_product(G.MetricField.flat(1), G.MetricField.flat(k), G.ScalarField(lambda x: jm.exp(x[0]), 1))
        p = RNG.uniform(-1, 1, k + 1)
        np.testing.assert_allclose(G.ricci(wp.gbar, p), -k * wp.gbar(p), atol=1e-12)


def test_warped_blocks_match_direct_computation():
    base = G.MetricField(lambda x: jm.stack([jm.stack([1 + x[1] ** 2, 0 * x[0]]), jm.stack([0 * x[0], 2 + jm.sin(x[0])])]), 2)
    fiber = G.MetricField.conformally_flat(lambda y: 1 + 0.2 * y[0] ** 2 + 0.1 * y[1] ** 2, 2)
    ell = G.ScalarField(lambda x: 1.2 + 0.5 * jm.sin(x[0] + 2 * x[1]), 2)
    f = G.ScalarField(lambda x: x[0] * x[1] + jm.cos(x[1]), 2)
    wp = C.warped_product(base, fiber, ell)
    for p in RNG.uniform(-1, 1, (3, 4)):
        bl = C.warped_block_formulas(wp, f, p[:2], p[2:])
        np.testing.assert_allclose(bl.ricci(), G.ricci(wp.gbar, p), atol=1e-11)
        np.testing.assert_allclose(bl.hessian(), G.hessian(wp.gbar, wp.lift(f), p), atol=1e-11)


def test_warped_split_join_roundtrip():
    wp = C.warped_product(G.MetricField.flat(1), G.MetricField.flat(2), G.ScalarField(lambda x: 1 + 0 * x[0], 1))
    p = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(wp.join(*wp.split(p)), p)
    assert (wp.b, wp.k) == (1, 2)


def test_kahler_flat_potential():
    kc = C.kahler_from_potential(2, G.ScalarField(lambda x: _r2(x), 4))
    np.testing.assert_allclose(kc.g(np.array([0.1, 0.2, -0.3, 0.4])), np.eye(4))


def test_fubini_study_einstein_constant():
    kc = C.kahler_from_potential(2, G.ScalarField(lambda x: jm.log(1 + _r2(x)), 4))
    p = np.array([0.3, -0.2, 0.1, 0.4])
    ric = G.ricci(kc.g, p)
    np.testing.assert_allclose(ric, 6 * kc.g(p), atol=1e-12)
    # the finite-difference route agrees on the constant
    from solitonkit.finite_diff import ricci_fd

    np.testing.assert_allclose(ricci_fd(kc.g, p, 1e-3), 6 * kc.g(p), atol=1e-4)


def test_kahler_rejects_non_plurisubharmonic_potential():
    with pytest.raises(DomainError):
        C.kahler_from_potential(1, G.ScalarField(lambda x: -_r2(x), 2), box=(np.array([-1.0, -1.0]), np.array([1.0, 1.0])))
