import numpy as np
import pytest

from solitonkit import finite_diff as fd
from solitonkit import gallery
from solitonkit import geom as G
from solitonkit import jet as jm
from solitonkit.checks import scenario_points
from solitonkit.errors import DegenerateMetricError, DomainError, JetOrderError

FLAT3 = G.MetricField.flat(3)
SPHERE = G.MetricField.conformally_flat(lambda x: 4 / (1 + (x * x).sum()) ** 2, 2)
HALFPLANE = G.MetricField.conformally_flat(lambda x: x[1] ** -2.0, 2)


def test_flat_christoffel_vanishes():
    assert np.all(G.christoffel(FLAT3, np.array([0.1, 2.0, -3.0])) == 0)


def test_round_sphere_is_einstein_with_constant_one():
    p = np.array([0.4, -0.9])
    np.testing.assert_allclose(G.ricci(SPHERE, p), SPHERE(p), atol=1e-13)
    assert G.scalar_curvature(SPHERE, p) == pytest.approx(2.0, abs=1e-12)


def test_halfplane_hessian_of_log_y():
    # a hand computation with the half-plane Christoffel symbols gives diag(-1, 0)
    f = G.ScalarField(lambda x: jm.log(x[1]), 2)
    np.testing.assert_allclose(G.hessian(HALFPLANE, f, np.array([0.0, 1.0])), np.diag([-1.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(fd.hessian_fd(HALFPLANE, f, np.array([0.0, 1.0])), np.diag([-1.0, 0.0]), atol=1e-6)


def _fd_cases():
    for sid in ("random_conformal_s102_d3", "random_conformal_s103_d4", "fubini_study_m2", "sphere_flattened"):
        scn = gallery.build(sid)
        for p in scenario_points(scn, 2, seed=3):
            yield pytest.param(scn, p, id=f"{sid}-{p[0]:.3f}")


@pytest.mark.parametrize("scn, p", list(_fd_cases()))
def test_jet_curvature_matches_finite_differences(scn, p):
    g = scn.metric
    np.testing.assert_allclose(G.christoffel(g, p), fd.christoffel_fd(g, p), atol=1e-7)
    np.testing.assert_allclose(G.ricci(g, p), fd.ricci_fd(g, p, h=1e-3), atol=1e-4)


@pytest.mark.parametrize("sid", ["random_conformal_s101_d2", "random_conformal_s104_d3", "cigar_2d"])
def test_finite_difference_error_is_second_order(sid):
    scn = gallery.build(sid)
    f = scn.field("f")
    p = scenario_points(scn, 1, seed=11)[0]
    exact = G.hessian(scn.metric, f, p)
    err = [np.abs(fd.hessian_fd(scn.metric, f, p, h) - exact).max() for h in (1e-2, 5e-3)]
    assert 3.5 <= err[0] / err[1] <= 4.5


def _lie_cases():
    for sid in gallery.catalog_ids():
        scn = gallery.build(sid)
        names = [n for n in scn.fields if n != "ell"]
        if names and scn.kind != "quasi-soliton":
            yield pytest.param(scn, names[0], id=sid)


@pytest.mark.parametrize("scn, name", list(_lie_cases()))
def test_lie_derivative_of_gradient_is_twice_hessian(scn, name):
    f = scn.field(name)
    for p in scenario_points(scn, 3, seed=5):
        lie = G.lie_derivative_metric(scn.metric, G.GradientField(f), p)
        np.testing.assert_allclose(lie, 2 * G.hessian(scn.metric, f, p), atol=1e-9)


def test_lie_derivative_matches_coordinate_formula():
    scn = gallery.build("random_conformal_s103_d4")
    w = G.GradientField(scn.field("tau"))
    p = scenario_points(scn, 1, seed=2)[0]
    wfn = lambda x: G.gradient(scn.metric, scn.field("tau"), x)
    np.testing.assert_allclose(G.lie_derivative_metric(scn.metric, w, p), fd.lie_derivative_fd(scn.metric, wfn, p, 1e-4), atol=1e-6)


def test_contracted_bianchi_identity():
    scn = gallery.build("random_conformal_s105_d4")
    for p in scenario_points(scn, 3, seed=1):
        fr = G.Frame(scn.metric, p, order=3)
        lhs = 2 * fr.divergence_sym2(fr.ricci).value
        np.testing.assert_allclose(lhs, jm.grad(fr.scalar_curvature).value, atol=1e-10)


def test_degenerate_metric_raises():
    g = G.MetricField(lambda x: jm.stack([jm.stack([x[0], 0 * x[0]]), jm.stack([0 * x[0], 1 + 0 * x[0]])]), 2)
    with pytest.raises(DegenerateMetricError):
        G.ricci(g, np.array([-0.5, 0.0]))


def test_field_outside_domain_raises():
    f = G.ScalarField(lambda x: jm.log(x[0]), 2)
    with pytest.raises(DomainError):
        G.hessian(G.MetricField.flat(2), f, np.array([-1.0, 0.0]))


def test_frame_order_is_enforced():
    fr = G.Frame(FLAT3, np.zeros(3), order=1)
    with pytest.raises(JetOrderError):
        G.ricci(FLAT3, fr)


def test_norms():
    g = np.diag([4.0, 1.0])
    assert G.g_operator_norm(np.diag([4.0, 0.5]), g) == pytest.approx(1.0)
    assert G.sup_norm(np.array([[1.0, -3.0], [0.0, 2.0]])) == 3.0
    assert G.functional_dependence_defect([1, 0], [0, 1]) == pytest.approx(1.0)
    assert G.functional_dependence_defect([1, 2], [2, 4]) == 0.0
    assert G.covector_norm([2.0, 0.0], np.linalg.inv(g)) == pytest.approx(1.0)
