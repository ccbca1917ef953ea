import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solitonkit import constructors as C
from solitonkit import gallery
from solitonkit import geom as G
from solitonkit import jet as jm
from solitonkit import residuals as R
from solitonkit.checks import scenario_points
from solitonkit.errors import ExcludedPointError, PreconditionError

FLAT4 = G.MetricField.flat(4)
J4 = G.AlmostComplexField.standard(4)


def test_gaussian_soliton():
    f = G.ScalarField(lambda x: (x * x).sum() / 2, 3)
    s = R.SolitonScenario(G.MetricField.flat(3), f, 1.0, a=3.0)
    p = np.array([0.3, -0.5, 0.8])
    assert np.abs(R.soliton_residual(s, p)).max() < 1e-14
    assert abs(R.soliton_scalar_residual(s, p)) < 1e-14


def test_fit_scalar_constant_is_midrange_or_anchor():
    raw = np.array([1.0, 3.0, 2.5])
    assert R.fit_scalar_constant(raw) == 2.0
    assert R.fit_scalar_constant(raw, anchor=2) == 2.5


def test_missing_scalar_constant_raises():
    scn = gallery.build("cigar_2d")
    with pytest.raises(ValueError):
        R.soliton_scalar_residual(scn.soliton, np.array([0.1, 0.2]))


def test_transport_is_a_tensor_identity_and_norms_scale_by_tau_squared():
    scn = gallery.build("random_conformal_s103_d4")
    s = scn.conformal
    for p in scenario_points(scn, 4, seed=9):
        conf = R.conf_soliton_residual(s, p)
        hat = R.soliton_residual(s, p)
        np.testing.assert_allclose(conf, hat, atol=1e-12)
        tau = float(s.tau(p))
        gn = G.g_operator_norm(conf, s.g(p))
        hn = G.g_operator_norm(hat, s.ghat(p))
        assert hn == pytest.approx(tau**2 * gn, rel=1e-10)


def test_two_form_scalar_equals_hat_scalar_equation():
    scn = gallery.build("random_conformal_s102_d3")
    s = scn.conformal
    for p in scenario_points(scn, 4, seed=2):
        assert R.two_form_scalar_residual(s, p, a=0.0) == pytest.approx(R.soliton_scalar_residual(s, p, a=0.0), abs=1e-11)


def test_gamma_star_recovers_gamma_on_shell():
    scn = gallery.build("cigar_2d")
    s = scn.conformal
    p = np.array([0.4, -0.3])
    gm = R.conformal_gamma(s, p)
    t = R.conf_soliton_residual(s, p) + gm * s.g(p)
    assert R.gamma_star(t, s.g(p)) == pytest.approx(gm, abs=1e-13)


def _linear_field(a):
    a = np.asarray(a, dtype=float)
    return G.VectorField(lambda x: jm.einsum("ij,j->i", a, x) if isinstance(x, jm.Jet) else a @ x, 4)


matrices = st.lists(st.floats(-1, 1, allow_nan=False), min_size=16, max_size=16).map(lambda v: np.array(v).reshape(4, 4))


@settings(max_examples=30, deadline=None)
@given(a=matrices, s=st.floats(-1, 1, allow_nan=False))
def test_classifier_hierarchy(a, s):
    p = np.array([0.2, -0.1, 0.4, 0.3])
    jv = J4(p)
    # the complex-linear skew part is a Killing field that commutes with J
    skew = 0.5 * (a - a.T)
    kill = 0.5 * (skew - jv @ skew @ jv)
    fields = [_linear_field(kill), _linear_field(kill + s * np.eye(4)), _linear_field(a)]
    for x in fields:
        k = R.killing_residual(x, FLAT4, p)
        c = R.conformal_field_residual(x, FLAT4, p)
        m = R.commutator_residual(x, J4, FLAT4, p)
        if k < 1e-10:
            assert c < 1e-10
        if c < 1e-10:
            assert m < 1e-10
    assert R.killing_residual(fields[0], FLAT4, p) < 1e-12
    assert R.holomorphy_residual(fields[0], J4, FLAT4, p) < 1e-12
    assert R.conformal_field_residual(fields[1], FLAT4, p) < 1e-12
    assert R.killing_residual(fields[1], FLAT4, p) == pytest.approx(2 * abs(s), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(a=matrices)
def test_hermitian_part_is_j_invariant(a):
    j = J4(np.zeros(4))
    t = a + a.T
    herm = 0.5 * (t + j.T @ t @ j)
    assert R.hermitian_defect(herm, j) < 1e-12


def test_span_alignment_rejects_zero_vector():
    zero = G.VectorField(lambda x: 0 * x, 4)
    e1 = G.VectorField(lambda x: np.array([1.0, 0, 0, 0]) + 0 * x, 4)
    with pytest.raises(ExcludedPointError):
        R.span_alignment(zero, e1, J4, FLAT4, np.zeros(4))


def test_span_alignment_values():
    e1 = G.VectorField(lambda x: np.array([1.0, 0, 0, 0]) + 0 * x, 4)
    je1 = G.VectorField(lambda x: np.array([0, 1.0, 0, 0]) + 0 * x, 4)
    e3 = G.VectorField(lambda x: np.array([0, 0, 1.0, 0]) + 0 * x, 4)
    assert R.span_alignment(e1, je1, J4, FLAT4, np.zeros(4)) < 1e-15
    assert R.span_alignment(e1, e3, J4, FLAT4, np.zeros(4)) == pytest.approx(1.0)


def test_special_qs_requires_functional_dependence():
    wp = C.warped_product(G.MetricField.flat(2), G.MetricField.flat(1), G.ScalarField(lambda x: jm.exp(x[1]), 2))
    q = R.QuasiSolitonScenario(wp, G.ScalarField(lambda x: x[0], 2), 0.0, 0.0, f_profile=lambda l: l)
    with pytest.raises(PreconditionError):
        R.special_qs_residual(q, np.array([0.1, 0.2]))
    q.f_profile = None
    with pytest.raises(PreconditionError):
        R.special_qs_residual(q, np.array([0.1, 0.2]))


def test_quasi_scalar_detects_wrong_fiber_constant():
    scn = gallery.build("hyperbolic_warped_bad_nu")
    res = R.quasi_soliton_residual(scn.quasi, np.array([0.2]), np.array([0.1, 0.3]))
    assert abs(res.scalar) == pytest.approx(1.0)
    np.testing.assert_allclose(res.fiber, -np.eye(2))


def test_rels_flags_preconditions():
    scn = gallery.build("flat_rh_m2")
    values, flags = R.rels_wedge_identities(scn.rh, np.array([0.1, 0.2, 0.3, -0.4]))
    assert flags["ricci_hessian_ok"] and flags["holomorphy_ok"]
    assert max(values.values()) < 1e-12
    bad = gallery.build("flat_rh_wrong_gamma")
    _, flags = R.rels_wedge_identities(bad.rh, np.array([0.1, 0.2, 0.3, -0.4]))
    assert not flags["ricci_hessian_ok"]


def test_rels_excludes_critical_points_of_sigma():
    scn = gallery.build("flat_rh_m2")
    with pytest.raises(ExcludedPointError):
        R.rels_wedge_identities(scn.rh, np.zeros(4))


def test_gamma_from_mu_on_gaussian_recast():
    scn = gallery.build("gaussian_rh")
    p = np.array([0.1, 0.5, -0.2, 0.3])
    assert R.gamma_from_mu(scn.rh, p) == pytest.approx(0.5, abs=1e-14)


def test_dY_identities_on_fubini_study():
    scn = gallery.build("fubini_study_m2")
    for res in R.dY_identity_residuals(scn.metric, scn.field("sigma"), np.array([0.1, 0.2, 0.3, -0.4])):
        assert np.abs(res).max() < 1e-12


def test_residual_report_status():
    rep = R.ResidualReport("s", "e", np.zeros((2, 1)), np.array([1e-3, np.nan]), np.array([1e-3, np.nan]), 1e-2)
    assert rep.inconclusive and rep.max == 1e-3 and rep.passed
