from fractions import Fraction

import pytest

from solitonkit import gallery
from solitonkit.checks import CHECKERS, run_check, run_scenario
from solitonkit.errors import UnknownScenarioError

IDS = gallery.catalog_ids()


@pytest.mark.parametrize("sid", IDS)
def test_every_scenario_builds_with_known_checks(sid):
    scn = gallery.build(sid)
    assert scn.id == sid and scn.kind in gallery.KINDS
    assert scn.checks, "a scenario without declared checks would run nothing"
    for name, spec in scn.checks.items():
        assert name in CHECKERS
        assert spec.tol > 0


@pytest.mark.parametrize("sid", IDS)
def test_yaml_round_trip(sid):
    cfg = gallery.config(sid)
    again = gallery.load_configs(gallery.to_yaml(cfg))
    assert again == [cfg]


def test_negative_control_in_every_family():
    families_with_fail = {
        CHECKERS[name].family
        for sid in IDS
        for name, spec in gallery.build(sid).checks.items()
        if not spec.expect_pass
    }
    assert families_with_fail == {c.family for c in CHECKERS.values()}


def test_every_checker_is_declared_somewhere():
    declared = {name for sid in IDS for name in gallery.build(sid).checks}
    assert declared == set(CHECKERS)


def test_unknown_ids():
    with pytest.raises(UnknownScenarioError):
        gallery.config("no_such_scenario")
    with pytest.raises(UnknownScenarioError):
        gallery.config("gaussian(1, 2, 3, 4, 5)")
    with pytest.raises(UnknownScenarioError):
        gallery.config("banana(2)")


def test_family_calls():
    scn = gallery.build_from_config(gallery.config("gaussian(4, 2)"))
    assert scn.dim == 4 and scn.exact_params["lam"] == 2
    assert run_check(scn, "soliton", count=8).max < 1e-12
    for fam in ("flat_rh(3)", "fubini_study(2)", "hyperbolic_warped(2)"):
        gallery.build_from_config(gallery.config(fam))
    assert "gaussian" in gallery.families()


def test_parameters_are_exact():
    assert gallery.build("perturbed_kahler_m2").exact_params["eps"] == Fraction(1, 10)
    assert all(isinstance(v, Fraction) for v in gallery.build("cigar_2d").exact_params.values())


def test_build_is_cached():
    assert gallery.build("gaussian") is gallery.build("gaussian")


def test_custom_yaml_scenario_runs():
    text = """
scenarios:
  - id: my_gaussian
    kind: soliton
    coords: [u, v]
    box: [[-1, -1], [1, 1]]
    params: {lam: 1/2, a: 1}
    metric: flat
    fields:
      f: lam * (u^2 + v^2) / 2
    checks:
      soliton: {tol: 1e-12}
      soliton_scalar: {tol: 1e-12}
"""
    (cfg,) = gallery.load_configs(text)
    reports = run_scenario(gallery.build_from_config(cfg), count=8)
    assert all(r.ok for r in reports)


def test_bad_yaml_shape():
    with pytest.raises(ValueError):
        gallery.load_configs("- 1\n- 2\n")


def test_random_conformal_is_seeded():
    assert gallery.random_conformal_config(7, 3) == gallery.random_conformal_config(7, 3)
    assert gallery.random_conformal_config(7, 3) != gallery.random_conformal_config(8, 3)
