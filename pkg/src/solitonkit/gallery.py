"""Scenario catalog.

Every scenario, built-in or user supplied, is described by a plain
dictionary that round-trips through YAML.  Field definitions are
expression strings (see :mod:`solitonkit.expr`).  Layout::

    id: cigar_2d
    kind: conformal-soliton        # soliton | conformal-soliton | quasi-soliton
                                   # ricci-hessian | kahler | classifier
    description: free text
    coords: [x, y]
    box: [[-1, -1], [1, 1]]        # lower corner, upper corner
    params: {lam: 0}               # numbers or exact strings such as "1/10"
    fields: {tau: "...", f: "..."} # scalar fields, in dependency order
    metric: flat                   # or {conformal: e}, {diagonal: [...]},
                                   # {matrix: [[...]]}, {kahler_potential: e}
    J: standard                    # optional; or {matrix: [[...]]}
    vectors: {x: ["-y", "x"], w: {gradient: f, scale: "tau^2"}}
    excluded: ["tau"]              # expressions whose zero sets are avoided
    checks: {soliton: {tol: 1e-9, expect: pass}}

Warped scenarios replace ``metric`` by a ``warped`` section with
``base_coords``, ``fiber_coords``, ``base_metric``, ``fiber_metric`` and
``ell``; their fields live on the base and ``f_profile`` (optional) is an
expression in ``ell``.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
import yaml

from . import jet as jm
from .constructors import WarpedProduct, kahler_from_potential, warped_product
from .errors import UnknownScenarioError
from .expr import compile_field
from .geom import AlmostComplexField, GradientField, MetricField, ScalarField, VectorField
from .residuals import (
    ConformalSolitonScenario,
    QuasiSolitonScenario,
    RicciHessianScenario,
    SolitonScenario,
)

__all__ = [
    "KINDS",
    "Scenario",
    "CheckSpec",
    "build",
    "build_from_config",
    "catalog",
    "catalog_ids",
    "config",
    "to_yaml",
    "load_configs",
    "random_conformal_config",
    "RANDOM_SEEDS",
    "families",
]

KINDS = ("soliton", "conformal-soliton", "quasi-soliton", "ricci-hessian", "kahler", "classifier")


@dataclass(frozen=True)
class CheckSpec:
    name: str
    tol: float
    expect_pass: bool
    options: dict = field(default_factory=dict)


@dataclass
class Scenario:
    id: str
    kind: str
    description: str
    config: dict
    coords: list
    box: tuple
    metric: MetricField
    params: dict
    exact_params: dict
    fields: dict
    vectors: dict
    J: Optional[AlmostComplexField]
    excluded: list
    checks: dict
    soliton: Optional[SolitonScenario] = None
    conformal: Optional[ConformalSolitonScenario] = None
    quasi: Optional[QuasiSolitonScenario] = None
    rh: Optional[RicciHessianScenario] = None
    warped: Optional[WarpedProduct] = None
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return len(self.coords)

    def field(self, name):
        try:
            return self.fields[name]
        except KeyError:
            raise KeyError(f"scenario {self.id!r} has no field {name!r}") from None


# config parsing ------------------------------------------------------------------


def _exact(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not numeric parameters")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise ValueError(f"cannot read parameter value {v!r}")


def _scalar(text, coords, env, name=None):
    fn = compile_field(str(text), coords, env)
    return ScalarField(fn, len(coords), name=name)


def _matrix_fn(rows, coords, env):
    fns = [[compile_field(str(e), coords, env) for e in row] for row in rows]
    n = len(fns)
    if any(len(r) != n for r in fns):
        raise ValueError("matrix entries must form a square array")

    def fn(x):
        vals = [[f(x) for f in row] for row in fns]
        if any(isinstance(v, jm.Jet) for row in vals for v in row):
            return jm.stack(vals)
        return np.array(vals, dtype=float)

    return fn


def _metric(spec, coords, env, box, name):
    dim = len(coords)
    if spec == "flat" or spec is None:
        return MetricField.flat(dim, box=box, name=name)
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"bad metric specification {spec!r}")
    (key, val), = spec.items()
    if key == "conformal":
        factor = compile_field(str(val), coords, env)
        return MetricField.conformally_flat(factor, dim, box=box, name=name)
    if key == "diagonal":
        if len(val) != dim:
            raise ValueError("diagonal metric needs one entry per coordinate")
        rows = [[val[i] if i == j else "0" for j in range(dim)] for i in range(dim)]
        return MetricField(_matrix_fn(rows, coords, env), dim, box=box, name=name)
    if key == "matrix":
        return MetricField(_matrix_fn(val, coords, env), dim, box=box, name=name)
    if key == "kahler_potential":
        if dim % 2:
            raise ValueError("a Kähler potential needs an even number of coordinates")
        pot = _scalar(val, coords, env, name="K")
        return kahler_from_potential(dim // 2, pot, box=box, name=name).g
    raise ValueError(f"unknown metric form {key!r}")


def _box(raw, dim):
    lo, hi = (np.asarray(b, dtype=float) for b in raw)
    if lo.shape != (dim,) or hi.shape != (dim,):
        raise ValueError("box corners must have one entry per coordinate")
    return lo, hi


def _checks(raw):
    out = {}
    for name, spec in (raw or {}).items():
        spec = dict(spec or {})
        expect = spec.pop("expect", "pass")
        if expect not in ("pass", "fail"):
            raise ValueError(f"check {name!r}: expect must be 'pass' or 'fail'")
        tol = float(spec.pop("tol", 1e-8))
        if not tol > 0:
            raise ValueError(f"check {name!r}: tolerance must be positive")
        out[name] = CheckSpec(name, tol, expect == "pass", spec)
    return out


def _J(spec, coords, env):
    if spec is None:
        return None
    if spec == "standard":
        return AlmostComplexField.standard(len(coords))
    if isinstance(spec, dict) and "matrix" in spec:
        return AlmostComplexField(_matrix_fn(spec["matrix"], coords, env), len(coords), name="J")
    raise ValueError(f"bad complex structure specification {spec!r}")


def _vectors(raw, coords, env, fields):
    out = {}
    dim = len(coords)
    for name, spec in (raw or {}).items():
        if isinstance(spec, dict) and "gradient" in spec:
            base = fields[spec["gradient"]]
            scale = _scalar(spec["scale"], coords, env) if "scale" in spec else None
            out[name] = GradientField(base, scale=scale, name=name)
            continue
        comps = [compile_field(str(e), coords, env) for e in spec]
        if len(comps) != dim:
            raise ValueError(f"vector {name!r} needs {dim} components")

        def fn(x, comps=comps):
            vals = [c(x) for c in comps]
            if any(isinstance(v, jm.Jet) for v in vals):
                return jm.stack(vals)
            return np.array(vals, dtype=float)

        out[name] = VectorField(fn, dim, name=name)
    return out


def build_from_config(cfg):
    """Construct a :class:`Scenario` from a configuration dictionary."""
    cfg = copy.deepcopy(cfg)
    sid = cfg.get("id")
    kind = cfg.get("kind")
    if not sid or kind not in KINDS:
        raise ValueError(f"scenario needs an id and a kind in {KINDS}, got {sid!r}, {kind!r}")
    exact_params = {k: _exact(v) for k, v in (cfg.get("params") or {}).items()}
    params = {k: float(v) for k, v in exact_params.items()}
    env = dict(params)
    fields = {}
    warped = None

    if kind == "quasi-soliton":
        w = cfg["warped"]
        bc, fc = list(w["base_coords"]), list(w["fiber_coords"])
        coords = bc + fc
        box = _box(cfg["box"], len(coords))
        bbox = (box[0][: len(bc)], box[1][: len(bc)])
        fbox = (box[0][len(bc):], box[1][len(bc):])
        for name, text in (cfg.get("fields") or {}).items():
            fields[name] = _scalar(text, bc, env, name=name)
            env[name] = fields[name].fn
        ell = _scalar(w["ell"], bc, env, name="ell")
        gb = _metric(w.get("base_metric", "flat"), bc, env, bbox, "base")
        gf = _metric(w.get("fiber_metric", "flat"), fc, env, fbox, "fiber")
        warped = warped_product(gb, gf, ell, name=sid)
        metric = warped.gbar
        fields["ell"] = ell
    else:
        coords = list(cfg["coords"])
        box = _box(cfg["box"], len(coords))
        for name, text in (cfg.get("fields") or {}).items():
            fields[name] = _scalar(text, coords, env, name=name)
            env[name] = fields[name].fn
        metric = _metric(cfg.get("metric", "flat"), coords, env, box, sid)

    J = _J(cfg.get("J"), coords, env)
    if J is None and isinstance(cfg.get("metric"), dict) and "kahler_potential" in cfg["metric"]:
        J = AlmostComplexField.standard(len(coords))
    vectors = _vectors(cfg.get("vectors"), coords, env, fields)
    exc_coords = list(cfg["warped"]["base_coords"]) if warped else coords
    excluded = []
    for text in cfg.get("excluded") or []:
        h = compile_field(str(text), exc_coords, env)
        if warped:
            nb = len(exc_coords)
            excluded.append(lambda x, h=h, nb=nb: h(x[:nb]))
        else:
            excluded.append(h)

    scn = Scenario(
        id=sid,
        kind=kind,
        description=cfg.get("description", ""),
        config=cfg,
        coords=coords,
        box=box,
        metric=metric,
        params=params,
        exact_params=exact_params,
        fields=fields,
        vectors=vectors,
        J=J,
        excluded=excluded,
        checks=_checks(cfg.get("checks")),
        warped=warped,
    )
    lam = params.get("lam", 0.0)
    a = params.get("a")
    zero = ScalarField.constant(0.0, len(coords), name="zero")
    if kind in ("soliton", "kahler", "classifier"):
        scn.soliton = SolitonScenario(metric, fields.get("f", zero), lam, a)
    if kind == "conformal-soliton":
        scn.conformal = ConformalSolitonScenario(metric, fields["tau"], fields.get("f", zero), lam, a, J)
        scn.soliton = scn.conformal.hat()
    if kind == "quasi-soliton":
        prof = None
        if "f_profile" in cfg["warped"]:
            pf = compile_field(str(cfg["warped"]["f_profile"]), ["ell"], params)
            prof = lambda l, pf=pf: pf([l])
        f = fields.get("f", ScalarField.constant(0.0, len(cfg["warped"]["base_coords"])))
        scn.quasi = QuasiSolitonScenario(warped, f, lam, params.get("nu", 0.0), prof)
        scn.soliton = scn.quasi.product()
    if kind == "ricci-hessian":
        scn.rh = RicciHessianScenario(
            metric, fields["sigma"], fields["alpha"], fields["gamma"], J=J,
            mu=fields.get("mu"), lam=lam,
        )
    return scn


# catalog -------------------------------------------------------------------------


def _rho2(names):
    return " + ".join(f"{n}^2" for n in names)


def _cplx_coords(m):
    out = []
    for i in range(1, m + 1):
        out += [f"x{i}", f"y{i}"]
    return out


def gaussian(n=3, lam=1):
    coords = [f"x{i}" for i in range(1, n + 1)]
    return {
        "id": "gaussian" if (n, lam) == (3, 1) else f"gaussian_n{n}_lam{lam}",
        "kind": "soliton",
        "description": f"Gaussian soliton on flat R^{n}, f = lam |x|^2 / 2",
        "coords": coords,
        "box": [[-1.5] * n, [1.5] * n],
        "params": {"lam": lam, "a": n * lam},
        "fields": {"f": f"lam * ({_rho2(coords)}) / 2"},
        "metric": "flat",
        "checks": {
            "soliton": {"tol": 1e-12, "expect": "pass"},
            "soliton_scalar": {"tol": 1e-12, "expect": "pass"},
            "soliton_scalar_fitted": {"tol": 1e-12, "expect": "pass"},
        },
    }


def _cigar(lam, sid, negative=False):
    checks = {
        "soliton": {"tol": 1e-2 if negative else 1e-9, "expect": "fail" if negative else "pass"},
    }
    if not negative:
        checks.update({
            "soliton_scalar_fitted": {"tol": 1e-8, "expect": "pass"},
            "conf_soliton": {"tol": 1e-9, "expect": "pass"},
            "lie_form": {"tol": 1e-9, "expect": "pass"},
            "two_form": {"tol": 1e-9, "expect": "pass"},
            "two_form_scalar_fitted": {"tol": 1e-8, "expect": "pass"},
            "form_equivalence": {"tol": 1e-10, "expect": "pass"},
            "conformal_transport": {"tol": 1e-8, "expect": "pass"},
            "dependence": {"tol": 1e-10, "expect": "pass", "fields": ["tau", "f"]},
            "ricci_hessian_recast": {"tol": 1e-9, "expect": "pass"},
        })
    return {
        "id": sid,
        "kind": "conformal-soliton",
        "description": (
            "cigar (dx^2 + dy^2)/(1 + x^2 + y^2) written as tau^-2 times the flat metric, "
            "f = -log(1 + x^2 + y^2)" + (", with the wrong lam = 1 (negative control)" if negative else "")
        ),
        "coords": ["x", "y"],
        "box": [[-2, -2], [2, 2]],
        "params": {"lam": lam},
        "fields": {"tau": "sqrt(1 + x^2 + y^2)", "f": "-log(1 + x^2 + y^2)"},
        "metric": "flat",
        "checks": checks,
    }


def _cigar_off_shell():
    cfg = _cigar(0, "cigar_off_shell")
    cfg["description"] = "cigar metric with the perturbed potential f + x/2 (off-shell control)"
    cfg["fields"]["f"] = "-log(1 + x^2 + y^2) + x / 2"
    cfg["checks"] = {
        "soliton": {"tol": 1e-6, "expect": "fail"},
        "conf_soliton": {"tol": 1e-6, "expect": "fail"},
        "lie_form": {"tol": 1e-6, "expect": "fail"},
        "two_form": {"tol": 1e-6, "expect": "fail"},
        "two_form_scalar_fitted": {"tol": 1e-6, "expect": "fail"},
        "dependence": {"tol": 1e-6, "expect": "fail", "fields": ["tau", "f"]},
        "form_equivalence": {"tol": 1e-10, "expect": "pass"},
        "conformal_transport": {"tol": 1e-8, "expect": "pass"},
    }
    return cfg


def _hyperbolic_warped(k, nu=0, sid=None):
    fib = [f"u{i}" for i in range(1, k + 1)]
    bad = nu != 0
    checks = {
        "quasi_base": {"tol": 1e-9, "expect": "pass"},
        "quasi_fiber": {"tol": 1e-9, "expect": "pass"},
        "quasi_scalar": {"tol": 1e-9, "expect": "fail" if bad else "pass"},
        "quasi_assembly": {"tol": 1e-8, "expect": "pass"},
        "warped_ricci_blocks": {"tol": 1e-7, "expect": "pass"},
        "warped_hessian_blocks": {"tol": 1e-7, "expect": "pass"},
        "product_soliton": {"tol": 1e-8, "expect": "fail" if bad else "pass"},
        "special_qs": {"tol": 1e-9, "expect": "pass"},
    }
    if bad:
        # nu is not seen by the product metric, which stays a soliton
        checks = {k2: v for k2, v in checks.items() if k2 in ("quasi_scalar", "product_soliton", "quasi_fiber")}
        checks["quasi_fiber"] = {"tol": 1e-9, "expect": "fail"}
        checks["product_soliton"] = {"tol": 1e-8, "expect": "pass"}
    return {
        "id": sid or f"hyperbolic_warped_k{k}",
        "kind": "quasi-soliton",
        "description": f"H^{k + 1} as dt^2 + e^(2t) (flat R^{k}); lam = -{k}, nu = {nu}",
        "box": [[-1] + [-1] * k, [1] + [1] * k],
        "params": {"lam": -k, "nu": nu},
        "fields": {"f": "0"},
        "warped": {
            "base_coords": ["t"],
            "fiber_coords": fib,
            "base_metric": "flat",
            "fiber_metric": "flat",
            "ell": "exp(t)",
            "f_profile": "0",
        },
        "checks": checks,
    }


def _cigar_warped():
    return {
        "id": "cigar_warped",
        "kind": "quasi-soliton",
        "description": "cigar as dr^2 + tanh(r)^2 dth^2 with f = -2 log cosh r = log(1 - ell^2)",
        "box": [[float(np.arctanh(0.1)), 0.0], [float(np.arctanh(0.9)), 6.0]],
        "params": {"lam": 0, "nu": 0},
        "fields": {"f": "-2 * log(cosh(r))"},
        "warped": {
            "base_coords": ["r"],
            "fiber_coords": ["th"],
            "base_metric": "flat",
            "fiber_metric": "flat",
            "ell": "tanh(r)",
            "f_profile": "log(1 - ell^2)",
        },
        "excluded": ["tanh(r)"],
        "checks": {
            "quasi_base": {"tol": 1e-8, "expect": "pass"},
            "quasi_fiber": {"tol": 1e-8, "expect": "pass"},
            "quasi_scalar": {"tol": 1e-8, "expect": "pass"},
            "quasi_assembly": {"tol": 1e-8, "expect": "pass"},
            "warped_ricci_blocks": {"tol": 1e-7, "expect": "pass"},
            "warped_hessian_blocks": {"tol": 1e-7, "expect": "pass"},
            "product_soliton": {"tol": 1e-8, "expect": "pass"},
            "special_qs": {"tol": 1e-8, "expect": "pass"},
        },
    }


_FORMULA_CHECKS = {
    "conf_ricci_formula": {"tol": 1e-8, "expect": "pass"},
    "conf_hessian_formula": {"tol": 1e-8, "expect": "pass"},
    "conf_laplacian_formula": {"tol": 1e-8, "expect": "pass"},
    "conf_hessian_formula_tau": {"tol": 1e-8, "expect": "pass"},
    "form_equivalence": {"tol": 1e-10, "expect": "pass"},
    "conformal_transport": {"tol": 1e-8, "expect": "pass"},
    "lie_vs_hessian": {"tol": 1e-9, "expect": "pass"},
}


def _sphere_chart():
    return {
        "id": "sphere_chart",
        "kind": "conformal-soliton",
        "description": "round sphere chart 4/(1 + |x|^2)^2 flat, as tau^-2 flat with tau = (1 + |x|^2)/2; "
                       "f is arbitrary test data for the transformation formulas",
        "coords": ["x", "y"],
        "box": [[-1.5, -1.5], [1.5, 1.5]],
        "params": {"lam": 1},
        "fields": {"tau": "(1 + x^2 + y^2) / 2", "f": "x * y + sin(x)"},
        "metric": "flat",
        "checks": {
            **_FORMULA_CHECKS,
            "hat_einstein": {"tol": 1e-9, "expect": "pass"},
            "hat_bianchi": {"tol": 1e-9, "expect": "pass"},
        },
    }


def _hyperbolic_halfplane():
    return {
        "id": "hyperbolic_halfplane",
        "kind": "conformal-soliton",
        "description": "hyperbolic half-plane (dx^2 + dy^2)/y^2 as tau^-2 flat with tau = y; lam = -1",
        "coords": ["x", "y"],
        "box": [[-1, 0.5], [1, 2]],
        "params": {"lam": -1},
        "fields": {"tau": "y", "f": "x^2 - y"},
        "metric": "flat",
        "excluded": ["y"],
        "checks": {**_FORMULA_CHECKS, "hat_einstein": {"tol": 1e-9, "expect": "pass"}},
    }


def _sphere_flattened():
    return {
        "id": "sphere_flattened",
        "kind": "conformal-soliton",
        "description": "g the round sphere chart, tau = 2/(1 + |x|^2) so that tau^-2 g is flat; f = 0, lam = 0",
        "coords": ["x", "y"],
        "box": [[-1.5, -1.5], [1.5, 1.5]],
        "params": {"lam": 0, "a": 0},
        "fields": {"tau": "2 / (1 + x^2 + y^2)", "f": "0"},
        "metric": {"conformal": "4 / (1 + x^2 + y^2)^2"},
        "checks": {
            "conf_soliton": {"tol": 1e-8, "expect": "pass"},
            "lie_form": {"tol": 1e-8, "expect": "pass"},
            "two_form": {"tol": 1e-8, "expect": "pass"},
            "soliton": {"tol": 1e-8, "expect": "pass"},
            "two_form_scalar": {"tol": 1e-8, "expect": "pass"},
            **_FORMULA_CHECKS,
        },
    }


_KAHLER_CHECKS = {
    "kahler_nabla_J": {"tol": 1e-9, "expect": "pass"},
    "kahler_g_invariance": {"tol": 1e-9, "expect": "pass"},
    "kahler_ric_invariance": {"tol": 1e-9, "expect": "pass"},
}


def _flat_kahler(m=2):
    coords = _cplx_coords(m)
    return {
        "id": f"flat_kahler_m{m}",
        "kind": "kahler",
        "description": f"flat C^{m} from the potential |z|^2; sigma = |x|^2",
        "coords": coords,
        "box": [[-1] * (2 * m), [1] * (2 * m)],
        "params": {"lam": 0},
        "fields": {"sigma": _rho2(coords), "tau": "x1"},
        "metric": {"kahler_potential": _rho2(coords)},
        "checks": {
            **_KAHLER_CHECKS,
            "einstein": {"tol": 1e-12, "expect": "pass"},
            "dY_interior": {"tol": 1e-9, "expect": "pass"},
            "dY_divergence": {"tol": 1e-9, "expect": "pass"},
            "holomorphy_sigma": {"tol": 1e-9, "expect": "pass"},
            "hermitian_dtau": {"tol": 1e-8, "expect": "fail", "field": "tau"},
        },
    }


def _fubini_study(m=2):
    coords = _cplx_coords(m)
    r2 = _rho2(coords)
    return {
        "id": f"fubini_study_m{m}",
        "kind": "kahler",
        "description": f"Fubini-Study chart on C^{m} from log(1 + |z|^2); Einstein constant 2(m+1) "
                       "in the g = (H + J^T H J)/4 convention; sigma = |z|^2/(1 + |z|^2)",
        "coords": coords,
        "box": [[-1] * (2 * m), [1] * (2 * m)],
        "params": {"lam": 2 * (m + 1)},
        "fields": {"sigma": f"({r2}) / (1 + {r2})"},
        "metric": {"kahler_potential": f"log(1 + {r2})"},
        "checks": {
            **_KAHLER_CHECKS,
            "einstein": {"tol": 1e-7, "expect": "pass"},
            "dY_interior": {"tol": 1e-7, "expect": "pass"},
            "dY_divergence": {"tol": 1e-7, "expect": "pass"},
            "holomorphy_sigma": {"tol": 1e-8, "expect": "pass"},
            "bianchi": {"tol": 1e-9, "expect": "pass"},
        },
    }


def _perturbed_kahler(m=2, eps="1/10"):
    coords = _cplx_coords(m)
    r2 = _rho2(coords)
    return {
        "id": f"perturbed_kahler_m{m}",
        "kind": "kahler",
        "description": f"non-Einstein Kähler metric from |z|^2 + eps |z|^4 on C^{m}",
        "coords": coords,
        "box": [[-1] * (2 * m), [1] * (2 * m)],
        "params": {"lam": 0, "eps": eps},
        "fields": {},
        "metric": {"kahler_potential": f"({r2}) + eps * ({r2})^2"},
        "checks": {**_KAHLER_CHECKS, "einstein_fit": {"tol": 1e-6, "expect": "fail"}},
    }


def _non_kahler():
    coords = _cplx_coords(2)
    return {
        "id": "non_kahler_control",
        "kind": "kahler",
        "description": "diag(1 + x1^2, 1, 1, 1) with the standard J: not Hermitian (negative control)",
        "coords": coords,
        "box": [[0.2, -1, -1, -1], [1, 1, 1, 1]],
        "params": {"lam": 0},
        "fields": {},
        "metric": {"diagonal": ["1 + x1^2", "1", "1", "1"]},
        "J": "standard",
        "checks": {
            "kahler_nabla_J": {"tol": 1e-9, "expect": "fail"},
            "kahler_g_invariance": {"tol": 1e-9, "expect": "fail"},
        },
    }


_RH_CHECKS = {
    "ricci_hessian": {"tol": 1e-10, "expect": "pass"},
    **{f"rels_{k}": {"tol": 1e-10, "expect": "pass"} for k in ("i", "ii", "iii", "iv", "a", "b", "c", "d")},
}


def _flat_rh(m=2):
    coords = _cplx_coords(m)
    r2 = _rho2(coords)
    return {
        "id": f"flat_rh_m{m}",
        "kind": "ricci-hessian",
        "description": f"flat C^{m}: sigma = |x|^2, alpha = sigma, gamma = 2 sigma",
        "coords": coords,
        "box": [[-1] * (2 * m), [1] * (2 * m)],
        "params": {"lam": 0},
        "fields": {"sigma": r2, "alpha": "sigma", "gamma": "2 * sigma"},
        "metric": "flat",
        "J": "standard",
        "excluded": ["sigma"],
        "checks": dict(_RH_CHECKS),
    }


def _flat_rh_wrong_gamma():
    cfg = _flat_rh(2)
    cfg["id"] = "flat_rh_wrong_gamma"
    cfg["description"] = "flat C^2 with gamma = 2 sigma + 1 (negative control)"
    cfg["fields"]["gamma"] = "2 * sigma + 1"
    cfg["checks"] = {
        "ricci_hessian": {"tol": 1e-8, "expect": "fail"},
        "rels_i": {"tol": 1e-8, "expect": "fail"},
        "rels_iv": {"tol": 1e-8, "expect": "fail"},
    }
    return cfg


def _gaussian_rh():
    coords = _cplx_coords(2)
    return {
        "id": "gaussian_rh",
        "kind": "ricci-hessian",
        "description": "Gaussian soliton on C^2 recast with sigma = f, alpha = 1, gamma = lam, mu = 0",
        "coords": coords,
        "box": [[-1] * 4, [1] * 4],
        "params": {"lam": "1/2"},
        "fields": {"sigma": f"lam * ({_rho2(coords)}) / 2", "alpha": "1", "gamma": "lam", "mu": "0"},
        "metric": "flat",
        "J": "standard",
        "excluded": ["sigma"],
        "checks": {**_RH_CHECKS, "gamma_mu": {"tol": 1e-12, "expect": "pass"}},
    }


def _cigar_rh():
    return {
        "id": "cigar_rh",
        "kind": "ricci-hessian",
        "description": "cigar recast as Ric + alpha nabla d sigma = gamma g with sigma = f, alpha = 1, gamma = 0",
        "coords": ["x", "y"],
        "box": [[-2, -2], [2, 2]],
        "params": {"lam": 0},
        "fields": {"sigma": "-log(1 + x^2 + y^2)", "alpha": "1", "gamma": "0"},
        "metric": {"conformal": "1 / (1 + x^2 + y^2)"},
        "checks": {"ricci_hessian": {"tol": 1e-9, "expect": "pass"}},
    }


_CLASSIFIER_CHECKS = ("killing", "conformal_field", "commutator", "holomorphy")


def _rotation_killing():
    return {
        "id": "rotation_killing",
        "kind": "classifier",
        "description": "rotation field J(position) on flat C^2",
        "coords": _cplx_coords(2),
        "box": [[-1] * 4, [1] * 4],
        "metric": "flat",
        "J": "standard",
        "vectors": {"x": ["-y1", "x1", "-y2", "x2"]},
        "checks": {c: {"tol": 1e-12, "expect": "pass"} for c in _CLASSIFIER_CHECKS},
    }


def _euler_conformal():
    return {
        "id": "euler_conformal",
        "kind": "classifier",
        "description": "Euler field sum x_i d/dx_i on flat C^2: conformal and holomorphic, not Killing",
        "coords": _cplx_coords(2),
        "box": [[-1] * 4, [1] * 4],
        "metric": "flat",
        "J": "standard",
        "vectors": {"x": ["x1", "y1", "x2", "y2"]},
        "checks": {
            "killing": {"tol": 1e-8, "expect": "fail"},
            "conformal_field": {"tol": 1e-12, "expect": "pass"},
            "commutator": {"tol": 1e-12, "expect": "pass"},
            "holomorphy": {"tol": 1e-12, "expect": "pass"},
        },
    }


def _product_surface_killing():
    return {
        "id": "product_surface_killing",
        "kind": "classifier",
        "description": "flat C times the surface dr^2 + sinh(r)^2 dth^2, tau = sinh r, f = th; "
                       "w = tau^2 grad f is the rotation field",
        "coords": ["x1", "y1", "r", "th"],
        "box": [[-1, -1, 0.3, 0], [1, 1, 2, 6]],
        "fields": {"tau": "sinh(r)", "f": "th"},
        "metric": {"diagonal": ["1", "1", "1", "sinh(r)^2"]},
        "J": {"matrix": [
            ["0", "-1", "0", "0"],
            ["1", "0", "0", "0"],
            ["0", "0", "0", "-sinh(r)"],
            ["0", "0", "1 / sinh(r)", "0"],
        ]},
        "vectors": {"x": {"gradient": "f", "scale": "tau^2"}},
        "excluded": ["sinh(r)"],
        "checks": {
            "killing": {"tol": 1e-8, "expect": "pass"},
            "conformal_field": {"tol": 1e-8, "expect": "pass"},
            "commutator": {"tol": 1e-8, "expect": "pass"},
            "holomorphy": {"tol": 1e-8, "expect": "pass"},
            "kahler_nabla_J": {"tol": 1e-8, "expect": "pass"},
            "kahler_g_invariance": {"tol": 1e-9, "expect": "pass"},
        },
    }


def _shear_control():
    return {
        "id": "shear_control",
        "kind": "classifier",
        "description": "shear y1 d/dx1 on flat C^2: none of the classifier properties hold",
        "coords": _cplx_coords(2),
        "box": [[-1] * 4, [1] * 4],
        "metric": "flat",
        "J": "standard",
        "vectors": {"x": ["y1", "0", "0", "0"]},
        "checks": {c: {"tol": 1e-3, "expect": "fail"} for c in _CLASSIFIER_CHECKS},
    }


def _span(aligned):
    vec_w = ["-2 * y1 * (1 + x2^2)", "2 * x1 * (1 + x2^2)", "0", "0"] if aligned else ["0", "0", "1 + x1^2", "y2"]
    return {
        "id": "span_aligned" if aligned else "span_orthogonal",
        "kind": "classifier",
        "description": (
            "v = x1 d/dx1 + y1 d/dy1 and w = 2(1 + x2^2) J v span the same complex line"
            if aligned else
            "v in the first complex line, w in the second (control: spans are orthogonal)"
        ),
        "coords": _cplx_coords(2),
        "box": [[0.2, 0.2, -1, -1], [1, 1, 1, 1]],
        "metric": "flat",
        "J": "standard",
        "vectors": {"v": ["x1", "y1", "0", "0"], "w": vec_w},
        "excluded": ["x1^2 + y1^2"],
        "checks": {"span_alignment": {"tol": 1e-12 if aligned else 0.1, "expect": "pass" if aligned else "fail"}},
    }


def _kahler_gaussian():
    coords = _cplx_coords(2)
    return {
        "id": "kahler_gaussian",
        "kind": "conformal-soliton",
        "description": "Gaussian soliton on C^2 viewed as a conformal scenario with tau = 1",
        "coords": coords,
        "box": [[-1] * 4, [1] * 4],
        "params": {"lam": 1, "a": 4},
        "fields": {"tau": "1", "f": f"lam * ({_rho2(coords)}) / 2"},
        "metric": "flat",
        "J": "standard",
        "checks": {
            "conf_soliton": {"tol": 1e-12, "expect": "pass"},
            "hermitian_lie": {"tol": 1e-8, "expect": "pass"},
            "soliton": {"tol": 1e-12, "expect": "pass"},
            "two_form_scalar": {"tol": 1e-12, "expect": "pass"},
        },
    }


RANDOM_SEEDS = ((101, 2), (102, 3), (103, 4), (104, 3), (105, 4))


def random_conformal_config(seed, dim):
    """Seeded smooth off-shell ``(g, tau, f)`` in ``dim`` variables.

    ``g = diag(1 + a_i s_i^2) + b s s^T`` with ``s_i = sin(u_i . x + c_i)`` is
    positive-definite by construction, and ``tau >= 1``.
    """
    rng = np.random.default_rng(seed)
    coords = [f"x{i}" for i in range(1, dim + 1)]

    def lin():
        w = np.round(rng.uniform(-1, 1, dim), 3)
        c = round(float(rng.uniform(-1, 1)), 3)
        return " + ".join(f"({w[i]}) * {coords[i]}" for i in range(dim)) + f" + ({c})"

    s = [f"sin({lin()})" for _ in range(dim)]
    a = np.round(rng.uniform(0.1, 0.5, dim), 3)
    b = round(float(rng.uniform(0.1, 0.4)), 3)
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            term = f"{b} * {s[i]} * {s[j]}"
            if i == j:
                term = f"1 + {a[i]} * {s[i]}^2 + " + term
            row.append(term)
        rows.append(row)
    tau = f"1.5 + 0.5 * sin({lin()}) + 0.3 * cos({lin()})^2"
    f = f"({round(float(rng.uniform(-1, 1)), 3)}) * {coords[0]}^2 + cos({lin()}) + exp(0.3 * sin({lin()}))"
    return {
        "id": f"random_conformal_s{seed}_d{dim}",
        "kind": "conformal-soliton",
        "description": f"seeded random off-shell conformal data (seed {seed}, dimension {dim})",
        "coords": coords,
        "box": [[-1] * dim, [1] * dim],
        "params": {"lam": round(float(rng.uniform(-1, 1)), 3), "a": 0},
        "fields": {"tau": tau, "f": f},
        "metric": {"matrix": rows},
        "checks": {**_FORMULA_CHECKS},
    }


def _catalog_configs():
    cfgs = [
        gaussian(3, 1),
        _cigar(0, "cigar_2d"),
        _cigar(1, "cigar_2d_lam1", negative=True),
        _cigar_off_shell(),
        _cigar_warped(),
        _hyperbolic_warped(2),
        _hyperbolic_warped(3),
        _hyperbolic_warped(2, nu=1, sid="hyperbolic_warped_bad_nu"),
        _sphere_chart(),
        _hyperbolic_halfplane(),
        _sphere_flattened(),
        _flat_kahler(2),
        _fubini_study(2),
        _perturbed_kahler(2),
        _non_kahler(),
        _flat_rh(2),
        _flat_rh(3),
        _flat_rh_wrong_gamma(),
        _gaussian_rh(),
        _cigar_rh(),
        _rotation_killing(),
        _euler_conformal(),
        _product_surface_killing(),
        _shear_control(),
        _span(True),
        _span(False),
        _kahler_gaussian(),
    ]
    cfgs += [random_conformal_config(s, d) for s, d in RANDOM_SEEDS]
    return {c["id"]: c for c in cfgs}


@lru_cache(maxsize=None)
def _configs():
    return _catalog_configs()


def catalog_ids():
    return list(_configs())


def catalog():
    return {k: copy.deepcopy(v) for k, v in _configs().items()}


_FAMILIES = {
    "gaussian": gaussian,
    "hyperbolic_warped": lambda k: _hyperbolic_warped(int(k)),
    "flat_kahler": lambda m: _flat_kahler(int(m)),
    "fubini_study": lambda m: _fubini_study(int(m)),
    "perturbed_kahler": lambda m, eps="1/10": _perturbed_kahler(int(m), str(eps)),
    "flat_rh": lambda m: _flat_rh(int(m)),
}

_CALL = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def _family_config(sid):
    m = _CALL.match(sid)
    if not m or m.group(1) not in _FAMILIES:
        raise UnknownScenarioError(sid)
    args = [a.strip() for a in m.group(2).split(",") if a.strip()]
    try:
        vals = [_family_arg(a) for a in args]
        cfg = _FAMILIES[m.group(1)](*vals)
    except (TypeError, ValueError) as exc:
        raise UnknownScenarioError(f"{sid}: {exc}") from None
    cfg["id"] = f"{m.group(1)}({', '.join(args)})"
    return cfg


def _family_arg(text):
    val = Fraction(text)
    return int(val) if val.denominator == 1 else text


def config(sid):
    """Config of a catalog id, or of a family call such as ``gaussian(4, 2)``."""
    if sid in _configs():
        return copy.deepcopy(_configs()[sid])
    return _family_config(sid)


@lru_cache(maxsize=None)
def build(sid):
    """Cached construction of a catalog scenario by id."""
    return build_from_config(config(sid))


def families():
    return sorted(_FAMILIES)


def to_yaml(cfg):
    return yaml.safe_dump(cfg, sort_keys=True, allow_unicode=True)


def load_configs(text):
    """Scenario configs from YAML: a single mapping or ``scenarios: [...]``."""
    data = yaml.safe_load(text)
    if isinstance(data, dict) and "scenarios" in data:
        data = data["scenarios"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not all(isinstance(d, dict) for d in data):
        raise ValueError("scenario file must hold a mapping or a list of mappings")
    return data
