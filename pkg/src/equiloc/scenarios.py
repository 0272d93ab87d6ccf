"""Scenario configs (JSON), the built-in catalog, construction and validation.

A config is a plain dict.  Coefficients are strings in the grammar of
:mod:`equiloc.expr` over the chart coordinates and the ``params`` block.
``test_forms`` must be twisted-closed; ``auxiliary_forms`` are unchecked.
Form coefficients are keyed by comma-separated axis indices (``""`` for the
function part) and may be a string or a ``[real, imag]`` pair.

Fields are given directly as vector fields on the manifold (``X = t d/dphi``
on the spheres, coordinate translations on the torus); no group-action
sign convention enters any check.

Fixed components carry their own local chart with coordinates ordered
normal-first; the component is where the normal coordinates vanish.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import expr, jets
from .calculus import FormField, form_from_components, zero_form
from .equivariant import TwistPair, closedness_residual, residual_points
from .errors import ScenarioError
from .geometry import (Chart, ChartGeometry, MetricField, VectorField, bracket_at,
                       killing_residual)
from .quadrature import QuadratureSpec
from .symplectic import SymplecticData, hamiltonian_residual
from .zeroset import FixedComponent, normal_data

SCHEMA = 1
PI = math.pi
DEFAULT_TOLERANCES = {"operator": 1e-8, "integral": 1e-6, "generator": 1e-9, "hamiltonian": 1e-9}


@dataclass
class Scenario:
    name: str
    config: dict
    geometry: ChartGeometry
    pair: TwistPair
    compact: bool
    components: list
    symplectic: SymplecticData = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    embed: object = None
    test_forms: dict = field(default_factory=dict)
    auxiliary_forms: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    validation: dict = field(default_factory=dict)
    zero_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.geometry.dim

    @property
    def params(self):
        return dict(self.config.get("params", {}))


# -- construction -----------------------------------------------------------------
def _chart(spec, default_id):
    return Chart(
        id=spec.get("id", default_id),
        coords=tuple(spec["coords"]),
        domain=tuple(tuple(float(v) for v in iv) for iv in spec["domain"]),
        periodic=tuple(bool(p) for p in spec.get("periodic", [False] * len(spec["coords"]))),
        excluded=tuple((int(a), float(v)) for a, v in spec.get("excluded", [])),
        orientation_sign=int(spec.get("orientation_sign", 1)),
    )


def _geometry(spec, params, default_id):
    chart = _chart(spec["chart"], default_id)
    co = chart.coords
    metric = MetricField(expr.compile_matrix(spec["metric"], co, params))
    X = VectorField(expr.compile_vector(spec["fields"]["X"], co, params), chart.dim, "X")
    Y = VectorField(expr.compile_vector(spec["fields"]["Y"], co, params), chart.dim, "Y")
    return ChartGeometry(chart, metric, X, Y)


def _coefficient(value, coords, params):
    if isinstance(value, (list, tuple)):
        re = expr.compile_scalar(value[0], coords, params)
        im = expr.compile_scalar(value[1], coords, params)
        return lambda x: re(x) + im(x) * 1j
    return expr.compile_scalar(value, coords, params)


def _indices(key):
    key = str(key).strip()
    return tuple(int(k) for k in key.split(",")) if key else ()


def build_form(spec, coords, params, label="form"):
    dim = len(coords)
    comps = {_indices(k): _coefficient(v, coords, params) for k, v in spec.items()}
    return form_from_components(dim, comps, label)


def _scalar_form(text, coords, params, label):
    if text is None:
        return None
    fn = _coefficient(text, coords, params)
    return zero_form(fn, len(coords), 0, label)


def _component(spec, params, fundamental_coords):
    local = _geometry(spec, params, spec["id"])
    k = int(spec["normal_dim"])
    tangent_coords = local.chart.coords[k:]
    box = local.chart.box[k:]
    emb = None
    if spec.get("embedding"):
        emb = expr.compile_vector(spec["embedding"], tangent_coords, params)
    locus_fn = expr.compile_vector(spec["locus"], fundamental_coords, params)
    return FixedComponent(
        id=spec["id"],
        local=local,
        normal_dim=k,
        location=tuple(spec["location"]) if spec.get("location") is not None else None,
        embedding=emb,
        tangent_box=tuple(map(tuple, box)),
        tangent_periodic=tuple(local.chart.periodic[k:]),
        locus=lambda pts: np.asarray(locus_fn(np.asarray(pts, dtype=float))),
        spec=spec,
    )


def from_config(config, validate=True):
    """Build (and by default validate) a :class:`Scenario` from a config dict."""
    cfg = copy.deepcopy(config)
    try:
        params = {k: float(v) for k, v in cfg.get("params", {}).items()}
        geom = _geometry(cfg, params, cfg["name"])
        co = geom.chart.coords
        if geom.dim % 2:
            raise ScenarioError(f"scenario {cfg['name']}: total dimension {geom.dim} is odd")
        pair = TwistPair(geom.X, geom.Y, bool(cfg.get("commuting", True)))
        comps = [_component(c, params, co) for c in cfg.get("components", [])]
        sym = None
        if cfg.get("symplectic"):
            s = cfg["symplectic"]
            sym = SymplecticData(build_form(s["omega"], co, params, "omega"),
                                 _scalar_form(s.get("H_X"), co, params, "H_X"),
                                 _scalar_form(s.get("H_Y"), co, params, "H_Y"))
        embed = None
        if cfg.get("embedding"):
            efn = expr.compile_vector(cfg["embedding"], co, params)
            embed = lambda pts: np.asarray(efn(np.asarray(pts, dtype=float)))
        forms = {name: build_form(f, co, params, name)
                 for name, f in cfg.get("test_forms", {}).items()}
        aux = {name: build_form(f, co, params, name)
               for name, f in cfg.get("auxiliary_forms", {}).items()}
        quad = QuadratureSpec(**cfg.get("quadrature", {}))
    except KeyError as exc:
        raise ScenarioError(f"config is missing field {exc}") from None
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(cfg.get("tolerances", {}))
    scen = Scenario(cfg["name"], cfg, geom, pair, bool(cfg.get("compact", True)), comps, sym,
                    quad, embed, forms, aux, tol)
    if validate:
        scen.validation = validate_scenario(scen)
    return scen


def validate_scenario(scen):
    """Check the scenario invariants; raise naming the first violated one."""
    tol = scen.tolerances
    pts = residual_points(scen, count=100)
    out = {}
    g = np.real(scen.geometry.metric(jets.variables(pts, 0)).value)
    eig = np.linalg.eigvalsh(g)
    out["metric_min_eigenvalue"] = float(eig.min())
    if eig.min() <= 0:
        raise ScenarioError(f"{scen.name}: metric not positive definite (min eigenvalue {eig.min():.3e})")
    for label, V in (("X", scen.pair.X), ("Y", scen.pair.Y)):
        r = killing_residual(scen, V, pts)
        out[f"killing_{label}"] = r
        if r > tol["operator"]:
            raise ScenarioError(f"{scen.name}: field {label} is not Killing (|L_V g| = {r:.3e})")
    br = float(np.max(np.abs(bracket_at(scen, scen.pair.X, scen.pair.Y, pts))))
    out["commutator"] = br
    if scen.pair.commuting and br > tol["operator"]:
        raise ScenarioError(f"{scen.name}: commuting claimed but commutator residual |[X,Y]| = {br:.3e}")
    if scen.symplectic is not None:
        rep = hamiltonian_residual(scen, scen.symplectic, scen.pair, pts)
        out.update({f"symplectic_{k}": v for k, v in rep.residuals.items()})
        if rep.max > tol["hamiltonian"]:
            raise ScenarioError(f"{scen.name}: symplectic data inconsistent {rep.residuals}")
    for comp in scen.components:
        _validate_component(scen, comp, out)
    for name, form in scen.test_forms.items():
        r = closedness_residual(scen.pair, form, pts)
        out[f"closed_{name}"] = r
        if r > tol["operator"]:
            raise ScenarioError(f"{scen.name}: test form {name} is not twisted-closed ({r:.3e})")
    return out


def _validate_component(scen, comp, out):
    tol = scen.tolerances["operator"]
    local = comp.local
    rng = np.random.default_rng(7)
    pts = local.chart.sample(rng, 40)
    for label, V in (("X", local.X), ("Y", local.Y)):
        r = killing_residual(local, V, pts)
        if r > tol:
            raise ScenarioError(f"{scen.name}/{comp.id}: local field {label} not Killing ({r:.3e})")
    if comp.tangent_dim:
        box = np.asarray(comp.tangent_box)
        u = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.uniform(0.05, 0.95, (5, comp.tangent_dim))
    else:
        u = np.zeros((1, 0))
    nd = normal_data(comp, u)
    out[f"component_{comp.id}_field_norm"] = nd.field_norm
    if nd.field_norm > 1e-12:
        raise ScenarioError(f"{scen.name}/{comp.id}: fields do not vanish on the component "
                            f"(|X|^2+|Y|^2 = {nd.field_norm:.3e})")
    if comp.location is not None:
        loc = np.atleast_2d(comp.location)
        v = float(np.max(np.abs(comp.locus(loc))))
        if v > 1e-12:
            raise ScenarioError(f"{scen.name}/{comp.id}: location not on the declared locus ({v:.3e})")


def load_scenario(text, validate=True):
    """Parse a JSON config document and build the scenario."""
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ScenarioError("config must be a JSON object")
    return from_config(cfg, validate)


def serialize(scenario):
    cfg = dict(scenario.config)
    cfg.setdefault("schema_version", SCHEMA)
    return json.dumps(cfg, indent=2, sort_keys=True)


# -- catalog ----------------------------------------------------------------------
def _pole_metric(x, y):
    # sphere-of-revolution metric in (sin(theta)cos(phi), sin(theta)sin(phi)) coordinates
    r2 = f"({x}**2+{y}**2)"
    diag = f"(1+eps*{r2})**2"
    off = f"((1-2*eps)+(2*eps-eps**2)*{r2}+eps**2*{r2}**2)/(1-{r2})"
    return [[f"{diag}+{x}*{x}*{off}", f"{x}*{y}*{off}"],
            [f"{x}*{y}*{off}", f"{diag}+{y}*{y}*{off}"]]


def _rotation(x, y, speed):
    return [f"-({speed})*{y}", f"({speed})*{x}"]


def _profile(th):
    return f"(sin({th})*(1+eps*sin({th})**2))"


def _hamiltonian(th, speed):
    return f"({speed})*(cos({th})+eps*(cos({th})-cos({th})**3/3))"


def _block(*blocks):
    n = sum(len(b) for b in blocks)
    out = [["0"] * n for _ in range(n)]
    o = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[o + i][o + j] = v
        o += len(b)
    return out


def _sphere_axes(th, ph):
    return {"coords": [th, ph], "domain": [[0.0, PI], [0.0, 2 * PI]], "periodic": [False, True]}


def _sphere(name, t, c, eps, two_fields):
    yspeed = "c*t" if two_fields else "0"
    comps = []
    for cid, theta, sign in (("N", 0.0, 1), ("S", PI, -1)):
        comps.append({
            "id": cid, "normal_dim": 2, "location": [theta, 0.0],
            "locus": ["1-cos(theta)" if sign > 0 else "1+cos(theta)"],
            "chart": {"id": f"{name}:{cid}", "coords": ["x", "y"],
                      "domain": [[-0.5, 0.5], [-0.5, 0.5]], "orientation_sign": sign},
            "metric": _pole_metric("x", "y"),
            "fields": {"X": _rotation("x", "y", "t"), "Y": _rotation("x", "y", yspeed)},
        })
    return {
        "schema_version": SCHEMA, "name": name, "kind": "sphere2", "compact": True,
        "params": {"t": t, "c": c, "eps": eps},
        "chart": dict(_sphere_axes("theta", "phi"), id=name, excluded=[[0, 0.0], [0, PI]]),
        "metric": [["1", "0"], ["0", f"{_profile('theta')}**2"]],
        "fields": {"X": ["0", "t"], "Y": ["0", yspeed]},
        "commuting": True,
        "embedding": ["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"],
        "symplectic": {"omega": {"0,1": _profile("theta")},
                       "H_X": _hamiltonian("theta", "t"), "H_Y": _hamiltonian("theta", yspeed)},
        "components": comps,
        "quadrature": {"base_nodes": 8, "max_nodes": 512, "chunk": 8192, "residual_nodes": 8},
    }


def sphere2_rotation(t=1.0, eps=0.0):
    """Round (or eps-perturbed) S^2 rotated about its axis at speed t; Y = 0."""
    return _sphere("sphere2_rotation", t, 0.0, eps, False)


def sphere2_two_rotations(t=1.0, c=2.0, eps=0.0):
    """S^2 with X the rotation at speed t and Y = c X."""
    return _sphere("sphere2_two_rotations", t, c, eps, True)


def torus2_translations(c=None):
    """Flat torus; ``Y = d/dv`` by default, ``Y = c d/du`` when ``c`` is given."""
    along_u = c is not None
    forms = {"one": {"": "1"}, "dv_minus_i_du": {"1": "1", "0": ["0", "-1"]}}
    if along_u:
        # f(v) - f'(v)/(1+ic) du^dv with f = cos v + sin(2v)/2
        fp = "(-sin(v)+cos(2*v))"
        forms = {"one": {"": "1"},
                 "profile": {"": "cos(v)+sin(2*v)/2",
                             "0,1": [f"-{fp}/(1+c**2)", f"c*{fp}/(1+c**2)"]}}
    return {
        "schema_version": SCHEMA, "name": "torus2_translations", "kind": "torus2", "compact": True,
        "params": {"c": float(c) if along_u else 0.0},
        "chart": {"id": "torus2_translations", "coords": ["u", "v"],
                  "domain": [[0.0, 2 * PI], [0.0, 2 * PI]], "periodic": [True, True]},
        "metric": [["1", "0"], ["0", "1"]],
        "fields": {"X": ["1", "0"], "Y": ["c", "0"] if along_u else ["0", "1"]},
        "commuting": True,
        "embedding": ["cos(u)", "sin(u)", "cos(v)", "sin(v)"],
        "symplectic": {"omega": {"0,1": "1"}, "H_X": None, "H_Y": None},
        "components": [],
        "test_forms": forms,
        "quadrature": {"base_nodes": 8, "max_nodes": 512, "chunk": 8192, "residual_nodes": 8},
    }


def plane_cr():
    """Euclidean plane (noncompact) with a Cauchy-Riemann test pair."""
    # test forms from f = z**2 = (x**2 - y**2) + i (2xy): xi = d Re f, eta = d Im f
    return {
        "schema_version": SCHEMA, "name": "plane_cr", "kind": "plane", "compact": False,
        "params": {},
        "chart": {"id": "plane_cr", "coords": ["x", "y"], "domain": [[-2.0, 2.0], [-2.0, 2.0]]},
        "metric": [["1", "0"], ["0", "1"]],
        "fields": {"X": ["1", "0"], "Y": ["0", "1"]},
        "commuting": True,
        "components": [],
        "test_forms": {"df": {"0": ["2*x", "2*y"], "1": ["-2*y", "2*x"]}},
        "auxiliary_forms": {"xi": {"0": "2*x", "1": "-2*y"},
                            "eta": {"0": "2*y", "1": "2*x"}},
        "quadrature": {"residual_nodes": 6},
    }


def _product_base(name, params, xs, ys):
    return {
        "schema_version": SCHEMA, "name": name, "kind": "product", "compact": True,
        "params": params,
        "chart": {"id": name, "coords": ["theta1", "phi1", "theta2", "phi2"],
                  "domain": [[0.0, PI], [0.0, 2 * PI], [0.0, PI], [0.0, 2 * PI]],
                  "periodic": [False, True, False, True],
                  "excluded": [[0, 0.0], [0, PI], [2, 0.0], [2, PI]]},
        "metric": _block([["1", "0"], ["0", f"{_profile('theta1')}**2"]],
                         [["1", "0"], ["0", f"{_profile('theta2')}**2"]]),
        "fields": {"X": xs, "Y": ys},
        "commuting": True,
        "embedding": ["sin(theta1)*cos(phi1)", "sin(theta1)*sin(phi1)", "cos(theta1)",
                      "sin(theta2)*cos(phi2)", "sin(theta2)*sin(phi2)", "cos(theta2)"],
        "quadrature": {"base_nodes": 8, "max_nodes": 64, "chunk": 1024, "residual_nodes": 5,
                       "max_points": 300_000},
    }


def product_s2xs2(t1=1.0, t2=0.5):
    """S^2 x S^2 with X rotating the first factor and Y the second."""
    cfg = _product_base("product_s2xs2", {"t1": t1, "t2": t2, "eps": 0.0},
                        ["0", "t1", "0", "0"], ["0", "0", "0", "t2"])
    comps = []
    for c1, th1, s1 in (("N", 0.0, 1), ("S", PI, -1)):
        for c2, th2, s2 in (("N", 0.0, 1), ("S", PI, -1)):
            cid = f"{c1}{c2}"
            comps.append({
                "id": cid, "normal_dim": 4, "location": [th1, 0.0, th2, 0.0],
                "locus": [f"1{'-' if s1 > 0 else '+'}cos(theta1)",
                          f"1{'-' if s2 > 0 else '+'}cos(theta2)"],
                "chart": {"id": f"product_s2xs2:{cid}", "coords": ["x1", "y1", "x2", "y2"],
                          "domain": [[-0.5, 0.5]] * 4, "orientation_sign": s1 * s2},
                "metric": _block(_pole_metric("x1", "y1"), _pole_metric("x2", "y2")),
                "fields": {"X": _rotation("x1", "y1", "t1") + ["0", "0"],
                           "Y": ["0", "0"] + _rotation("x2", "y2", "t2")},
            })
    cfg["components"] = comps
    cfg["symplectic"] = {"omega": {"0,1": _profile("theta1"), "2,3": _profile("theta2")},
                         "H_X": _hamiltonian("theta1", "t1"), "H_Y": _hamiltonian("theta2", "t2")}
    return cfg


def product_positive_dim_M0(t=1.0, c=0.5):
    """S^2 x S^2 with both fields rotating the first factor: zeros {N, S} x S^2."""
    cfg = _product_base("product_positive_dim_M0", {"t": t, "c": c, "eps": 0.0},
                        ["0", "t", "0", "0"], ["0", "c*t", "0", "0"])
    comps = []
    for cid, th1, sign in (("N", 0.0, 1), ("S", PI, -1)):
        comps.append({
            "id": f"{cid}xS2", "normal_dim": 2,
            "locus": ["1-cos(theta1)" if sign > 0 else "1+cos(theta1)"],
            "embedding": [repr(th1), "0", "theta2", "phi2"],
            "chart": {"id": f"product_positive_dim_M0:{cid}",
                      "coords": ["x", "y", "theta2", "phi2"],
                      "domain": [[-0.5, 0.5], [-0.5, 0.5], [0.0, PI], [0.0, 2 * PI]],
                      "periodic": [False, False, False, True],
                      "excluded": [[2, 0.0], [2, PI]], "orientation_sign": sign},
            "metric": _block(_pole_metric("x", "y"),
                             [["1", "0"], ["0", f"{_profile('theta2')}**2"]]),
            "fields": {"X": _rotation("x", "y", "t") + ["0", "0"],
                       "Y": _rotation("x", "y", "c*t") + ["0", "0"]},
        })
    cfg["components"] = comps
    cfg["symplectic"] = {"omega": {"0,1": _profile("theta1"), "2,3": _profile("theta2")},
                         "H_X": _hamiltonian("theta1", "t"), "H_Y": _hamiltonian("theta1", "c*t")}
    return cfg


CATALOG = {
    "plane_cr": plane_cr,
    "torus2_translations": torus2_translations,
    "sphere2_rotation": sphere2_rotation,
    "sphere2_two_rotations": sphere2_two_rotations,
    "product_s2xs2": product_s2xs2,
    "product_positive_dim_M0": product_positive_dim_M0,
}


def builtin_config(name, **params):
    if name not in CATALOG:
        raise ScenarioError(f"scenario-not-found: {name!r}")
    return CATALOG[name](**params)


def builtin(name, validate=True, **params):
    """Construct a validated built-in scenario; keyword arguments override parameters."""
    return from_config(builtin_config(name, **params), validate)
