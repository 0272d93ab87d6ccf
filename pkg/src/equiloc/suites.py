"""Verification suites: each returns a list of named checks with residuals."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import calculus, characteristic, equivariant, flows, localization, symplectic
from .calculus import constant_form, exp_form
from .equivariant import GeneratorKind, residual_points
from .errors import EquilocError, PreconditionError

SUITES = ("lemmas", "theorem1", "theorem2", "theorem3", "theorem4", "sweep-s", "decay")
DEFAULT_S = (0.0, 0.25, 0.5, 1.0, 2.0)
DECAY_S = (1.0, 2.0, 4.0, 8.0)


@dataclass
class Options:
    seed: int = 0
    points: int = 200
    s_grid: tuple = DEFAULT_S
    tol_operator: float = 1e-8
    tol_generator: float = 1e-9
    tol_integral: float = 1e-6
    trace_coeffs: tuple = (1.0, 0.0, 1.0)


@dataclass
class Check:
    name: str
    paper_ref: str
    status: str
    residual: float = None
    tolerance: float = None
    lhs: complex = None
    rhs: complex = None
    components: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "status": self.status,
            "residual": _num(self.residual),
            "tolerance": self.tolerance,
            "lhs": _cplx(self.lhs),
            "rhs": _cplx(self.rhs),
            "components": [{"id": i, "value": _cplx(v)} for i, v in self.components],
            "detail": _jsonable(self.detail),
        }


def _num(x):
    return None if x is None else float(x)


def _cplx(z):
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return _cplx(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _residual_check(name, tag, residual, tol, **detail):
    return Check(name, tag, "pass" if residual < tol else "fail", residual, tol, detail=detail)


def _report_check(name, tag, report, tol):
    status = "pass" if report.rel_residual < tol else "fail"
    detail = {"abs_residual": report.abs_residual,
              "quadrature_error_estimate": report.quadrature_error_estimate,
              "parameters": report.parameters}
    detail.update(report.notes)
    return Check(name, tag, status, report.rel_residual, tol, report.lhs, report.rhs,
                 list(report.per_component), detail)


def guarded(name, tag, fn):
    """Run ``fn`` and turn package errors into a failing or skipped check."""
    try:
        out = fn()
    except PreconditionError as exc:
        return [Check(name, tag, "skipped", detail={"reason": str(exc)})]
    except EquilocError as exc:
        return [Check(name, tag, "error", detail={"error": type(exc).__name__, "message": str(exc)})]
    return out if isinstance(out, list) else [out]


def default_form(scenario):
    """A twisted-closed integrand suited to the scenario."""
    sym = scenario.symplectic
    if sym is not None and sym.has_hamiltonians:
        return exp_form(symplectic.equivariant_symplectic(sym))
    if scenario.test_forms:
        return next(iter(scenario.test_forms.values()))
    return constant_form(scenario.dim, 1.0)


def admissible_kinds(pair):
    return [k for k in GeneratorKind if pair.commuting or not k.needs_commuting]


# -- suites ---------------------------------------------------------------------------
def operator_checks(scenario, opts):
    pair = scenario.pair
    pts = residual_points(scenario, opts.points, opts.seed, include_nodes=False)
    rng = np.random.default_rng(opts.seed)
    periods = scenario.geometry.chart.box[:, 1] - scenario.geometry.chart.box[:, 0]
    forms = [calculus.random_form(scenario.dim, rng, periods=periods) for _ in range(3)]
    dd = max(equivariant.sup_norm(calculus.exterior_derivative(calculus.exterior_derivative(f)), pts)
             for f in forms)
    flow_err = 0.0
    for f in forms[:2]:
        for V in (pair.X, pair.Y):
            a = flows.flow_lie_derivative(f, V, pts)
            b = calculus.lie_derivative(V, f).evaluate(pts)
            flow_err = max(flow_err, float(np.max(np.abs(a - b))))
    sq = max(equivariant.twisted_square_residual(pair, f, pts) for f in forms)
    return [
        _residual_check("d_squared_zero", "claim:d-squared", dd, opts.tol_operator),
        _residual_check("cartan_vs_flow", "claim:lie-derivative", flow_err, opts.tol_operator),
        _residual_check("twisted_square", "claim:twisted-square", sq, opts.tol_operator),
    ]


def identity_checks(scenario, opts):
    pair = scenario.pair
    pts = residual_points(scenario, opts.points, opts.seed)
    out = operator_checks(scenario, opts)
    for which, tag in (("killing", "claim:killing"), ("dual_lie_sum", "claim:dual-lie-sum"),
                       ("commutator", "claim:commuting-killing")):
        rep = equivariant.lemma_residual(scenario, pair, which, points=pts)
        out.append(_residual_check(which, tag, rep.max, opts.tol_operator, **rep.residuals))
    if pair.commuting:
        rep = equivariant.lemma_residual(scenario, pair, "dual_lie_each", points=pts)
        out.append(_residual_check("dual_lie_each", "claim:dual-lie-each", rep.max,
                                   opts.tol_operator, **rep.residuals))
    aux = scenario.auxiliary_forms
    if "xi" in aux and "eta" in aux:
        rep = equivariant.lemma_residual(scenario, pair, "cauchy_riemann", aux["xi"], aux["eta"], pts)
        out.append(_residual_check("cauchy_riemann_split", "claim:cauchy-riemann-split", rep.max,
                                   opts.tol_operator, **rep.residuals))
    for name, form in scenario.test_forms.items():
        r = equivariant.closedness_residual(pair, form, pts)
        out.append(_residual_check(f"test_form_closed[{name}]", "claim:closed-example", r,
                                   opts.tol_operator))
    for kind in admissible_kinds(pair):
        _, dbeta = equivariant.special_closed_form(scenario, pair, kind, points=pts)
        tag = "claim:generator-closed-commuting" if kind.needs_commuting else "claim:generator-closed"
        out.append(_residual_check(f"generator_closed[{kind.value}]", tag,
                                   dbeta.closedness_residual, opts.tol_generator))
    if scenario.symplectic is not None:
        rep = symplectic.hamiltonian_residual(scenario, points=pts)
        if rep.notes.get("applicable"):
            out.append(_residual_check("hamiltonian", "claim:hamiltonian", rep.max,
                                       scenario.tolerances["hamiltonian"], **rep.residuals))
            eq = symplectic.equivariant_symplectic(scenario.symplectic)
            out.append(_residual_check("equivariant_symplectic_closed", "claim:symplectic-closed",
                                       equivariant.closedness_residual(pair, eq, pts),
                                       opts.tol_generator))
        else:
            out.append(Check("hamiltonian", "claim:hamiltonian", "skipped",
                             detail=rep.notes))
    return out


def _needs_zeros(scenario):
    if not scenario.compact:
        raise PreconditionError(f"{scenario.name} is not compact")
    comps = localization.find_zero_components(scenario, scenario.pair)
    if not comps:
        raise PreconditionError("empty zero set: the fixed-point side is empty, see the decay suite")
    return comps


def fixed_point_checks(scenario, opts):
    def run():
        comps = _needs_zeros(scenario)
        out = []
        eta = default_form(scenario)
        rep = localization.verify_localization(scenario, scenario.pair, eta, opts.tol_integral,
                                               components=comps)
        out.append(_report_check("fixed_point_formula", "claim:fixed-point-formula", rep,
                                 opts.tol_integral))
        one = constant_form(scenario.dim, 1.0)
        rhs, per = localization.localization_rhs(scenario, scenario.pair, comps, one)
        out.append(Check("unit_form_cancellation", "claim:fixed-point-formula",
                         "pass" if abs(rhs) < 1e-10 else "fail", abs(rhs), 1e-10,
                         localization.integrate(scenario, one), rhs, per))
        return out
    return guarded("fixed_point_formula", "claim:fixed-point-formula", run)


def trace_checks(scenario, opts):
    def run():
        _needs_zeros(scenario)
        rep = characteristic.verify_characteristic(scenario, which="trace",
                                                   coeffs=list(opts.trace_coeffs),
                                                   tol=opts.tol_integral)
        # both sides may vanish identically; compare absolutely then
        resid = rep.abs_residual if abs(rep.lhs) < 1e-9 else rep.rel_residual
        chk = _report_check("trace_form_localization", "claim:trace-localization", rep,
                            opts.tol_integral)
        chk.residual = resid
        chk.status = "pass" if resid < opts.tol_integral else "fail"
        pts = residual_points(scenario, opts.points, opts.seed)
        Rt = characteristic.equivariant_curvature(scenario)
        closed = equivariant.closedness_residual(
            scenario.pair, characteristic.char_trace_form(opts.trace_coeffs, Rt), pts)
        return [chk, _residual_check("trace_form_closed", "claim:trace-closed", closed,
                                     opts.tol_operator)]
    return guarded("trace_form_localization", "claim:trace-localization", run)


def pfaffian_checks(scenario, opts):
    def run():
        _needs_zeros(scenario)
        rep = characteristic.verify_characteristic(scenario, which="pfaffian", tol=opts.tol_integral)
        out = [_report_check("pfaffian_localization", "claim:pfaffian-localization", rep,
                             opts.tol_integral)]
        euler = localization.integrate(scenario, characteristic.riemannian_euler_form(scenario))
        chi = scenario.config.get("euler_characteristic", _euler_characteristic(scenario))
        if chi is not None:
            r = abs(euler - chi) / abs(chi)
            out.append(Check("gauss_bonnet", "claim:gauss-bonnet-calibration",
                             "pass" if r < opts.tol_integral else "fail", r, opts.tol_integral,
                             euler, chi))
        pts = residual_points(scenario, opts.points, opts.seed)
        out.append(_residual_check("equivariant_bianchi", "claim:equivariant-bianchi",
                                   characteristic.bianchi_residual(scenario, points=pts),
                                   opts.tol_operator))
        return out
    return guarded("pfaffian_localization", "claim:pfaffian-localization", run)


def _euler_characteristic(scenario):
    kind = scenario.config.get("kind")
    return {"sphere2": 2.0, "product": 4.0, "torus2": 0.0}.get(kind)


def dh_closed_form(scenario):
    """Closed-form stationary-phase value where one is known, else ``None``."""
    kind = scenario.config.get("kind")
    p = scenario.params
    if p.get("eps", 0.0) != 0.0:
        return None

    def sphere(a):
        return 2 * np.pi * (np.exp(a) - np.exp(-a)) / a

    if kind == "sphere2":
        c = p["c"] if scenario.name == "sphere2_two_rotations" else 0.0
        return sphere(p["t"] * (1 + 1j * c))
    if scenario.name == "product_s2xs2":
        return sphere(p["t1"]) * sphere(1j * p["t2"])
    if scenario.name == "product_positive_dim_M0":
        return 4 * np.pi * sphere(p["t"] * (1 + 1j * p["c"]))
    return None


def stationary_phase_checks(scenario, opts):
    def run():
        _needs_zeros(scenario)
        if scenario.symplectic is None or not scenario.symplectic.has_hamiltonians:
            raise PreconditionError("no Hamiltonian data")
        rep = symplectic.verify_dh(scenario, tol=opts.tol_integral)
        out = [_report_check("stationary_phase", "claim:stationary-phase", rep, opts.tol_integral)]
        closed = dh_closed_form(scenario)
        if closed is not None:
            r = abs(rep.lhs - closed) / abs(closed)
            out.append(Check("stationary_phase_closed_form", "claim:stationary-phase",
                             "pass" if r < opts.tol_integral else "fail", r, opts.tol_integral,
                             rep.lhs, closed))
        gauged = symplectic.verify_dh(scenario, tol=opts.tol_integral, gauge=True)
        out.append(_report_check("stationary_phase_gauged", "claim:stationary-phase", gauged,
                                 opts.tol_integral))
        eta = exp_form(symplectic.equivariant_symplectic(scenario.symplectic))
        s_val = localization.s_deformation_integral(scenario, scenario.pair, eta,
                                                    GeneratorKind.XplusIY, 1.0)
        r = abs(s_val - rep.lhs) / abs(rep.lhs)
        out.append(Check("stationary_phase_vs_deformation", "claim:s-invariance",
                         "pass" if r < opts.tol_integral else "fail", r, opts.tol_integral,
                         rep.lhs, s_val))
        return out
    return guarded("stationary_phase", "claim:stationary-phase", run)


def sweep_checks(scenario, opts):
    def run():
        if not scenario.compact:
            raise PreconditionError(f"{scenario.name} is not compact")
        eta = default_form(scenario)
        out = []
        base = None
        for kind in admissible_kinds(scenario.pair):
            vals = [localization.s_deformation_integral(scenario, scenario.pair, eta, kind, s,
                                                        check=False)
                    for s in opts.s_grid]
            base = vals[0] if base is None else base
            mean = np.mean(np.abs(vals))
            spread = max(abs(v - vals[0]) for v in vals)
            r = spread / mean if mean > 1e-12 else spread
            out.append(Check(f"s_invariance[{kind.value}]", "claim:s-invariance",
                             "pass" if r < opts.tol_integral else "fail", r, opts.tol_integral,
                             vals[0], vals[-1], detail={"s": list(opts.s_grid), "values": vals}))
        kinds = admissible_kinds(scenario.pair)
        pairs = [(kinds[0], kinds[-1]), (kinds[-1], kinds[0])]
        for k1, k2 in pairs:
            composed = localization.s_deformation_integral(scenario, scenario.pair, eta,
                                                           [k1, k2], [1.0, 0.5], check=False)
            single = localization.s_deformation_integral(scenario, scenario.pair, eta, k2, 0.5,
                                                         check=False)
            scale = max(abs(single), 1e-12)
            r = abs(composed - single) / scale if abs(single) > 1e-12 else abs(composed - single)
            out.append(Check(f"composed_deformation[{k1.value}+{k2.value}]",
                             "claim:composed-deformation",
                             "pass" if r < opts.tol_integral else "fail", r, opts.tol_integral,
                             composed, single))
        return out
    return guarded("s_invariance", "claim:s-invariance", run)


def decay_checks(scenario, opts, s_grid=DECAY_S):
    def run():
        if not scenario.compact:
            raise PreconditionError(f"{scenario.name} is not compact")
        forms = dict(scenario.test_forms) or {"default": default_form(scenario)}
        out = []
        for name, eta in forms.items():
            prof = localization.decay_profile(scenario, scenario.pair, eta, s_grid)
            worst = max([abs(prof.integral)] + [abs(v) for v in prof.values])
            out.append(Check(f"vanishing_integral[{name}]", "claim:empty-zero-set-vanishing",
                             "pass" if worst < 1e-8 else "fail", worst, 1e-8, prof.integral, 0.0,
                             detail={"s": prof.s, "values": prof.values}))
            ok = prof.strictly_decreasing() and prof.r_squared > 0.99
            out.append(Check(f"decay_envelope[{name}]", "claim:empty-zero-set-decay",
                             "pass" if ok else "fail", 1.0 - prof.r_squared, 0.01,
                             detail={"s": prof.s, "envelope": prof.envelope, "rate": prof.rate,
                                     "r_squared": prof.r_squared,
                                     "strictly_decreasing": prof.strictly_decreasing()}))
        return out
    return guarded("decay", "claim:empty-zero-set-decay", run)


RUNNERS = {
    "lemmas": lambda sc, o: guarded("lemmas", "claim:lemmas", lambda: identity_checks(sc, o)),
    "theorem1": fixed_point_checks,
    "theorem2": trace_checks,
    "theorem3": pfaffian_checks,
    "theorem4": stationary_phase_checks,
    "sweep-s": sweep_checks,
    "decay": decay_checks,
}


def run_suites(scenario, suite, opts=None):
    """Run one suite (or ``"all"``); returns ``(checks, timings)``."""
    opts = opts or Options()
    names = SUITES if suite == "all" else (suite,)
    checks, timings = [], {}
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        if name == "theorem1" and scenario.compact and not scenario.components:
            checks.append(Check("fixed_point_formula", "claim:fixed-point-formula", "skipped",
                                detail={"reason": "empty zero set: routed to the decay suite"}))
            continue
        if name == "decay" and scenario.components:
            checks.append(Check("decay", "claim:empty-zero-set-decay", "skipped",
                                detail={"reason": "zero set is nonempty"}))
            continue
        t0 = time.perf_counter()
        checks.extend(RUNNERS[name](scenario, opts))
        timings[name] = time.perf_counter() - t0
    return checks, timings
