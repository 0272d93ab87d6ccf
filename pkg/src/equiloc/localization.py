"""Integrals of forms, the fixed-point side of the localization identity, and deformations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .calculus import algebra, exp_form, pullback_values, wedge, wedge_arrays
from .equivariant import (GeneratorKind, closedness_residual, residual_points,
                          special_closed_form)
from .errors import DegenerateComponentError, PreconditionError
from .geometry import _geom
from .quadrature import QuadratureSpec, apply_chunked, gauss_grid, integrate_box
from .zeroset import find_zero_components, normal_data, pfaffian_generic

REL_FLOOR = 1e-30
CLOSED_TOL = 1e-8


def _spec(scenario, spec):
    return spec or getattr(scenario, "quadrature", None) or QuadratureSpec()


def _require_compact(scenario):
    if not getattr(scenario, "compact", True):
        raise PreconditionError(f"scenario {getattr(scenario, 'name', '?')} is not compact; "
                                "integrals are undefined")


def top_density(scenario, form):
    """``points -> top coefficient * orientation sign``."""
    geom = _geom(scenario)
    top = algebra(geom.dim).top
    sign = geom.chart.orientation_sign
    return lambda pts: form.evaluate(pts)[:, top] * sign


def integrate(scenario, form, spec=None, full=False):
    """Integral of the top-degree part of ``form`` over the fundamental domain.

    With ``full`` the :class:`IntegrationResult` (value, error estimate,
    node counts) is returned instead of the bare value.
    """
    _require_compact(scenario)
    geom = _geom(scenario)
    res = integrate_box(top_density(scenario, form), geom.chart.box, _spec(scenario, spec))
    return res if full else res.value


def check_closed(pair, eta, points, tol=CLOSED_TOL):
    r = closedness_residual(pair, eta, points)
    if r > tol:
        raise PreconditionError(f"form {eta.label} is not twisted-closed (residual {r:.3e})")
    return r


def deformed_form(scenario, pair, eta, deformations):
    """``exp(-s_1 dbeta_1) ^ ... ^ exp(-s_r dbeta_r) ^ eta``."""
    out = eta
    for kind, s in reversed(list(deformations)):
        if s == 0:
            continue
        _, dbeta = special_closed_form(scenario, pair, kind, check=False)
        out = wedge(exp_form(dbeta * (-float(s))), out)
    return out


def s_deformation_integral(scenario, pair, eta, kind, s, spec=None, check=True, full=False):
    """``int exp(-s d_{X+iY} beta_kind) ^ eta``; ``kind``/``s`` may be sequences
    to compose several deformations."""
    _require_compact(scenario)
    if isinstance(kind, (list, tuple)):
        deformations = list(zip(kind, s))
    else:
        deformations = [(kind, s)]
    for k, _ in deformations:
        k = GeneratorKind.parse(k)
        if k.needs_commuting and not pair.commuting:
            raise PreconditionError(f"deformation {k.value} requires a commuting pair")
    if check:
        check_closed(pair, eta, residual_points(scenario))
    return integrate(scenario, deformed_form(scenario, pair, eta, deformations), spec, full)


@dataclass
class DecayProfile:
    s: list
    values: list          # signed integrals
    envelope: list        # sup over nodes of all coefficients of the deformed integrand
    rate: float           # fitted exponential rate of the envelope
    r_squared: float
    integral: complex     # the undeformed integral

    def strictly_decreasing(self):
        return all(b < a for a, b in zip(self.envelope, self.envelope[1:]))


def decay_profile(scenario, pair, eta, s_grid, kind=GeneratorKind.XminusIY, spec=None,
                  envelope_nodes=12):
    """Deformed integrals on a scenario without zeros, with a decay envelope.

    ``envelope`` is the largest coefficient modulus (all degrees) of
    ``exp(-s dbeta) ^ eta`` over a Gauss grid; its logarithm is fitted
    linearly in ``s``.
    """
    if find_zero_components(scenario, pair):
        raise PreconditionError("decay needs an empty zero set")
    geom = _geom(scenario)
    check_closed(pair, eta, residual_points(scenario))
    nodes, _ = gauss_grid(geom.chart.box, [envelope_nodes] * geom.dim)
    values, env = [], []
    for s in s_grid:
        form = deformed_form(scenario, pair, eta, [(kind, s)])
        values.append(integrate(scenario, form, spec))
        env.append(float(np.max(np.abs(apply_chunked(form.evaluate, nodes, 4096)))))
    s_arr = np.asarray(s_grid, dtype=float)
    logs = np.log(np.maximum(np.asarray(env), 1e-300))
    if len(s_arr) >= 2:
        slope, icept = np.polyfit(s_arr, logs, 1)
        pred = slope * s_arr + icept
        ss_res = float(np.sum((logs - pred) ** 2))
        ss_tot = float(np.sum((logs - logs.mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    else:
        slope, r2 = float("nan"), float("nan")
    return DecayProfile(list(s_arr), values, env, -float(slope), r2, integrate(scenario, eta, spec))


# -- fixed-point side --------------------------------------------------------------
def _restrict_to_component(component, eta, u):
    """Values ``(P, 2**d)`` of ``eta`` pulled back to the component at ``u``."""
    k, d = component.normal_dim, component.tangent_dim
    recipe = getattr(eta, "recipe", None)
    if recipe is not None:
        local = recipe(component.local)
        vals = local.evaluate(component.local_points(u))
        masks = [m << k for m in range(1 << d)]
        return vals[:, masks]
    if d == 0:
        loc = np.atleast_2d(np.asarray(component.location, dtype=float))
        return np.repeat(eta.evaluate(loc)[:, :1], len(np.atleast_2d(u)), axis=0)
    uj = jets.variables(u, 1)
    emb = component.embedding(uj)
    x0 = np.asarray(emb.value, dtype=float)
    jac = emb.first_derivatives()  # (P, n, d)
    return pullback_values(eta.evaluate(x0), jac)


def _inverse_denominator(component, u, pair):
    """Graded inverse of ``Pf((-mu_X - i mu_Y + R^N) / 2 pi)`` at ``u``: (P, 2**d)."""
    k, d = component.normal_dim, component.tangent_dim
    nd = normal_data(component, u)
    P = nd.mu_X.shape[0]
    size = 1 << d
    A = (-nd.mu_X - 1j * nd.mu_Y) / (2 * np.pi)
    entries = np.zeros((P, k, k, size), dtype=complex)
    entries[..., 0] = A
    for c in range(d):
        for e in range(c + 1, d):
            entries[..., (1 << c) | (1 << e)] = nd.curvature[..., c, e] / (2 * np.pi)
    pf = pfaffian_generic(lambda a, b: entries[:, a, b], k,
                          lambda p, q: wedge_arrays(p, q, d), _unit(P, size))
    p0 = pf[:, 0]
    if np.any(np.abs(p0) < 1e-12):
        raise DegenerateComponentError(
            f"component {component.id}: -mu_X - i mu_Y is singular on the normal bundle")
    nil = pf.copy()
    nil[:, 0] = 0.0
    ratio = -nil / p0[:, None]
    term = _unit(P, size)
    total = term.copy()
    for _ in range(d // 2):
        term = wedge_arrays(term, ratio, d)
        total = total + term
    return total / p0[:, None]


def _unit(P, size):
    one = np.zeros((P, size), dtype=complex)
    one[:, 0] = 1.0
    return one


def component_contribution(component, eta, pair=None, spec=None, full=False):
    d = component.tangent_dim
    top = (1 << d) - 1

    def density(u):
        vals = _restrict_to_component(component, eta, u)
        return wedge_arrays(vals, _inverse_denominator(component, u, pair), d)[:, top]

    if d == 0:
        value = complex(density(np.zeros((1, 0)))[0])
        return (value, 0.0) if full else value
    res = integrate_box(density, component.tangent_box, spec or QuadratureSpec())
    return (res.value, res.error) if full else res.value


def localization_rhs(scenario, pair, components, eta, spec=None, weights=None, full=False):
    """Fixed-point side: sum of per-component contributions in declaration order.

    ``weights`` optionally multiplies each contribution (used for the
    per-component gauge factors of the symplectic check).
    """
    if not pair.commuting:
        raise PreconditionError("the fixed-point formula needs a commuting pair")
    spec = _spec(scenario, spec)
    per, err = [], 0.0
    for i, comp in enumerate(components):
        value, e = component_contribution(comp, eta, pair, spec, full=True)
        if weights is not None:
            value, e = value * weights[i], e * abs(weights[i])
        per.append((comp.id, value))
        err += e
    total = 0j
    for _, v in per:
        total += v
    return (total, per, err) if full else (total, per)


@dataclass
class LocalizationReport:
    lhs: complex
    rhs: complex
    per_component: list
    abs_residual: float
    rel_residual: float
    quadrature_error_estimate: float
    parameters: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def passed(self, tol=None):
        tol = self.parameters.get("tolerance", 1e-6) if tol is None else tol
        return self.rel_residual < tol

    def to_dict(self):
        return {
            "lhs": _cplx(self.lhs),
            "rhs": _cplx(self.rhs),
            "per_component": [{"id": i, "value": _cplx(v)} for i, v in self.per_component],
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "quadrature_error_estimate": self.quadrature_error_estimate,
            "parameters": self.parameters,
            "notes": self.notes,
        }


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def make_report(lhs, rhs, per, err, parameters, notes=None):
    diff = abs(lhs - rhs)
    return LocalizationReport(lhs, rhs, per, diff, diff / max(abs(lhs), REL_FLOOR), err,
                              parameters, notes or {})


def verify_localization(scenario, pair=None, eta=None, tol=1e-6, spec=None, components=None,
                        check=True):
    """Compare ``int_M eta`` with the fixed-point sum."""
    pair = pair or scenario.pair
    if not pair.commuting:
        raise PreconditionError("the fixed-point formula needs a commuting pair")
    spec = _spec(scenario, spec)
    if check:
        check_closed(pair, eta, residual_points(scenario))
    if components is None:
        components = find_zero_components(scenario, pair)
    lhs = integrate(scenario, eta, spec, full=True)
    rhs, per, err = localization_rhs(scenario, pair, components, eta, spec, full=True)
    params = {"tolerance": tol, "nodes": list(lhs.counts), "rtol_quadrature": spec.rtol}
    return make_report(lhs.value, rhs, per, lhs.error + err, params)
