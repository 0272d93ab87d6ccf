"""Hamiltonian data, the equivariant symplectic extension and the exact stationary-phase check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .calculus import FormField, exp_form, exterior_derivative, interior_product, wedge, zero_form
from .equivariant import ResidualReport, closedness_residual, pair_of, residual_points, sup_norm
from .errors import PreconditionError
from .localization import (_spec, find_zero_components, integrate, localization_rhs,
                           make_report)


@dataclass
class SymplecticData:
    """``omega`` plus Hamiltonians with ``dH_X = i_X omega``, ``dH_Y = i_Y omega``.

    ``H_X``/``H_Y`` are 0-form fields; either may be ``None`` when no global
    Hamiltonian exists.
    """

    omega: FormField
    H_X: FormField = None
    H_Y: FormField = None

    @property
    def n(self):
        return self.omega.dim // 2

    @property
    def has_hamiltonians(self):
        return self.H_X is not None and self.H_Y is not None

    def shifted(self, cx=0.0, cy=0.0):
        """Same data with constants subtracted from the Hamiltonians."""
        return SymplecticData(self.omega, self.H_X - cx, self.H_Y - cy)


def _sym(scenario, symplectic):
    sym = symplectic if symplectic is not None else getattr(scenario, "symplectic", None)
    if sym is None:
        raise PreconditionError(f"scenario {getattr(scenario, 'name', '?')} has no symplectic form")
    return sym


def hamiltonian_residual(scenario, symplectic=None, pair=None, points=None):
    """sup |dH_X - i_X omega| and sup |dH_Y - i_Y omega|.

    Scenarios without global Hamiltonians produce a report marked
    ``applicable = False`` and no residuals.
    """
    sym = _sym(scenario, symplectic)
    pair = pair or pair_of(scenario)
    pts = residual_points(scenario) if points is None else points
    base = {"d_omega": sup_norm(exterior_derivative(sym.omega), pts)}
    if not sym.has_hamiltonians:
        return ResidualReport("hamiltonian", base, len(pts),
                              {"applicable": False,
                               "reason": "no global Hamiltonian: i_X omega is not exact"})
    res = dict(base)
    res["dHX_minus_iX_omega"] = sup_norm(
        exterior_derivative(sym.H_X) - interior_product(pair.X, sym.omega), pts)
    res["dHY_minus_iY_omega"] = sup_norm(
        exterior_derivative(sym.H_Y) - interior_product(pair.Y, sym.omega), pts)
    return ResidualReport("hamiltonian", res, len(pts), {"applicable": True})


def equivariant_symplectic(symplectic):
    """``omega - H_X - sqrt(-1) H_Y``."""
    if not symplectic.has_hamiltonians:
        raise PreconditionError("equivariant extension needs both Hamiltonians")
    form = symplectic.omega - symplectic.H_X - symplectic.H_Y * 1j
    form.label = "omega-H_X-iH_Y"
    return form


def liouville_form(omega):
    """``omega^n / n!``."""
    n = omega.dim // 2
    out = omega
    for _ in range(n - 1):
        out = wedge(out, omega)
    return out * (1.0 / math.factorial(n))


def dh_integrand(symplectic):
    """``exp(-H_X - i H_Y) omega^n / n!`` assembled directly (no form exponential)."""
    hx, hy = symplectic.H_X, symplectic.H_Y
    weight = zero_form(lambda x: _exp0(hx, hy, x), symplectic.omega.dim,
                       max(hx.depth, hy.depth), "exp(-H)")
    return wedge(weight, liouville_form(symplectic.omega))


def _exp0(hx, hy, x):
    h = hx(x)[..., 0] + hy(x)[..., 0] * 1j
    return jets.exp(h * -1.0)


def hamiltonian_at(symplectic, point):
    p = np.atleast_2d(point)
    return (complex(symplectic.H_X.evaluate(p)[0, 0]), complex(symplectic.H_Y.evaluate(p)[0, 0]))


def _component_anchor(component):
    if component.kind == "point":
        return np.asarray(component.location, dtype=float)
    box = np.asarray(component.tangent_box, dtype=float)
    u = (0.37 * box[:, 0] + 0.63 * box[:, 1])[None, :]
    return np.asarray(component.embedding(jets.variables(u, 0)).value)[0]


def verify_dh(scenario, symplectic=None, pair=None, tol=1e-6, gauge=False, spec=None):
    """Compare ``int exp(-H_X - i H_Y) omega^n/n!`` with the fixed-point sum.

    The left side is the integrand assembled directly; the right side
    localizes ``exp(omega - H_X - i H_Y)``, which keeps each component's
    ``exp(-H)`` factor.  With ``gauge`` both Hamiltonians are first shifted
    to vanish on the lexicographically first component.  The notes also
    record the right side with the ``exp(-H)`` factor dropped on the zero
    set, and whether it matches.
    """
    sym = _sym(scenario, symplectic)
    pair = pair or pair_of(scenario)
    if not pair.commuting:
        raise PreconditionError("the fixed-point formula needs a commuting pair")
    if not sym.has_hamiltonians:
        raise PreconditionError("stationary-phase check needs both Hamiltonians")
    spec = _spec(scenario, spec)
    components = find_zero_components(scenario, pair)
    if not components:
        raise PreconditionError("stationary-phase check needs a nonempty zero set")
    ordered = sorted(components, key=lambda c: tuple(_component_anchor(c)))
    shift = (0.0, 0.0)
    if gauge:
        hx, hy = hamiltonian_at(sym, _component_anchor(ordered[0]))
        shift = (hx.real, hy.real)
        sym = sym.shifted(*shift)
    eta = exp_form(equivariant_symplectic(sym))
    closed = closedness_residual(pair, eta, residual_points(scenario))
    lhs = integrate(scenario, dh_integrand(sym), spec, full=True)
    rhs, per, err = localization_rhs(scenario, pair, components, eta, spec, full=True)

    literal, _ = localization_rhs(scenario, pair, components, exp_form(sym.omega), spec)
    h_values = [hamiltonian_at(sym, _component_anchor(c)) for c in components]
    distinct = max(abs(a[0] - b[0]) + abs(a[1] - b[1]) for a in h_values for b in h_values)
    notes = {
        "reading": "standard: exp(-H) retained per component",
        "gauge": {"applied": bool(gauge), "subtracted": list(shift),
                  "reference_component": ordered[0].id},
        "literal_rhs": [literal.real, literal.imag],
        "literal_rel_residual": abs(lhs.value - literal) / max(abs(lhs.value), 1e-30),
        "literal_matches": bool(abs(lhs.value - literal) < tol * max(abs(lhs.value), 1e-30)),
        "hamiltonian_constant_on_zero_set": bool(distinct < 1e-12),
        "closedness_residual": closed,
    }
    params = {"tolerance": tol, "nodes": list(lhs.counts), "rtol_quadrature": spec.rtol}
    return make_report(lhs.value, rhs, per, lhs.error + err, params, notes)
