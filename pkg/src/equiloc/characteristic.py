"""Equivariant curvature of the Levi-Civita connection and its characteristic forms.

Endomorphism-valued forms are jets of shape ``(P, m, m, 2**n)`` holding the
matrix of the endomorphism in an oriented orthonormal frame, one form per
entry.  All entries that get multiplied have even degree, so entrywise
wedge products commute and the scalar trace and Pfaffian formulas apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .calculus import FormField, algebra, contract_values, d_values, wedge_values
from .equivariant import pair_of, residual_points, sup_norm, twisted_differential
from .errors import PreconditionError
from .geometry import _geom, christoffel_jet, moment_jet, orthonormal_frame_jet, riemann_jet
from .localization import verify_localization
from .zeroset import find_zero_components, pfaffian_generic


@dataclass
class EndValuedFormField:
    fn: object
    dim: int
    depth: int
    geometry: object
    fields: tuple

    def __call__(self, x):
        return self.fn(x)

    def evaluate(self, points, order=None):
        order = self.depth if order is None else order
        return np.asarray(self.fn(jets.variables(points, order)).value)


def _frame(geom, g):
    return orthonormal_frame_jet(g, geom.chart.orientation_sign)


def curvature_entries(geom, X, Y, x):
    """``R - mu(X) - i mu(Y)`` in the oriented frame; consumes two jet orders."""
    n = geom.dim
    size = algebra(n).size
    R = riemann_jet(geom, x)               # R^i_{jkl}, order K-2
    k = R.order
    g = geom.metric(x).truncate(k)
    E = _frame(geom, g)
    left = jets.einsum("...ia,...ij->...aj", E, g)
    # R_ab(d_k, d_l) = e_a^T g R(d_k, d_l) e_b
    Rab = jets.einsum("...aj,...jbkl->...abkl", left,
                      jets.einsum("...ijkl,...jb->...ibkl", R, E))
    mu = (moment_jet(geom, X, x.truncate(k + 1)) + moment_jet(geom, Y, x.truncate(k + 1)) * 1j)
    mu = mu.truncate(k)
    mu_ab = jets.einsum("...aj,...jb->...ab", left, jets.einsum("...ij,...jb->...ib", mu, E))
    scatter = np.zeros((n, n, size))
    for a in range(n):
        for b in range(a + 1, n):
            scatter[a, b, (1 << a) | (1 << b)] = 1.0
    unit = np.zeros(size)
    unit[0] = 1.0
    two = Rab.reshape(Rab.shape[:-2] + (n * n,)).linear(lambda c: c @ scatter.reshape(n * n, size))
    return two - mu_ab[..., None] * unit


def equivariant_curvature(scenario, pair=None):
    """Endomorphism-valued form ``R - mu(X) - sqrt(-1) mu(Y)``."""
    geom = _geom(scenario)
    if pair is None:
        X, Y = geom.X, geom.Y
    else:
        X, Y = pair.X, pair.Y
    return EndValuedFormField(lambda x: curvature_entries(geom, X, Y, x), geom.dim, 2, geom, (X, Y))


def form_matmul(A, B, n):
    """Matrix product of form-valued matrices ``(..., m, m, 2**n)``."""
    prod = wedge_values(A[..., :, :, None, :], B[..., None, :, :, :], n)
    return prod.sum(axis=-3)


def _recipe_of(builder):
    def recipe(geom):
        return builder(equivariant_curvature(geom))
    return recipe


def char_trace_form(coeffs, Rt):
    """``Tr f(Rt)`` for the polynomial ``f = sum coeffs[j] x**j``."""
    coeffs = list(coeffs)
    n = Rt.dim

    def evaluate(x):
        M = Rt(x)
        m = M.shape[-2]
        eye = np.zeros((m, m, algebra(n).size))
        eye[np.arange(m), np.arange(m), 0] = 1.0
        power = M * 0.0 + eye
        total = None
        for j, c in enumerate(coeffs):
            if j > 0:
                power = form_matmul(power, M, n)
            if c == 0:
                continue
            tr = sum(power[..., a, a, :] for a in range(m)) * c
            total = tr if total is None else total + tr
        if total is None:
            total = M[..., 0, 0, :] * 0.0
        return total

    form = FormField(evaluate, n, Rt.depth, f"Tr f(R~) {coeffs}")
    form.recipe = _recipe_of(lambda R: char_trace_form(coeffs, R))
    return form


def char_pfaffian_form(Rt):
    """``Pf(-Rt)`` with wedge multiplication of the entries."""
    n = Rt.dim
    if n % 2:
        raise ValueError("Pfaffian form needs an even dimension")

    def evaluate(x):
        M = Rt(x) * -1.0
        return pfaffian_generic(lambda a, b: M[..., a, b, :], n,
                                lambda p, q: wedge_values(p, q, n), None)

    form = FormField(evaluate, n, Rt.depth, "Pf(-R~)")
    form.recipe = _recipe_of(char_pfaffian_form)
    return form


def riemannian_euler_form(scenario):
    """``Pf(R / 2 pi)`` built from the plain curvature (no moments)."""
    geom = _geom(scenario)
    zero = type(geom.X)(lambda x: x * 0.0, geom.dim, "0")
    n = geom.dim

    def evaluate(x):
        M = curvature_entries(geom, zero, zero, x) * (1.0 / (2 * np.pi))
        return pfaffian_generic(lambda a, b: M[..., a, b, :], n,
                                lambda p, q: wedge_values(p, q, n), None)

    return FormField(evaluate, n, 2, "Pf(R/2pi)")


# -- Bianchi ------------------------------------------------------------------
def connection_entries(geom, x):
    """Connection 1-forms ``omega_ab(d_k) = <e_a, nabla_k e_b>``; one jet order."""
    n = geom.dim
    g = geom.metric(x)
    E = _frame(geom, g)
    dE = E.gradient()                         # [i, b, k] = d_k E^i_b
    gam = christoffel_jet(geom, x)            # [i, k, j]
    k = gam.order
    nabla = dE.truncate(k) + jets.einsum("...ikj,...jb->...ibk", gam, E.truncate(k))
    left = jets.einsum("...ia,...ij->...aj", E.truncate(k), g.truncate(k))
    om = jets.einsum("...aj,...jbk->...abk", left, nabla)
    scatter = np.zeros((n, algebra(n).size))
    for i in range(n):
        scatter[i, 1 << i] = 1.0
    return om.linear(lambda c: c @ scatter)


def bianchi_residual(scenario, pair=None, points=None):
    """sup |d Rt + [omega, Rt] + i_{X+iY} Rt| over points."""
    geom = _geom(scenario)
    pair = pair or pair_of(scenario)
    n = geom.dim
    pts = residual_points(scenario) if points is None else points
    out = 0.0
    for i in range(0, len(pts), 2048):
        x = jets.variables(pts[i:i + 2048], 3)
        Rt = curvature_entries(geom, pair.X, pair.Y, x)       # order 1
        om = connection_entries(geom, x.truncate(2))           # order 1
        dR = d_values(Rt, n)
        V = pair.X(x.truncate(0)) + pair.Y(x.truncate(0)) * 1j
        Rt0, om0 = Rt.truncate(0), om.truncate(0)
        total = (dR + form_matmul(om0, Rt0, n) - form_matmul(Rt0, om0, n)
                 + contract_values(V[:, None, None, :], Rt0, n))
        out = max(out, float(np.max(np.abs(total.value))))
    return out


def verify_characteristic(scenario, pair=None, which="pfaffian", coeffs=None, tol=1e-6,
                          spec=None):
    """Localization check with a characteristic form as the integrand.

    ``which`` is ``"pfaffian"`` for ``Pf(-Rt)`` or ``"trace"`` with the
    polynomial ``coeffs``.
    """
    pair = pair or pair_of(scenario)
    if not pair.commuting:
        raise PreconditionError("characteristic localization needs a commuting pair")
    components = find_zero_components(scenario, pair)
    if not components:
        raise PreconditionError("characteristic localization needs a nonempty zero set")
    Rt = equivariant_curvature(scenario, pair)
    if which == "pfaffian":
        eta = char_pfaffian_form(Rt)
    elif which == "trace":
        eta = char_trace_form(coeffs if coeffs is not None else [1.0], Rt)
    else:
        raise ValueError(f"unknown characteristic form {which!r}")
    report = verify_localization(scenario, pair, eta, tol, spec, components, check=False)
    report.notes["form"] = eta.label
    return report


def closedness_of(form, pair, points):
    return sup_norm(twisted_differential(pair, form), points)
