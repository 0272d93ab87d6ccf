"""The twisted differential ``d + i_X + sqrt(-1) i_Y`` and its closed generators."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .calculus import (FormField, algebra, exterior_derivative, interior_product,
                       lie_derivative)
from .errors import PreconditionError
from .geometry import VectorField, _geom, bracket_at, killing_residual
from .quadrature import gauss_grid


@dataclass(frozen=True)
class TwistPair:
    X: VectorField
    Y: VectorField
    commuting: bool = True

    @property
    def complex_field(self):
        """``X + sqrt(-1) Y`` as one complex vector field."""
        X, Y = self.X, self.Y
        return VectorField(lambda x: X(x) + Y(x) * 1j, X.dim, f"{X.label}+i{Y.label}")

    @property
    def dim(self):
        return self.X.dim


class GeneratorKind(enum.Enum):
    XplusIY = "XplusIY"
    YminusIX = "YminusIX"
    XminusIY = "XminusIY"
    YplusIX = "YplusIX"

    @property
    def needs_commuting(self):
        return self in (GeneratorKind.XminusIY, GeneratorKind.YplusIX)

    @classmethod
    def parse(cls, kind):
        return kind if isinstance(kind, cls) else cls(kind)


# (coefficient of X', coefficient of Y')
_GENERATOR_COEFFS = {
    GeneratorKind.XplusIY: (1.0, 1j),
    GeneratorKind.YminusIX: (-1j, 1.0),
    GeneratorKind.XminusIY: (1.0, -1j),
    GeneratorKind.YplusIX: (1j, 1.0),
}


def pair_of(obj):
    pair = getattr(obj, "pair", None)
    if pair is not None:
        return pair
    geom = _geom(obj)
    return TwistPair(geom.X, geom.Y)


def twisted_differential(pair, form):
    """``d_{X+iY} = d + i_X + sqrt(-1) i_Y``."""
    return exterior_derivative(form) + interior_product(pair.complex_field, form)


def one_form(components, dim, depth=0, label="alpha"):
    """1-form from a component function ``x -> jet (..., dim)``."""
    scatter = np.zeros((dim, algebra(dim).size))
    for i in range(dim):
        scatter[i, 1 << i] = 1.0
    return FormField(lambda x: components(x).linear(lambda c: c @ scatter), dim, depth, label)


def dual_one_form(scenario, V):
    """Metric dual ``V' = g(V, .)``."""
    geom = _geom(scenario)

    def comps(x):
        return jets.einsum("...ij,...j->...i", geom.metric(x), V(x))

    return one_form(comps, geom.dim, 0, f"{V.label}'")


def generator(scenario, pair, kind):
    kind = GeneratorKind.parse(kind)
    if kind.needs_commuting and not pair.commuting:
        raise PreconditionError(f"generator {kind.value} requires a commuting pair")
    a, b = _GENERATOR_COEFFS[kind]
    return dual_one_form(scenario, pair.X) * a + dual_one_form(scenario, pair.Y) * b


def special_closed_form(scenario, pair, kind, check=True, points=None):
    """Return ``(beta, d_{X+iY} beta)`` for one of the four generators.

    With ``check`` the twisted closedness of ``d_{X+iY} beta`` is measured
    and stored on the returned form as ``closedness_residual``.
    """
    beta = generator(scenario, pair, kind)
    dbeta = twisted_differential(pair, beta)
    dbeta.label = f"d_V[{GeneratorKind.parse(kind).value}]"
    if check:
        pts = residual_points(scenario) if points is None else points
        dbeta.closedness_residual = sup_norm(twisted_differential(pair, dbeta), pts)
    return beta, dbeta


# -- residual sampling --------------------------------------------------------------
def residual_points(scenario, count=200, seed=0, include_nodes=True):
    """Seeded interior sample plus a coarse Gauss grid over the chart."""
    geom = _geom(scenario)
    rng = np.random.default_rng(seed)
    pts = [geom.chart.sample(rng, count)]
    spec = getattr(scenario, "quadrature", None)
    if include_nodes and spec is not None and getattr(scenario, "compact", True):
        nodes, _ = gauss_grid(geom.chart.box, [spec.residual_nodes] * geom.dim)
        pts.append(nodes)
    return np.concatenate(pts, axis=0)


def sup_norm(form, points, chunk=4096):
    out = 0.0
    for i in range(0, len(points), chunk):
        vals = form.evaluate(points[i:i + chunk])
        out = max(out, float(np.max(np.abs(vals))))
    return out


@dataclass
class ResidualReport:
    which: str
    residuals: dict
    points: int
    notes: dict = field(default_factory=dict)

    @property
    def max(self):
        return max(self.residuals.values()) if self.residuals else 0.0

    def passed(self, tol):
        return self.max < tol


_ALIASES = {
    "L1": "cauchy_riemann",
    "L2": "dual_lie_sum",
    "L4": "commutator",
    "L5": "dual_lie_each",
    "Killing": "killing",
}


def lemma_residual(scenario, pair, which, xi=None, eta=None, points=None):
    """Residuals of the pointwise identities attached to a Killing pair.

    ``which`` names the identity (aliases in parentheses):

    * ``cauchy_riemann`` (L1): for caller-supplied equal-degree ``xi, eta``,
      the four conditions ``d xi``, ``d eta``, ``i_X xi - i_Y eta``,
      ``i_X eta + i_Y xi``, plus the twisted closedness of ``xi + i eta``.
    * ``dual_lie_sum`` (L2): ``L_X Y' + L_Y X'``.
    * ``commutator`` (L4): ``[X, Y]``.
    * ``dual_lie_each`` (L5, commuting pairs only): ``L_X Y'`` and ``L_Y X'``.
    * ``killing``: ``L_X g`` and ``L_Y g``.
    """
    name = _ALIASES.get(which, which)
    pts = residual_points(scenario) if points is None else points
    X, Y = pair.X, pair.Y
    if name == "cauchy_riemann":
        if xi is None or eta is None:
            raise PreconditionError("the Cauchy-Riemann split needs both xi and eta")
        res = {
            "d_xi": sup_norm(exterior_derivative(xi), pts),
            "d_eta": sup_norm(exterior_derivative(eta), pts),
            "iX_xi_minus_iY_eta": sup_norm(interior_product(X, xi) - interior_product(Y, eta), pts),
            "iX_eta_plus_iY_xi": sup_norm(interior_product(X, eta) + interior_product(Y, xi), pts),
            "twisted_closed": sup_norm(twisted_differential(pair, xi + eta * 1j), pts),
        }
    elif name == "dual_lie_sum":
        form = lie_derivative(X, dual_one_form(scenario, Y)) + lie_derivative(Y, dual_one_form(scenario, X))
        res = {"LX_Yp_plus_LY_Xp": sup_norm(form, pts)}
    elif name == "commutator":
        res = {"bracket": float(np.max(np.abs(bracket_at(scenario, X, Y, pts))))}
    elif name == "dual_lie_each":
        if not pair.commuting:
            raise PreconditionError("L_X Y' = L_Y X' = 0 needs a commuting pair")
        res = {"LX_Yp": sup_norm(lie_derivative(X, dual_one_form(scenario, Y)), pts),
               "LY_Xp": sup_norm(lie_derivative(Y, dual_one_form(scenario, X)), pts)}
    elif name == "killing":
        res = {"LX_g": killing_residual(scenario, X, pts),
               "LY_g": killing_residual(scenario, Y, pts)}
    else:
        raise ValueError(f"unknown identity {which!r}")
    return ResidualReport(name, res, len(pts))


def twisted_square_residual(pair, form, points):
    """sup |d_V d_V form - (L_X + i L_Y) form|."""
    lhs = twisted_differential(pair, twisted_differential(pair, form))
    rhs = lie_derivative(pair.X, form) + lie_derivative(pair.Y, form) * 1j
    return sup_norm(lhs - rhs, points)


def closedness_residual(pair, form, points):
    return sup_norm(twisted_differential(pair, form), points)
