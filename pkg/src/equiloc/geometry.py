"""Charts, metrics, Levi-Civita connection and curvature.

Conventions (fixed here, used everywhere):

* ``christoffel[..., i, j, k]`` is ``Gamma^i_{jk}`` with ``nabla_j d_k = Gamma^i_{jk} d_i``.
* ``R(U, V) = [nabla_U, nabla_V] - nabla_[U,V]`` and the mixed array
  ``R^i_{jkl}`` is the ``i`` component of ``R(d_k, d_l) d_j``.  The covariant
  array lowers the first index.  The round unit sphere then has
  ``R_{theta phi theta phi} = sin^2 theta`` and sectional curvature +1.
* ``nabla[..., i, j] = (nabla_j V)^i``; the moment endomorphism of a field is
  ``mu(V) = -nabla V``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .errors import DomainError, ScenarioError, SingularityError

SINGULAR_BAND = 1e-3


@dataclass(frozen=True)
class Chart:
    """A coordinate box with optional periodic axes and singular loci.

    ``excluded`` lists ``(axis, value)`` pairs: hyperplanes where the
    coordinates degenerate (sphere poles).  Random sampling keeps a band of
    ``SINGULAR_BAND`` away from them.
    """

    id: str
    coords: tuple
    domain: tuple
    periodic: tuple = ()
    excluded: tuple = ()
    orientation_sign: int = 1

    def __post_init__(self):
        dom = np.asarray(self.domain, dtype=float)
        if dom.shape != (len(self.coords), 2):
            raise ScenarioError(f"chart {self.id}: domain must have one interval per coordinate")
        if np.any(dom[:, 1] <= dom[:, 0]):
            raise ScenarioError(f"chart {self.id}: domain has non-positive volume")
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * len(self.coords))
        if self.orientation_sign not in (1, -1):
            raise ScenarioError("orientation_sign must be +1 or -1")

    @property
    def dim(self):
        return len(self.coords)

    @property
    def box(self):
        return np.asarray(self.domain, dtype=float)

    def check_points(self, points, allow_singular=False):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.dim:
            raise DomainError(f"chart {self.id} expects {self.dim} coordinates")
        lo, hi = self.box[:, 0], self.box[:, 1]
        tol = 1e-12 * (hi - lo)
        bad = np.any((points < lo - tol) | (points > hi + tol), axis=-1)
        if np.any(bad):
            raise DomainError(f"point {points[bad][0]} outside chart {self.id}")
        if not allow_singular:
            for axis, value in self.excluded:
                if np.any(np.abs(points[:, axis] - value) < 1e-14):
                    raise SingularityError(
                        f"point on singular locus {self.coords[axis]}={value} of chart {self.id}")
        return points

    def sample(self, rng, count):
        """Uniform interior points avoiding the singular band."""
        lo, hi = self.box[:, 0].copy(), self.box[:, 1].copy()
        for axis, value in self.excluded:
            if abs(value - lo[axis]) < SINGULAR_BAND:
                lo[axis] = value + SINGULAR_BAND
            if abs(value - hi[axis]) < SINGULAR_BAND:
                hi[axis] = value - SINGULAR_BAND
        pts = lo + (hi - lo) * rng.random((count, self.dim))
        for axis, value in self.excluded:
            close = np.abs(pts[:, axis] - value) < SINGULAR_BAND
            pts[close, axis] = value + SINGULAR_BAND
        return pts

    def wrap(self, points):
        points = np.array(points, dtype=float)
        lo, hi = self.box[:, 0], self.box[:, 1]
        for i, per in enumerate(self.periodic):
            if per:
                points[..., i] = lo[i] + np.mod(points[..., i] - lo[i], hi[i] - lo[i])
            else:
                points[..., i] = np.clip(points[..., i], lo[i], hi[i])
        return points


@dataclass(frozen=True)
class MetricField:
    """Riemannian metric ``g(x)``: jet ``(P, n)`` -> jet ``(P, n, n)``."""

    fn: Callable

    def __call__(self, x):
        g = self.fn(x)
        return 0.5 * (g + g.swapaxes(-1, -2))


@dataclass(frozen=True)
class VectorField:
    """Components of a (possibly complex) vector field in chart coordinates."""

    fn: Callable
    dim: int
    label: str = "V"

    def __call__(self, x):
        return self.fn(x)

    def evaluate(self, points):
        x = jets.variables(points, 0)
        return np.asarray(self(x).value)

    def __add__(self, other):
        return VectorField(lambda x: self(x) + other(x), self.dim,
                           f"({self.label}+{other.label})")

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        return VectorField(lambda x: self(x) * c, self.dim, f"{c}*{self.label}")

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    @staticmethod
    def zero(dim, label="0"):
        return VectorField(lambda x: x * 0.0, dim, label)

    @staticmethod
    def coordinate(dim, axis, label=None):
        e = np.zeros(dim)
        e[axis] = 1.0
        return VectorField(lambda x: x * 0.0 + e, dim, label or f"d{axis}")


@dataclass(frozen=True)
class ChartGeometry:
    """Metric and the two Killing fields expressed in one chart."""

    chart: Chart
    metric: MetricField
    X: VectorField
    Y: VectorField
    symplectic: object = None
    extras: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.chart.dim


def _geom(obj):
    return getattr(obj, "geometry", obj)


# -- jet-level kernels ---------------------------------------------------------
def inverse_jet(a):
    """Inverse of a batch of matrices given as a jet, by a terminating series."""
    a0 = np.asarray(a.value)
    inv0 = np.linalg.inv(a0)
    if a.order == 0:
        return jets.Jet(inv0[None], a.n, 0)
    h = a - a0
    # (A0 + H)^-1 = sum_k (-A0^-1 H)^k A0^-1, H nilpotent in the jet algebra
    step = jets.einsum("...ij,...jk->...ik", -inv0, h)
    out = jets.constant(inv0, a)
    term = out
    for _ in range(a.order):
        term = jets.einsum("...ij,...jk->...ik", step, term)
        out = out + term
    return out


def christoffel_jet(geom, x):
    """``Gamma^i_{jk}`` as a jet of order ``x.order - 1``."""
    g = geom.metric(x)
    dg = g.gradient()  # dg[..., a, b, c] = d_c g_ab
    ginv = inverse_jet(g.truncate(dg.order))
    # lower[l, j, k] = (d_j g_lk + d_k g_lj - d_l g_jk) / 2
    lower = 0.5 * (_perm(dg, "lkj->ljk") + dg - _perm(dg, "jkl->ljk"))
    return jets.einsum("...il,...ljk->...ijk", ginv, lower)


def _perm(j, spec):
    src, dst = spec.split("->")
    axes = [src.index(c) for c in dst]
    k = len(axes)
    nd = j.ndim
    full = list(range(nd - k)) + [nd - k + a for a in axes]
    return j.linear(lambda c: np.transpose(c, [0] + [a + 1 for a in full]))


def riemann_jet(geom, x):
    """Mixed curvature ``R^i_{jkl}`` as a jet of order ``x.order - 2``."""
    gam = christoffel_jet(geom, x)
    dgam = gam.gradient()  # [..., i, l, j, k] = d_k Gamma^i_{lj}
    gam = gam.truncate(dgam.order)
    # d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
    t1 = _perm(dgam, "iljk->ijkl")
    t2 = _perm(dgam, "ikjl->ijkl")
    quad = jets.einsum("...ikm,...mlj->...ijkl", gam, gam)
    return t1 - t2 + quad - _perm(quad, "ijlk->ijkl")


def nabla_jet(geom, field, x):
    """``(nabla_j V)^i`` as a jet of order ``x.order - 1``."""
    v = field(x)
    dv = v.gradient()  # [..., i, j] = d_j V^i
    gam = christoffel_jet(geom, x)
    return dv + jets.einsum("...ijk,...k->...ij", gam, v.truncate(dv.order))


def moment_jet(geom, field, x):
    """Coordinate matrix of ``mu(V) = -nabla V``."""
    return -nabla_jet(geom, field, x)


def orthonormal_frame_jet(g, orientation=1, order=None):
    """Gram-Schmidt frame: columns ``E[..., :, a]`` with ``E^T g E = 1``.

    ``order`` optionally lists the coordinate axes in the sequence they are
    orthonormalized.  The frame has the orientation of the coordinate basis
    permuted by ``order``, times ``orientation``.
    """
    n = g.shape[-1]
    order = list(range(n)) if order is None else list(order)
    basis = np.eye(n)
    vecs = []
    for a in order:
        v = jets.constant(np.broadcast_to(basis[a], g.shape[:-1]), g)
        for e in vecs:
            ip = _inner(g, v, e)
            v = v - e * ip[..., None]
        norm = jets.sqrt(_inner(g, v, v))
        vecs.append(v / norm[..., None])
    cols = [None] * n
    for slot, vec in enumerate(vecs):
        cols[slot] = vec
    if orientation == -1:
        cols[0] = -cols[0]
    return jets.stack(cols, axis=-1)


def _inner(g, u, w):
    return jets.einsum("...i,...i->...", u, jets.einsum("...ij,...j->...i", g, w))


def frame_change(E, g, A):
    """Matrix of the endomorphism ``A`` (coordinate basis) in frame ``E``."""
    Einv = jets.einsum("...ji,...jk->...ik", E, g)
    return jets.einsum("...ij,...jk->...ik", Einv, jets.einsum("...ij,...jk->...ik", A, E))


# -- point-level operations -----------------------------------------------------
def _eval(obj, points, kernel, order, allow_singular=False):
    geom = _geom(obj)
    pts = geom.chart.check_points(points, allow_singular=allow_singular)
    x = jets.variables(pts, order)
    return kernel(geom, x).value


def metric_at(obj, point):
    """Symmetric positive-definite metric matrix at a chart point."""
    geom = _geom(obj)
    single = np.ndim(point) == 1
    g = np.real(_eval(obj, point, lambda gm, x: gm.metric(x), 0, allow_singular=True))
    w = np.linalg.eigvalsh(g)
    if np.any(w <= 0):
        raise ScenarioError(f"metric of {geom.chart.id} not positive definite at {point}")
    return g[0] if single else g


def christoffel_at(obj, point):
    single = np.ndim(point) == 1
    out = _eval(obj, point, christoffel_jet, 1)
    return out[0] if single else out


def riemann_at(obj, point, lowered=True):
    """Curvature array; covariant ``R_{ijkl}`` by default, else ``R^i_{jkl}``."""
    single = np.ndim(point) == 1
    geom = _geom(obj)

    def kernel(gm, x):
        r = riemann_jet(gm, x)
        if not lowered:
            return r
        g = gm.metric(x).truncate(r.order)
        return jets.einsum("...im,...mjkl->...ijkl", g, r)

    out = _eval(geom, point, kernel, 2)
    return out[0] if single else out


def nabla_at(obj, field, point):
    """Matrix ``(nabla_j V)^i`` at a point."""
    single = np.ndim(point) == 1
    out = _eval(obj, point, lambda gm, x: nabla_jet(gm, field, x), 1)
    return out[0] if single else out


def covariant_derivative(obj, field, direction, point):
    """``nabla_v V`` at a point, for a direction ``v`` in chart coordinates."""
    return nabla_at(obj, field, point) @ np.asarray(direction)


def metric_compatibility_residual(obj, points):
    """max |d_k g_ij - Gamma^l_{ki} g_lj - Gamma^l_{kj} g_il| over points."""
    geom = _geom(obj)
    pts = geom.chart.check_points(points)
    x = jets.variables(pts, 1)
    g = geom.metric(x)
    dg = g.first_derivatives()  # [..., i, j, k] = d_k g_ij
    gam = christoffel_jet(geom, x).value
    g0 = g.value
    corr = np.einsum("...lki,...lj->...ijk", gam, g0) + np.einsum("...lkj,...il->...ijk", gam, g0)
    return float(np.max(np.abs(dg - corr)))


def killing_skew_residual(obj, field, points, rng=None):
    """max |<nabla_v V, w> + <v, nabla_w V>| over the given points and random v, w."""
    geom = _geom(obj)
    rng = np.random.default_rng(0) if rng is None else rng
    nab = nabla_at(geom, field, points)
    g = np.array([metric_at(geom, p) for p in np.atleast_2d(points)])
    v = rng.standard_normal((len(g), geom.dim))
    w = rng.standard_normal((len(g), geom.dim))
    lhs = np.einsum("pi,pij,pj->p", np.einsum("pij,pj->pi", nab, v), g, w)
    rhs = np.einsum("pi,pij,pj->p", v, g, np.einsum("pij,pj->pi", nab, w))
    return float(np.max(np.abs(lhs + rhs)))


def killing_residual(obj, field, points):
    """max |L_V g| (components) over points."""
    geom = _geom(obj)
    pts = geom.chart.check_points(points, allow_singular=True)
    x = jets.variables(pts, 1)
    g = geom.metric(x)
    v = field(x)
    dg = g.first_derivatives()
    dv = v.first_derivatives()  # [..., k, i] = d_i V^k
    g0, v0 = g.value, v.value
    lie = (np.einsum("...k,...ijk->...ij", v0, dg)
           + np.einsum("...kj,...ki->...ij", g0, dv)
           + np.einsum("...ik,...kj->...ij", g0, dv))
    return float(np.max(np.abs(lie)))


def bracket_at(obj, A, B, points):
    """Lie bracket ``[A, B]^i = A^j d_j B^i - B^j d_j A^i``."""
    geom = _geom(obj)
    pts = geom.chart.check_points(points, allow_singular=True)
    x = jets.variables(pts, 1)
    a, b = A(x), B(x)
    da, db = a.first_derivatives(), b.first_derivatives()
    return np.einsum("...j,...ij->...i", a.value, db) - np.einsum("...j,...ij->...i", b.value, da)
