"""Zero sets of ``X - sqrt(-1) Y``, moment endomorphisms, normal data and Pfaffians."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import jets
from .errors import DegenerateComponentError, ScenarioError, ScenarioInconsistencyError
from .geometry import (ChartGeometry, _geom, frame_change, metric_at, moment_jet,
                       orthonormal_frame_jet, riemann_jet)

ZERO_TOL = 1e-14


# -- Pfaffians -------------------------------------------------------------------
@lru_cache(maxsize=None)
def _pf_terms(n):
    """Signed perfect matchings of ``range(n)`` as ``(sign, ((i, j), ...))``."""
    if n == 0:
        return ((1, ()),)
    out = []
    for j in range(1, n):
        sign = 1 if j % 2 == 1 else -1
        rest = [k for k in range(1, n) if k != j]
        for s, pairs in _pf_terms(n - 2):
            mapped = tuple((rest[a], rest[b]) for a, b in pairs)
            out.append((sign * s, ((0, j),) + mapped))
    return tuple(out)


def pfaffian_generic(entry, n, mul, one):
    """Pfaffian of an ``n x n`` skew array given by ``entry(i, j)``.

    ``mul`` multiplies entries (any commutative ring); ``one`` is the unit
    returned for ``n == 0``.
    """
    if n % 2:
        raise ValueError(f"Pfaffian needs an even size, got {n}")
    if n == 0:
        return one
    total = None
    for sign, pairs in _pf_terms(n):
        term = entry(*pairs[0])
        for i, j in pairs[1:]:
            term = mul(term, entry(i, j))
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total


def _parlett_reid(a):
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def pfaffian(A):
    """Pfaffian of a skew matrix or a batch ``(..., 2k, 2k)`` of them."""
    A = np.asarray(A)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError("Pfaffian needs square matrices")
    n = A.shape[-1]
    if n % 2:
        raise ValueError(f"Pfaffian needs an even size, got {n}")
    if n == 0:
        return np.ones(A.shape[:-2], dtype=complex)[()] if A.ndim > 2 else 1.0 + 0j
    if n <= 8:
        # first-row expansion, vectorized over the batch
        return pfaffian_generic(lambda i, j: A[..., i, j], n, lambda p, q: p * q, 1.0)
    flat = A.reshape((-1, n, n))
    out = np.array([_parlett_reid(m) for m in flat])
    return out.reshape(A.shape[:-2])[()] if A.ndim > 2 else out[0]


def skew_part_residual(A):
    return float(np.max(np.abs(A + np.swapaxes(A, -1, -2)))) if np.size(A) else 0.0


# -- moment endomorphisms ------------------------------------------------------------
def moment_endomorphism(scenario, V, point):
    """Matrix of ``v -> -nabla_v V`` in the Gram-Schmidt orthonormal frame."""
    geom = _geom(scenario)
    single = np.ndim(point) == 1
    pts = geom.chart.check_points(point)
    x = jets.variables(pts, 1)
    mu = moment_jet(geom, V, x)
    g = geom.metric(x).truncate(0)
    E = orthonormal_frame_jet(g, geom.chart.orientation_sign)
    out = np.real_if_close(frame_change(E, g, mu.truncate(0)).value)
    return out[0] if single else out


def jacobowitz_membership(scenario, pair, point, tol=1e-8):
    """Whether ``<X, Y> = 0`` and ``|X| = |Y|`` hold at ``point`` within ``tol``."""
    geom = _geom(scenario)
    g = metric_at(geom, point)
    x = np.real(pair.X.evaluate(np.atleast_2d(point))[0])
    y = np.real(pair.Y.evaluate(np.atleast_2d(point))[0])
    nx, ny = np.sqrt(x @ g @ x), np.sqrt(y @ g @ y)
    return bool(abs(x @ g @ y) <= tol and abs(nx - ny) <= tol)


# -- fixed components ------------------------------------------------------------
@dataclass
class FixedComponent:
    """A connected piece of ``Zero(X - sqrt(-1) Y)`` with a local chart.

    The local chart has coordinates ``(y_1..y_k, u_1..u_d)`` (normal first)
    and the component is ``{y = 0}``; ``tangent_box`` bounds ``u``.  Its
    ``orientation_sign`` relates the local coordinate orientation to the
    ambient one.  ``embedding`` maps ``u`` (plain arrays or jets) to
    fundamental-chart coordinates; ``locus`` maps fundamental points to
    values vanishing exactly on the component.
    """

    id: str
    local: ChartGeometry
    normal_dim: int
    location: tuple = None
    embedding: Callable = None
    tangent_box: tuple = ()
    tangent_periodic: tuple = ()
    locus: Callable = None
    spec: dict = field(default_factory=dict)

    @property
    def kind(self):
        return "point" if self.tangent_dim == 0 else "submanifold"

    @property
    def tangent_dim(self):
        return self.local.dim - self.normal_dim

    @property
    def orientation_sign(self):
        return self.local.chart.orientation_sign

    def local_points(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        u = u.reshape(len(u), self.tangent_dim) if self.tangent_dim == 0 else u.reshape(-1, self.tangent_dim)
        return np.concatenate([np.zeros((len(u), self.normal_dim)), u], axis=-1)

    def contains(self, points, tol=1e-8):
        vals = np.atleast_2d(np.asarray(self.locus(np.atleast_2d(points))))
        return np.all(np.abs(vals) < tol, axis=-1)


def component_frame(component, x):
    """Orthonormal frame jet at local points ``x``: columns ``[normal.., tangent..]``.

    Tangent axes are orthonormalized first so the remaining vectors span the
    normal bundle; the first normal vector is flipped when the local chart
    is negatively oriented.
    """
    k, d = component.normal_dim, component.tangent_dim
    g = component.local.metric(x)
    order = list(range(k, k + d)) + list(range(k))
    E = orthonormal_frame_jet(g, 1, order)
    cols = [E[..., :, d + a] for a in range(k)] + [E[..., :, a] for a in range(d)]
    if component.orientation_sign == -1:
        cols[0] = -cols[0]
    return jets.stack(cols, axis=-1), g


@dataclass
class NormalData:
    """Normal-bundle data at points of a component (numeric arrays)."""

    mu_X: np.ndarray       # (P, k, k)
    mu_Y: np.ndarray
    curvature: np.ndarray  # (P, k, k, d, d): R^N_ab(d_u_c, d_u_d)
    tangential_block: float
    cross_block: float
    field_norm: float


def normal_data(component, u):
    """Moments and normal curvature at tangent parameters ``u``."""
    k, d = component.normal_dim, component.tangent_dim
    geom = component.local
    pts = component.local_points(u)
    x = jets.variables(pts, 2)
    E, g = component_frame(component, x.truncate(1))
    E, g = E.truncate(0), g.truncate(0)
    muX = frame_change(E, g, moment_jet(geom, geom.X, x.truncate(1)).truncate(0)).value
    muY = frame_change(E, g, moment_jet(geom, geom.Y, x.truncate(1)).truncate(0)).value
    R = riemann_jet(geom, x).value  # R^i_{jkl}
    Ev, gv = E.value, g.value
    tan = slice(k, k + d)
    Rt = R[..., :, :, tan, tan]
    RN = np.einsum("pia,pim,pmjcd,pjb->pabcd", Ev[..., :k], gv, Rt, Ev[..., :k])
    xv = geom.X(jets.variables(pts, 0)).value
    yv = geom.Y(jets.variables(pts, 0)).value
    fnorm = float(np.max(np.abs(np.einsum("pi,pij,pj->p", xv, gv, xv))
                         + np.abs(np.einsum("pi,pij,pj->p", yv, gv, yv)))) if len(pts) else 0.0
    blocks = [muX, muY]
    tangential = max(float(np.max(np.abs(m[..., k:, :]), initial=0.0)) for m in blocks)
    cross = max(float(np.max(np.abs(m[..., :k, k:]), initial=0.0)) for m in blocks)
    return NormalData(np.real_if_close(muX[..., :k, :k]), np.real_if_close(muY[..., :k, :k]),
                      RN, tangential, cross, fnorm)


def normal_restriction(component, scenario=None, pair=None, u=None, tol=1e-9):
    """``(mu^N(X), mu^N(Y))`` at the component (first tangent sample point).

    Checks that both blocks are skew, that they commute, and that the
    tangential directions are annihilated.
    """
    if u is None:
        u = _tangent_anchor(component)
    nd = normal_data(component, u)
    muX, muY = nd.mu_X, nd.mu_Y
    skew = max(skew_part_residual(muX), skew_part_residual(muY))
    comm = float(np.max(np.abs(muX @ muY - muY @ muX)))
    if skew > tol or nd.tangential_block > tol or nd.cross_block > tol:
        raise ScenarioError(
            f"component {component.id}: normal moment not skew or not block-diagonal "
            f"(skew {skew:.2e}, tangential {nd.tangential_block:.2e}, cross {nd.cross_block:.2e})")
    if comm > tol:
        raise ScenarioError(f"component {component.id}: normal moments do not commute ({comm:.2e})")
    return muX[0], muY[0]


def _tangent_anchor(component):
    if component.tangent_dim == 0:
        return np.zeros((1, 0))
    box = np.asarray(component.tangent_box, dtype=float)
    return (0.37 * box[:, 0] + 0.63 * box[:, 1])[None, :]


def normal_denominator_value(component, u):
    """Degree-0 part of the localization denominator, ``Pf(A / 2 pi)``."""
    nd = normal_data(component, u)
    A = -nd.mu_X - 1j * nd.mu_Y
    pf = pfaffian(A / (2 * np.pi))
    if np.any(np.abs(pf) < 1e-12):
        raise DegenerateComponentError(f"component {component.id}: normal moment is singular")
    return pf


# -- numerical zero search ---------------------------------------------------------
@dataclass
class ZeroSearch:
    points: np.ndarray
    values: np.ndarray
    clusters: list
    seeds: int


def _field_energy(geom, pair, x):
    g = geom.metric(x)
    X, Y = pair.X(x), pair.Y(x)
    gx = jets.einsum("...ij,...j->...i", g, X)
    gy = jets.einsum("...ij,...j->...i", g, Y)
    return (jets.einsum("...i,...i->...", X, gx) + jets.einsum("...i,...i->...", Y, gy)).real


def seed_grid(chart, per_axis):
    box = chart.box
    axes = [lo + (hi - lo) * (np.arange(per_axis) + 0.5) / per_axis for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def locate_zeros(scenario, pair, per_axis=None, iterations=80, embed=None, radius=1e-6):
    """Damped Newton on ``|X|^2 + |Y|^2`` from a seed grid.

    Returns converged points (``f < 1e-14``) and clusters formed in the
    embedded coordinates given by ``embed`` (chart coordinates otherwise).
    """
    geom = _geom(scenario)
    chart = geom.chart
    n = geom.dim
    if per_axis is None:
        per_axis = 32 if n <= 2 else max(4, int(round(4096 ** (1.0 / n))))
    x = seed_grid(chart, per_axis)
    lam = np.full(len(x), 1e-3)

    def energy(p, order):
        return _field_energy(geom, pair, jets.variables(p, order))

    f = energy(x, 0).value
    for _ in range(iterations):
        active = f >= ZERO_TOL
        if not np.any(active):
            break
        jet = energy(x[active], 2)
        grad = jet.first_derivatives()
        hess = jet.hessian()
        eye = np.eye(n)
        scale = np.maximum(np.abs(np.einsum("pii->p", hess)) / n, 1e-12)
        step = -np.linalg.solve(hess + (lam[active] * scale)[:, None, None] * eye,
                                grad[..., None])[..., 0]
        trial = chart.wrap(x[active] + step)
        ft = energy(trial, 0).value
        better = ft < f[active]
        idx = np.flatnonzero(active)
        x[idx[better]] = trial[better]
        f[idx[better]] = ft[better]
        lam[idx[better]] = np.maximum(lam[idx[better]] / 3.0, 1e-12)
        lam[idx[~better]] = lam[idx[~better]] * 4.0
    ok = f < ZERO_TOL
    pts = x[ok]
    coords = embed(pts) if (embed is not None and len(pts)) else pts
    clusters = []
    for i, c in enumerate(np.atleast_2d(coords) if len(pts) else []):
        for cl in clusters:
            if np.linalg.norm(coords[cl[0]] - c) < radius:
                cl.append(i)
                break
        else:
            clusters.append([i])
    return ZeroSearch(pts, f[ok], clusters, len(x))


def find_zero_components(scenario, pair=None, search=True):
    """Declared fixed components, cross-validated by a numerical search."""
    pair = pair or scenario.pair
    declared = list(getattr(scenario, "components", []))
    if not search:
        return declared
    cache = getattr(scenario, "zero_cache", None)
    key = (id(pair.X), id(pair.Y))
    if cache is not None and key in cache:
        return list(cache[key])
    result = locate_zeros(scenario, pair, embed=getattr(scenario, "embed", None))
    hit = [False] * len(declared)
    for p in result.points:
        owners = [i for i, c in enumerate(declared) if c.contains(p[None, :])[0]]
        if not owners:
            raise ScenarioInconsistencyError(f"zero at {p} lies on no declared component")
        for i in owners:
            hit[i] = True
    missing = [c.id for c, h in zip(declared, hit) if not h]
    if missing:
        raise ScenarioInconsistencyError(f"declared components without numerical zeros: {missing}")
    for comp in declared:
        _check_component_zero(comp)
    if cache is not None:
        cache[key] = list(declared)
    return declared


def _check_component_zero(comp, tol=1e-10):
    u = _tangent_anchor(comp)
    nd = normal_data(comp, u)
    if nd.field_norm > tol:
        raise ScenarioInconsistencyError(
            f"fields do not vanish on component {comp.id} (|X|^2+|Y|^2 = {nd.field_norm:.2e})")
