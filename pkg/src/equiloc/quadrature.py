"""Tensor-product Gauss-Legendre quadrature with per-axis refinement."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import IntegrationError


@dataclass(frozen=True)
class QuadratureSpec:
    base_nodes: int = 8
    max_nodes: int = 512
    rtol: float = 1e-9
    max_points: int = 600_000
    chunk: int = 8192
    residual_nodes: int = 6


@dataclass
class IntegrationResult:
    value: complex
    error: float
    counts: tuple
    evaluations: int
    history: list = field(default_factory=list)


@lru_cache(maxsize=None)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def gauss_grid(box, counts):
    """Nodes ``(P, d)`` and weights ``(P,)`` of the tensor grid on ``box``."""
    box = np.asarray(box, dtype=float)
    axes, wts = [], []
    for (lo, hi), n in zip(box, counts):
        x, w = _leggauss(int(n))
        half = 0.5 * (hi - lo)
        axes.append(lo + half * (x + 1.0))
        wts.append(half * w)
    if not axes:
        return np.zeros((1, 0)), np.ones(1)
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    w = np.prod(np.stack([m.ravel() for m in wmesh], axis=-1), axis=-1)
    return pts, w


def apply_chunked(fn, points, chunk):
    out = [np.asarray(fn(points[i:i + chunk])) for i in range(0, len(points), chunk)]
    return np.concatenate(out, axis=0)


def _rule(fn, box, counts, chunk):
    pts, w = gauss_grid(box, counts)
    vals = apply_chunked(fn, pts, chunk)
    return complex(np.sum(w * vals)), float(np.sum(w * np.abs(vals))), len(pts)


def integrate_box(fn, box, spec=None, counts=None, adaptive=True):
    """Integrate ``fn(points) -> (P,)`` over ``box``.

    Each axis is doubled in turn until doubling no axis changes the estimate
    by more than ``rtol`` relative (with an absolute floor tied to the
    integral of ``|fn|``).  The error estimate is the largest change seen
    in the final round of probes.
    """
    spec = spec or QuadratureSpec()
    box = np.asarray(box, dtype=float)
    dim = len(box)
    counts = list(counts or [spec.base_nodes] * dim)
    value, absval, evals = _rule(fn, box, counts, spec.chunk)
    history = [(tuple(counts), value)]
    if not adaptive:
        return IntegrationResult(value, float("nan"), tuple(counts), evals, history)

    while True:
        refined = False
        err = 0.0
        for axis in range(dim):
            trial = list(counts)
            trial[axis] *= 2
            if trial[axis] > spec.max_nodes or np.prod(trial) > spec.max_points:
                continue
            v2, a2, n2 = _rule(fn, box, trial, spec.chunk)
            evals += n2
            change = abs(v2 - value)
            floor = spec.rtol * abs(v2) + 1e-14 * a2
            if change > floor:
                counts, value, absval = trial, v2, a2
                history.append((tuple(counts), value))
                refined = True
            err = max(err, change)
        if not refined:
            break
    unresolved = _capped_change(fn, box, counts, spec, value)
    if unresolved is not None and unresolved > spec.rtol * abs(value) + 1e-14 * absval:
        # refinement stopped at the cap while still moving
        if len(history) > 2 and abs(history[-1][1] - history[-2][1]) > abs(history[-2][1] - history[-3][1]):
            raise IntegrationError(f"quadrature diverging: change {unresolved:.3e} at nodes {counts}")
        err = max(err, unresolved)
    return IntegrationResult(value, err, tuple(counts), evals, history)


def _capped_change(fn, box, counts, spec, value):
    # change between the current rule and the last accepted one, when capped
    capped = [c * 2 > spec.max_nodes or np.prod(counts) * 2 > spec.max_points for c in counts]
    if not any(capped):
        return None
    coarse = [max(1, c // 2) if cap else c for c, cap in zip(counts, capped)]
    v, _, _ = _rule(fn, box, coarse, spec.chunk)
    return abs(value - v)
