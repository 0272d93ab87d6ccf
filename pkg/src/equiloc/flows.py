"""Lie derivatives from flows: an oracle independent of Cartan's formula.

The flow of a real vector field and its variational Jacobian are integrated
with classical RK4; the pulled-back form is differentiated in ``t`` by
central differences refined with Richardson extrapolation.
"""

from __future__ import annotations

import numpy as np

from . import jets
from .calculus import pullback_values


def _velocity(field, x):
    v = field(jets.variables(x, 1))
    return np.real(v.value), np.real(v.first_derivatives())


def flow(field, points, t, substeps=8):
    """Flow map ``phi_t`` at ``points`` and its Jacobian ``(P, n, n)``."""
    x = np.array(points, dtype=float)
    P, n = x.shape
    J = np.broadcast_to(np.eye(n), (P, n, n)).copy()
    h = t / substeps

    def rhs(x, J):
        vel, dv = _velocity(field, x)
        return vel, dv @ J

    for _ in range(substeps):
        k1x, k1j = rhs(x, J)
        k2x, k2j = rhs(x + 0.5 * h * k1x, J + 0.5 * h * k1j)
        k3x, k3j = rhs(x + 0.5 * h * k2x, J + 0.5 * h * k2j)
        k4x, k4j = rhs(x + h * k3x, J + h * k3j)
        x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        J = J + h / 6.0 * (k1j + 2 * k2j + 2 * k3j + k4j)
    return x, J


def flow_pullback(form, field, points, t, substeps=8):
    """Coefficients of ``phi_t^* form`` at ``points``."""
    x, J = flow(field, points, t, substeps)
    return pullback_values(form.evaluate(x), J)


def flow_lie_derivative(form, field, points, h=1e-2, levels=3, substeps=8):
    """``d/dt phi_t^* form`` at ``t = 0`` for a real field.

    Central differences at ``h, h/2, h/4, ...`` combined by Richardson
    extrapolation (the error expansion is even in the step).
    """
    points = np.atleast_2d(points)
    table = []
    for k in range(levels):
        step = h / 2 ** k
        plus = flow_pullback(form, field, points, step, substeps)
        minus = flow_pullback(form, field, points, -step, substeps)
        row = [(plus - minus) / (2 * step)]
        for j in range(1, k + 1):
            factor = 4.0 ** j
            row.append((factor * row[j - 1] - table[k - 1][j - 1]) / (factor - 1))
        table.append(row)
    return table[-1][-1]
