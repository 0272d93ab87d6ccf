"""Truncated multivariate Taylor arithmetic (forward-mode AD).

A :class:`Jet` holds the normalized Taylor coefficients ``d^a f / a!`` of a
batch of functions of ``n`` variables, truncated at total order ``K``.  The
coefficient array has shape ``(M, *shape)`` where ``M`` counts the
multi-indices of total degree ``<= K`` and ``shape`` is an arbitrary batch
shape (points, vector/matrix/form components).

Differentiating a jet is exact: it shifts coefficients and drops one order.
Asking for a derivative of an order-0 jet raises :class:`ADOrderError`.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import ADOrderError

__all__ = [
    "Jet",
    "variables",
    "constant",
    "stack",
    "einsum",
    "sin",
    "cos",
    "exp",
    "sqrt",
    "log",
    "is_jet",
    "min_order",
]


class _Table:
    """Multi-index bookkeeping for (n, K)."""

    def __init__(self, n, order):
        self.n = n
        self.order = order
        monos = []
        for deg in range(order + 1):
            for combo in combinations_with_replacement(range(n), deg):
                alpha = [0] * n
                for j in combo:
                    alpha[j] += 1
                monos.append(tuple(alpha))
        # degree-major ordering makes lower-order tables prefixes of this one
        self.monos = monos
        self.index = {a: i for i, a in enumerate(monos)}
        self.size = len(monos)
        self.degree = np.array([sum(a) for a in monos])

        ai, bi, ci = [], [], []
        for i, a in enumerate(monos):
            for j, b in enumerate(monos):
                c = tuple(x + y for x, y in zip(a, b))
                if sum(c) <= order:
                    ai.append(i)
                    bi.append(j)
                    ci.append(self.index[c])
        self.ai = np.array(ai, dtype=np.intp)
        self.bi = np.array(bi, dtype=np.intp)
        scatter = np.zeros((self.size, len(ci)))
        scatter[ci, np.arange(len(ci))] = 1.0
        self.scatter = scatter

        # derivative d/dx_j: target monomial alpha (order-1 table) <- alpha + e_j
        self.deriv_src = []
        self.deriv_fac = []
        lower = [a for a in monos if sum(a) <= order - 1]
        for j in range(n):
            src, fac = [], []
            for a in lower:
                b = list(a)
                b[j] += 1
                src.append(self.index[tuple(b)])
                fac.append(float(b[j]))
            self.deriv_src.append(np.array(src, dtype=np.intp))
            self.deriv_fac.append(np.array(fac))


@lru_cache(maxsize=None)
def _table(n, order):
    return _Table(n, order)


def _unit_index(n, j):
    # index of e_j in any table of order >= 1
    return 1 + j


class Jet:
    """Batch of truncated Taylor expansions.

    Arithmetic broadcasts over the batch shape like numpy.  Mixing jets of
    different orders truncates to the lower one.
    """

    __slots__ = ("coef", "n", "order")
    __array_ufunc__ = None

    def __init__(self, coef, n, order):
        self.coef = coef
        self.n = n
        self.order = order

    # -- basic properties ------------------------------------------------
    @property
    def shape(self):
        return self.coef.shape[1:]

    @property
    def ndim(self):
        return self.coef.ndim - 1

    @property
    def value(self):
        return self.coef[0]

    @property
    def table(self):
        return _table(self.n, self.order)

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, shape={self.shape})"

    def truncate(self, order):
        if order > self.order:
            raise ADOrderError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coef[: _table(self.n, order).size], self.n, order)

    def _like(self, coef):
        return Jet(coef, self.n, self.order)

    def _const_coef(self, c):
        c = np.asarray(c)
        coef = np.zeros((self.table.size,) + np.broadcast_shapes(self.shape, c.shape),
                        dtype=np.result_type(self.coef.dtype, c.dtype))
        coef[0] = c
        return coef

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError("jets over different variable counts")
            k = min(self.order, other.order)
            return self.truncate(k), other.truncate(k)
        return self, None

    # -- arithmetic ------------------------------------------------------
    def __neg__(self):
        return self._like(-self.coef)

    def __pos__(self):
        return self

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is not None:
            return a._like(a.coef + b.coef)
        other = np.asarray(other)
        shape = np.broadcast_shapes(a.shape, other.shape)
        coef = np.broadcast_to(a.coef, (a.coef.shape[0],) + shape).astype(
            np.result_type(a.coef.dtype, other.dtype), copy=True)
        coef[0] = coef[0] + other
        return a._like(coef)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            return a._like(a.coef * np.asarray(other))
        if a.order == 0:
            return a._like(a.coef * b.coef)
        t = a.table
        prod = a.coef[t.ai] * b.coef[t.bi]
        out = np.tensordot(t.scatter, prod, axes=1)
        return a._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self._like(self.coef / np.asarray(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            if k < 0:
                return (self ** (-k)).reciprocal()
            out = None
            base = self
            while k:
                if k & 1:
                    out = base if out is None else out * base
                k >>= 1
                if k:
                    base = base * base
            if out is None:
                return self._like(self._const_coef(np.ones(self.shape)))
            return out
        return exp(log(self) * k)

    # -- univariate composition -----------------------------------------
    def _compose(self, taylor):
        """f(self) given ``taylor[k] = f^(k)(v)/k!`` evaluated at the value v."""
        h = self._like(self.coef.copy())
        h.coef[0] = 0
        out = self._like(self._const_coef(taylor[0]))
        power = None
        for k in range(1, self.order + 1):
            power = h if power is None else power * h
            out = out + power * taylor[k]
        return out

    def reciprocal(self):
        v = self.value
        taylor = [(-1) ** k / v ** (k + 1) for k in range(self.order + 1)]
        return self._compose(taylor)

    # -- indexing / reshaping -------------------------------------------
    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self._like(self.coef[(slice(None),) + idx])

    def take(self, indices, axis=-1):
        axis = axis if axis < 0 else axis + 1
        return self._like(np.take(self.coef, indices, axis=axis))

    def sum(self, axis=None):
        if axis is None:
            return self._like(self.coef.reshape(self.coef.shape[0], -1).sum(axis=1))
        axis = axis if axis < 0 else axis + 1
        return self._like(self.coef.sum(axis=axis))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return self._like(self.coef.reshape((self.coef.shape[0],) + tuple(shape)))

    def swapaxes(self, a, b):
        a = a if a < 0 else a + 1
        b = b if b < 0 else b + 1
        return self._like(np.swapaxes(self.coef, a, b))

    def linear(self, fn):
        """Apply a linear map acting on trailing axes to every coefficient."""
        return self._like(fn(self.coef))

    def conj(self):
        return self._like(np.conj(self.coef))

    @property
    def real(self):
        return self._like(self.coef.real)

    @property
    def imag(self):
        return self._like(self.coef.imag)

    # -- differentiation -------------------------------------------------
    def derivative(self, j):
        if self.order == 0:
            raise ADOrderError("jet order exhausted: cannot differentiate an order-0 jet")
        t = self.table
        fac = t.deriv_fac[j].reshape((-1,) + (1,) * self.ndim)
        return Jet(self.coef[t.deriv_src[j]] * fac, self.n, self.order - 1)

    def gradient(self):
        """Stack of partial derivatives along a new trailing axis."""
        return stack([self.derivative(j) for j in range(self.n)], axis=-1)

    def first_derivatives(self):
        """Numeric gradient values, shape ``(*shape, n)``."""
        if self.order < 1:
            raise ADOrderError("need an order >= 1 jet for first derivatives")
        return np.stack([self.coef[_unit_index(self.n, j)] for j in range(self.n)], axis=-1)

    def hessian(self):
        """Numeric Hessian values, shape ``(*shape, n, n)``."""
        if self.order < 2:
            raise ADOrderError("need an order >= 2 jet for second derivatives")
        t = self.table
        n = self.n
        out = np.zeros(self.shape + (n, n), dtype=self.coef.dtype)
        for i in range(n):
            for j in range(i, n):
                a = [0] * n
                a[i] += 1
                a[j] += 1
                c = self.coef[t.index[tuple(a)]]
                if i == j:
                    out[..., i, i] = 2 * c
                else:
                    out[..., i, j] = c
                    out[..., j, i] = c
        return out


def is_jet(x):
    return isinstance(x, Jet)


def min_order(*items):
    orders = [x.order for x in items if isinstance(x, Jet)]
    return min(orders) if orders else None


def variables(points, order):
    """Coordinate jets for a batch of points of shape ``(P, n)``."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[None, :]
    n = points.shape[-1]
    t = _table(n, order)
    coef = np.zeros((t.size,) + points.shape)
    coef[0] = points
    if order >= 1:
        for j in range(n):
            coef[_unit_index(n, j), ..., j] = 1.0
    return Jet(coef, n, order)


def constant(value, like):
    """Promote a number/array to a jet compatible with ``like``."""
    if isinstance(value, Jet):
        return value
    value = np.asarray(value)
    coef = np.zeros((like.table.size,) + value.shape, dtype=value.dtype)
    coef[0] = value
    return Jet(coef, like.n, like.order)


def stack(items, axis=0):
    """Stack jets and plain numbers along a new axis, broadcasting batches."""
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        return np.stack([np.asarray(x) for x in items], axis=axis)
    k = min(j.order for j in jets)
    ref = jets[0].truncate(k)
    shape = np.broadcast_shapes(*[np.shape(x) if not isinstance(x, Jet) else x.shape
                                  for x in items])
    coefs = []
    for x in items:
        x = constant(x, ref).truncate(k) if not isinstance(x, Jet) else x.truncate(k)
        coefs.append(np.broadcast_to(x.coef, (x.coef.shape[0],) + shape))
    axis = axis if axis < 0 else axis + 1
    dtype = np.result_type(*[c.dtype for c in coefs])
    return Jet(np.stack(coefs, axis=axis).astype(dtype, copy=False), ref.n, k)


def einsum(subscripts, a, b):
    """Bilinear ``np.einsum`` lifted to jets (Cauchy product over orders)."""
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.einsum(subscripts, a, b)
    if not isinstance(a, Jet):
        return b.linear(lambda c: _einsum_const_left(subscripts, a, c))
    if not isinstance(b, Jet):
        return a.linear(lambda c: _einsum_const_right(subscripts, c, b))
    a, b = a._coerce(b)
    lhs, out = subscripts.split("->")
    sa, sb = lhs.split(",")
    spec = f"Z{sa},Z{sb}->Z{out}"
    if a.order == 0:
        return a._like(np.einsum(spec, a.coef, b.coef))
    t = a.table
    prod = np.einsum(spec, a.coef[t.ai], b.coef[t.bi])
    return a._like(np.tensordot(t.scatter, prod, axes=1))


def _einsum_const_left(subscripts, a, coef):
    lhs, out = subscripts.split("->")
    sa, sb = lhs.split(",")
    return np.einsum(f"{sa},Z{sb}->Z{out}", a, coef)


def _einsum_const_right(subscripts, coef, b):
    lhs, out = subscripts.split("->")
    sa, sb = lhs.split(",")
    return np.einsum(f"Z{sa},{sb}->Z{out}", coef, b)


# -- elementary functions ----------------------------------------------------
def _cycle(v, order, funcs):
    return [funcs[k % 4](v) / math.factorial(k) for k in range(order + 1)]


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    return x._compose(_cycle(x.value, x.order, [np.sin, np.cos, lambda v: -np.sin(v),
                                                lambda v: -np.cos(v)]))


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    return x._compose(_cycle(x.value, x.order, [np.cos, lambda v: -np.sin(v),
                                                lambda v: -np.cos(v), np.sin]))


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.value)
    return x._compose([e / math.factorial(k) for k in range(x.order + 1)])


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    v = x.value
    taylor = []
    coeff = 1.0
    for k in range(x.order + 1):
        # binom(1/2, k) * v^(1/2 - k)
        taylor.append(coeff * np.sqrt(v) / v ** k)
        coeff *= (0.5 - k) / (k + 1)
    return x._compose(taylor)


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    v = x.value
    taylor = [np.log(v)] + [(-1) ** (k + 1) / (k * v ** k) for k in range(1, x.order + 1)]
    return x._compose(taylor)
