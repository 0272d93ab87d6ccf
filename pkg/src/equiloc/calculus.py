"""Complex inhomogeneous differential forms and the operators d, i_V, L_V, wedge, exp.

A form on an ``n``-dimensional chart is stored as ``2**n`` complex
coefficients indexed by bitmask: bit ``i`` set means ``dx^i`` is present, and
the basis element for a mask is ``dx^{i1} ^ ... ^ dx^{ik}`` with
``i1 < ... < ik``.  Mask 0 is the function part, mask ``2**n - 1`` the top
degree.

A :class:`FormField` maps a coordinate jet ``(P, n)`` to a form jet
``(P, 2**n)``.  Its ``depth`` is the number of derivatives it consumes, so an
input of order ``K`` yields an output of order ``K - depth``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import jets
from .errors import ADOrderError

__all__ = [
    "ExteriorAlgebra",
    "algebra",
    "GradedFormValue",
    "FormField",
    "wedge_values",
    "wedge_arrays",
    "contract_values",
    "d_values",
    "exp_values",
    "exterior_derivative",
    "interior_product",
    "lie_derivative",
    "wedge",
    "exp_form",
    "zero_form",
    "constant_form",
    "form_from_components",
    "random_form",
    "pullback_values",
    "mask_of",
    "indices_of",
]


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask):
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _count_below(mask, j):
    return bin(mask & ((1 << j) - 1)).count("1")


class ExteriorAlgebra:
    """Structure constants of the exterior algebra on ``n`` generators."""

    def __init__(self, n):
        self.n = n
        self.size = 1 << n
        self.top = self.size - 1
        self.degree = np.array([bin(m).count("1") for m in range(self.size)])

        ia, ib, ic, sg = [], [], [], []
        for a in range(self.size):
            for b in range(self.size):
                if a & b:
                    continue
                # sign of reordering dx^A ^ dx^B into increasing order
                inv = 0
                for j in indices_of(b):
                    inv += bin(a >> (j + 1)).count("1")
                ia.append(a)
                ib.append(b)
                ic.append(a | b)
                sg.append(-1.0 if inv % 2 else 1.0)
        self.w_a = np.array(ia)
        self.w_b = np.array(ib)
        self.w_sign = np.array(sg)
        self.w_scatter = _scatter(ic, self.size)

        # contraction: i_{d_j} dx^A, removing j at its position in A
        ja, ca, cs, cc = [], [], [], []
        for a in range(self.size):
            for j in indices_of(a):
                ja.append(j)
                ca.append(a)
                cs.append(-1.0 if _count_below(a, j) % 2 else 1.0)
                cc.append(a & ~(1 << j))
        self.c_j = np.array(ja)
        self.c_a = np.array(ca)
        self.c_sign = np.array(cs)
        self.c_scatter = _scatter(cc, self.size)

        # exterior derivative: dx^j ^ dx^A for j not in A
        dflat, ds, dc = [], [], []
        for a in range(self.size):
            for j in range(n):
                if a & (1 << j):
                    continue
                dflat.append(a * n + j)
                ds.append(-1.0 if _count_below(a, j) % 2 else 1.0)
                dc.append(a | (1 << j))
        self.d_flat = np.array(dflat, dtype=np.intp)
        self.d_sign = np.array(ds)
        self.d_scatter = _scatter(dc, self.size)

    def degree_mask(self, k):
        return (self.degree == k).astype(float)


def _scatter(targets, size):
    m = np.zeros((len(targets), size))
    m[np.arange(len(targets)), targets] = 1.0
    return m


@lru_cache(maxsize=None)
def algebra(n):
    return ExteriorAlgebra(n)


# -- value-level operations on jets ---------------------------------------------
def wedge_values(a, b, n):
    alg = algebra(n)
    prod = a.take(alg.w_a, axis=-1) * b.take(alg.w_b, axis=-1)
    return (prod * alg.w_sign).linear(lambda c: c @ alg.w_scatter)


def wedge_arrays(a, b, n):
    """Wedge of plain coefficient arrays ``(..., 2**n)``."""
    alg = algebra(n)
    prod = np.asarray(a)[..., alg.w_a] * np.asarray(b)[..., alg.w_b] * alg.w_sign
    return prod @ alg.w_scatter


def contract_values(v, a, n):
    """Interior product of a vector jet ``(..., n)`` with a form jet."""
    alg = algebra(n)
    prod = v.take(alg.c_j, axis=-1) * a.take(alg.c_a, axis=-1)
    return (prod * alg.c_sign).linear(lambda c: c @ alg.c_scatter)


def d_values(a, n):
    alg = algebra(n)
    grad = a.gradient()  # (..., 2**n, n)
    flat = grad.reshape(grad.shape[:-2] + (alg.size * n,))
    return (flat.take(alg.d_flat, axis=-1) * alg.d_sign).linear(lambda c: c @ alg.d_scatter)


def exp_values(a, n):
    """exp of a form jet: exp(a_0) * sum_k (a_+)^k / k!, terminating at k = n."""
    alg = algebra(n)
    scalar = jets.exp(a[..., 0])
    mask = np.ones(alg.size)
    mask[0] = 0.0
    plus = a.linear(lambda c: c * mask)
    one = np.zeros(alg.size)
    one[0] = 1.0
    total = plus * 0.0 + one
    power = None
    for k in range(1, n + 1):
        power = plus if power is None else wedge_values(power, plus, n)
        total = total + power * (1.0 / math.factorial(k))
    return total * scalar[..., None]


# -- pointwise container ------------------------------------------------------
@dataclass
class GradedFormValue:
    """Coefficients of a form at one point (canonical increasing indices)."""

    coeffs: np.ndarray
    dim: int

    def __getitem__(self, indices):
        indices = tuple(indices)
        if len(set(indices)) < len(indices):
            return 0.0
        order = np.argsort(indices, kind="stable")
        sign = _perm_sign(order)
        return sign * self.coeffs[mask_of(indices)]

    def degree_part(self, k):
        return {indices_of(m): self.coeffs[m] for m in range(1 << self.dim)
                if bin(m).count("1") == k}

    def antisymmetric(self, k):
        """Dense antisymmetric rank-``k`` array ``a[i1..ik]``."""
        out = np.zeros((self.dim,) * k, dtype=complex)
        for idx in np.ndindex(*out.shape):
            out[idx] = self[idx]
        return out

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs)))


def _perm_sign(order):
    order = list(order)
    sign = 1
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                sign = -sign
    return sign


# -- form fields --------------------------------------------------------------
class FormField:
    """Smooth form on a chart, evaluated through coordinate jets."""

    def __init__(self, fn, dim, depth=0, label="form"):
        self.fn = fn
        self.dim = dim
        self.depth = depth
        self.label = label

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self):
        return f"FormField({self.label}, dim={self.dim}, depth={self.depth})"

    def evaluate(self, points, order=None):
        """Complex coefficients ``(P, 2**dim)`` at plain points."""
        order = self.depth if order is None else order
        if order < self.depth:
            raise ADOrderError(f"{self.label} needs jet order {self.depth}, got {order}")
        x = jets.variables(points, order)
        out = self.fn(x)
        return np.asarray(out.value, dtype=complex)

    def at(self, point):
        return GradedFormValue(self.evaluate(np.atleast_2d(point))[0], self.dim)

    def __add__(self, other):
        if not isinstance(other, FormField):
            other = constant_form(self.dim, other)
        _same_dim(self, other)
        depth = max(self.depth, other.depth)
        return FormField(lambda x: _fit(self, x, depth) + _fit(other, x, depth), self.dim, depth,
                         f"({self.label}+{other.label})")

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, FormField) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, FormField):
            return wedge(self, c)
        return FormField(lambda x: self(x) * c, self.dim, self.depth, f"{c}*{self.label}")

    __rmul__ = __mul__

    def degree_part(self, k):
        mask = algebra(self.dim).degree_mask(k)
        return FormField(lambda x: self(x) * mask, self.dim, self.depth, f"[{self.label}]_{k}")


def _fit(op, x, depth):
    # operands are combined at the lowest surviving jet order, so a shallower
    # operand needs no more input order than that
    return op(x.truncate(x.order - depth + getattr(op, "depth", 0)))


def _same_dim(a, b):
    if a.dim != b.dim:
        raise ValueError(f"forms on charts of dimension {a.dim} and {b.dim}")


def exterior_derivative(form):
    """d: raises degree by one; consumes one jet order."""
    return FormField(lambda x: d_values(form(x), form.dim), form.dim, form.depth + 1,
                     f"d{form.label}")


def interior_product(field, form):
    """Contraction with a (complex) vector field; 0-forms map to 0."""
    depth = max(form.depth, getattr(field, "depth", 0))
    return FormField(lambda x: contract_values(_fit(field, x, depth), _fit(form, x, depth),
                                               form.dim), form.dim, depth,
                     f"i[{getattr(field, 'label', 'V')}]{form.label}")


def lie_derivative(field, form):
    """Cartan's formula L_V = d i_V + i_V d."""
    return (exterior_derivative(interior_product(field, form))
            + interior_product(field, exterior_derivative(form)))


def wedge(a, b):
    _same_dim(a, b)
    depth = max(a.depth, b.depth)
    return FormField(lambda x: wedge_values(_fit(a, x, depth), _fit(b, x, depth), a.dim), a.dim,
                     depth, f"({a.label}^{b.label})")


def exp_form(a):
    return FormField(lambda x: exp_values(a(x), a.dim), a.dim, a.depth, f"exp({a.label})")


def zero_form(fn, dim, depth=0, label="f"):
    """Function ``fn(x) -> jet (P,)`` as a 0-form."""
    def evaluate(x):
        f = fn(x)
        basis = np.zeros(1 << dim)
        basis[0] = 1.0
        return f[..., None] * basis
    return FormField(evaluate, dim, depth, label)


def constant_form(dim, value=1.0, indices=()):
    """Constant multiple of ``dx^indices`` (a scalar when ``indices`` is empty)."""
    comp = np.zeros(1 << dim, dtype=complex)
    comp[mask_of(indices)] = value * _perm_sign(np.argsort(indices, kind="stable"))
    return FormField(lambda x: x[..., :1] * 0.0 + comp, dim, 0, f"const{tuple(indices)}")


def form_from_components(dim, components, label="form"):
    """Form from ``{indices: fn}`` where ``fn(x) -> jet (P,)``."""
    items = []
    for idx, fn in components.items():
        idx = tuple(idx)
        items.append((mask_of(idx), _perm_sign(np.argsort(idx, kind="stable")), fn))

    def evaluate(x):
        out = x[..., :1] * 0.0 + np.zeros(1 << dim)
        for m, sign, fn in items:
            basis = np.zeros(1 << dim)
            basis[m] = sign
            out = out + fn(x)[..., None] * basis
        return out

    return FormField(evaluate, dim, 0, label)


def random_form(dim, rng, degrees=None, terms=2, scale=1.0, periods=None):
    """Random smooth complex form built from trigonometric coefficient functions.

    ``periods`` gives per-axis periods so the coefficients are globally
    defined on periodic axes; defaults to ``2*pi``.
    """
    alg = algebra(dim)
    degrees = range(dim + 1) if degrees is None else degrees
    masks = [m for m in range(alg.size) if alg.degree[m] in degrees]
    periods = np.full(dim, 2 * np.pi) if periods is None else np.asarray(periods, float)
    amp = scale * (rng.standard_normal((len(masks), terms + 1))
                   + 1j * rng.standard_normal((len(masks), terms + 1)))
    freqs = rng.integers(-2, 3, size=(len(masks), terms, dim)) * (2 * np.pi / periods)
    phases = rng.uniform(0, 2 * np.pi, size=(len(masks), terms))
    scatter = np.zeros((len(masks), alg.size))
    scatter[np.arange(len(masks)), masks] = 1.0

    def evaluate(x):
        # coefficient_m(x) = a_m0 + sum_t a_mt * cos(k_mt . x + p_mt)
        arg = jets.einsum("...i,mti->...mt", x, freqs) + phases
        coeff = (jets.cos(arg) * amp[:, 1:]).sum(axis=-1) + amp[:, 0]
        return coeff.linear(lambda c: c @ scatter)

    return FormField(evaluate, dim, 0, "random")


def pullback_values(values, jac):
    """Pull back numeric form values along a map with Jacobian ``jac``.

    ``values``: ``(P, 2**n)`` on the target chart; ``jac``: ``(P, n, d)`` with
    ``jac[p, i, a] = d x^i / d u^a``.  Returns ``(P, 2**d)``.
    """
    values = np.asarray(values)
    P, n, d = jac.shape
    out = np.zeros((P, 1 << d), dtype=complex)
    out[:, 0] = values[:, 0]
    for mb in range(1, 1 << d):
        cols = list(indices_of(mb))
        k = len(cols)
        for ma in range(1, 1 << n):
            rows = indices_of(ma)
            if len(rows) != k:
                continue
            sub = jac[:, rows, :][:, :, cols]
            out[:, mb] += values[:, ma] * np.linalg.det(sub)
    return out
