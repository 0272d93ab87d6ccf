import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiloc import jets
from equiloc.errors import ADOrderError

coord = st.floats(-1.5, 1.5)


def _point(x, y, order=3):
    return jets.variables(np.array([[x, y]]), order)


@given(coord, coord)
def test_product_rule_against_closed_form(x, y):
    v = _point(x, y)
    f = jets.sin(v[..., 0]) * v[..., 1] ** 2
    assert f.value[0] == pytest.approx(math.sin(x) * y * y, abs=1e-14)
    d0 = f.derivative(0)
    d1 = f.derivative(1)
    assert d0.value[0] == pytest.approx(math.cos(x) * y * y, abs=1e-13)
    assert d1.value[0] == pytest.approx(2 * math.sin(x) * y, abs=1e-13)
    h = f.hessian()[0]
    expected = np.array([[-math.sin(x) * y * y, 2 * math.cos(x) * y],
                         [2 * math.cos(x) * y, 2 * math.sin(x)]])
    np.testing.assert_allclose(h, expected, atol=1e-12)


@given(coord, coord)
def test_composition_matches_finite_differences(x, y):
    def f(v):
        return jets.exp(jets.cos(v[..., 0] * v[..., 1])) / (2.0 + v[..., 0] ** 2)

    grad = f(_point(x, y, 1)).first_derivatives()[0]
    h = 1e-5
    fd = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        p = np.array([[x, y]]) + e
        m = np.array([[x, y]]) - e
        fd.append((f(jets.variables(p, 0)).value[0] - f(jets.variables(m, 0)).value[0]) / (2 * h))
    np.testing.assert_allclose(grad, fd, rtol=1e-6, atol=1e-8)


@given(st.floats(0.2, 3.0))
def test_inverse_functions_round_trip(a):
    v = jets.variables(np.array([[a]]), 4)
    x = v[..., 0]
    for g in (jets.log(jets.exp(x)), jets.sqrt(x * x), (x.reciprocal()).reciprocal()):
        np.testing.assert_allclose(g.coef, x.coef, atol=1e-12)


def test_derivative_reduces_order_and_exhausts():
    v = jets.variables(np.zeros((3, 2)), 2)
    d = v[..., 0].derivative(0)
    assert d.order == 1
    with pytest.raises(ADOrderError):
        d.derivative(0).derivative(1)


def test_mixed_orders_truncate_to_lower():
    a = jets.variables(np.ones((2, 2)), 3)[..., 0]
    b = jets.variables(np.ones((2, 2)), 1)[..., 1]
    assert (a * b).order == 1
    assert (a + b).order == 1


@settings(max_examples=25)
@given(st.integers(1, 4), st.integers(0, 4))
def test_variables_are_coordinate_jets(n, order):
    pts = np.arange(2 * n, dtype=float).reshape(2, n)
    v = jets.variables(pts, order)
    np.testing.assert_array_equal(v.value, pts)
    if order:
        np.testing.assert_array_equal(v.first_derivatives()[0], np.eye(n))
