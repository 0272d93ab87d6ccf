import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiloc import calculus, expr, flows
from equiloc.calculus import (constant_form, exp_form, exterior_derivative, interior_product,
                              lie_derivative, random_form, wedge)
from equiloc.errors import ADOrderError
from equiloc.geometry import VectorField

dims = st.sampled_from([2, 3, 4])
seeds = st.integers(0, 2**31 - 1)


def _setup(n, seed, count=40):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, (count, n))
    return rng, pts


def _close(a, b, tol=1e-12):
    scale = max(1.0, float(np.max(np.abs(a))))
    assert float(np.max(np.abs(a - b))) <= tol * scale


@settings(max_examples=15, deadline=None)
@given(dims, seeds)
def test_d_squared_vanishes(n, seed):
    rng, pts = _setup(n, seed)
    a = random_form(n, rng)
    _close(exterior_derivative(exterior_derivative(a)).evaluate(pts), 0.0 * pts[:, :1])


@settings(max_examples=15, deadline=None)
@given(dims, seeds, st.integers(0, 4), st.integers(0, 4))
def test_graded_leibniz_rule(n, seed, p, q):
    rng, pts = _setup(n, seed)
    p, q = min(p, n), min(q, n)
    a = random_form(n, rng, degrees=[p])
    b = random_form(n, rng, degrees=[q])
    lhs = exterior_derivative(wedge(a, b))
    rhs = wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)) * (-1.0) ** p
    _close(lhs.evaluate(pts), rhs.evaluate(pts))


@settings(max_examples=15, deadline=None)
@given(dims, seeds, st.integers(0, 4), st.integers(0, 4))
def test_graded_commutativity_and_associativity(n, seed, p, q):
    rng, pts = _setup(n, seed)
    p, q = min(p, n), min(q, n)
    a = random_form(n, rng, degrees=[p])
    b = random_form(n, rng, degrees=[q])
    c = random_form(n, rng)
    _close(wedge(a, b).evaluate(pts), wedge(b, a).evaluate(pts) * (-1.0) ** (p * q))
    _close(wedge(wedge(a, b), c).evaluate(pts), wedge(a, wedge(b, c)).evaluate(pts))


def _field(n):
    coords = [f"x{i}" for i in range(n)]
    texts = [f"sin({coords[(i + 1) % n]})+{coords[i]}*{coords[(i + 2) % n]}" for i in range(n)]
    fn = expr.compile_vector(texts, coords)
    return VectorField(fn, n, "V")


@settings(max_examples=10, deadline=None)
@given(dims, seeds)
def test_contraction_is_nilpotent_and_cartan_commutes_with_d(n, seed):
    rng, pts = _setup(n, seed)
    a = random_form(n, rng)
    V = _field(n)
    _close(interior_product(V, interior_product(V, a)).evaluate(pts), 0.0 * pts[:, :1])
    L = lie_derivative(V, exterior_derivative(a)).evaluate(pts)
    dL = exterior_derivative(lie_derivative(V, a)).evaluate(pts)
    _close(L, dL, 1e-11)


@pytest.mark.parametrize("n", [2, 3])
def test_cartan_formula_matches_flow_oracle_for_non_killing_field(n):
    rng, pts = _setup(n, 7, 30)
    pts *= 0.5
    a = random_form(n, rng)
    V = _field(n)
    oracle = flows.flow_lie_derivative(a, V, pts)
    _close(lie_derivative(V, a).evaluate(pts), oracle, 1e-8)


@settings(max_examples=10, deadline=None)
@given(dims, seeds)
def test_exponential_inverts(n, seed):
    rng, pts = _setup(n, seed)
    a = random_form(n, rng)
    prod = wedge(exp_form(a), exp_form(a * -1.0)).evaluate(pts)
    one = constant_form(n, 1.0).evaluate(pts)
    _close(prod, one)


def test_wedge_signs_by_hand():
    n = 3
    dx = constant_form(n, 1.0, (0,))
    dy = constant_form(n, 1.0, (1,))
    dz = constant_form(n, 1.0, (2,))
    v = (dz * dx * dy).at(np.zeros(3))
    assert v[(0, 1, 2)] == pytest.approx(1.0)
    assert v[(2, 0, 1)] == pytest.approx(1.0)
    assert v[(1, 0, 2)] == pytest.approx(-1.0)
    assert v[(0, 0, 2)] == 0.0
    w = (dy * dx).at(np.zeros(3))
    np.testing.assert_allclose(w.antisymmetric(2)[:2, :2], [[0, -1], [1, 0]])


def test_evaluation_order_guard():
    a = exterior_derivative(constant_form(2, 1.0))
    with pytest.raises(ADOrderError):
        a.evaluate(np.zeros((1, 2)), order=0)


def test_pullback_of_top_form_is_jacobian_determinant():
    n = 3
    rng = np.random.default_rng(0)
    jac = rng.normal(size=(5, n, n))
    top = np.zeros((5, 1 << n), dtype=complex)
    top[:, -1] = 1.0
    pulled = calculus.pullback_values(top, jac)
    np.testing.assert_allclose(pulled[:, -1], np.linalg.det(jac), rtol=1e-12)
