import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiloc import zeroset
from equiloc.zeroset import find_zero_components, normal_restriction, pfaffian


def _skew(rng, n, batch=()):
    a = rng.normal(size=batch + (n, n)) + 1j * rng.normal(size=batch + (n, n))
    return a - np.swapaxes(a, -1, -2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_pfaffian_squares_to_determinant(half, seed):
    A = _skew(np.random.default_rng(seed), 2 * half)
    pf = pfaffian(A)
    assert abs(pf**2 - np.linalg.det(A)) <= 1e-10 * abs(np.linalg.det(A))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_pfaffian_congruence(half, seed):
    rng = np.random.default_rng(seed)
    n = 2 * half
    A = _skew(rng, n)
    B = rng.normal(size=(n, n))
    lhs = pfaffian(B @ A @ B.T)
    assert lhs == pytest.approx(np.linalg.det(B) * pfaffian(A), rel=1e-9)


def test_pfaffian_small_cases():
    assert pfaffian(np.zeros((0, 0))) == 1
    a = np.array([[0, 2.0], [-2.0, 0]])
    assert pfaffian(a) == 2.0
    rng = np.random.default_rng(3)
    m = _skew(rng, 4)
    expected = m[0, 1] * m[2, 3] - m[0, 2] * m[1, 3] + m[0, 3] * m[1, 2]
    assert pfaffian(m) == pytest.approx(expected, rel=1e-13)
    batch = _skew(rng, 6, (3,))
    np.testing.assert_allclose(pfaffian(batch), [pfaffian(b) for b in batch], rtol=1e-13)


def test_expansion_and_elimination_agree():
    rng = np.random.default_rng(4)
    for n in (4, 6, 8):
        A = _skew(rng, n)
        assert zeroset._parlett_reid(A) == pytest.approx(pfaffian(A), rel=1e-11)


@pytest.mark.parametrize("name,expected", [
    ("sphere2_rotation", {"N", "S"}),
    ("sphere2_two_rotations", {"N", "S"}),
    ("torus2_translations", set()),
])
def test_zero_search_agrees_with_declared_components(scenario, name, expected):
    sc = scenario(name)
    assert {c.id for c in find_zero_components(sc, sc.pair)} == expected


def test_four_dimensional_zero_sets(scenario):
    assert len(find_zero_components(scenario("product_s2xs2"))) == 4
    comps = find_zero_components(scenario("product_positive_dim_M0"))
    assert sorted(c.tangent_dim for c in comps) == [2, 2]


def test_normal_linearization_at_the_north_pole(scenario):
    sc = scenario("sphere2_two_rotations", t=1.0, c=2.0)
    north = next(c for c in sc.components if c.id == "N")
    mux, muy = normal_restriction(north, sc, sc.pair)
    np.testing.assert_allclose(mux, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-13)
    np.testing.assert_allclose(muy, 2.0 * mux, atol=1e-13)
    A = -mux - 1j * muy
    assert pfaffian(A / (2 * math.pi)) == pytest.approx((-1 - 2j) / (2 * math.pi), rel=1e-12)


def test_jacobowitz_set_contains_the_zero_set(scenario):
    sc = scenario("sphere2_two_rotations", c=1.0)
    assert zeroset.jacobowitz_membership(sc, sc.pair, np.array([1e-9, 0.2]))
