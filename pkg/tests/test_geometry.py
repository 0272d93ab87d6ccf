import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiloc import geometry, jets
from equiloc.errors import SingularityError

from conftest import cached_scenario

theta = st.floats(0.2, math.pi - 0.2)
phi = st.floats(0.0, 2 * math.pi)


@settings(max_examples=30, deadline=None)
@given(theta, phi)
def test_round_sphere_closed_forms(th, ph):
    sc = cached_scenario("sphere2_rotation", t=1.0)
    p = np.array([th, ph])
    np.testing.assert_allclose(geometry.metric_at(sc, p), np.diag([1.0, math.sin(th) ** 2]),
                               atol=1e-14)
    gam = geometry.christoffel_at(sc, p)
    assert gam[0, 1, 1] == pytest.approx(-math.sin(th) * math.cos(th), abs=1e-13)
    assert gam[1, 0, 1] == pytest.approx(math.cos(th) / math.sin(th), abs=1e-12)
    assert gam[1, 1, 0] == pytest.approx(gam[1, 0, 1], abs=1e-14)
    R = geometry.riemann_at(sc, p)
    assert R[0, 1, 0, 1] == pytest.approx(math.sin(th) ** 2, abs=1e-12)
    np.testing.assert_allclose(R, -R.swapaxes(0, 1), atol=1e-12)
    np.testing.assert_allclose(R, -R.swapaxes(2, 3), atol=1e-12)


def test_oracle_point_from_the_calibration_table(scenario):
    sc = scenario("sphere2_rotation", t=1.0)
    p = np.array([math.pi / 4, 0.3])
    np.testing.assert_allclose(geometry.metric_at(sc, p), np.diag([1.0, 0.5]), atol=1e-15)


@pytest.mark.parametrize("name", ["sphere2_rotation", "torus2_translations", "product_s2xs2"])
def test_levi_civita_is_metric_compatible(scenario, name):
    sc = scenario(name)
    pts = sc.geometry.chart.sample(np.random.default_rng(1), 50)
    assert geometry.metric_compatibility_residual(sc, pts) < 1e-12


def test_killing_residual_separates_killing_fields(scenario):
    sc = scenario("sphere2_rotation")
    pts = sc.geometry.chart.sample(np.random.default_rng(2), 60)
    assert geometry.killing_residual(sc, sc.geometry.X, pts) < 1e-12
    d_theta = geometry.VectorField.coordinate(2, 0)
    assert geometry.killing_residual(sc, d_theta, pts) > 1e-2


def test_moment_endomorphism_is_skew_for_killing_fields(scenario):
    sc = scenario("sphere2_two_rotations", c=1.0)
    pts = sc.geometry.chart.sample(np.random.default_rng(3), 40)
    assert geometry.killing_skew_residual(sc, sc.geometry.Y, pts) < 1e-12


def test_orthonormal_frame(scenario):
    sc = scenario("sphere2_rotation", eps=0.2)
    pts = sc.geometry.chart.sample(np.random.default_rng(4), 20)
    g = sc.geometry.metric(jets.variables(pts, 0))
    E = geometry.orthonormal_frame_jet(g).value
    gram = np.einsum("pia,pij,pjb->pab", E, g.value, E)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(2), gram.shape), atol=1e-13)


def test_singular_locus_is_rejected(scenario):
    sc = scenario("sphere2_rotation")
    with pytest.raises(SingularityError):
        sc.geometry.chart.check_points(np.array([[0.0, 1.0]]))
    sc.geometry.chart.check_points(np.array([[1e-3, 1.0]]))


def test_coordinate_fields_commute(scenario):
    sc = scenario("torus2_translations")
    pts = sc.geometry.chart.sample(np.random.default_rng(5), 10)
    a = geometry.VectorField.coordinate(2, 0)
    b = geometry.VectorField.coordinate(2, 1)
    assert np.max(np.abs(geometry.bracket_at(sc, a, b, pts))) == 0.0
