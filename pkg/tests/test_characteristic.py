import math

import numpy as np
import pytest

from equiloc import characteristic, equivariant, localization
from equiloc.errors import PreconditionError


def test_gauss_bonnet_calibration(scenario):
    sc = scenario("sphere2_rotation")
    chi = localization.integrate(sc, characteristic.riemannian_euler_form(sc))
    assert chi == pytest.approx(2.0, rel=1e-10)


def test_gauss_bonnet_survives_metric_perturbation(scenario):
    sc = scenario("sphere2_rotation", eps=0.3)
    chi = localization.integrate(sc, characteristic.riemannian_euler_form(sc))
    assert chi == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("name", ["sphere2_rotation", "sphere2_two_rotations"])
def test_pfaffian_class_localizes(scenario, name):
    sc = scenario(name)
    rep = characteristic.verify_characteristic(sc, which="pfaffian")
    assert rep.rel_residual < 1e-6
    # degree-2 part is the Euler form up to the (-2 pi) normalisation
    assert rep.lhs == pytest.approx(-4 * math.pi, rel=1e-10)


def test_trace_class_localizes(scenario):
    sc = scenario("sphere2_two_rotations", c=0.5)
    rep = characteristic.verify_characteristic(sc, which="trace", coeffs=[1.0, 0.0, 1.0])
    assert rep.abs_residual < 1e-9


def test_equivariant_curvature_satisfies_bianchi(scenario):
    for name in ("sphere2_rotation", "sphere2_two_rotations"):
        sc = scenario(name, eps=0.2)
        assert characteristic.bianchi_residual(sc) < 1e-10


def test_characteristic_forms_are_twisted_closed(scenario):
    sc = scenario("sphere2_two_rotations", eps=0.2)
    pts = equivariant.residual_points(sc, 80)
    Rt = characteristic.equivariant_curvature(sc)
    for form in (characteristic.char_pfaffian_form(Rt),
                 characteristic.char_trace_form([0.0, 1.0, 0.5, 0.1], Rt)):
        assert equivariant.closedness_residual(sc.pair, form, pts) < 1e-9


def test_empty_zero_set_guard(scenario):
    sc = scenario("torus2_translations")
    with pytest.raises(PreconditionError):
        characteristic.verify_characteristic(sc, which="trace", coeffs=[1.0, 1.0])


def test_curvature_entries_are_skew(scenario):
    sc = scenario("sphere2_two_rotations")
    pts = equivariant.residual_points(sc, 20)
    Rt = characteristic.equivariant_curvature(sc)
    vals = Rt.evaluate(pts)
    np.testing.assert_allclose(vals, -np.swapaxes(vals, 1, 2), atol=1e-12)
