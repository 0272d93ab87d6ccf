import math

import numpy as np
import pytest

from equiloc import jets, localization, suites
from equiloc.calculus import constant_form, form_from_components
from equiloc.equivariant import GeneratorKind
from equiloc.errors import PreconditionError
from equiloc.localization import decay_profile, integrate, verify_localization


def _area_form():
    return form_from_components(2, {(0, 1): lambda x: jets.sin(x[..., 0])})


def test_sphere_area(scenario):
    sc = scenario("sphere2_rotation")
    assert integrate(sc, _area_form()) == pytest.approx(4 * math.pi, rel=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_fixed_point_formula_on_the_sphere(scenario, c):
    sc = scenario("sphere2_two_rotations", c=c)
    rep = verify_localization(sc, sc.pair, suites.default_form(sc))
    assert rep.passed(1e-6)
    assert rep.rel_residual < 1e-9
    assert {cid for cid, _ in rep.per_component} == {"N", "S"}


def test_unit_form_contributions_cancel(scenario):
    sc = scenario("sphere2_two_rotations", c=1.0)
    rhs, per = localization.localization_rhs(sc, sc.pair, sc.components, constant_form(2, 1.0))
    assert abs(rhs) < 1e-10
    assert all(abs(v) > 0.01 for _, v in per)


def test_non_closed_forms_are_refused(scenario):
    sc = scenario("sphere2_rotation")
    with pytest.raises(PreconditionError):
        verify_localization(sc, sc.pair, _area_form())


def test_non_compact_scenarios_are_refused(scenario):
    sc = scenario("plane_cr")
    with pytest.raises(PreconditionError, match="not compact"):
        integrate(sc, constant_form(2, 1.0, (0, 1)))


@pytest.mark.parametrize("kind", list(GeneratorKind))
def test_deformation_does_not_change_the_integral(scenario, kind):
    sc = scenario("sphere2_two_rotations", c=1.0)
    eta = suites.default_form(sc)
    base = localization.s_deformation_integral(sc, sc.pair, eta, kind, 0.0)
    for s in (0.5, 2.0):
        val = localization.s_deformation_integral(sc, sc.pair, eta, kind, s, check=False)
        assert abs(val - base) < 1e-8 * abs(base)


def test_deformed_integrand_changes_pointwise(scenario):
    sc = scenario("sphere2_two_rotations", c=1.0)
    eta = suites.default_form(sc)
    d = localization.deformed_form(sc, sc.pair, eta, [(GeneratorKind.XplusIY, 1.0)])
    pts = np.array([[1.0, 0.5]])
    assert np.max(np.abs(d.evaluate(pts) - eta.evaluate(pts))) > 0.1


def test_empty_zero_set_decay(scenario):
    sc = scenario("torus2_translations")
    for eta in sc.test_forms.values():
        prof = decay_profile(sc, sc.pair, eta, [1.0, 2.0, 4.0, 8.0])
        assert max(abs(v) for v in prof.values) < 1e-8
        assert prof.strictly_decreasing() and prof.r_squared > 0.99
        assert prof.rate > 0


def test_decay_with_a_non_trivial_invariant_form(scenario):
    sc = scenario("torus2_translations", c=0.7)
    prof = decay_profile(sc, sc.pair, sc.test_forms["profile"], [1.0, 2.0, 4.0])
    assert prof.strictly_decreasing()
    assert abs(prof.integral) < 1e-8


def test_report_serialises(scenario):
    sc = scenario("sphere2_rotation")
    rep = verify_localization(sc, sc.pair, suites.default_form(sc))
    d = rep.to_dict()
    assert set(d) >= {"lhs", "rhs", "per_component", "rel_residual", "quadrature_error_estimate"}


@pytest.mark.slow
def test_positive_dimensional_components(scenario):
    sc = scenario("product_positive_dim_M0")
    rep = verify_localization(sc, sc.pair, suites.default_form(sc))
    assert rep.rel_residual < 1e-5
    # each component contributes an integral over a whole sphere factor
    assert len(rep.per_component) == 2
