import math

import numpy as np
import pytest

from equiloc.errors import IntegrationError
from equiloc.quadrature import QuadratureSpec, apply_chunked, gauss_grid, integrate_box


def test_polynomials_integrate_exactly_on_the_base_grid():
    box = [(0.0, 2.0), (-1.0, 1.0)]
    res = integrate_box(lambda p: p[:, 0] ** 7 * p[:, 1] ** 6, box,
                        QuadratureSpec(base_nodes=8), adaptive=False)
    assert res.value == pytest.approx(2.0**8 / 8 * 2.0 / 7, rel=1e-14)


def test_adaptive_refinement_reaches_tolerance():
    res = integrate_box(lambda p: np.exp(-p[:, 0] ** 2 - 3 * p[:, 1] ** 2),
                        [(-3.0, 3.0), (-2.0, 2.0)], QuadratureSpec(rtol=1e-12))
    exact = math.sqrt(math.pi) * math.erf(3.0) * math.sqrt(math.pi / 3) * math.erf(2 * math.sqrt(3))
    assert res.value == pytest.approx(exact, rel=1e-12)
    assert res.counts[1] >= res.counts[0]


def test_divergent_refinement_raises():
    spec = QuadratureSpec(base_nodes=4, max_nodes=64, rtol=1e-12)
    with pytest.raises(IntegrationError):
        integrate_box(lambda p: 1.0 / p[:, 0] ** 2, [(0.0, 1.0)], spec)


def test_capped_but_settling_refinement_reports_its_error():
    spec = QuadratureSpec(base_nodes=4, max_nodes=16, rtol=1e-14)
    res = integrate_box(lambda p: np.sqrt(p[:, 0]), [(0.0, 1.0)], spec)
    assert res.counts == (16,)
    assert 0 < res.error < 1e-3
    assert abs(res.value - 2.0 / 3.0) < 10 * res.error


def test_chunking_does_not_change_values():
    pts, w = gauss_grid([(0.0, 1.0), (0.0, 2.0)], [9, 7])
    assert pts.shape == (63, 2) and w.sum() == pytest.approx(2.0, rel=1e-14)
    f = lambda p: np.cos(p[:, 0] * p[:, 1])
    np.testing.assert_array_equal(apply_chunked(f, pts, 5), f(pts))
