import numpy as np
import pytest

from equiloc import expr, jets
from equiloc.errors import ExpressionError


def test_evaluates_on_arrays_and_jets():
    f = expr.compile_scalar("a*sin(x)+y**2", ["x", "y"], {"a": 2.0})
    pts = np.array([[0.3, -0.4], [1.0, 2.0]])
    np.testing.assert_allclose(f(pts), 2 * np.sin(pts[:, 0]) + pts[:, 1] ** 2)
    j = f(jets.variables(pts, 1))
    np.testing.assert_allclose(j.first_derivatives()[:, 0], 2 * np.cos(pts[:, 0]))


def test_constant_expressions_carry_batch_shape():
    f = expr.compile_vector(["1", "pi"], ["x", "y"])
    out = f(jets.variables(np.zeros((4, 2)), 1))
    assert out.shape == (4, 2)
    np.testing.assert_allclose(out.value[:, 1], np.pi)


@pytest.mark.parametrize("text", [
    "__import__('os')", "x.__class__", "(lambda q: q)(x)", "[x for x in y]", "open('f')", "z",
])
def test_rejects_disallowed_constructs(text):
    with pytest.raises(ExpressionError):
        expr.Expression(text, ["x", "y"])


def test_rejects_name_clash_and_syntax_errors():
    with pytest.raises(ExpressionError):
        expr.Expression("x", ["x"], {"x": 1.0})
    with pytest.raises(ExpressionError):
        expr.Expression("x +", ["x"])
