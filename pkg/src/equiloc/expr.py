"""Tiny closed-form expression grammar for scenario configs.

Grammar: numbers, ``pi``, named parameters, coordinate names, ``+ - * /``,
integer powers ``**``, unary minus, and the functions ``sin cos exp sqrt``.
Compiled expressions evaluate on floats, numpy arrays and :class:`Jet` s.
"""

import ast
import math

import numpy as np

from . import jets
from .errors import ExpressionError

_FUNCS = {"sin": jets.sin, "cos": jets.cos, "exp": jets.exp, "sqrt": jets.sqrt}
_CONSTS = {"pi": math.pi}


def _check(node, names):
    if isinstance(node, ast.Expression):
        return _check(node.body, names)
    if isinstance(node, ast.BinOp):
        if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        if isinstance(node.op, ast.Pow):
            exponent = node.right
            if isinstance(exponent, ast.UnaryOp) and isinstance(exponent.op, ast.USub):
                exponent = exponent.operand
            if not (isinstance(exponent, ast.Constant) and isinstance(exponent.value, int)):
                raise ExpressionError("only integer literal exponents are allowed")
        _check(node.left, names)
        _check(node.right, names)
        return
    if isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError("only unary +/- allowed")
        _check(node.operand, names)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            raise ExpressionError(f"unknown function in {ast.unparse(node)!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], names)
        return
    if isinstance(node, ast.Name):
        if node.id not in names and node.id not in _CONSTS:
            raise ExpressionError(f"unknown name {node.id!r}")
        return
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"bad literal {node.value!r}")
        return
    raise ExpressionError(f"construct {type(node).__name__} not allowed")


class Expression:
    """A parsed expression over coordinate names and parameters."""

    def __init__(self, text, coords, params=None):
        self.text = str(text)
        self.coords = tuple(coords)
        self.params = dict(params or {})
        clash = set(self.coords) & set(self.params)
        if clash:
            raise ExpressionError(f"names used as both coordinate and parameter: {clash}")
        try:
            tree = ast.parse(self.text, mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {self.text!r}: {exc.msg}") from None
        _check(tree, set(self.coords) | set(self.params))
        self._code = compile(tree, "<expr>", "eval")

    def __call__(self, x):
        """Evaluate on coordinates ``x[..., i]`` (jet or array)."""
        env = dict(_FUNCS)
        env.update(_CONSTS)
        env.update(self.params)
        for i, name in enumerate(self.coords):
            env[name] = x[..., i]
        return eval(self._code, {"__builtins__": {}}, env)

    def __repr__(self):
        return f"Expression({self.text!r})"


def compile_vector(texts, coords, params=None):
    exprs = [Expression(t, coords, params) for t in texts]

    def evaluate(x):
        return jets.stack([_broadcast(e(x), x) for e in exprs], axis=-1)

    return evaluate


def compile_matrix(rows, coords, params=None):
    exprs = [[Expression(t, coords, params) for t in row] for row in rows]

    def evaluate(x):
        return jets.stack([jets.stack([_broadcast(e(x), x) for e in row], axis=-1)
                           for row in exprs], axis=-2)

    return evaluate


def compile_scalar(text, coords, params=None):
    e = Expression(text, coords, params)

    def evaluate(x):
        return _broadcast(e(x), x)

    return evaluate


def _broadcast(value, x):
    # constant expressions must still carry the batch shape of x
    if jets.is_jet(value):
        return value
    batch = x.shape[:-1]
    value = np.broadcast_to(np.asarray(value, dtype=float), batch)
    if jets.is_jet(x):
        return jets.constant(value, x)
    return value
