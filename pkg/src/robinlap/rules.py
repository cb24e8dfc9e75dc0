"""Closed-form diagonal rules ``ell -> theta_ell`` written as small formulas.

Accepted syntax: numbers, the mode index ``l`` (alias ``ell``), the imaginary
unit ``i`` (or ``j``, or a ``2j`` literal), ``+ - * /``, powers ``^``/``**``,
parentheses and the functions ``sqrt``, ``exp``, ``log``.
Examples: ``"2"``, ``"c*(1+l)^(-q)"`` with ``c``, ``q`` substituted,
``"1 + 1*i"``, ``"2 - (1+l)^(-2)"``.
"""
from __future__ import annotations

import ast
import operator

import numpy as np

from .errors import ValidationError

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": np.sqrt, "exp": np.exp, "log": np.log}
_INDEX_NAMES = ("l", "ell")
_IMAG_NAMES = ("i", "j")


class DiagonalRule:
    """Vectorized callable built from a formula string."""

    def __init__(self, text: str, params: dict | None = None):
        self.text = str(text)
        self.params = dict(params or {})
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ValidationError(f"cannot parse rule {self.text!r}: {exc.msg}") from None
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ValidationError(f"operator not allowed in rule {self.text!r}")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                raise ValidationError(f"operator not allowed in rule {self.text!r}")
            self._check(node.operand)
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float, complex)) or isinstance(node.value, bool):
                raise ValidationError(f"constant {node.value!r} not allowed in rule {self.text!r}")
        elif isinstance(node, ast.Name):
            if node.id not in _INDEX_NAMES + _IMAG_NAMES and node.id not in self.params:
                raise ValidationError(f"unknown name {node.id!r} in rule {self.text!r}")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
                raise ValidationError(f"call not allowed in rule {self.text!r}")
            if len(node.args) != 1:
                raise ValidationError(f"functions take one argument in rule {self.text!r}")
            self._check(node.args[0])
        else:
            raise ValidationError(f"syntax not allowed in rule {self.text!r}")

    def _eval(self, node, ell):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, ell), self._eval(node.right, ell))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, ell))
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            if node.id in _INDEX_NAMES:
                return ell
            if node.id in _IMAG_NAMES:
                return 1j
            return self.params[node.id]
        return _FUNCS[node.func.id](self._eval(node.args[0], ell))

    def __call__(self, ell):
        ell = np.asarray(ell, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = self._eval(self._tree, ell)
        return np.broadcast_to(np.asarray(value, dtype=complex), ell.shape).copy()

    def __repr__(self):
        return f"DiagonalRule({self.text!r})"


def constant_rule(value) -> DiagonalRule:
    value = complex(value)
    if value.imag == 0:
        return DiagonalRule(repr(value.real))
    return DiagonalRule(f"({value.real!r}) + ({value.imag!r})*i")
