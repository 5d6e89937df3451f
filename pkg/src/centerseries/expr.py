"""Rational expressions in the index ``k``.

Grammar (``^`` and ``**`` both mean power)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := ('+' | '-') factor | atom ('^' INT)?
    atom    := INT | 'k' | '(' expr ')'

Exponents must be integer literals (negative allowed in parentheses,
``k^(-2)``).  A top-level multiplicative factor ``(-1)^k`` or ``(-1)^j``
is recognised as a sign pattern and removed from the expression; ``j``
counts the non-zero terms of a stepped sequence and may appear nowhere
else.  Anything else (names, floats, function calls) is rejected.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np


class ExpressionError(ValueError):
    """Raised for expressions outside the supported grammar."""


Node = Union["Const", "Index", "BinOp", "Neg"]


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Index:
    pass


@dataclass(frozen=True)
class Neg:
    operand: Node


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node


_OPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/", ast.Pow: "^"}


def _int_literal(node: ast.AST) -> int | None:
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _int_literal(node.operand)
        if inner is not None:
            return -inner if isinstance(node.op, ast.USub) else inner
    return None


def _sign_factor(node: ast.AST) -> str | None:
    """Return 'k' or 'j' when node is (-1)^k / (-1)^j."""
    if (isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow)
            and _int_literal(node.left) == -1 and isinstance(node.right, ast.Name)
            and node.right.id in ("k", "j")):
        return node.right.id
    return None


def _convert(node: ast.AST) -> Node:
    if isinstance(node, ast.Constant):
        if type(node.value) is not int:
            raise ExpressionError(f"only integer literals are allowed, got {node.value!r}")
        return Const(node.value)
    if isinstance(node, ast.Name):
        if node.id == "k":
            return Index()
        if node.id == "j":
            raise ExpressionError("'j' may only appear in a top-level (-1)^j factor")
        raise ExpressionError(f"unknown name {node.id!r}; only 'k' is allowed")
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return Neg(_convert(node.operand))
        if isinstance(node.op, ast.UAdd):
            return _convert(node.operand)
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        op = _OPS[type(node.op)]
        if op == "^":
            if _sign_factor(node):
                raise ExpressionError("sign factors (-1)^k / (-1)^j must be top-level multiplicative factors")
            exp = _int_literal(node.right)
            if exp is None:
                raise ExpressionError("exponents must be integer literals")
            return BinOp("^", _convert(node.left), Const(exp))
        return BinOp(op, _convert(node.left), _convert(node.right))
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)}")


def _strip_signs(node: ast.AST, signs: list[str]) -> ast.AST | None:
    """Remove top-level (-1)^k factors from a product/quotient chain."""
    s = _sign_factor(node)
    if s:
        signs.append(s)
        return None
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Mult, ast.Div)):
        left = _strip_signs(node.left, signs)
        right = node.right
        rs = _sign_factor(right)
        if rs:
            # (-1)^k in a denominator is the same sign
            signs.append(rs)
            return left if left is not None else ast.Constant(1)
        if left is None:
            left = ast.Constant(1)
        return ast.BinOp(left=left, op=node.op, right=right)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _strip_signs(node.operand, signs)
        return ast.UnaryOp(op=ast.USub(), operand=inner if inner is not None else ast.Constant(1))
    return node


@dataclass(frozen=True)
class Expression:
    """A parsed rational expression; ``sign`` is None, 'k' or 'j'."""

    source: str
    root: Node
    sign: str | None = None

    def exact(self, k: int) -> Fraction:
        return _eval_exact(self.root, Fraction(k))

    def values(self, ks: np.ndarray) -> np.ndarray:
        out = _eval_array(self.root, np.asarray(ks, dtype=float))
        return np.broadcast_to(out, np.shape(ks)).astype(float)


def parse_expression(text: str) -> Expression:
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    signs: list[str] = []
    body = _strip_signs(tree.body, signs)
    if body is None:
        body = ast.Constant(1)
    if len(signs) > 1:
        raise ExpressionError("at most one (-1)^k or (-1)^j factor is allowed")
    return Expression(text, _convert(body), signs[0] if signs else None)


def _eval_exact(node: Node, k: Fraction) -> Fraction:
    if isinstance(node, Const):
        return Fraction(node.value)
    if isinstance(node, Index):
        return k
    if isinstance(node, Neg):
        return -_eval_exact(node.operand, k)
    left = _eval_exact(node.left, k)
    if node.op == "^":
        return left ** node.right.value
    right = _eval_exact(node.right, k)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right == 0:
        raise ZeroDivisionError(f"expression divides by zero at k={k}")
    return left / right


def _eval_array(node: Node, k: np.ndarray) -> np.ndarray | float:
    if isinstance(node, Const):
        return float(node.value)
    if isinstance(node, Index):
        return k
    if isinstance(node, Neg):
        return -_eval_array(node.operand, k)
    left = _eval_array(node.left, k)
    if node.op == "^":
        return np.power(left, float(node.right.value))
    right = _eval_array(node.right, k)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left / right
