"""Concrete evaluation of contract expressions over assignments.

With only `pre` given, bare names read the pre-state and old(...) is an
error. With both, bare names read `post` and old(...) reads `pre`. Arithmetic
wraps modulo 2^width; the untaken branch of an if-expression is not evaluated.
"""

from __future__ import annotations

from typing import Optional

from .ast import Binary, BoolLit, Expr, IntLit, Ite, Not, Old, Select, Var
from .errors import IlTypeError, MissingPostState
from .types import Assignment, Value


def eval_expr(e: Expr, pre: Assignment, post: Optional[Assignment] = None) -> Value:
    if isinstance(e, BoolLit):
        return Value.of_bool(e.value)
    if isinstance(e, IntLit):
        return Value(e.type, e.value)
    if isinstance(e, Var):
        v = (post if post is not None else pre)[e.name]
        return v
    if isinstance(e, Old):
        if post is None:
            raise MissingPostState(e.name)
        return pre[e.name]
    if isinstance(e, Select):
        return eval_expr(e.base, pre, post).field(e.field)
    if isinstance(e, Not):
        return Value.of_bool(not eval_expr(e.arg, pre, post).as_bool)
    if isinstance(e, Ite):
        cond = eval_expr(e.cond, pre, post).as_bool
        return eval_expr(e.then if cond else e.orelse, pre, post)
    if isinstance(e, Binary):
        a = eval_expr(e.left, pre, post)
        b = eval_expr(e.right, pre, post)
        return _apply(e.op, a, b)
    raise IlTypeError(f"not an expression: {e!r}")


def _apply(op: str, a: Value, b: Value) -> Value:
    if op == "and":
        return Value.of_bool(a.as_bool and b.as_bool)
    if op == "or":
        return Value.of_bool(a.as_bool or b.as_bool)
    if op == "implies":
        return Value.of_bool((not a.as_bool) or b.as_bool)
    if op == "eq":
        return Value.of_bool(a.payload == b.payload)
    if op == "neq":
        return Value.of_bool(a.payload != b.payload)
    if op == "ltu":
        return Value.of_bool(a.as_unsigned < b.as_unsigned)
    if op == "leu":
        return Value.of_bool(a.as_unsigned <= b.as_unsigned)
    if op == "gtu":
        return Value.of_bool(a.as_unsigned > b.as_unsigned)
    if op == "geu":
        return Value.of_bool(a.as_unsigned >= b.as_unsigned)
    if op == "lts":
        return Value.of_bool(a.as_signed < b.as_signed)
    if op == "les":
        return Value.of_bool(a.as_signed <= b.as_signed)
    if op == "gts":
        return Value.of_bool(a.as_signed > b.as_signed)
    if op == "ges":
        return Value.of_bool(a.as_signed >= b.as_signed)
    if op == "add":
        return Value.of_int(a.as_unsigned + b.as_unsigned, a.type)
    if op == "sub":
        return Value.of_int(a.as_unsigned - b.as_unsigned, a.type)
    if op == "mul":
        return Value.of_int(a.as_unsigned * b.as_unsigned, a.type)
    raise IlTypeError(f"unknown operator '{op}'")


def eval_bool(e: Expr, pre: Assignment, post: Optional[Assignment] = None) -> bool:
    return eval_expr(e, pre, post).as_bool
