"""Type checking for contract expressions.

Positions matter: a precondition ("pre") sees only pre-state variables, so
old(...) is rejected there; a postcondition ("post") reads post-state through
bare names and pre-state through old(...).
"""

from __future__ import annotations

from .ast import (
    ARITH_OPS,
    BOOL_OPS,
    Binary,
    BoolLit,
    CMP_OPS,
    EQ_OPS,
    Expr,
    IntLit,
    Ite,
    Not,
    Old,
    Select,
    Var,
)
from .errors import IlTypeError, OldInPrecondition
from .types import SemType, VarContext

PRE = "pre"
POST = "post"


def typecheck(e: Expr, ctx: VarContext, position: str = POST) -> SemType:
    """Return the expression's type or raise; position is 'pre' or 'post'."""
    if position not in (PRE, POST):
        raise ValueError(f"position must be 'pre' or 'post', got {position!r}")
    return _check(e, ctx, position)


def _check(e: Expr, ctx: VarContext, position: str) -> SemType:
    if isinstance(e, BoolLit):
        return SemType.bool_()
    if isinstance(e, IntLit):
        if not e.type.is_int:
            raise IlTypeError(f"integer literal carries non-integer type {e.type}")
        if not 0 <= e.value < (1 << e.type.width):
            raise IlTypeError(f"literal {e.value} does not fit in {e.type}")
        return e.type
    if isinstance(e, Var):
        return ctx.type_of(e.name)
    if isinstance(e, Old):
        if position == PRE:
            raise OldInPrecondition(e.name)
        return ctx.type_of(e.name)
    if isinstance(e, Select):
        base = _check(e.base, ctx, position)
        if base.kind != "record":
            raise IlTypeError(f"field access on non-record type {base}")
        return base.field_type(e.field)
    if isinstance(e, Not):
        t = _check(e.arg, ctx, position)
        if t.kind != "bool":
            raise IlTypeError(f"'!' needs a bool operand, got {t}")
        return SemType.bool_()
    if isinstance(e, Binary):
        lt = _check(e.left, ctx, position)
        rt = _check(e.right, ctx, position)
        op = e.op
        if op in BOOL_OPS:
            if lt.kind != "bool" or rt.kind != "bool":
                raise IlTypeError(f"'{op}' needs bool operands, got {lt} and {rt}")
            return SemType.bool_()
        if op in EQ_OPS:
            if lt != rt:
                raise IlTypeError(f"'{op}' needs matching operand types, got {lt} and {rt}")
            if lt.kind == "record":
                raise IlTypeError("records are compared field by field, not with ==")
            return SemType.bool_()
        if op in CMP_OPS:
            if lt != rt or not lt.is_int:
                raise IlTypeError(f"'{op}' needs matching integer operands, got {lt} and {rt}")
            if op.endswith("u") and lt.signed:
                raise IlTypeError(f"unsigned comparison '{op}' on signed type {lt}")
            if op.endswith("s") and not lt.signed:
                raise IlTypeError(f"signed comparison '{op}' on unsigned type {lt}")
            return SemType.bool_()
        # arithmetic
        if lt != rt or not lt.is_int:
            raise IlTypeError(f"'{op}' needs matching integer operands, got {lt} and {rt}")
        return lt
    if isinstance(e, Ite):
        ct = _check(e.cond, ctx, position)
        if ct.kind != "bool":
            raise IlTypeError(f"if-condition must be bool, got {ct}")
        tt = _check(e.then, ctx, position)
        et = _check(e.orelse, ctx, position)
        if tt != et:
            raise IlTypeError(f"if-branches disagree: {tt} vs {et}")
        if tt.kind == "record":
            raise IlTypeError("record-valued if-expressions are not supported; select a field first")
        return tt
    raise IlTypeError(f"not an expression: {e!r}")


def check_bool(e: Expr, ctx: VarContext, position: str) -> None:
    t = typecheck(e, ctx, position)
    if t.kind != "bool":
        raise IlTypeError(f"expected a bool expression, got type {t}")
