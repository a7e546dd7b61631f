"""Contract expressions as side-effect-free Rust expressions.

Value representation mirrors the C backend: bool, native uN/iN for machine
widths, and the next-wider unsigned type holding the zero-extended pattern
for any other width. Arithmetic uses wrapping_add/wrapping_sub/wrapping_mul
so release-mode overflow semantics and debug-mode overflow panics cannot
diverge from the IL's wraparound meaning; non-machine widths mask the result
back down (wrapping in the storage width then masking agrees with wrapping
at the narrow width because the narrow modulus divides the storage modulus).
Signed comparisons at non-machine widths XOR the sign bit into both
patterns and compare unsigned. All integer literals carry a type suffix.
"""

from __future__ import annotations

import re

from ..il import (
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
from ..il.types import SemType
from ._width import MACHINE_WIDTHS, operand_type, storage_width
from .names import NameMap, UnmappedVariable

_CMP_SYM = {
    "ltu": "<", "leu": "<=", "gtu": ">", "geu": ">=",
    "lts": "<", "les": "<=", "gts": ">", "ges": ">=",
    "eq": "==", "neq": "!=",
}
_WRAP = {"add": "wrapping_add", "sub": "wrapping_sub", "mul": "wrapping_mul"}

_RECEIVER_OK = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$|^[0-9][A-Za-z0-9_]*$")


def rust_type(t: SemType) -> str:
    if t.kind == "bool":
        return "bool"
    if not t.is_int:
        raise ValueError("record variables are declared through their own struct type")
    if t.width in MACHINE_WIDTHS:
        return f"{'i' if t.signed else 'u'}{t.width}"
    return f"u{storage_width(t.width)}"


def _storage_suffix(t: SemType) -> str:
    return f"u{storage_width(t.width)}"


def _int_lit(lit: IntLit) -> str:
    t = lit.type
    if not t.signed or t.width not in MACHINE_WIDTHS:
        return f"{lit.value}{_storage_suffix(t)}"
    sv = lit.value - (1 << t.width) if lit.value >= (1 << (t.width - 1)) else lit.value
    if t.width == 64 and sv == -(1 << 63):
        return "i64::MIN"
    return f"{sv}i{t.width}"


def _receiver(s: str) -> str:
    """Method-call receivers: unary minus binds looser than `.`, so wrap."""
    if s.startswith("(") or _RECEIVER_OK.match(s):
        return s
    return f"({s})"


def _select_text(e: Select, m: NameMap) -> str:
    fields = []
    base: Expr = e
    while isinstance(base, Select):
        fields.append(base.field)
        base = base.base
    fields.reverse()
    if isinstance(base, Var):
        root = m.post_of(base.name)
    elif isinstance(base, Old):
        root = m.pre_of(base.name)
    else:
        raise UnmappedVariable(f"field access must start at a variable, got {base!r}")
    return root + "".join("." + f for f in fields)


def compile_to_rust(e: Expr, m: NameMap) -> str:
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        return _int_lit(e)
    if isinstance(e, Var):
        return m.post_of(e.name)
    if isinstance(e, Old):
        return m.pre_of(e.name)
    if isinstance(e, Select):
        return _select_text(e, m)
    if isinstance(e, Not):
        return f"(!{compile_to_rust(e.arg, m)})"
    if isinstance(e, Ite):
        return (
            f"(if {compile_to_rust(e.cond, m)} "
            f"{{ {compile_to_rust(e.then, m)} }} else "
            f"{{ {compile_to_rust(e.orelse, m)} }})"
        )
    if isinstance(e, Binary):
        a = compile_to_rust(e.left, m)
        b = compile_to_rust(e.right, m)
        op = e.op
        if op in BOOL_OPS:
            if op == "implies":
                return f"(!{a} || {b})"
            sym = "&&" if op == "and" else "||"
            return f"({a} {sym} {b})"
        if op in EQ_OPS:
            return f"({a} {_CMP_SYM[op]} {b})"
        if op in CMP_OPS:
            sym = _CMP_SYM[op]
            if op.endswith("u"):
                return f"({a} {sym} {b})"
            t = operand_type(e.left, e.right, m, f"'{op}'")
            if t.width in MACHINE_WIDTHS:
                return f"({a} {sym} {b})"
            bias = f"{1 << (t.width - 1)}{_storage_suffix(t)}"
            return f"(({a} ^ {bias}) {sym} ({b} ^ {bias}))"
        if op in ARITH_OPS:
            t = operand_type(e.left, e.right, m, f"'{op}'")
            call = f"{_receiver(a)}.{_WRAP[op]}({b})"
            if t.width in MACHINE_WIDTHS:
                return f"({call})"
            mask = f"{(1 << t.width) - 1}{_storage_suffix(t)}"
            return f"({call} & {mask})"
    raise TypeError(f"not an expression: {e!r}")
