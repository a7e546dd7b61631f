"""Contract expressions as side-effect-free C expressions.

Value representation:
  bool                    -> an expression with value 0 or 1
  uN for N in {8,16,32,64} -> uintN_t
  sN for N in {8,16,32,64} -> intN_t (two's complement)
  any other width w       -> next-wider uintN_t holding the w-bit pattern,
                             upper bits zero

Arithmetic is routed through uint64_t so integer promotion and intermediate
overflow cannot change the value, then truncated (or masked, for non-machine
widths) back to the operand width. Non-machine widths compare on their
zero-extended patterns; signed comparisons on those XOR the sign bit into
both sides, which orders patterns the way signed values order without a
cast to a signed type. Conversions of out-of-range values to signed types
(the (intN_t) casts below) follow the universal two's-complement behaviour
that CBMC, gcc and clang implement.

Record fields read through the NameMap access style on the first hop
(`->` for pointer-to-aggregate variables) and `.` below that; old()
snapshots are by-value copies, so their fields always use `.`.
"""

from __future__ import annotations

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
from .names import ARROW, NameMap, UnmappedVariable

_CMP_SYM = {
    "ltu": "<", "leu": "<=", "gtu": ">", "geu": ">=",
    "lts": "<", "les": "<=", "gts": ">", "ges": ">=",
    "eq": "==", "neq": "!=",
}
_ARITH_SYM = {"add": "+", "sub": "-", "mul": "*"}


def c_type(t: SemType) -> str:
    """Declaration type for a variable of IL type t (see module docstring)."""
    if t.kind == "bool":
        return "bool"
    if not t.is_int:
        raise ValueError("record variables are declared through their own struct type")
    if t.width in MACHINE_WIDTHS:
        return f"int{t.width}_t" if t.signed else f"uint{t.width}_t"
    return f"uint{storage_width(t.width)}_t"


def _unsigned_const(value: int, wide: bool) -> str:
    return f"{value}ULL" if wide or value > 0xFFFFFFFF else f"{value}U"


def _int_lit(lit: IntLit) -> str:
    t = lit.type
    if not t.signed or t.width not in MACHINE_WIDTHS:
        # Unsigned value, or a signed non-machine width stored as its pattern.
        return _unsigned_const(lit.value, t.width == 64)
    sv = lit.value - (1 << t.width) if lit.value >= (1 << (t.width - 1)) else lit.value
    if t.width == 64:
        if sv == -(1 << 63):
            return "(-9223372036854775807LL - 1LL)"
        return f"{sv}LL"
    if t.width == 32 and sv == -(1 << 31):
        return "(-2147483647 - 1)"
    return str(sv)


def _paren(s: str) -> str:
    """Wrap operands that are not already self-delimiting."""
    return s if s.startswith("(") else f"({s})"


def _select_text(e: Select, m: NameMap) -> str:
    fields = []
    base: Expr = e
    while isinstance(base, Select):
        fields.append(base.field)
        base = base.base
    fields.reverse()
    if isinstance(base, Var):
        root = m.post_of(base.name)
        joint = "->" if m.access_of(base.name) == ARROW else "."
    elif isinstance(base, Old):
        root = m.pre_of(base.name)
        joint = "."
    else:
        raise UnmappedVariable(f"field access must start at a variable, got {base!r}")
    return root + joint + fields[0] + "".join("." + f for f in fields[1:])


def compile_to_c(e: Expr, m: NameMap) -> str:
    if isinstance(e, BoolLit):
        return "1" if e.value else "0"
    if isinstance(e, IntLit):
        return _int_lit(e)
    if isinstance(e, Var):
        return m.post_of(e.name)
    if isinstance(e, Old):
        return m.pre_of(e.name)
    if isinstance(e, Select):
        return _select_text(e, m)
    if isinstance(e, Not):
        return f"(!{compile_to_c(e.arg, m)})"
    if isinstance(e, Ite):
        return (
            f"({compile_to_c(e.cond, m)} ? "
            f"{compile_to_c(e.then, m)} : {compile_to_c(e.orelse, m)})"
        )
    if isinstance(e, Binary):
        a = compile_to_c(e.left, m)
        b = compile_to_c(e.right, m)
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
            bias = _unsigned_const(1 << (t.width - 1), t.width > 32)
            return f"(({a} ^ {bias}) {sym} ({b} ^ {bias}))"
        if op in ARITH_OPS:
            t = operand_type(e.left, e.right, m, f"'{op}'")
            core = f"((uint64_t){_paren(a)} {_ARITH_SYM[op]} (uint64_t){_paren(b)})"
            if t.width in MACHINE_WIDTHS:
                if t.signed:
                    return f"(int{t.width}_t)(uint{t.width}_t){core}"
                return f"(uint{t.width}_t){core}"
            mask = _unsigned_const((1 << t.width) - 1, t.width > 32)
            return f"(uint{storage_width(t.width)}_t)({core} & {mask})"
    raise TypeError(f"not an expression: {e!r}")
