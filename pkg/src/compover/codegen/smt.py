"""Contract expressions as SMT-LIB v2 terms.

Booleans stay Bool; integers become BitVec of their exact width; record
selects flatten to per-field constants joined with double underscores, so
`x.pos.lat` reads the constant `x__pos__lat` (the checker declares these).
"""

from __future__ import annotations

from ..il import Binary, BoolLit, Expr, IntLit, Ite, Not, Old, Select, Var
from ..il.types import SemType
from .names import NameMap, UnmappedVariable

_OP_SMT = {
    "and": "and", "or": "or",
    "eq": "=",
    "ltu": "bvult", "leu": "bvule", "gtu": "bvugt", "geu": "bvuge",
    "lts": "bvslt", "les": "bvsle", "gts": "bvsgt", "ges": "bvsge",
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul",
}


def smt_sort(t: SemType) -> str:
    if t.kind == "bool":
        return "Bool"
    if t.is_int:
        return f"(_ BitVec {t.width})"
    raise ValueError("record types flatten to per-field constants; no aggregate sort")


def _select_path(e: Expr) -> tuple[Expr, list[str]]:
    fields: list[str] = []
    while isinstance(e, Select):
        fields.append(e.field)
        e = e.base
    return e, list(reversed(fields))


def compile_to_smt(e: Expr, m: NameMap) -> str:
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        return f"(_ bv{e.value} {e.type.width})"
    if isinstance(e, Var):
        return m.post_of(e.name)
    if isinstance(e, Old):
        return m.pre_of(e.name)
    if isinstance(e, Select):
        base, fields = _select_path(e)
        if isinstance(base, Var):
            root = m.post_of(base.name)
        elif isinstance(base, Old):
            root = m.pre_of(base.name)
        else:
            raise UnmappedVariable(f"select base must be a variable, got {base!r}")
        return "__".join([root] + fields)
    if isinstance(e, Not):
        return f"(not {compile_to_smt(e.arg, m)})"
    if isinstance(e, Binary):
        left = compile_to_smt(e.left, m)
        right = compile_to_smt(e.right, m)
        if e.op == "implies":
            return f"(=> {left} {right})"
        if e.op == "neq":
            return f"(not (= {left} {right}))"
        return f"({_OP_SMT[e.op]} {left} {right})"
    if isinstance(e, Ite):
        return (
            f"(ite {compile_to_smt(e.cond, m)} "
            f"{compile_to_smt(e.then, m)} {compile_to_smt(e.orelse, m)})"
        )
    raise TypeError(f"not an expression: {e!r}")
