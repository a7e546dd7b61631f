"""Width/type inference shared by the C and Rust expression backends.

The backends need an operand's width (mask size, storage type) and
signedness. Literals carry their type; variables get theirs from the
NameMap's optional `types` entry. Comparisons and arithmetic always have
matching operand types, so one known side is enough.
"""

from __future__ import annotations

from typing import Optional

from ..il import ARITH_OPS, Binary, Expr, IntLit, Ite, Old, Select, Var
from ..il.types import SemType
from .names import NameMap

MACHINE_WIDTHS = (8, 16, 32, 64)


def storage_width(w: int) -> int:
    for s in MACHINE_WIDTHS:
        if w <= s:
            return s
    raise ValueError(f"width {w} exceeds 64")


def type_of_operand(e: Expr, m: NameMap) -> Optional[SemType]:
    """Best-effort type of an integer-valued expression; None if unknowable."""
    if isinstance(e, IntLit):
        return e.type
    if isinstance(e, (Var, Old)):
        return m.type_of(e.name)
    if isinstance(e, Select):
        base = type_of_operand(e.base, m)
        if base is not None and base.kind == "record":
            try:
                return base.field_type(e.field)
            except Exception:
                return None
        return None
    if isinstance(e, Ite):
        return type_of_operand(e.then, m) or type_of_operand(e.orelse, m)
    if isinstance(e, Binary) and e.op in ARITH_OPS:
        return type_of_operand(e.left, m) or type_of_operand(e.right, m)
    return None


def operand_type(left: Expr, right: Expr, m: NameMap, what: str) -> SemType:
    t = type_of_operand(left, m) or type_of_operand(right, m)
    if t is None:
        from .names import UnsupportedWidth

        raise UnsupportedWidth(
            f"cannot determine the operand width of {what}; "
            "no literal anchors it and the NameMap carries no variable types"
        )
    return t
