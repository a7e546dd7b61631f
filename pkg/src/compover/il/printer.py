"""Pretty printer for contract expressions.

The output re-parses to the same AST: comparators are printed in their
signedness-explicit forms, every non-atomic child is parenthesized, and an
integer literal gets a width suffix exactly when nothing else in its
type-sharing component (operands tied by ==, comparisons, arithmetic and
if-branches) pins the width down.
"""

from __future__ import annotations

from .ast import Binary, BoolLit, Expr, IntLit, Ite, Not, Old, Select, Var

_OP_TEXT = {
    "and": "&&", "or": "||", "implies": "->",
    "eq": "==", "neq": "!=",
    "ltu": "<u", "leu": "<=u", "gtu": ">u", "geu": ">=u",
    "lts": "<s", "les": "<=s", "gts": ">s", "ges": ">=s",
    "add": "+", "sub": "-", "mul": "*",
}

_INT_JOIN_OPS = {"eq", "neq", "ltu", "leu", "gtu", "geu", "lts", "les", "gts", "ges",
                 "add", "sub", "mul"}


class _Components:
    """Union-find over node occurrences, tracking which groups hold a variable."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.anchored: dict[int, bool] = {}
        self.alive: list[Expr] = []  # keeps ids stable while printing

    def add(self, node: Expr) -> int:
        i = id(node)
        if i not in self.parent:
            self.parent[i] = i
            self.anchored[i] = False
            self.alive.append(node)
        return i

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: Expr, b: Expr) -> None:
        ra, rb = self.find(self.add(a)), self.find(self.add(b))
        if ra != rb:
            self.parent[ra] = rb
            self.anchored[rb] = self.anchored[rb] or self.anchored[ra]

    def anchor(self, node: Expr) -> None:
        r = self.find(self.add(node))
        self.anchored[r] = True

    def is_anchored(self, node: Expr) -> bool:
        return self.anchored[self.find(self.add(node))]


def _collect(e: Expr, comp: _Components) -> None:
    comp.add(e)
    if isinstance(e, (Var, Old, Select)):
        comp.anchor(e)
        if isinstance(e, Select):
            _collect(e.base, comp)
    elif isinstance(e, Not):
        _collect(e.arg, comp)
    elif isinstance(e, Binary):
        _collect(e.left, comp)
        _collect(e.right, comp)
        if e.op in _INT_JOIN_OPS:
            comp.union(e.left, e.right)
            comp.union(e, e.left)
    elif isinstance(e, Ite):
        _collect(e.cond, comp)
        _collect(e.then, comp)
        _collect(e.orelse, comp)
        comp.union(e.then, e.orelse)
        comp.union(e, e.then)


def pretty_print(e: Expr) -> str:
    comp = _Components()
    _collect(e, comp)
    return _print(e, comp)


def _atomic(e: Expr) -> bool:
    return isinstance(e, (BoolLit, IntLit, Var, Old, Select))


def _child(e: Expr, comp: _Components) -> str:
    text = _print(e, comp)
    return text if _atomic(e) else f"({text})"


def _print(e: Expr, comp: _Components) -> str:
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        if comp.is_anchored(e):
            return str(e.value)
        return f"{e.value}{e.type}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Old):
        return f"old({e.name})"
    if isinstance(e, Select):
        return f"{_child(e.base, comp)}.{e.field}"
    if isinstance(e, Not):
        return f"!{_child(e.arg, comp)}"
    if isinstance(e, Binary):
        return f"{_child(e.left, comp)} {_OP_TEXT[e.op]} {_child(e.right, comp)}"
    if isinstance(e, Ite):
        return (
            f"if {_child(e.cond, comp)} then {_child(e.then, comp)} "
            f"else {_child(e.orelse, comp)}"
        )
    raise TypeError(f"not an expression: {e!r}")
