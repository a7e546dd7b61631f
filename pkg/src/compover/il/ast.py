"""Expression AST for pre/postcondition contracts.

Nodes are frozen dataclasses so expressions can be deduplicated, hashed and
used as dict keys by the synthesis layer. `Old` wraps a variable name and
denotes its pre-state value inside a postcondition; a bare `Var` in a
postcondition denotes the post-state value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import SemType

# Binary operator names, grouped by family.
BOOL_OPS = ("and", "or", "implies")
EQ_OPS = ("eq", "neq")
CMP_OPS = ("ltu", "leu", "gtu", "geu", "lts", "les", "gts", "ges")
ARITH_OPS = ("add", "sub", "mul")
ALL_OPS = BOOL_OPS + EQ_OPS + CMP_OPS + ARITH_OPS


class Expr:
    """Base class; concrete nodes below."""

    __slots__ = ()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class IntLit(Expr):
    """Integer literal; value is the unsigned residue of the bit pattern."""

    value: int
    type: SemType


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Old(Expr):
    name: str


@dataclass(frozen=True)
class Select(Expr):
    base: Expr
    field: str


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in ALL_OPS:
            raise ValueError(f"unknown operator '{self.op}'")


@dataclass(frozen=True)
class Ite(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


def free_vars(e: Expr) -> tuple[frozenset[str], frozenset[str]]:
    """Names under old(...) and names used directly, as two sets."""
    olds: set[str] = set()
    curs: set[str] = set()

    def walk(n: Expr):
        if isinstance(n, Old):
            olds.add(n.name)
        elif isinstance(n, Var):
            curs.add(n.name)
        elif isinstance(n, Select):
            walk(n.base)
        elif isinstance(n, Not):
            walk(n.arg)
        elif isinstance(n, Binary):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Ite):
            walk(n.cond)
            walk(n.then)
            walk(n.orelse)

    walk(e)
    return frozenset(olds), frozenset(curs)


def all_vars(e: Expr) -> frozenset[str]:
    olds, curs = free_vars(e)
    return olds | curs


def size(e: Expr) -> int:
    """AST node count; literals, variables and old() references count 1."""
    if isinstance(n := e, (BoolLit, IntLit, Var, Old)):
        return 1
    if isinstance(n, Select):
        return 1 + size(n.base)
    if isinstance(n, Not):
        return 1 + size(n.arg)
    if isinstance(n, Binary):
        return 1 + size(n.left) + size(n.right)
    if isinstance(n, Ite):
        return 1 + size(n.cond) + size(n.then) + size(n.orelse)
    raise TypeError(f"not an expression: {e!r}")


TRUE = BoolLit(True)
FALSE = BoolLit(False)


def conj(parts: list[Expr]) -> Expr:
    """Right-folded conjunction; empty list gives true."""
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Binary("and", p, out)
    return out


def disj(parts: list[Expr]) -> Expr:
    """Right-folded disjunction; empty list gives false."""
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Binary("or", p, out)
    return out
