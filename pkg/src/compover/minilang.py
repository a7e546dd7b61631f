"""A loop-free procedure language with exact relational semantics.

Procedures are straight-line assignments plus branching plus havoc, over the
model's shared variables. Without loops every procedure is total and
terminates, and the set of post-states reachable from a given pre-state is
finite and computable exactly. That makes two things possible at desk scale:
running whole systems hermetically (no C/Rust toolchain), and a brute-force
verification oracle that decides Hoare triples by enumeration.

Grammar (statements separate by optional ';'):

    proc   = { stmt [ ";" ] }
    stmt   = path ":=" expr
           | "if" expr block [ "else" ( block | if-stmt ) ]
           | "havoc" ident [ "%" integer ]
    block  = "{" { stmt [ ";" ] } "}"
    path   = ident { "." ident }

Right-hand sides and conditions use the contract expression syntax, reading
the current (sequentially updated) state; old(...) is not allowed. `havoc x`
draws any value of x's type; `havoc x % n` draws from 0..n-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .il import (
    Assignment,
    Expr,
    IlSyntaxError,
    IlTypeError,
    PRE,
    SemType,
    Value,
    VarContext,
    all_vars,
    assignment_key,
    default_value,
    domain_size,
    enumerate_values,
    eval_bool,
    eval_expr,
    pretty_print,
)
from .il.contract import Contract
from .il.parse import _Parser, resolve_parsed, tokenize
from .oracles.base import ExamplePair, VerifResult

HAVOC_CAP = 1 << 16
DOMAIN_CAP = 1 << 20

_MINI_OPS = ("{", "}", ";", ":=", "%")


class RangeTooLarge(Exception):
    """A havoc expansion would exceed the state-set cap."""


class DomainTooLarge(Exception):
    """The enumerable domain exceeds the brute-force verifier's cap."""


@dataclass(frozen=True)
class MiniAssign:
    path: tuple[str, ...]  # variable, then field names
    rhs: Expr


@dataclass(frozen=True)
class MiniHavoc:
    var: str
    range: Optional[int] = None  # None = full domain; n = values 0..n-1


@dataclass(frozen=True)
class MiniIf:
    cond: Expr
    then: tuple["MiniStmt", ...]
    orelse: tuple["MiniStmt", ...]


MiniStmt = Union[MiniAssign, MiniHavoc, MiniIf]


@dataclass(frozen=True)
class MiniProc:
    name: str
    ctx: VarContext
    statements: tuple[MiniStmt, ...]

    @property
    def language(self) -> str:
        return "mini"

    def writes(self) -> frozenset[str]:
        out: set[str] = set()

        def walk(stmts: Iterable[MiniStmt]):
            for s in stmts:
                if isinstance(s, MiniAssign):
                    out.add(s.path[0])
                elif isinstance(s, MiniHavoc):
                    out.add(s.var)
                else:
                    walk(s.then)
                    walk(s.orelse)

        walk(self.statements)
        return frozenset(out)

    def reads(self) -> frozenset[str]:
        out: set[str] = set()

        def walk(stmts: Iterable[MiniStmt]):
            for s in stmts:
                if isinstance(s, MiniAssign):
                    out.update(all_vars(s.rhs))
                elif isinstance(s, MiniIf):
                    out.update(all_vars(s.cond))
                    walk(s.then)
                    walk(s.orelse)

        walk(self.statements)
        return frozenset(out)


def _target_type(ctx: VarContext, path: tuple[str, ...]) -> SemType:
    t = ctx.type_of(path[0])
    for fname in path[1:]:
        if t.kind != "record":
            raise IlTypeError(f"'{'.'.join(path)}': field access on non-record")
        t = t.field_type(fname)
    return t


class _MiniParser:
    def __init__(self, text: str, ctx: VarContext):
        self.p = _Parser(tokenize(text, _MINI_OPS))
        self.ctx = ctx

    def parse_proc(self) -> tuple[MiniStmt, ...]:
        stmts = self.parse_stmts(until=None)
        tail = self.p.peek()
        if tail.kind != "eof":
            raise IlSyntaxError(f"unexpected '{tail.text}'", tail.line, tail.col)
        return stmts

    def parse_stmts(self, until: Optional[str]) -> tuple[MiniStmt, ...]:
        out: list[MiniStmt] = []
        while True:
            t = self.p.peek()
            if t.kind == "eof" or (until is not None and t.text == until):
                return tuple(out)
            out.append(self.parse_stmt())
            if self.p.peek().text == ";":
                self.p.next()

    def parse_stmt(self) -> MiniStmt:
        t = self.p.peek()
        if t.kind != "ident":
            raise IlSyntaxError(
                f"expected a statement, found '{t.text or 'end of input'}'", t.line, t.col
            )
        if t.text == "if":
            return self.parse_if()
        if t.text == "havoc":
            return self.parse_havoc()
        return self.parse_assign()

    def parse_if(self) -> MiniIf:
        self.p.next()
        raw = self.p.parse_expr()
        cond = resolve_parsed(raw, self.ctx, PRE)
        then = self.parse_block()
        orelse: tuple[MiniStmt, ...] = ()
        if self.p.peek().text == "else":
            self.p.next()
            if self.p.peek().text == "if":
                orelse = (self.parse_if(),)
            else:
                orelse = self.parse_block()
        return MiniIf(cond, then, orelse)

    def parse_block(self) -> tuple[MiniStmt, ...]:
        self.p.expect("{")
        stmts = self.parse_stmts(until="}")
        self.p.expect("}")
        return stmts

    def parse_havoc(self) -> MiniHavoc:
        self.p.next()
        t = self.p.peek()
        if t.kind != "ident":
            raise IlSyntaxError("expected a variable name after havoc", t.line, t.col)
        self.p.next()
        vt = self.ctx.type_of(t.text)
        rng: Optional[int] = None
        if self.p.peek().text == "%":
            self.p.next()
            n = self.p.peek()
            if n.kind != "int" or n.suffix is not None:
                raise IlSyntaxError("expected a plain integer after '%'", n.line, n.col)
            self.p.next()
            if not vt.is_int:
                raise IlTypeError(f"havoc range on non-integer variable '{t.text}'")
            if not 1 <= n.value <= domain_size(vt):
                raise IlTypeError(f"havoc range {n.value} out of bounds for {vt}")
            rng = n.value
        return MiniHavoc(t.text, rng)

    def parse_assign(self) -> MiniAssign:
        t = self.p.peek()
        path = [t.text]
        self.p.next()
        while self.p.peek().text == ".":
            self.p.next()
            f = self.p.peek()
            if f.kind != "ident":
                raise IlSyntaxError("expected a field name after '.'", f.line, f.col)
            self.p.next()
            path.append(f.text)
        self.p.expect(":=")
        target_t = _target_type(self.ctx, tuple(path))
        raw = self.p.parse_expr()
        rhs = resolve_parsed(raw, self.ctx, PRE, expected=target_t)
        return MiniAssign(tuple(path), rhs)


def parse_mini(text: str, ctx: VarContext, name: str = "proc") -> MiniProc:
    """Parse a procedure body; an empty body is the identity procedure."""
    return MiniProc(name, ctx, _MiniParser(text, ctx).parse_proc())


def print_mini(p: MiniProc) -> str:
    lines: list[str] = []

    def emit(stmts: Iterable[MiniStmt], indent: str):
        for s in stmts:
            if isinstance(s, MiniAssign):
                lines.append(f"{indent}{'.'.join(s.path)} := {pretty_print(s.rhs)}")
            elif isinstance(s, MiniHavoc):
                suffix = f" % {s.range}" if s.range is not None else ""
                lines.append(f"{indent}havoc {s.var}{suffix}")
            else:
                lines.append(f"{indent}if {pretty_print(s.cond)} {{")
                emit(s.then, indent + "  ")
                if s.orelse:
                    lines.append(f"{indent}}} else {{")
                    emit(s.orelse, indent + "  ")
                lines.append(f"{indent}}}")

    emit(p.statements, "")
    return "\n".join(lines)


def _set_path(state: dict[str, Value], path: tuple[str, ...], value: Value) -> None:
    if len(path) == 1:
        state[path[0]] = value
        return

    def rebuild(v: Value, rest: tuple[str, ...]) -> Value:
        if not rest:
            return value
        items = tuple(
            (n, rebuild(fv, rest[1:]) if n == rest[0] else fv)
            for n, fv in v.payload  # type: ignore[union-attr]
        )
        return Value(v.type, items)

    state[path[0]] = rebuild(state[path[0]], path[1:])


def _run_block(
    stmts: tuple[MiniStmt, ...], states: list[dict[str, Value]], ctx: VarContext, cap: int
) -> list[dict[str, Value]]:
    for s in stmts:
        if isinstance(s, MiniAssign):
            for st in states:
                _set_path(st, s.path, eval_expr(s.rhs, Assignment.of(st)))
        elif isinstance(s, MiniHavoc):
            t = ctx.type_of(s.var)
            if s.range is None:
                values = list(enumerate_values(t))
            else:
                values = [Value.of_int(i, t) for i in range(s.range)]
            if len(states) * len(values) > cap:
                raise RangeTooLarge(
                    f"havoc {s.var} would expand to {len(states) * len(values)} states (cap {cap})"
                )
            states = [dict(st, **{s.var: v}) for st in states for v in values]
        else:
            trues = [st for st in states if eval_bool(s.cond, Assignment.of(st))]
            falses = [st for st in states if not eval_bool(s.cond, Assignment.of(st))]
            states = _run_block(s.then, trues, ctx, cap) + _run_block(s.orelse, falses, ctx, cap)
    return states


def exec_mini(p: MiniProc, d: Assignment, cap: int = HAVOC_CAP) -> frozenset[Assignment]:
    """All post-states reachable from d; never empty."""
    states = _run_block(p.statements, [d.as_dict()], p.ctx, cap)
    return frozenset(Assignment.of(st) for st in states)


def _relevant_vars(c: Contract, p: MiniProc) -> list[tuple[str, SemType]]:
    names = set(p.reads()) | set(p.writes()) | all_vars(c.pre) | all_vars(c.post)
    return [(n, t) for n, t in p.ctx.vars if n in names]


def _max_leaf_width(t: SemType) -> int:
    if t.kind == "bool":
        return 1
    if t.is_int:
        return t.width
    return max(_max_leaf_width(ft) for _, ft in t.fields)


def brute_verify(
    c: Contract, p: MiniProc, width_cap: int = 8, state_cap: int = DOMAIN_CAP
) -> VerifResult:
    """Decide the Hoare triple (c.pre, p, c.post) by exhaustive enumeration.

    Only variables the contract or procedure mentions are enumerated; the
    rest stay at their defaults, which cannot affect the verdict because the
    procedure neither reads nor writes them and the contract ignores them.
    """
    c.validate(p.ctx)
    relevant = _relevant_vars(c, p)
    total = 1
    for n, t in relevant:
        if _max_leaf_width(t) > width_cap:
            raise DomainTooLarge(f"variable '{n}' is wider than the {width_cap}-bit cap")
        total *= domain_size(t)
        if total > state_cap:
            raise DomainTooLarge(f"domain of {len(relevant)} variables exceeds {state_cap}")

    base_vals = {n: default_value(t) for n, t in p.ctx.vars}
    names = [n for n, _ in relevant]
    for combo in itertools.product(*(enumerate_values(t) for _, t in relevant)):
        d = Assignment.of({**base_vals, **dict(zip(names, combo))})
        if not eval_bool(c.pre, d):
            continue
        for d2 in sorted(exec_mini(p, d), key=assignment_key):
            if not eval_bool(c.post, d, d2):
                return VerifResult.failed(ExamplePair(d, d2, "positive"))
    return VerifResult.passed()


class MiniVerifier:
    """Exact verification oracle over mini-language procedures."""

    def __init__(self, width_cap: int = 8, state_cap: int = DOMAIN_CAP):
        self.width_cap = width_cap
        self.state_cap = state_cap

    def verify(self, contract: Contract, proc: MiniProc) -> VerifResult:
        return brute_verify(contract, proc, self.width_cap, self.state_cap)
