"""Shared pieces for encoding states and contracts into SMT-LIB.

A model state at some time step is a family of solver constants, one per
scalar leaf of each variable (records flatten with double underscores,
matching the expression compiler). A "base map" assigns each variable name
its constant base for one state instance; NameMaps built from base maps
let the same contract expression be compiled against any pair of state
instances.
"""

from __future__ import annotations

from typing import Mapping

from ..codegen import NameMap, compile_to_smt, smt_sort
from ..il import Assignment, Expr, SemType, Value, VarContext
from ..smt.session import SolverSession, parse_value

BaseMap = Mapping[str, str]


def leaf_fields(t: SemType) -> list[tuple[tuple[str, ...], SemType]]:
    """(field path, scalar type) pairs; a scalar has the empty path."""
    if t.kind != "record":
        return [((), t)]
    out: list[tuple[tuple[str, ...], SemType]] = []
    for fname, ftype in t.fields:
        for path, leaf in leaf_fields(ftype):
            out.append(((fname, *path), leaf))
    return out


def leaf_consts(ctx: VarContext, bases: BaseMap) -> list[tuple[str, str, tuple[str, ...], SemType]]:
    """(var, constant name, field path, scalar type) for every leaf."""
    out = []
    for name in ctx.names():
        for path, leaf in leaf_fields(ctx.type_of(name)):
            out.append((name, "__".join([bases[name], *path]), path, leaf))
    return out


def declare_state(s: SolverSession, ctx: VarContext, bases: BaseMap) -> None:
    for _, const, _, leaf in leaf_consts(ctx, bases):
        s.send(f"(declare-const {const} {smt_sort(leaf)})")


def state_map(post: BaseMap, pre: BaseMap = None) -> NameMap:  # type: ignore[assignment]
    return NameMap(pre=dict(pre or {}), post=dict(post))


def compile_state(e: Expr, post: BaseMap, pre: BaseMap = None) -> str:  # type: ignore[assignment]
    return compile_to_smt(e, state_map(post, pre))


def bv_lit(value: int, width: int) -> str:
    return f"(_ bv{value} {width})"


def value_lit(v: Value) -> str:
    if v.type.kind == "bool":
        return "true" if v.as_bool else "false"
    return bv_lit(v.as_unsigned, v.type.width)


def conj(terms: list[str]) -> str:
    terms = [t for t in terms if t != "true"]
    if not terms:
        return "true"
    if len(terms) == 1:
        return terms[0]
    return "(and " + " ".join(terms) + ")"


def disj(terms: list[str]) -> str:
    if not terms:
        return "false"
    if len(terms) == 1:
        return terms[0]
    return "(or " + " ".join(terms) + ")"


def eq_states(ctx: VarContext, a: BaseMap, b: BaseMap) -> str:
    """Per-leaf equality of two state instances."""
    consts_a = leaf_consts(ctx, a)
    consts_b = leaf_consts(ctx, b)
    return conj([f"(= {ca[1]} {cb[1]})" for ca, cb in zip(consts_a, consts_b)])


def eq_concrete(ctx: VarContext, bases: BaseMap, state: Assignment) -> str:
    """State instance equals one concrete assignment."""
    terms = []
    for name, const, path, _leaf in leaf_consts(ctx, bases):
        v = state[name]
        for f in path:
            v = v.field(f)
        terms.append(f"(= {const} {value_lit(v)})")
    return conj(terms)


def frame_terms(ctx: VarContext, prev: BaseMap, nxt: BaseMap, writes: frozenset) -> list[str]:
    """next.v = prev.v for every variable the call does not write."""
    out = []
    for name in ctx.names():
        if name in writes:
            continue
        for path, _leaf in leaf_fields(ctx.type_of(name)):
            a = "__".join([prev[name], *path])
            b = "__".join([nxt[name], *path])
            out.append(f"(= {b} {a})")
    return out


def decode_value(text: str, t: SemType) -> Value:
    kind = parse_value(text)
    if t.kind == "bool":
        if kind[0] != "bool":
            raise ValueError(f"expected a Bool model value, got {text!r}")
        return Value.of_bool(kind[1])
    if kind[0] != "bv":
        raise ValueError(f"expected a BitVec model value, got {text!r}")
    _, width, raw = kind
    if width != t.width:
        raise ValueError(f"model value width {width} != type width {t.width}")
    return Value.of_int(raw, t)


def decode_state(s: SolverSession, ctx: VarContext, bases: BaseMap) -> Assignment:
    consts = leaf_consts(ctx, bases)
    raw = s.get_value([c[1] for c in consts])
    leaves: dict[str, dict[tuple[str, ...], Value]] = {}
    for (name, _const, path, leaf), text in zip(consts, raw):
        leaves.setdefault(name, {})[path] = decode_value(text, leaf)
    out: dict[str, Value] = {}
    for name in ctx.names():
        out[name] = _assemble(ctx.type_of(name), (), leaves[name])
    return Assignment.of(out)


def _assemble(t: SemType, prefix: tuple[str, ...], leaves: Mapping[tuple[str, ...], Value]) -> Value:
    if t.kind != "record":
        return leaves[prefix]
    return Value.of_record(
        t, {fn: _assemble(ft, (*prefix, fn), leaves) for fn, ft in t.fields}
    )
