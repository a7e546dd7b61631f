"""Enumerative programming-by-example contract synthesis.

The candidate space is built from a finite atom pool over the procedure's
interface variables:

  post-state atoms   b, b == old(b), x == c, x < c, x >= c,
                     x == old(x), x == old(x) + c, x == y
  pre-state atoms    b, x == c, x < c, x >= c, x == y

with comparison signedness following the variable's type and constants c
mined from the procedure text and the example states (always including 0
and 1). Literals are atoms or their negations, clauses are single literals
or two-literal disjunctions, and candidates conjoin up to three clauses.

Search order is deterministic: the precondition pool is tried starting
with `true`, then by increasing syntactic size; for each precondition,
postconditions are explored by clause count, then lexicographic clause
indices (clauses themselves sorted by size, then construction order). The
first candidate satisfying the constraint

    forall (d,d') in X:    P(d) implies Q(d,d')
    forall (d,d') in Xbar: P(d) and not Q(d,d')

is returned, so equal inputs always give byte-equal contracts. Atom truth
values are computed once per example and combined as bitmasks, which keeps
the search cheap even for pools with a few hundred clauses.
"""

from __future__ import annotations

import re
import time
from typing import Iterable, Optional, Sequence

from ..il import (
    Binary,
    Contract,
    Expr,
    IntLit,
    Not,
    Old,
    Select,
    SemType,
    TRUE,
    Var,
    VarContext,
    conj,
    eval_bool,
    eval_expr,
    size,
)
from .base import ExamplePair, NoCandidate, SynthBudget

MAX_CONSTS_PER_TYPE = 16
MAX_ADDEND_CONSTS = 4


def _leaf_reads(ctx: VarContext, old: bool) -> list[tuple[Expr, SemType]]:
    out: list[tuple[Expr, SemType]] = []

    def expand(base: Expr, t: SemType):
        if t.kind == "record":
            for fname, ftype in t.fields:
                expand(Select(base, fname), ftype)
        else:
            out.append((base, t))

    for name in ctx.names():
        expand(Old(name) if old else Var(name), ctx.type_of(name))
    return out


def _proc_text(proc) -> str:
    source = getattr(proc, "source", None)
    if isinstance(source, str):
        return source
    statements = getattr(proc, "statements", None)
    if statements is not None:
        from ..minilang import print_mini

        return print_mini(proc)
    return ""


def mine_constants(
    proc, examples: Sequence[ExamplePair], ctx: VarContext
) -> dict[SemType, list[int]]:
    """Per int type: candidate constants, deterministically ordered."""
    text_consts = [int(tok) for tok in re.findall(r"\b\d+\b", _proc_text(proc))]
    leaf_values: dict[SemType, set[int]] = {}
    leaves = _leaf_reads(ctx, old=False)
    for pair in examples:
        for state in (pair.pre, pair.post):
            for term, t in leaves:
                if not t.is_int:
                    continue
                v = eval_expr(term, state)
                leaf_values.setdefault(t, set()).add(v.as_unsigned)

    out: dict[SemType, list[int]] = {}
    int_types = sorted({t for _, t in leaves if t.is_int}, key=str)
    for t in int_types:
        vals = {0, 1}
        vals.update(c for c in text_consts if 0 <= c < (1 << t.width))
        vals.update(leaf_values.get(t, ()))
        ordered = sorted(vals)
        out[t] = ordered[:MAX_CONSTS_PER_TYPE]
    return out


def _int_atom_family(term: Expr, t: SemType, consts: list[int]) -> list[Expr]:
    lt = "lts" if t.signed else "ltu"
    ge = "ges" if t.signed else "geu"
    atoms: list[Expr] = []
    for c in consts:
        lit = IntLit(c, t)
        atoms.append(Binary("eq", term, lit))
        atoms.append(Binary(lt, term, lit))
        atoms.append(Binary(ge, term, lit))
    return atoms


def _to_old(term: Expr) -> Expr:
    if isinstance(term, Var):
        return Old(term.name)
    if isinstance(term, Select):
        return Select(_to_old(term.base), term.field)
    raise TypeError(f"not a variable read: {term!r}")


def _post_atoms(ctx: VarContext, consts: dict[SemType, list[int]]) -> list[Expr]:
    # Stability atoms (x == old(x) and friends) come before constant pins so
    # that size ties resolve toward contracts that generalize.
    atoms: list[Expr] = []
    cur = _leaf_reads(ctx, old=False)
    for term, t in cur:
        old_term = _to_old(term)
        if t.kind == "bool":
            atoms.append(term)
            atoms.append(Binary("eq", term, old_term))
        else:
            atoms.append(Binary("eq", term, old_term))
            addends = [c for c in consts.get(t, [1]) if c not in (0,)][:MAX_ADDEND_CONSTS]
            for c in addends:
                atoms.append(Binary("eq", term, Binary("add", old_term, IntLit(c, t))))
            atoms.extend(_int_atom_family(term, t, consts.get(t, [0, 1])))
    # Same-type equalities between distinct current-state leaves.
    for i, (term_a, ta) in enumerate(cur):
        for term_b, tb in cur[i + 1 :]:
            if ta == tb:
                atoms.append(Binary("eq", term_a, term_b))
    return atoms


def _pre_atoms(ctx: VarContext, consts: dict[SemType, list[int]]) -> list[Expr]:
    atoms: list[Expr] = []
    cur = _leaf_reads(ctx, old=False)
    for term, t in cur:
        if t.kind == "bool":
            atoms.append(term)
        else:
            atoms.extend(_int_atom_family(term, t, consts.get(t, [0, 1])))
    for i, (term_a, ta) in enumerate(cur):
        for term_b, tb in cur[i + 1 :]:
            if ta == tb:
                atoms.append(Binary("eq", term_a, term_b))
    return atoms


class _Pool:
    """Literals and clauses with per-example truth bitmasks."""

    def __init__(self, atoms: list[Expr], truth_rows: list[int], n: int):
        # truth_rows[i] = bitmask over examples where atom i holds
        full = (1 << n) - 1
        self.n = n
        literals: list[tuple[Expr, int, int]] = []  # (expr, mask, size)
        seen: set[int] = set()
        for a, row in zip(atoms, truth_rows):
            size_a = size(a)
            for expr, mask in ((a, row), (Not(a), full & ~row)):
                literals.append((expr, mask, size_a if expr is a else size_a + 1))
        literals.sort(key=lambda t: t[2])
        self.clauses: list[tuple[Expr, int, int]] = []
        for expr, mask, sz in literals:
            self._add(expr, mask, sz, seen)
        singles = list(self.clauses)
        for i, (ea, ma, sa) in enumerate(singles):
            for eb, mb, sb in singles[i + 1 :]:
                self._add(Binary("or", ea, eb), ma | mb, sa + sb + 1, seen)
        self.clauses.sort(key=lambda t: t[2])

    def _add(self, expr: Expr, mask: int, size: int, seen: set[int]):
        full = (1 << self.n) - 1
        if self.n > 0 and (mask == 0 or mask == full) and size > 1:
            return  # constant-valued on these examples; true/false cover it
        if self.n > 0 and mask in seen:
            return  # keep only the first (smallest) clause per behavior
        seen.add(mask)
        self.clauses.append((expr, mask, size))


def _eval_rows(atoms: list[Expr], evals: list) -> list[int]:
    rows = []
    for a in atoms:
        mask = 0
        for i, ev in enumerate(evals):
            if ev(a):
                mask |= 1 << i
        rows.append(mask)
    return rows


def synthesize_enum(
    proc,
    positives: Iterable[ExamplePair],
    negatives: Iterable[ExamplePair],
    budget: SynthBudget = SynthBudget(),
) -> Contract:
    ctx: VarContext = proc.ctx
    pos = list(positives)
    neg = list(negatives)
    examples = pos + neg
    n = len(examples)
    pos_mask = (1 << len(pos)) - 1
    neg_mask = ((1 << n) - 1) ^ pos_mask

    if n == 0:
        return Contract(TRUE, TRUE)

    consts = mine_constants(proc, examples, ctx)
    deadline = time.monotonic() + budget.wall_clock
    tried = 0

    def spend():
        nonlocal tried
        tried += 1
        if tried > budget.max_candidates:
            raise NoCandidate(f"no contract within {budget.max_candidates} candidates")
        if tried % 4096 == 0 and time.monotonic() > deadline:
            raise NoCandidate(f"no contract within {budget.wall_clock}s")

    # Truth rows: P over pre-states, Q over (pre, post).
    pre_atoms = _pre_atoms(ctx, consts)
    post_atoms = _post_atoms(ctx, consts)
    pre_pool = _Pool(
        pre_atoms,
        _eval_rows(pre_atoms, [lambda a, p=p: eval_bool(a, p.pre) for p in examples]),
        n,
    )
    post_pool = _Pool(
        post_atoms,
        _eval_rows(post_atoms, [lambda a, p=p: eval_bool(a, p.pre, p.post) for p in examples]),
        n,
    )

    full = (1 << n) - 1

    def find_q(must_cover: int) -> Optional[Expr]:
        """Conjunction of <=3 clauses true on must_cover, false on every negative."""
        usable = [(e, m, s) for e, m, s in post_pool.clauses if (must_cover & ~m) == 0]
        for ea, ma, _ in usable:
            spend()
            if ma & neg_mask == 0:
                return ea
        for i, (ea, ma, _) in enumerate(usable):
            for eb, mb, _ in usable[i + 1 :]:
                spend()
                if ma & mb & neg_mask == 0:
                    return Binary("and", ea, eb)
        for i, (ea, ma, _) in enumerate(usable):
            for j in range(i + 1, len(usable)):
                eb, mb, _ = usable[j]
                mab = ma & mb
                if mab & neg_mask == ma & neg_mask:
                    continue  # eb rejects no extra negatives; pairs (ea, *) already failed
                for ec, mc, _ in usable[j + 1 :]:
                    spend()
                    if mab & mc & neg_mask == 0:
                        return conj([ea, eb, ec])
        return None

    # Preconditions: true first, then single clauses, then pairs; every
    # candidate must hold on all negative pre-states.
    def pre_candidates():
        yield TRUE, full
        for e, m, s in pre_pool.clauses:
            if neg_mask & ~m == 0:
                yield e, m
        for i, (ea, ma, _) in enumerate(pre_pool.clauses):
            for eb, mb, _ in pre_pool.clauses[i + 1 :]:
                m = ma & mb
                if neg_mask & ~m == 0:
                    yield Binary("and", ea, eb), m

    for p_expr, p_mask in pre_candidates():
        must = p_mask & pos_mask
        if must == 0 and neg_mask == 0:
            spend()
            return Contract(p_expr, TRUE)
        q = find_q(must)
        if q is not None:
            return Contract(p_expr, q)

    raise NoCandidate("candidate pool exhausted")


class EnumSynth:
    """Synthesis oracle wrapper around synthesize_enum."""

    def synthesize(self, proc, positives, negatives, budget: SynthBudget = SynthBudget()):
        return synthesize_enum(proc, positives, negatives, budget)
