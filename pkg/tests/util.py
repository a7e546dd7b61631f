"""Seeded random generators and shared paths for the test suite.

Everything takes an explicit random.Random so failures reproduce exactly.
"""

from __future__ import annotations

import os
import random

_HERE = os.path.dirname(__file__)


def bench_path(name: str) -> str:
    return os.path.normpath(os.path.join(_HERE, os.pardir, "benchmarks", name))


def fixture_path(name: str) -> str:
    return os.path.join(_HERE, "fixtures", name)


def read_fixture(name: str) -> str:
    with open(fixture_path(name), "r", encoding="utf-8") as fh:
        return fh.read()

from compover.il import (
    Assignment,
    Binary,
    BoolLit,
    Expr,
    IntLit,
    Ite,
    Not,
    Old,
    Select,
    SemType,
    Value,
    Var,
    VarContext,
)

UNSIGNED_CMP = ("ltu", "leu", "gtu", "geu")
SIGNED_CMP = ("lts", "les", "gts", "ges")


def scalar_atoms(ctx: VarContext, include_old: bool = False):
    """All scalar-typed reads: variables plus record fields, flattened."""
    atoms: list[tuple[Expr, SemType]] = []

    def expand(base: Expr, t: SemType):
        if t.kind == "record":
            for fname, ftype in t.fields:
                expand(Select(base, fname), ftype)
        else:
            atoms.append((base, t))

    for name in ctx.names():
        expand(Var(name), ctx.type_of(name))
        if include_old:
            expand(Old(name), ctx.type_of(name))
    return atoms


def rand_value(rng: random.Random, t: SemType) -> Value:
    if t.kind == "bool":
        return Value.of_bool(rng.random() < 0.5)
    if t.kind == "record":
        return Value.of_record(
            t, {fname: rand_value(rng, ftype) for fname, ftype in t.fields}
        )
    return Value.of_int(rng.randrange(1 << t.width), t)


def rand_assignment(rng: random.Random, ctx: VarContext) -> Assignment:
    return Assignment.of({n: rand_value(rng, ctx.type_of(n)) for n in ctx.names()})


class ExprGen:
    """Random well-typed expression source over a fixed variable context."""

    def __init__(self, ctx: VarContext, seed: int = 0, include_old: bool = False):
        self.rng = random.Random(seed)
        self.ctx = ctx
        self.atoms = scalar_atoms(ctx, include_old)
        self.bool_atoms = [a for a, t in self.atoms if t.kind == "bool"]
        self.ints_by_type: dict[SemType, list[Expr]] = {}
        for a, t in self.atoms:
            if t.is_int:
                self.ints_by_type.setdefault(t, []).append(a)
        self.int_types = sorted(self.ints_by_type, key=str) or [SemType.uint(8)]

    def _int_lit(self, t: SemType) -> IntLit:
        # Bias toward small values and boundary patterns so comparisons flip.
        r = self.rng
        pick = r.random()
        if pick < 0.4:
            v = r.randrange(min(8, 1 << t.width))
        elif pick < 0.55:
            v = (1 << t.width) - 1 - r.randrange(min(4, 1 << t.width))
        else:
            v = r.randrange(1 << t.width)
        return IntLit(v, t)

    def int_expr(self, t: SemType, depth: int) -> Expr:
        r = self.rng
        if depth <= 0 or r.random() < 0.3:
            vars_ = self.ints_by_type.get(t, [])
            if vars_ and r.random() < 0.7:
                return r.choice(vars_)
            return self._int_lit(t)
        if r.random() < 0.25:
            return Ite(self.bool_expr(depth - 1), self.int_expr(t, depth - 1), self.int_expr(t, depth - 1))
        op = r.choice(("add", "sub", "mul"))
        return Binary(op, self.int_expr(t, depth - 1), self.int_expr(t, depth - 1))

    def bool_expr(self, depth: int = 4) -> Expr:
        r = self.rng
        if depth <= 0:
            if self.bool_atoms and r.random() < 0.6:
                return r.choice(self.bool_atoms)
            return BoolLit(r.random() < 0.5)
        roll = r.random()
        if roll < 0.12:
            if self.bool_atoms and r.random() < 0.7:
                return r.choice(self.bool_atoms)
            return BoolLit(r.random() < 0.5)
        if roll < 0.24:
            return Not(self.bool_expr(depth - 1))
        if roll < 0.45:
            op = r.choice(("and", "or", "implies"))
            return Binary(op, self.bool_expr(depth - 1), self.bool_expr(depth - 1))
        if roll < 0.55:
            return Ite(self.bool_expr(depth - 1), self.bool_expr(depth - 1), self.bool_expr(depth - 1))
        t = r.choice(self.int_types)
        if roll < 0.7:
            op = r.choice(("eq", "neq"))
        else:
            op = r.choice(SIGNED_CMP if t.signed else UNSIGNED_CMP)
        d = min(depth - 1, 2)
        return Binary(op, self.int_expr(t, d), self.int_expr(t, d))


# ------------------------------------------------------- differential rigs
#
# Shared by the codegen unit tests and the backend-agreement acceptance
# suite: evaluate the same boolean expressions through the interpreter,
# the SMT backend, and (toolchain permitting) compiled C / Rust, and
# compare pointwise.

import subprocess

from compover.codegen import NameMap, compile_to_c, compile_to_rust, compile_to_smt
from compover.il import eval_bool
from compover.smt.session import SolverSession, parse_value


def _smt_lit(v: Value) -> str:
    if v.type.kind == "bool":
        return "true" if v.as_bool else "false"
    return f"(_ bv{v.as_unsigned} {v.type.width})"


def smt_agreement_failures(ctx, exprs, pairs, command=None):
    """(expr_index, pair_index) list where solver and interpreter disagree.

    pairs are (pre, post) assignment pairs; scalar contexts only.
    """
    m = NameMap(
        pre={n: f"{n}__pre" for n in ctx.names()},
        post={n: f"{n}__post" for n in ctx.names()},
        types={n: ctx.type_of(n) for n in ctx.names()},
    )
    from compover.codegen import smt_sort

    bad = []
    session = SolverSession(command)
    try:
        for n in ctx.names():
            sort = smt_sort(ctx.type_of(n))
            session.send(f"(declare-const {n}__pre {sort})")
            session.send(f"(declare-const {n}__post {sort})")
        for j, (pre, post) in enumerate(pairs):
            session.push()
            for n in ctx.names():
                session.send(f"(assert (= {n}__pre {_smt_lit(pre[n])}))")
                session.send(f"(assert (= {n}__post {_smt_lit(post[n])}))")
            assert session.check_sat() == "sat"
            texts = [compile_to_smt(e, m) for e in exprs]
            got = session.get_value(texts)
            session.pop()
            for i, raw in enumerate(got):
                if bool(parse_value(raw)[-1]) != eval_bool(exprs[i], pre, post):
                    bad.append((i, j))
    finally:
        session.close()
    return bad


def _c_value(v: Value) -> str:
    if v.type.kind == "bool":
        return "true" if v.as_bool else "false"
    if v.type.signed:
        s = v.as_signed
        if s == -(1 << (v.type.width - 1)):  # INT_MIN has no direct literal
            return f"({s + 1} - 1)"
        return str(s)
    return f"{v.as_unsigned}{'ULL' if v.type.width > 32 else 'U'}"


def _rust_value(v: Value) -> str:
    from compover.codegen import rust_type

    if v.type.kind == "bool":
        return "true" if v.as_bool else "false"
    rt = rust_type(v.type)
    if v.type.signed:
        s = v.as_signed
        if s == -(1 << (v.type.width - 1)):
            return f"({s + 1}{rt} - 1{rt})"
        return f"{s}{rt}"
    return f"{v.as_unsigned}{rt}"


def c_eval_program(ctx, exprs, pairs) -> str:
    """C program printing `<expr-index> <pair-index> <0|1>` per case."""
    from compover.codegen import c_type

    m = NameMap.for_ctx(ctx)
    lines = [
        "#include <stdbool.h>",
        "#include <stdint.h>",
        "#include <stdio.h>",
        "",
        "int main(void) {",
    ]
    for j, (pre, post) in enumerate(pairs):
        lines.append("    {")
        for n in ctx.names():
            t = c_type(ctx.type_of(n))
            lines.append(f"        const {t} old_{n} = {_c_value(pre[n])};")
            lines.append(f"        const {t} {n} = {_c_value(post[n])};")
        for i, e in enumerate(exprs):
            lines.append(
                f'        printf("%d %d %d\\n", {i}, {j}, (int)({compile_to_c(e, m)}));'
            )
        lines.append("    }")
    lines += ["    return 0;", "}"]
    return "\n".join(lines) + "\n"


def rust_eval_program(ctx, exprs, pairs) -> str:
    """Rust program printing the same `<expr> <pair> <0|1>` triples."""
    from compover.codegen import rust_type

    m = NameMap.for_ctx(ctx)
    lines = ["fn main() {"]
    for j, (pre, post) in enumerate(pairs):
        lines.append("    {")
        for n in ctx.names():
            t = rust_type(ctx.type_of(n))
            lines.append(f"        let old_{n}: {t} = {_rust_value(pre[n])};")
            lines.append(f"        let {n}: {t} = {_rust_value(post[n])};")
        for i, e in enumerate(exprs):
            lines.append(
                f'        println!("{{}} {{}} {{}}", {i}, {j}, ({compile_to_rust(e, m)}) as i32);'
            )
        lines.append("    }")
    lines += ["}"]
    return "\n".join(lines) + "\n"


def parse_eval_output(text: str) -> dict:
    out = {}
    for line in text.strip().splitlines():
        i, j, r = line.split()
        out[(int(i), int(j))] = bool(int(r))
    return out


def compiled_agreement_failures(ctx, exprs, pairs, language: str, workdir: str):
    """Compile-and-run differential; returns disagreeing (expr, pair) indexes."""
    if language == "c":
        src = os.path.join(workdir, "eval.c")
        with open(src, "w", encoding="utf-8") as fh:
            fh.write(c_eval_program(ctx, exprs, pairs))
        exe = os.path.join(workdir, "eval_c")
        subprocess.run(["gcc", "-O1", "-o", exe, src], check=True, capture_output=True)
    else:
        src = os.path.join(workdir, "eval.rs")
        with open(src, "w", encoding="utf-8") as fh:
            fh.write(rust_eval_program(ctx, exprs, pairs))
        exe = os.path.join(workdir, "eval_rust")
        subprocess.run(
            ["rustc", "-O", "--edition", "2021", "-o", exe, src],
            check=True,
            capture_output=True,
        )
    run = subprocess.run([exe], check=True, capture_output=True, text=True)
    got = parse_eval_output(run.stdout)
    bad = []
    for i, e in enumerate(exprs):
        for j, (pre, post) in enumerate(pairs):
            if got[(i, j)] != eval_bool(e, pre, post):
                bad.append((i, j))
    return bad
