"""Shared oracle vocabulary: results, example pairs, budgets, protocols.

Verification verdicts extend the ideal pass/fail oracle with Unknown because
real tools time out or produce traces we cannot map back to interface
variables; the engine decides what Unknown means for the overall run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol, runtime_checkable

from ..il import (
    Assignment,
    Binary,
    Contract,
    Expr,
    IntLit,
    BoolLit,
    Old,
    Select,
    SemType,
    Value,
    Var,
    VarContext,
    conj,
    disj,
)

POSITIVE = "positive"
NEGATIVE = "negative"

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"

UNKNOWN_REASONS = ("timeout", "tool-error", "unsupported")


class NoCandidate(Exception):
    """Synthesis budget exhausted without an example-consistent contract."""


class ScriptExhausted(Exception):
    """A scripted oracle was called more times than its script covers."""


class TransportError(Exception):
    """The LLM transport failed outright (network, auth, bad endpoint)."""


@dataclass(frozen=True)
class ExamplePair:
    """A concrete (pre, post) state pair, labeled positive or negative.

    Positive pairs are behaviors the procedure exhibited (the contract must
    admit them); negative pairs were proven impossible (the contract must
    reject them).
    """

    pre: Assignment
    post: Assignment
    polarity: str = POSITIVE

    def __post_init__(self):
        if self.polarity not in (POSITIVE, NEGATIVE):
            raise ValueError(f"polarity must be positive or negative, got {self.polarity!r}")

    def with_polarity(self, polarity: str) -> "ExamplePair":
        return ExamplePair(self.pre, self.post, polarity)

    def conforms(self, ctx: VarContext) -> bool:
        return self.pre.conforms(ctx) and self.post.conforms(ctx)

    def __str__(self) -> str:
        sign = "+" if self.polarity == POSITIVE else "-"
        return f"{sign} {self.pre} -> {self.post}"


@dataclass(frozen=True)
class VerifResult:
    verdict: str  # "pass" | "fail" | "unknown"
    pair: Optional[ExamplePair] = None
    reason: Optional[str] = None
    detail: str = ""  # free-form diagnostics (tool stderr, parse notes)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, UNKNOWN):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAIL and self.pair is None:
            raise ValueError("Fail needs a counterexample pair")
        if self.verdict == UNKNOWN and self.reason not in UNKNOWN_REASONS:
            raise ValueError(f"Unknown needs a reason in {UNKNOWN_REASONS}")

    @staticmethod
    def passed() -> "VerifResult":
        return VerifResult(PASS)

    @staticmethod
    def failed(pair: ExamplePair) -> "VerifResult":
        return VerifResult(FAIL, pair=pair)

    @staticmethod
    def unknown(reason: str, detail: str = "") -> "VerifResult":
        return VerifResult(UNKNOWN, reason=reason, detail=detail)

    @property
    def is_pass(self) -> bool:
        return self.verdict == PASS

    @property
    def is_fail(self) -> bool:
        return self.verdict == FAIL

    @property
    def is_unknown(self) -> bool:
        return self.verdict == UNKNOWN


@dataclass(frozen=True)
class SynthBudget:
    max_candidates: int = 500_000
    max_depth: int = 12
    wall_clock: float = 120.0
    parallel_queries: int = 3  # concurrent LLM queries per procedure

    def __post_init__(self):
        for field_name in ("max_candidates", "max_depth", "wall_clock", "parallel_queries"):
            if getattr(self, field_name) <= 0:
                raise ValueError(f"{field_name} must be positive")


@runtime_checkable
class VerifOracle(Protocol):
    def verify(self, contract: Contract, proc) -> VerifResult: ...


@runtime_checkable
class SynthOracle(Protocol):
    def synthesize(self, proc, positives, negatives, budget: SynthBudget) -> Contract: ...


def _leaf_terms(base: Expr, value: Value) -> list[tuple[Expr, Expr]]:
    """Flatten a value into (leaf term, literal) pairs; records split per field."""
    if value.type.kind == "record":
        out: list[tuple[Expr, Expr]] = []
        for fname, fval in value.payload:  # type: ignore[union-attr]
            out.extend(_leaf_terms(Select(base, fname), fval))
        return out
    lit: Expr = BoolLit(value.as_bool) if value.type.kind == "bool" else IntLit(
        value.as_unsigned, value.type
    )
    return [(base, lit)]


def equals_state_expr(state: Assignment, ctx: VarContext, use_old: bool) -> Expr:
    """Conjunction pinning every context variable to its value in `state`."""
    parts: list[Expr] = []
    for name, _ in ctx.vars:
        base: Expr = Old(name) if use_old else Var(name)
        for term, lit in _leaf_terms(base, state[name]):
            parts.append(Binary("eq", term, lit))
    return conj(parts)


def differs_state_expr(state: Assignment, ctx: VarContext) -> Expr:
    """Disjunction saying some post-state variable differs from `state`."""
    parts: list[Expr] = []
    for name, _ in ctx.vars:
        for term, lit in _leaf_terms(Var(name), state[name]):
            parts.append(Binary("neq", term, lit))
    return disj(parts)


def pair_impossible_contract(pair: ExamplePair, ctx: VarContext) -> Contract:
    """The triple whose validity means the procedure cannot map pre to post.

    Precondition pins the pre-state to pair.pre; postcondition demands the
    post-state differ from pair.post somewhere. The triple holds exactly when
    pair.post is unreachable from pair.pre.
    """
    return Contract(
        equals_state_expr(pair.pre, ctx, use_old=False),
        differs_state_expr(pair.post, ctx),
    )


def verify(oracle: VerifOracle, contract: Contract, proc) -> VerifResult:
    return oracle.verify(contract, proc)


def verify_pair_impossible(oracle: VerifOracle, proc, pair: ExamplePair) -> VerifResult:
    """Pass means the pair is spurious (the procedure cannot reproduce it)."""
    ctx = proc.ctx
    return oracle.verify(pair_impossible_contract(pair, ctx), proc)
