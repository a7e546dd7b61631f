"""Polyglot state-machine models: modes, guarded transitions whose updates
chain procedure calls, timed properties, and executions.

A model couples an extended state machine with a table of procedures that
may live in different languages. Guards and properties are contract-language
expressions; updates name procedures, and a transition's update list runs
left to right, each call reading the previous call's post-state. Transition
durations accumulate into a per-step clock that the `EventuallyWithin`
property reads.

Properties may mention the reserved pseudo-variable `mode`, an unsigned
enum over the model's mode names in declaration order; `Property` carries
that name-to-value table so a trace can be judged without the model at hand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .il import (
    Assignment,
    Expr,
    IlError,
    IlSyntaxError,
    OldInPrecondition,
    SemType,
    Value,
    VarContext,
    all_vars,
    assignment_key,
    default_assignment,
    domain_size,
    enumerate_values,
    eval_bool,
    typecheck,
)
from .il.check import PRE
from .minilang import MiniProc, exec_mini, parse_mini

LANGUAGES = ("c", "rust", "mini")

INVARIANT = "invariant"
EVENTUALLY_WITHIN = "eventually-within"

MODE_VAR = "mode"
MODE_TYPE = SemType.uint(8)

HOLDS_TRUE = "true"
HOLDS_FALSE = "false"
HOLDS_INCONCLUSIVE = "inconclusive"


class NotExecutable(Exception):
    """Simulation asked to run a procedure that is not mini-language."""


class InitUnsatisfiable(Exception):
    """No assignment over the searched variables satisfies the init predicate."""


@dataclass(frozen=True)
class ProcedureRef:
    """A named procedure in some implementation language.

    `source` is opaque text for c/rust and parseable text for mini.
    reads/writes list the model variables the body may read and write;
    for mini procedures they can be derived, for c/rust they are declared.
    The remaining fields feed proof-harness emission for c/rust bodies:
    `entry` defaults to the procedure name, `preamble` carries includes and
    type definitions, `call_args` the argument list for the entry call.
    """

    name: str
    language: str
    source: str
    reads: frozenset[str] = frozenset()
    writes: frozenset[str] = frozenset()
    entry: str = ""
    preamble: str = ""
    call_args: tuple[str, ...] = ()

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise ValueError(f"language must be one of {LANGUAGES}, got {self.language!r}")

    @property
    def entry_name(self) -> str:
        return self.entry or self.name

    def mini(self, ctx: VarContext) -> MiniProc:
        if self.language != "mini":
            raise NotExecutable(f"procedure '{self.name}' is {self.language}, not mini")
        return _parse_mini_cached(self.source, ctx, self.name)


@lru_cache(maxsize=256)
def _parse_mini_cached(source: str, ctx: VarContext, name: str) -> MiniProc:
    return parse_mini(source, ctx, name=name)


@dataclass(frozen=True)
class Transition:
    id: str
    from_mode: str
    to_mode: str
    guard: Expr
    update: tuple[str, ...]
    duration: int = 0


@dataclass(frozen=True)
class PolyglotModel:
    modes: tuple[str, ...]
    vars: VarContext
    init_mode: str
    transitions: tuple[Transition, ...]
    procedures: tuple[ProcedureRef, ...]
    init_pred: Optional[Expr] = None  # exactly one of init_pred / init_procs
    init_procs: tuple[str, ...] = ()

    def procedure(self, name: str) -> ProcedureRef:
        for p in self.procedures:
            if p.name == name:
                return p
        raise KeyError(f"no procedure named '{name}'")

    def has_procedure(self, name: str) -> bool:
        return any(p.name == name for p in self.procedures)

    def outgoing(self, mode: str) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.from_mode == mode)

    def mode_values(self) -> tuple[tuple[str, int], ...]:
        """Mode-name enumeration used wherever `mode` appears in a predicate."""
        return tuple((m, i) for i, m in enumerate(self.modes))

    def property_context(self) -> VarContext:
        """The model's variables plus the reserved `mode` pseudo-variable."""
        table = {n: self.vars.type_of(n) for n in self.vars.names()}
        table[MODE_VAR] = MODE_TYPE
        return VarContext.of(table)


@dataclass(frozen=True)
class Property:
    kind: str  # INVARIANT | EVENTUALLY_WITHIN
    predicate: Expr
    deadline: int = 0  # time units; EventuallyWithin only
    mode_values: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.kind not in (INVARIANT, EVENTUALLY_WITHIN):
            raise ValueError(f"unknown property kind {self.kind!r}")
        if self.kind == EVENTUALLY_WITHIN and self.deadline < 0:
            raise ValueError("deadline must be nonnegative")

    def mode_value(self, mode: str) -> int:
        for name, v in self.mode_values:
            if name == mode:
                return v
        raise KeyError(f"property has no enumeration entry for mode '{mode}'")


@dataclass(frozen=True)
class ProcCall:
    procedure: str
    pre: Assignment
    post: Assignment


@dataclass(frozen=True)
class TraceStep:
    transition: str
    mode: str  # mode after taking the transition
    state: Assignment  # state after the update chain
    calls: tuple[ProcCall, ...]
    time: int  # cumulative duration including this step


@dataclass(frozen=True)
class Trace:
    init_mode: str
    init_state: Assignment
    steps: tuple[TraceStep, ...] = ()
    stuck: bool = False  # ended with no enabled transition

    @property
    def final_mode(self) -> str:
        return self.steps[-1].mode if self.steps else self.init_mode

    @property
    def final_state(self) -> Assignment:
        return self.steps[-1].state if self.steps else self.init_state

    @property
    def final_time(self) -> int:
        return self.steps[-1].time if self.steps else 0

    def states(self) -> list[tuple[str, Assignment, int]]:
        """(mode, state, cumulative time) including the initial configuration."""
        out = [(self.init_mode, self.init_state, 0)]
        out.extend((s.mode, s.state, s.time) for s in self.steps)
        return out


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def _guard_diags(m: PolyglotModel, t: Transition) -> list[Diagnostic]:
    try:
        ty = typecheck(t.guard, m.vars, position=PRE)
    except OldInPrecondition as exc:
        return [Diagnostic("OldInGuard", f"transition '{t.id}': {exc}")]
    except IlError as exc:
        return [Diagnostic("GuardType", f"transition '{t.id}': {exc}")]
    if ty.kind != "bool":
        return [Diagnostic("GuardType", f"transition '{t.id}': guard has type {ty}, want bool")]
    return []


def validate_model(m: PolyglotModel) -> list[Diagnostic]:
    """All well-formedness problems, empty when the model is usable."""
    out: list[Diagnostic] = []
    var_names = set(m.vars.names())

    if len(set(m.modes)) != len(m.modes):
        out.append(Diagnostic("DuplicateMode", "mode names repeat"))
    if MODE_VAR in var_names:
        out.append(Diagnostic("ReservedName", f"'{MODE_VAR}' is reserved for properties"))
    if m.init_mode not in m.modes:
        out.append(Diagnostic("UnknownMode", f"init mode '{m.init_mode}' is not declared"))

    names = [p.name for p in m.procedures]
    if len(set(names)) != len(names):
        out.append(Diagnostic("DuplicateProcedure", "procedure names repeat"))
    for p in m.procedures:
        bad = (p.reads | p.writes) - var_names
        if bad:
            out.append(
                Diagnostic(
                    "BadReadsWrites",
                    f"procedure '{p.name}' touches undeclared variables {sorted(bad)}",
                )
            )
        if p.language == "mini":
            try:
                mp = p.mini(m.vars)
            except (IlSyntaxError, IlError) as exc:
                out.append(Diagnostic("MiniSyntax", f"procedure '{p.name}': {exc}"))
                continue
            if not mp.writes() <= p.writes or not mp.reads() <= p.reads:
                out.append(
                    Diagnostic(
                        "ReadsWritesMismatch",
                        f"procedure '{p.name}' declares reads/writes smaller than its body uses",
                    )
                )

    ids = [t.id for t in m.transitions]
    if len(set(ids)) != len(ids):
        out.append(Diagnostic("DuplicateTransition", "transition ids repeat"))
    for t in m.transitions:
        for mode, side in ((t.from_mode, "from"), (t.to_mode, "to")):
            if mode not in m.modes:
                out.append(
                    Diagnostic("UnknownMode", f"transition '{t.id}' {side}-mode '{mode}'")
                )
        if not t.update:
            out.append(Diagnostic("EmptyUpdate", f"transition '{t.id}' has no update procedures"))
        for name in t.update:
            if not m.has_procedure(name):
                out.append(
                    Diagnostic("UnknownProcedure", f"transition '{t.id}' calls '{name}'")
                )
        if t.duration < 0:
            out.append(Diagnostic("BadDuration", f"transition '{t.id}' duration is negative"))
        out.extend(_guard_diags(m, t))

    if (m.init_pred is None) == (not m.init_procs):
        out.append(
            Diagnostic("BadInit", "give exactly one of an init predicate or init procedures")
        )
    if m.init_pred is not None:
        try:
            ty = typecheck(m.init_pred, m.vars, position=PRE)
            if ty.kind != "bool":
                out.append(Diagnostic("InitType", f"init predicate has type {ty}, want bool"))
        except IlError as exc:
            out.append(Diagnostic("InitType", f"init predicate: {exc}"))
    for name in m.init_procs:
        if not m.has_procedure(name):
            out.append(Diagnostic("UnknownProcedure", f"init calls '{name}'"))
    return out


def validate_property(p: Property, m: PolyglotModel) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    ctx = m.property_context()
    try:
        ty = typecheck(p.predicate, ctx, position=PRE)
        if ty.kind != "bool":
            out.append(Diagnostic("PropertyType", f"predicate has type {ty}, want bool"))
    except IlError as exc:
        out.append(Diagnostic("PropertyType", str(exc)))
    declared = dict(p.mode_values)
    if MODE_VAR in all_vars(p.predicate):
        for mode in m.modes:
            if mode not in declared:
                out.append(
                    Diagnostic("PropertyType", f"mode '{mode}' missing from the enumeration")
                )
    return out


def initial_states(m: PolyglotModel, cap: int = 1 << 16) -> list[Assignment]:
    """Concrete initial states, deterministically ordered."""
    if m.init_pred is not None:
        relevant = sorted(all_vars(m.init_pred))
        base = default_assignment(m.vars)
        combos: list[Assignment] = []
        total = 1
        for n in relevant:
            t = m.vars.type_of(n)
            total *= domain_size(t)
            if total > cap:
                raise InitUnsatisfiable(
                    "init predicate ranges over too many values to enumerate; "
                    "constrain more variables"
                )
        stack = [base]
        for n in relevant:
            t = m.vars.type_of(n)
            stack = [s.set(n, v) for s in stack for v in enumerate_values(t)]
        combos = [s for s in stack if eval_bool(m.init_pred, s)]
        if not combos:
            raise InitUnsatisfiable("no assignment satisfies the init predicate")
        return sorted(combos, key=assignment_key)
    # Procedure-sequence init: run from the all-defaults state.
    states = {default_assignment(m.vars)}
    for name in m.init_procs:
        proc = m.procedure(name).mini(m.vars)
        states = {post for s in states for post in exec_mini(proc, s)}
    return sorted(states, key=assignment_key)


def simulate(m: PolyglotModel, steps: int, seed: int = 0) -> Trace:
    """Run the model concretely for up to `steps` transitions.

    Every nondeterministic choice (initial state, enabled transition,
    havoc outcome) is resolved by one seeded generator, so equal
    (model, steps, seed) triples give equal traces.
    """
    diags = validate_model(m)
    if diags:
        raise ValueError(f"model is not well-formed: {diags[0]}")
    rng = random.Random(seed)

    inits = initial_states(m)
    init_state = inits[0] if len(inits) == 1 else rng.choice(inits)
    state = init_state
    mode = m.init_mode
    trace_steps: list[TraceStep] = []
    time = 0
    stuck = False

    for _ in range(steps):
        enabled = [t for t in m.outgoing(mode) if eval_bool(t.guard, state)]
        if not enabled:
            stuck = True
            break
        chosen = enabled[0] if len(enabled) == 1 else rng.choice(enabled)
        calls: list[ProcCall] = []
        for name in chosen.update:
            proc = m.procedure(name).mini(m.vars)
            posts = sorted(exec_mini(proc, state), key=assignment_key)
            post = posts[0] if len(posts) == 1 else rng.choice(posts)
            calls.append(ProcCall(name, state, post))
            state = post
        time += chosen.duration
        mode = chosen.to_mode
        trace_steps.append(TraceStep(chosen.id, mode, state, tuple(calls), time))

    return Trace(m.init_mode, init_state, tuple(trace_steps), stuck)


def _step_holds(p: Property, mode: str, state: Assignment) -> bool:
    extra = {MODE_VAR: Value.of_int(p.mode_value(mode), MODE_TYPE)} if p.mode_values else {}
    if MODE_VAR in all_vars(p.predicate) and not p.mode_values:
        raise ValueError("predicate mentions 'mode' but the property has no mode table")
    full = dict(state.as_dict())
    full.update(extra)
    return eval_bool(p.predicate, Assignment.of(full))


def holds(p: Property, t: Trace) -> str:
    """Judge one finite trace: 'true', 'false' or 'inconclusive'.

    Invariant: false as soon as any visited state (including the initial
    one) violates the predicate, true otherwise. EventuallyWithin(T): true
    on a witness no later than time T; false when the trace passes T, or
    can never be extended (stuck), without one; inconclusive when the
    trace was merely truncated before T.
    """
    configs = t.states()
    if p.kind == INVARIANT:
        for mode, state, _ in configs:
            if not _step_holds(p, mode, state):
                return HOLDS_FALSE
        return HOLDS_TRUE
    for mode, state, time in configs:
        if time <= p.deadline and _step_holds(p, mode, state):
            return HOLDS_TRUE
    if t.final_time > p.deadline or t.stuck:
        return HOLDS_FALSE
    return HOLDS_INCONCLUSIVE
