"""Bounded model checking of an abstract model against a timed property.

The abstract model is unrolled `bound` steps into one SMT formula.  Step i
owns one full copy of the state (per-leaf constants suffixed `__s{i}`),
the mode as an 8-bit enum constant, and the cumulative time as a bit
vector wide enough that no sum of durations can wrap.  Between steps,
boolean selectors pick exactly one behavior: one of the enabled
transitions fires, or — only when nothing is enabled — the step halts and
stutters.  A fired transition advances the mode and clock and threads the
state through its contract chain via intermediate instances `__s{i}x{j}`.

Invariants are checked depth by depth, so the returned counterexample is
a shortest one.  EventuallyWithin(T) is falsified in a single query at
full depth: no witness at any step whose time is within T, while the
deadline has passed (or the run is stuck); among the falsifying models
the final time is then pushed upward until the solver refuses, so the
reported trace shows the worst completion time, not an arbitrary one.
Passing is always relative to the bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..il import Assignment, VarContext
from ..model import (
    EVENTUALLY_WITHIN,
    INVARIANT,
    MODE_TYPE,
    MODE_VAR,
    ProcCall,
    Property,
    Trace,
    TraceStep,
    initial_states,
)
from ..smt.session import SolverError, SolverSession, parse_value
from .compose import AbstractModel
from .encode import (
    bv_lit,
    compile_state,
    conj,
    declare_state,
    decode_state,
    disj,
    eq_concrete,
    eq_states,
    frame_terms,
)

MC_PASS = "pass"
MC_FAIL = "fail"
MC_UNKNOWN = "unknown"

_TIME_WIDTHS = (8, 16, 32, 64)


@dataclass(frozen=True)
class McResult:
    verdict: str  # MC_PASS | MC_FAIL | MC_UNKNOWN
    bound: int = 0
    trace: Optional[Trace] = None
    reason: str = ""
    warning: str = ""  # e.g. undecided executions beyond the bound

    @property
    def is_pass(self) -> bool:
        return self.verdict == MC_PASS

    @property
    def is_fail(self) -> bool:
        return self.verdict == MC_FAIL


def time_width(a: AbstractModel, p: Property, bound: int) -> int:
    worst = bound * max((t.duration for t in a.model.transitions), default=0)
    need = max(worst, p.deadline) + 1
    for w in _TIME_WIDTHS:
        if need < (1 << w):
            return w
    raise ValueError("cumulative time does not fit in 64 bits")


class _Unrolling:
    """Owns the solver session and the per-step naming scheme."""

    def __init__(self, a: AbstractModel, p: Property, bound: int, session: SolverSession):
        self.a = a
        self.p = p
        self.bound = bound
        self.s = session
        self.ctx: VarContext = a.model.vars
        self.tw = time_width(a, p, bound)
        self.mode_index = {m: i for i, m in enumerate(a.model.modes)}

    # -- naming ---------------------------------------------------------
    def bases(self, i: int) -> dict[str, str]:
        return {v: f"{v}__s{i}" for v in self.ctx.names()}

    def mid_bases(self, i: int, j: int) -> dict[str, str]:
        return {v: f"{v}__s{i}x{j}" for v in self.ctx.names()}

    def mode_const(self, i: int) -> str:
        return f"mode__s{i}"

    def time_const(self, i: int) -> str:
        return f"time__s{i}"

    def fire_const(self, i: int, k: int) -> str:
        return f"fire__s{i}_t{k}"

    def en_const(self, i: int, k: int) -> str:
        return f"en__s{i}_t{k}"

    def halt_const(self, i: int) -> str:
        return f"halt__s{i}"

    def pred_const(self, i: int) -> str:
        return f"pred__s{i}"

    # -- declarations and constraints ------------------------------------
    def declare_step_state(self, i: int) -> None:
        declare_state(self.s, self.ctx, self.bases(i))
        self.s.send(f"(declare-const {self.mode_const(i)} (_ BitVec {MODE_TYPE.width}))")
        self.s.send(f"(declare-const {self.time_const(i)} (_ BitVec {self.tw}))")
        self.s.send(f"(declare-const {self.pred_const(i)} Bool)")
        self.assert_pred_binding(i)

    def assert_pred_binding(self, i: int) -> None:
        post = dict(self.bases(i))
        post[MODE_VAR] = self.mode_const(i)
        term = compile_state(self.p.predicate, post)
        self.s.send(f"(assert (= {self.pred_const(i)} {term}))")

    def assert_init(self) -> None:
        self.s.send(
            f"(assert (= {self.mode_const(0)} "
            f"{bv_lit(self.mode_index[self.a.model.init_mode], MODE_TYPE.width)}))"
        )
        self.s.send(f"(assert (= {self.time_const(0)} {bv_lit(0, self.tw)}))")
        states = initial_states(self.a.model)
        options = [eq_concrete(self.ctx, self.bases(0), st) for st in states]
        self.s.send(f"(assert {disj(options)})")

    def assert_step(self, i: int) -> None:
        """Constrain the move from state i to state i+1."""
        a = self.a
        transitions = a.model.transitions
        cur, nxt = self.bases(i), self.bases(i + 1)

        for j in range(1, a.max_chain()):
            declare_state(self.s, self.ctx, self.mid_bases(i, j))

        selectors = []
        enables = []
        for k, t in enumerate(transitions):
            en, fire = self.en_const(i, k), self.fire_const(i, k)
            self.s.send(f"(declare-const {en} Bool)")
            self.s.send(f"(declare-const {fire} Bool)")
            guard = compile_state(t.guard, cur)
            at_mode = f"(= {self.mode_const(i)} {bv_lit(self.mode_index[t.from_mode], MODE_TYPE.width)})"
            self.s.send(f"(assert (= {en} {conj([at_mode, guard])}))")
            self.s.send(f"(assert (=> {fire} {en}))")
            selectors.append(fire)
            enables.append(en)

        halt = self.halt_const(i)
        self.s.send(f"(declare-const {halt} Bool)")
        self.s.send(f"(assert (= {halt} (not {disj(enables)})))")

        choices = selectors + [halt]
        self.s.send(f"(assert {disj(choices)})")
        for x in range(len(choices)):
            for y in range(x + 1, len(choices)):
                self.s.send(f"(assert (not (and {choices[x]} {choices[y]})))")

        stutter = conj(
            [
                eq_states(self.ctx, nxt, cur),
                f"(= {self.mode_const(i + 1)} {self.mode_const(i)})",
                f"(= {self.time_const(i + 1)} {self.time_const(i)})",
            ]
        )
        self.s.send(f"(assert (=> {halt} {stutter}))")

        for k, t in enumerate(transitions):
            effect = [
                f"(= {self.mode_const(i + 1)} {bv_lit(self.mode_index[t.to_mode], MODE_TYPE.width)})",
                f"(= {self.time_const(i + 1)} "
                f"(bvadd {self.time_const(i)} {bv_lit(t.duration, self.tw)}))",
            ]
            effect.extend(self.chain_terms(i, t))
            self.s.send(f"(assert (=> {self.fire_const(i, k)} {conj(effect)}))")

    def chain_terms(self, i: int, t) -> list[str]:
        """Relate state i to state i+1 through the transition's call chain."""
        calls = self.a.calls(t)
        out = []
        prev = self.bases(i)
        for j, call in enumerate(calls):
            nxt = self.bases(i + 1) if j == len(calls) - 1 else self.mid_bases(i, j + 1)
            pre_t = compile_state(call.contract.pre, prev)
            post_t = compile_state(call.contract.post, nxt, prev)
            out.append(f"(=> {pre_t} {post_t})")
            out.extend(frame_terms(self.ctx, prev, nxt, call.writes))
            prev = nxt
        return out

    # -- model reading ----------------------------------------------------
    def read_bool(self, const: str) -> bool:
        kind = parse_value(self.s.get_value([const])[0])
        return bool(kind[1])

    def read_time(self, i: int) -> int:
        kind = parse_value(self.s.get_value([self.time_const(i)])[0])
        return kind[2]

    def extract_trace(self, depth: int) -> Trace:
        model = self.a.model
        init_state = decode_state(self.s, self.ctx, self.bases(0))
        steps: list[TraceStep] = []
        stuck = False
        for i in range(depth):
            if self.read_bool(self.halt_const(i)):
                stuck = True
                break
            fired = None
            for k, t in enumerate(model.transitions):
                if self.read_bool(self.fire_const(i, k)):
                    fired = (k, t)
                    break
            if fired is None:
                raise SolverError(f"model has neither a fired transition nor a halt at step {i}")
            _, t = fired
            calls = self.a.calls(t)
            prev_state = steps[-1].state if steps else init_state
            prev_bases = self.bases(i)
            proc_calls: list[ProcCall] = []
            for j, call in enumerate(calls):
                nxt_bases = (
                    self.bases(i + 1) if j == len(calls) - 1 else self.mid_bases(i, j + 1)
                )
                nxt_state = decode_state(self.s, self.ctx, nxt_bases)
                proc_calls.append(ProcCall(call.procedure, prev_state, nxt_state))
                prev_state, prev_bases = nxt_state, nxt_bases
            steps.append(
                TraceStep(
                    transition=t.id,
                    mode=t.to_mode,
                    state=prev_state,
                    calls=tuple(proc_calls),
                    time=self.read_time(i + 1),
                )
            )
        return Trace(model.init_mode, init_state, tuple(steps), stuck)


def bmc(
    a: AbstractModel,
    p: Property,
    bound: int,
    solver_command=None,
    timeout: float = 300.0,
) -> McResult:
    """Check the abstract model against the property up to `bound` steps."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    try:
        with SolverSession(solver_command, timeout=timeout) as session:
            u = _Unrolling(a, p, bound, session)
            for i in range(bound + 1):
                u.declare_step_state(i)
            u.assert_init()
            if p.kind == INVARIANT:
                return _check_invariant(u)
            return _check_eventually(u)
    except SolverError as exc:
        if exc.timeout:
            return McResult(MC_UNKNOWN, bound=bound, reason="timeout")
        raise


def _check_invariant(u: _Unrolling) -> McResult:
    for depth in range(u.bound + 1):
        if depth > 0:
            u.assert_step(depth - 1)
        u.s.push()
        u.s.send(f"(assert (not {u.pred_const(depth)}))")
        if u.s.check_sat() == "sat":
            trace = u.extract_trace(depth)
            return McResult(MC_FAIL, bound=u.bound, trace=trace)
        u.s.pop()
    return McResult(MC_PASS, bound=u.bound)


def _violation_term(u: _Unrolling) -> str:
    deadline = bv_lit(u.p.deadline, u.tw)
    no_witness = [
        f"(=> (bvule {u.time_const(i)} {deadline}) (not {u.pred_const(i)}))"
        for i in range(u.bound + 1)
    ]
    ran_out = f"(bvugt {u.time_const(u.bound)} {deadline})"
    dead_end = u.halt_const(u.bound - 1)
    return conj([disj([ran_out, dead_end]), *no_witness])


def _check_eventually(u: _Unrolling) -> McResult:
    for i in range(u.bound):
        u.assert_step(i)
    u.s.push()
    u.s.send(f"(assert {_violation_term(u)})")
    if u.s.check_sat() != "sat":
        u.s.pop()
        return McResult(MC_PASS, bound=u.bound, warning=_undecided_warning(u))

    # Push the final time upward so the reported trace is the worst one.
    best_time = u.read_time(u.bound)
    best_trace = u.extract_trace(u.bound)
    while True:
        u.s.push()
        u.s.send(
            f"(assert (bvugt {u.time_const(u.bound)} {bv_lit(best_time, u.tw)}))"
        )
        if u.s.check_sat() != "sat":
            break
        best_time = u.read_time(u.bound)
        best_trace = u.extract_trace(u.bound)
    return McResult(MC_FAIL, bound=u.bound, trace=best_trace)


def _undecided_warning(u: _Unrolling) -> str:
    """Detect executions the bound truncated before the deadline resolved."""
    deadline = bv_lit(u.p.deadline, u.tw)
    no_witness = [
        f"(=> (bvule {u.time_const(i)} {deadline}) (not {u.pred_const(i)}))"
        for i in range(u.bound + 1)
    ]
    undecided = conj(
        [
            f"(bvule {u.time_const(u.bound)} {deadline})",
            f"(not {u.halt_const(u.bound - 1)})",
            *no_witness,
        ]
    )
    u.s.push()
    u.s.send(f"(assert {undecided})")
    sat = u.s.check_sat() == "sat"
    u.s.pop()
    if sat:
        return (
            "some executions neither produced a witness nor passed the "
            "deadline within the bound; the pass is bound-relative"
        )
    return ""
