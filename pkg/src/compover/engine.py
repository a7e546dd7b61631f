"""The counterexample-guided verification driver.

Verification alternates two refinement loops.  The inner loop (CEGIS,
`synth_contract`) proposes a contract for one procedure from example
pairs and asks a language-level verifier to prove it; a disproof comes
with a concrete behavior that joins the positive examples and sharpens
the next proposal.  The outer loop (`polyver`) abstracts the whole model
by the current contracts, model-checks the abstraction, and — when the
checker finds a counterexample trace — replays each of the trace's
procedure steps concretely (`check_spurious`).  Steps no real execution
can reproduce become negative examples, the affected procedures are
re-synthesized, and the loop repeats.  A trace that survives replay is a
genuine counterexample.

Budgets bound both loops; exhausting any budget, or an oracle answering
Unknown under the default policy, yields an Inconclusive verdict rather
than a guess.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .checker import CompositionFailure, MC_FAIL, MC_PASS, bmc, extract, induce
from .il import Contract, VarContext, eval_bool
from .minilang import MiniProc
from .model import (
    PolyglotModel,
    ProcedureRef,
    Property,
    Trace,
    validate_model,
    validate_property,
)
from .oracles import (
    BoundProc,
    ExamplePair,
    NEGATIVE,
    NoCandidate,
    POSITIVE,
    ScriptExhausted,
    SynthBudget,
    SynthOracle,
    TransportError,
    VerifOracle,
    verify_pair_impossible,
)
from .smt.session import SolverError

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

UNKNOWN_ABORT = "abort"
UNKNOWN_AS_FAIL = "treat-as-fail"


class Inconclusive(Exception):
    """No verdict: a budget ran out or an oracle could not answer."""


class OracleStagnation(Exception):
    """The verifier repeated a counterexample it already produced."""


@dataclass(frozen=True)
class EngineConfig:
    bound: int = 12
    max_cegis: int = 40
    max_cegar: int = 20
    unknown_policy: str = UNKNOWN_ABORT
    budget: SynthBudget = SynthBudget()
    solver_command: Optional[tuple[str, ...]] = None
    solver_timeout: float = 300.0

    def __post_init__(self):
        if self.bound < 1 or self.max_cegis < 1 or self.max_cegar < 1:
            raise ValueError("bound and iteration budgets must be positive")
        if self.unknown_policy not in (UNKNOWN_ABORT, UNKNOWN_AS_FAIL):
            raise ValueError(f"unknown policy {self.unknown_policy!r}")


@dataclass
class ProcStats:
    cegis_iterations: int = 0
    synth_time: float = 0.0
    verify_time: float = 0.0


@dataclass
class EngineStats:
    cegar_iterations: int = 0
    per_procedure: dict[str, ProcStats] = field(default_factory=dict)
    model_check_time: float = 0.0
    spurious_time: float = 0.0
    total_time: float = 0.0

    def procedure(self, name: str) -> ProcStats:
        return self.per_procedure.setdefault(name, ProcStats())

    @property
    def cegis_total(self) -> int:
        return sum(p.cegis_iterations for p in self.per_procedure.values())

    @property
    def synth_oracle_time(self) -> float:
        return sum(p.synth_time for p in self.per_procedure.values())

    @property
    def verif_oracle_time(self) -> float:
        return sum(p.verify_time for p in self.per_procedure.values()) + self.spurious_time


@dataclass(frozen=True)
class Verdict:
    outcome: str  # PASS | FAIL | INCONCLUSIVE
    bound: int = 0
    contracts: tuple[tuple[str, Contract], ...] = ()
    trace: Optional[Trace] = None
    reason: str = ""
    warning: str = ""
    stats: EngineStats = field(default_factory=EngineStats)

    @property
    def is_pass(self) -> bool:
        return self.outcome == PASS

    @property
    def is_fail(self) -> bool:
        return self.outcome == FAIL


def bind_proc(ref: ProcedureRef, ctx: VarContext):
    """The procedure object a verifier works on: MiniProc or BoundProc."""
    if ref.language == "mini":
        return ref.mini(ctx)
    return BoundProc.of(ref, ctx)


def _verifier_for(verifiers: Mapping[str, VerifOracle], language: str) -> VerifOracle:
    try:
        return verifiers[language]
    except KeyError:
        raise Inconclusive(f"no verifier configured for language '{language}'") from None


def contract_consistent(c: Contract, positives, negatives) -> bool:
    """The example constraint: admit every positive, reject every negative."""
    for p in positives:
        if eval_bool(c.pre, p.pre) and not eval_bool(c.post, p.pre, p.post):
            return False
    for n in negatives:
        if not eval_bool(c.pre, n.pre) or eval_bool(c.post, n.pre, n.post):
            return False
    return True


def _same_pair(a: ExamplePair, b: ExamplePair) -> bool:
    return a.pre == b.pre and a.post == b.post


def synth_contract(
    proc,
    positives: list[ExamplePair],
    negatives: list[ExamplePair],
    synth: SynthOracle,
    verifier: VerifOracle,
    cfg: EngineConfig = EngineConfig(),
    stats: Optional[ProcStats] = None,
) -> tuple[Contract, list[ExamplePair]]:
    """Propose-and-verify until the verifier accepts a contract.

    Returns the accepted contract and the grown positive-example list.
    Candidates inconsistent with the examples (possible with the LLM
    oracle) are skipped but still count against the iteration budget.
    """
    stats = stats if stats is not None else ProcStats()
    name = getattr(proc, "name", "?")
    positives = list(positives)
    rejected: set[str] = set()
    for _ in range(cfg.max_cegis):
        stats.cegis_iterations += 1
        t0 = time.perf_counter()
        try:
            candidate = synth.synthesize(proc, positives, negatives, cfg.budget)
        except NoCandidate as exc:
            raise Inconclusive(f"no candidate contract for '{name}': {exc}") from None
        finally:
            stats.synth_time += time.perf_counter() - t0
        key = repr(candidate)
        if key in rejected or not contract_consistent(candidate, positives, negatives):
            continue
        t0 = time.perf_counter()
        res = verifier.verify(candidate, proc)
        stats.verify_time += time.perf_counter() - t0
        if res.is_pass:
            return candidate, positives
        if res.is_fail:
            pair = res.pair.with_polarity(POSITIVE)
            if any(_same_pair(pair, known) for known in positives):
                raise OracleStagnation(
                    f"verifier repeated counterexample {pair} for '{name}'"
                )
            positives.append(pair)
            continue
        if cfg.unknown_policy == UNKNOWN_ABORT:
            raise Inconclusive(
                f"verifier answered unknown({res.reason}) for '{name}'"
            )
        rejected.add(key)  # treat as refuted without an example
    raise Inconclusive(f"CEGIS budget ({cfg.max_cegis}) exhausted for '{name}'")


def check_spurious(
    trace: Trace,
    model: PolyglotModel,
    verifiers: Mapping[str, VerifOracle],
    cfg: EngineConfig = EngineConfig(),
    stats: Optional[EngineStats] = None,
) -> dict[str, list[ExamplePair]]:
    """Replay each trace pair; pairs no concrete run can produce come back
    as negative examples, grouped by procedure. Empty means genuine."""
    out: dict[str, list[ExamplePair]] = {}
    for name, pairs in extract(trace).items():
        ref = model.procedure(name)
        proc = bind_proc(ref, model.vars)
        verifier = _verifier_for(verifiers, ref.language)
        for pair in pairs:
            t0 = time.perf_counter()
            res = verify_pair_impossible(verifier, proc, pair)
            if stats is not None:
                stats.spurious_time += time.perf_counter() - t0
            if res.is_pass:
                out.setdefault(name, []).append(pair.with_polarity(NEGATIVE))
            elif res.is_unknown:
                # A pair we cannot classify poisons both verdict directions.
                raise Inconclusive(
                    f"cannot decide whether '{name}' can produce {pair}: "
                    f"unknown({res.reason})"
                )
    return out


def _transition_procedures(model: PolyglotModel) -> list[str]:
    seen: list[str] = []
    for t in model.transitions:
        for name in t.update:
            if name not in seen:
                seen.append(name)
    return seen


def polyver(
    model: PolyglotModel,
    prop: Property,
    synth: SynthOracle,
    verifiers: Mapping[str, VerifOracle],
    cfg: EngineConfig = EngineConfig(),
) -> Verdict:
    """Verify the model against the property; never guesses on budget exhaustion."""
    diags = validate_model(model) + validate_property(prop, model)
    if diags:
        raise ValueError(f"model/property not well-formed: {diags[0]}")

    stats = EngineStats()
    started = time.perf_counter()
    procedures = _transition_procedures(model)
    positives: dict[str, list[ExamplePair]] = {n: [] for n in procedures}
    negatives: dict[str, list[ExamplePair]] = {n: [] for n in procedures}
    contracts: dict[str, Contract] = {}
    dirty = list(procedures)

    def finish(outcome: str, **kw) -> Verdict:
        stats.total_time = time.perf_counter() - started
        table = tuple(sorted(contracts.items(), key=lambda nc: nc[0]))
        return Verdict(outcome, bound=cfg.bound, contracts=table, stats=stats, **kw)

    try:
        for _ in range(cfg.max_cegar):
            stats.cegar_iterations += 1
            for name in procedures:
                if name not in dirty:
                    continue
                ref = model.procedure(name)
                proc = bind_proc(ref, model.vars)
                verifier = _verifier_for(verifiers, ref.language)
                contracts[name], positives[name] = synth_contract(
                    proc,
                    positives[name],
                    negatives[name],
                    synth,
                    verifier,
                    cfg,
                    stats.procedure(name),
                )
            dirty = []

            abstract = induce(
                model, contracts, cfg.solver_command, timeout=cfg.solver_timeout
            )
            t0 = time.perf_counter()
            res = bmc(
                abstract, prop, cfg.bound, cfg.solver_command, timeout=cfg.solver_timeout
            )
            stats.model_check_time += time.perf_counter() - t0
            if res.verdict == MC_PASS:
                return finish(PASS, warning=res.warning)
            if res.verdict != MC_FAIL:
                return finish(INCONCLUSIVE, reason=f"model checker: {res.reason}")

            fresh = check_spurious(res.trace, model, verifiers, cfg, stats)
            if not fresh:
                return finish(FAIL, trace=res.trace)
            for name, pairs in fresh.items():
                known = negatives[name]
                new = [p for p in pairs if not any(_same_pair(p, k) for k in known)]
                if new:
                    known.extend(new)
                    dirty.append(name)
            if not dirty:
                return finish(
                    INCONCLUSIVE,
                    reason="refinement stalled: spurious trace produced no new examples",
                )
        return finish(INCONCLUSIVE, reason=f"CEGAR budget ({cfg.max_cegar}) exhausted")
    except (Inconclusive, OracleStagnation) as exc:
        return finish(INCONCLUSIVE, reason=str(exc))
    except (ScriptExhausted, TransportError, SolverError, CompositionFailure) as exc:
        return finish(INCONCLUSIVE, reason=f"{type(exc).__name__}: {exc}")
