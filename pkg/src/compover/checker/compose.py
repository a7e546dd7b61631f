"""Contract composition checks and the induced abstract model.

A transition whose update chains several procedure calls is only usable
abstractly when the contracts line up: whatever state the j-th
postcondition can produce must satisfy the (j+1)-th precondition.  When
every junction of every transition checks out, the model can be abstracted
by replacing each call with its contract relation

    {(d, d') | P(d) implies Q(d, d')}  plus  d'.v = d.v for unwritten v,

chained through intermediate states.  The unwritten-variable frames are an
extension of the bare implication relation: a procedure cannot touch
variables outside its declared write set, so adding the frames keeps the
relation an over-approximation while making abstract traces far less noisy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..il import Assignment, Contract, VarContext
from ..model import PolyglotModel, Transition
from ..smt.session import SolverSession
from .encode import compile_state, declare_state, decode_state


class CompositionFailure(Exception):
    """Adjacent contracts in an update chain do not hand off cleanly."""

    def __init__(self, transition: str, junction: int, witness: Assignment):
        self.transition = transition
        self.junction = junction
        self.witness = witness
        super().__init__(
            f"transition '{transition}': postcondition {junction} can produce "
            f"{witness}, which violates the next precondition"
        )


@dataclass(frozen=True)
class CompositionResult:
    ok: bool
    junction: int = -1
    witness: Optional[Assignment] = None


@dataclass(frozen=True)
class AbstractCall:
    procedure: str
    contract: Contract
    writes: frozenset[str]


@dataclass(frozen=True)
class AbstractModel:
    """The model with every procedure call replaced by its contract relation."""

    model: PolyglotModel
    contracts: tuple[tuple[str, Contract], ...]  # sorted by procedure name

    def __post_init__(self):
        table = dict(self.contracts)
        for t in self.model.transitions:
            for name in t.update:
                if name not in table:
                    raise ValueError(f"no contract for procedure '{name}'")
        for _, c in self.contracts:
            c.validate(self.model.vars)

    def contract_of(self, procedure: str) -> Contract:
        return dict(self.contracts)[procedure]

    def calls(self, t: Transition) -> tuple[AbstractCall, ...]:
        return tuple(
            AbstractCall(
                procedure=name,
                contract=self.contract_of(name),
                writes=self.model.procedure(name).writes,
            )
            for name in t.update
        )

    def max_chain(self) -> int:
        return max((len(t.update) for t in self.model.transitions), default=0)


def check_composition(
    contracts: Mapping[str, Contract],
    transition: Transition,
    ctx: VarContext,
    solver_command=None,
    timeout: float = 60.0,
) -> CompositionResult:
    """Is every junction Q_j => P_{j+1} valid?  Fail carries a countermodel.

    The check treats the handoff state as anything the previous
    postcondition admits (its pre-state is left free), asking whether such
    a state can violate the next precondition.
    """
    chain = list(transition.update)
    if len(chain) <= 1:
        return CompositionResult(True)
    pre_bases = {v: f"{v}__a" for v in ctx.names()}
    mid_bases = {v: f"{v}__b" for v in ctx.names()}
    with SolverSession(solver_command, timeout=timeout) as s:
        declare_state(s, ctx, pre_bases)
        declare_state(s, ctx, mid_bases)
        for j in range(len(chain) - 1):
            q = contracts[chain[j]]
            p_next = contracts[chain[j + 1]]
            s.push()
            s.send(f"(assert {compile_state(q.post, mid_bases, pre_bases)})")
            s.send(f"(assert (not {compile_state(p_next.pre, mid_bases)}))")
            if s.check_sat() == "sat":
                witness = decode_state(s, ctx, mid_bases)
                s.pop()
                return CompositionResult(False, j, witness)
            s.pop()
    return CompositionResult(True)


def induce(
    m: PolyglotModel,
    contracts: Mapping[str, Contract],
    solver_command=None,
    timeout: float = 60.0,
) -> AbstractModel:
    """Abstract the model by its contracts, refusing ill-joined chains."""
    for t in m.transitions:
        r = check_composition(contracts, t, m.vars, solver_command, timeout)
        if not r.ok:
            raise CompositionFailure(t.id, r.junction, r.witness)
    used = {name for t in m.transitions for name in t.update}
    table = tuple(sorted(((n, c) for n, c in contracts.items() if n in used), key=lambda nc: nc[0]))
    return AbstractModel(model=m, contracts=table)
