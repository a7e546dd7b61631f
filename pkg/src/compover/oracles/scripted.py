"""Oracles that replay a fixed script of replies.

Useful for tests and for reproducing a recorded verification run without
the tools (or the model endpoint) that produced it.  Each call consumes
the next scripted reply in order; running past the end raises
ScriptExhausted rather than inventing an answer.
"""

from __future__ import annotations

from typing import Sequence

from ..il import Contract
from .base import ScriptExhausted, SynthBudget, VerifResult


class ScriptedVerifier:
    """Replays a fixed sequence of verification results."""

    def __init__(self, results: Sequence[VerifResult]):
        self._results = list(results)
        self._next = 0
        self.calls: list[tuple[Contract, str]] = []

    @property
    def remaining(self) -> int:
        return len(self._results) - self._next

    def verify(self, contract: Contract, proc) -> VerifResult:
        if self._next >= len(self._results):
            raise ScriptExhausted(
                f"scripted verifier ran out of replies after {self._next} calls"
            )
        self.calls.append((contract, getattr(proc, "name", "?")))
        result = self._results[self._next]
        self._next += 1
        return result


class ScriptedSynth:
    """Replays a fixed sequence of synthesized contracts."""

    def __init__(self, contracts: Sequence[Contract]):
        self._contracts = list(contracts)
        self._next = 0
        self.calls: list[str] = []

    @property
    def remaining(self) -> int:
        return len(self._contracts) - self._next

    def synthesize(self, proc, positives, negatives, budget: SynthBudget) -> Contract:
        if self._next >= len(self._contracts):
            raise ScriptExhausted(
                f"scripted synthesizer ran out of replies after {self._next} calls"
            )
        self.calls.append(getattr(proc, "name", "?"))
        contract = self._contracts[self._next]
        self._next += 1
        return contract
