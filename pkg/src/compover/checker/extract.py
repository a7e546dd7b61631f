"""Pull per-procedure example pairs out of a counterexample trace."""

from __future__ import annotations

from ..model import Trace
from ..oracles import ExamplePair


def extract(t: Trace) -> dict[str, list[ExamplePair]]:
    """Group the trace's call pairs by procedure, first occurrence kept."""
    out: dict[str, list[ExamplePair]] = {}
    seen: set[tuple] = set()
    for step in t.steps:
        for call in step.calls:
            key = (call.procedure, call.pre, call.post)
            if key in seen:
                continue
            seen.add(key)
            out.setdefault(call.procedure, []).append(
                ExamplePair(call.pre, call.post)
            )
    return out
