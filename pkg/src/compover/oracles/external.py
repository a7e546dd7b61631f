"""Shared plumbing for the external model-checker adapters.

A BoundProc joins a ProcedureRef with the model's variable context so an
adapter has everything it needs in one object: the source text, the entry
point, the preamble, and typed interface variables from which a
verification harness can be generated.  Record variables are declared in
harnesses as `<name>_t`; the procedure's preamble is expected to define
that type.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from typing import Optional

from ..codegen import HarnessSpec, HarnessVar
from ..il import Assignment, Contract, SemType, Value, VarContext

__all__ = [
    "BoundProc",
    "ToolRun",
    "run_tool",
    "parse_tool_value",
    "assignment_from_leaves",
]


@dataclass(frozen=True)
class BoundProc:
    """A procedure plus its variable context, ready for harness generation."""

    name: str
    language: str
    source: str
    ctx: VarContext
    entry: str = ""
    preamble: str = ""
    call_args: tuple[str, ...] = ()
    reads: frozenset[str] = frozenset()
    writes: frozenset[str] = frozenset()

    @staticmethod
    def of(ref, ctx: VarContext) -> "BoundProc":
        """Bind a ProcedureRef-like object to a context."""
        return BoundProc(
            name=ref.name,
            language=ref.language,
            source=ref.source,
            ctx=ctx,
            entry=getattr(ref, "entry", "") or ref.name,
            preamble=getattr(ref, "preamble", ""),
            call_args=tuple(getattr(ref, "call_args", ())),
            reads=frozenset(ref.reads),
            writes=frozenset(ref.writes),
        )

    @property
    def entry_name(self) -> str:
        return self.entry or self.name

    def harness_vars(self) -> tuple[HarnessVar, ...]:
        out = []
        for name in self.ctx.names():
            t = self.ctx.type_of(name)
            target = f"{name}_t" if t.kind == "record" else ""
            out.append(HarnessVar(name=name, type=t, target_type=target))
        return tuple(out)

    def harness_spec(self, contract: Contract) -> HarnessSpec:
        return HarnessSpec(
            procedure_source=self.source,
            entry=self.entry_name,
            variables=self.harness_vars(),
            contract=contract,
            preamble=self.preamble,
            call_args=self.call_args,
        )


@dataclass(frozen=True)
class ToolRun:
    ok: bool
    returncode: int
    stdout: str
    stderr: str
    error: str = ""  # "timeout" | "missing" | "" when the process ran


def run_tool(cmd: list[str], timeout: float, cwd: Optional[str] = None) -> ToolRun:
    """Run an external tool, folding the usual failure modes into data."""
    try:
        proc = subprocess.run(
            cmd,
            capture_output=True,
            text=True,
            timeout=timeout,
            cwd=cwd,
        )
    except subprocess.TimeoutExpired:
        return ToolRun(ok=False, returncode=-1, stdout="", stderr="", error="timeout")
    except FileNotFoundError:
        return ToolRun(ok=False, returncode=-1, stdout="", stderr="", error="missing")
    return ToolRun(
        ok=True,
        returncode=proc.returncode,
        stdout=proc.stdout,
        stderr=proc.stderr,
    )


def parse_tool_value(text: str, t: SemType) -> Value:
    """Turn a tool-printed scalar (decimal or TRUE/FALSE) into a typed Value."""
    s = text.strip()
    if t.kind == "bool":
        if s.lower() in ("true", "1"):
            return Value.of_bool(True)
        if s.lower() in ("false", "0"):
            return Value.of_bool(False)
        raise ValueError(f"cannot read {s!r} as a bool")
    if not t.is_int:
        raise ValueError(f"cannot read scalar into {t}")
    n = int(s, 0)
    return Value.of_int(n % (1 << t.width), t)


def assignment_from_leaves(
    leaves: dict[str, str], ctx: VarContext
) -> Optional[Assignment]:
    """Rebuild a typed assignment from flat `path -> printed value` entries.

    Paths use dots between record fields (`request.value`).  Returns None
    when any leaf of any context variable is missing, so callers can
    degrade to an Unknown verdict instead of fabricating state.
    """

    def build(path: str, t: SemType) -> Optional[Value]:
        if t.kind == "record":
            fields: dict[str, Value] = {}
            for fname, ftype in t.fields:
                fv = build(f"{path}.{fname}", ftype)
                if fv is None:
                    return None
                fields[fname] = fv
            return Value.of_record(t, fields)
        raw = leaves.get(path)
        if raw is None:
            return None
        try:
            return parse_tool_value(raw, t)
        except ValueError:
            return None

    out: dict[str, Value] = {}
    for name in ctx.names():
        v = build(name, ctx.type_of(name))
        if v is None:
            return None
        out[name] = v
    return Assignment.of(out)
