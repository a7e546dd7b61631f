"""Verification oracle backed by the CBMC bounded model checker.

The adapter emits a whole-file harness for the contract, runs
`cbmc --json-ui --trace` on it, and reads the structured output.  A
successful run is a Pass.  A failed assertion yields a counterexample
trace from which the interface variables' values are recovered: the
pre-state is their value at the moment the entry point is called, the
post-state their value when the assertion fires.  Traces that do not
mention every interface variable (or that the JSON reader cannot follow)
degrade to Unknown("unsupported") — we never invent state.

Timeouts and a missing/broken binary map to Unknown("timeout") and
Unknown("tool-error").
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass, field
from typing import Optional

from ..codegen import emit_cbmc_harness
from ..il import Contract, VarContext
from .base import ExamplePair, NEGATIVE, VerifResult
from .external import BoundProc, assignment_from_leaves, run_tool

_POINTER_TARGET = re.compile(r"&?(\w+)")


def _normalize_lhs(lhs: str, aliases: dict[str, str]) -> str:
    """Map a trace lhs to a dotted interface path, resolving heap aliases."""
    path = lhs.replace("->", ".")
    root, _, rest = path.partition(".")
    root = aliases.get(root, root)
    return f"{root}.{rest}" if rest else root


def _step_value(value: dict) -> Optional[str]:
    if not isinstance(value, dict):
        return None
    kind = value.get("name")
    if kind == "pointer":
        return None
    data = value.get("data")
    if data is not None:
        return str(data)
    binary = value.get("binary")
    if isinstance(binary, str) and binary and set(binary) <= {"0", "1"}:
        return str(int(binary, 2))
    return None


def walk_trace(steps: list, entry: str) -> tuple[dict[str, str], dict[str, str]]:
    """Follow assignments through a CBMC trace.

    Returns (pre, post) maps from dotted interface paths to printed values:
    the state when `entry` is first called and the state at the end of the
    trace.
    """
    current: dict[str, str] = {}
    aliases: dict[str, str] = {}
    pre: dict[str, str] = {}
    seen_call = False
    for step in steps:
        kind = step.get("stepType")
        if kind == "function-call" and not seen_call:
            names = step.get("function") or {}
            if names.get("displayName") == entry or names.get("identifier", "").endswith(entry):
                pre = dict(current)
                seen_call = True
        if kind != "assignment":
            continue
        lhs = step.get("lhs")
        if not isinstance(lhs, str):
            continue
        value = step.get("value")
        if isinstance(value, dict) and value.get("name") == "pointer":
            # `request = &dynamic_object1` teaches us that later writes to
            # dynamic_object1.<field> are really request.<field>.
            m = _POINTER_TARGET.fullmatch(str(value.get("data", "")).strip())
            if m and "." not in lhs and "->" not in lhs:
                aliases[m.group(1)] = lhs
            continue
        printed = _step_value(value)
        if printed is None:
            continue
        current[_normalize_lhs(lhs, aliases)] = printed
    if not seen_call:
        pre = {}
    return pre, dict(current)


def parse_cbmc_json(
    doc: list, ctx: VarContext, entry: str
) -> tuple[str, Optional[ExamplePair]]:
    """Digest `cbmc --json-ui` output into (status, counterexample)."""
    status = ""
    trace: Optional[list] = None
    for obj in doc:
        if not isinstance(obj, dict):
            continue
        if "cProverStatus" in obj:
            status = str(obj["cProverStatus"])
        for res in obj.get("result", []) or []:
            if isinstance(res, dict) and res.get("status") == "FAILURE" and trace is None:
                trace = res.get("trace")
    if status == "success":
        return "success", None
    if status != "failure":
        return status or "error", None
    if not trace:
        return "failure", None
    pre_raw, post_raw = walk_trace(trace, entry)
    pre = assignment_from_leaves(pre_raw, ctx)
    post = assignment_from_leaves(post_raw, ctx)
    if pre is None or post is None:
        return "failure", None
    return "failure", ExamplePair(pre, post)


@dataclass
class CbmcVerifier:
    """VerifOracle for C procedures, shelling out to cbmc."""

    binary: str = "cbmc"
    timeout: float = 120.0
    unwind: int = 0
    extra_args: tuple[str, ...] = ()
    last_harness: str = field(default="", repr=False)

    def command(self, path: str) -> list[str]:
        cmd = [self.binary, path, "--json-ui", "--trace"]
        if self.unwind > 0:
            cmd += ["--unwind", str(self.unwind), "--unwinding-assertions"]
        cmd += list(self.extra_args)
        return cmd

    def verify(self, contract: Contract, proc: BoundProc) -> VerifResult:
        if proc.language != "c":
            raise ValueError(f"cbmc adapter got a {proc.language!r} procedure")
        self.last_harness = emit_cbmc_harness(proc.harness_spec(contract))
        with tempfile.TemporaryDirectory(prefix="cbmc-") as tmp:
            path = os.path.join(tmp, "harness.c")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(self.last_harness)
            run = run_tool(self.command(path), timeout=self.timeout)
        if run.error == "timeout":
            return VerifResult.unknown("timeout")
        if run.error == "missing":
            return VerifResult.unknown("tool-error", f"cannot run {self.binary!r}")
        try:
            doc = json.loads(run.stdout)
        except json.JSONDecodeError:
            return VerifResult.unknown(
                "tool-error", f"unparseable cbmc output (exit {run.returncode})"
            )
        status, pair = parse_cbmc_json(doc, proc.ctx, proc.entry_name)
        if status == "success":
            return VerifResult.passed()
        if status == "failure":
            if pair is None:
                return VerifResult.unknown("unsupported", "trace did not cover the interface")
            return VerifResult.failed(pair.with_polarity(NEGATIVE))
        return VerifResult.unknown("tool-error", f"cbmc status {status!r}")
