"""Verification oracle backed by the Kani model checker for Rust.

The adapter writes a proof-harness file, runs `kani` on it, and reads the
plain-text verdict.  Counterexamples need one extra step: Kani's concrete
playback only reports the *inputs* chosen for each `kani::any()` call, not
the state after the procedure ran.  So on a failed proof we parse those
input values (the `// <value>` comments in the playback block, which appear
in the same order as the harness's `kani::any()` calls), rebuild the
pre-state, then replay it through the real implementation with `rustc` to
observe the post-state.  If any stage cannot be followed the verdict
degrades to Unknown("unsupported") rather than guessing values.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field
from typing import Optional

from ..codegen import emit_kani_harness
from ..codegen.rust import _int_lit
from ..il import Assignment, Contract, IntLit, SemType, Value, VarContext, default_value
from .base import ExamplePair, NEGATIVE, VerifResult
from .external import BoundProc, parse_tool_value, run_tool

_SUCCESS = "VERIFICATION:- SUCCESSFUL"
_FAILED = "VERIFICATION:- FAILED"
_VAL_COMMENT = re.compile(r"^\s*//\s*(.+?)\s*$")


def playback_values(stdout: str) -> Optional[list[str]]:
    """Pull the commented concrete values out of a playback unit test."""
    start = stdout.find("let concrete_vals")
    if start < 0:
        return None
    end = stdout.find("];", start)
    if end < 0:
        return None
    vals = []
    for line in stdout[start:end].splitlines():
        m = _VAL_COMMENT.match(line)
        if m:
            vals.append(m.group(1))
    return vals


def _leaf_paths(name: str, t: SemType) -> list[tuple[str, SemType]]:
    if t.kind != "record":
        return [(name, t)]
    out: list[tuple[str, SemType]] = []
    for fname, ftype in t.fields:
        out.extend(_leaf_paths(f"{name}.{fname}", ftype))
    return out


def rebuild_pre_state(
    values: list[str], ctx: VarContext, nondet: tuple[str, ...] = ()
) -> Optional[Assignment]:
    """Map playback values (in kani::any() call order) back onto variables."""
    leaves: dict[str, Value] = {}
    idx = 0
    assign: dict[str, Value] = {}
    for name in ctx.names():
        t = ctx.type_of(name)
        if nondet and name not in nondet:
            assign[name] = default_value(t)
            continue
        paths = _leaf_paths(name, t)
        if idx + len(paths) > len(values):
            return None
        pieces: dict[str, Value] = {}
        for path, lt in paths:
            try:
                pieces[path] = parse_tool_value(values[idx], lt)
            except ValueError:
                return None
            idx += 1
        assign[name] = _assemble(name, t, pieces)
    if idx != len(values):
        # Leftover inputs mean the call order did not match our model.
        return None
    leaves.update(assign)
    return Assignment.of(leaves)


def _assemble(path: str, t: SemType, pieces: dict[str, Value]) -> Value:
    if t.kind != "record":
        return pieces[path]
    return Value.of_record(
        t, {fn: _assemble(f"{path}.{fn}", ft, pieces) for fn, ft in t.fields}
    )


def _rust_value_literal(v: Value) -> str:
    if v.type.kind == "bool":
        return "true" if v.as_bool else "false"
    return _int_lit(IntLit(v.as_unsigned, v.type))


def replay_program(proc: BoundProc, pre: Assignment) -> str:
    """A standalone Rust program that runs the procedure on one input."""
    lines = ["#![allow(unused_mut, unused_parens, dead_code)]", ""]
    if proc.preamble.strip():
        lines += [proc.preamble.strip(), ""]
    lines += [proc.source.strip(), "", "fn main() {"]
    for name in proc.ctx.names():
        t = proc.ctx.type_of(name)
        if t.kind == "record":
            inner = ", ".join(
                f"{fn}: {_rust_value_literal(fv)}" for fn, fv in pre[name].payload
            )
            lines.append(f"    let mut {name}: {name}_t = {name}_t {{ {inner} }};")
        else:
            lines.append(f"    let mut {name} = {_rust_value_literal(pre[name])};")
    args = (
        ", ".join(proc.call_args)
        if proc.call_args
        else ", ".join(f"&mut {n}" for n in proc.ctx.names())
    )
    lines.append(f"    {proc.entry_name}({args});")
    for name in proc.ctx.names():
        for path, _t in _leaf_paths(name, proc.ctx.type_of(name)):
            lines.append(f'    println!("{path}={{}}", {path});')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_replay_output(stdout: str, ctx: VarContext) -> Optional[Assignment]:
    leaves: dict[str, str] = {}
    for line in stdout.splitlines():
        name, sep, val = line.partition("=")
        if sep:
            leaves[name.strip()] = val.strip()
    from .external import assignment_from_leaves

    return assignment_from_leaves(leaves, ctx)


@dataclass
class KaniVerifier:
    """VerifOracle for Rust procedures, shelling out to kani (and rustc)."""

    binary: str = "kani"
    rustc: str = "rustc"
    timeout: float = 240.0
    extra_args: tuple[str, ...] = ()
    last_harness: str = field(default="", repr=False)

    def command(self, path: str) -> list[str]:
        return [
            self.binary,
            path,
            "-Z",
            "concrete-playback",
            "--concrete-playback=print",
            *self.extra_args,
        ]

    def verify(self, contract: Contract, proc: BoundProc) -> VerifResult:
        if proc.language != "rust":
            raise ValueError(f"kani adapter got a {proc.language!r} procedure")
        self.last_harness = emit_kani_harness(proc.harness_spec(contract))
        with tempfile.TemporaryDirectory(prefix="kani-") as tmp:
            path = os.path.join(tmp, "harness.rs")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(self.last_harness)
            run = run_tool(self.command(path), timeout=self.timeout)
            if run.error == "timeout":
                return VerifResult.unknown("timeout")
            if run.error == "missing":
                return VerifResult.unknown("tool-error", f"cannot run {self.binary!r}")
            if _SUCCESS in run.stdout:
                return VerifResult.passed()
            if _FAILED not in run.stdout:
                return VerifResult.unknown(
                    "tool-error", f"no verdict in kani output (exit {run.returncode})"
                )
            values = playback_values(run.stdout)
            if values is None:
                return VerifResult.unknown("unsupported", "no concrete playback block")
            pre = rebuild_pre_state(values, proc.ctx)
            if pre is None:
                return VerifResult.unknown("unsupported", "could not map playback inputs")
            post = self._replay(proc, pre, tmp)
        if post is None:
            return VerifResult.unknown("unsupported", "replay failed")
        return VerifResult.failed(ExamplePair(pre, post, NEGATIVE))

    def _replay(self, proc: BoundProc, pre: Assignment, tmp: str) -> Optional[Assignment]:
        src = os.path.join(tmp, "replay.rs")
        exe = os.path.join(tmp, "replay")
        with open(src, "w", encoding="utf-8") as fh:
            fh.write(replay_program(proc, pre))
        build = run_tool([self.rustc, "-O", src, "-o", exe], timeout=self.timeout)
        if build.error or build.returncode != 0:
            return None
        run = run_tool([exe], timeout=self.timeout)
        if run.error or run.returncode != 0:
            return None
        return parse_replay_output(run.stdout, proc.ctx)
