"""Run reports: one verification result in machine and human form.

The machine rendering is a plain dict (JSON-safe) with four top-level
groups: the verdict itself, the synthesized contracts as IL text, the
counterexample trace (when failing), and run statistics. Timing values
live only under "timings" so that byte-comparison of reports from
deterministic runs can drop that one key.
"""

from __future__ import annotations

import json
import platform
from typing import Any, Optional

from . import __version__
from .engine import EngineConfig, Verdict
from .il import pretty_print
from .modelfile import trace_to_plain

_TIMING_KEYS = ("timings",)


def report_dict(
    verdict: Verdict,
    cfg: Optional[EngineConfig] = None,
    model_name: str = "",
    synth_oracle: str = "",
    seed: Optional[int] = None,
) -> dict:
    s = verdict.stats
    doc: dict[str, Any] = {
        "outcome": verdict.outcome,
        "bound": verdict.bound,
        "reason": verdict.reason,
        "warning": verdict.warning,
        "contracts": {
            name: {"pre": pretty_print(c.pre), "post": pretty_print(c.post)}
            for name, c in verdict.contracts
        },
        "trace": trace_to_plain(verdict.trace) if verdict.trace else None,
        "iterations": {
            "cegar": s.cegar_iterations,
            "cegis": {name: p.cegis_iterations for name, p in sorted(s.per_procedure.items())},
            "cegis_total": s.cegis_total,
        },
        "timings": {
            "synth_oracle": round(s.synth_oracle_time, 6),
            "verif_oracle": round(s.verif_oracle_time, 6),
            "model_check": round(s.model_check_time, 6),
            "total": round(s.total_time, 6),
        },
        "run": {
            "tool": f"compover {__version__}",
            "python": platform.python_version(),
            "model": model_name,
            "synth_oracle": synth_oracle,
            "solver": " ".join(cfg.solver_command) if cfg and cfg.solver_command else "bundled",
            "seed": seed,
            "config": {
                "bound": cfg.bound if cfg else verdict.bound,
                "max_cegis": cfg.max_cegis if cfg else None,
                "max_cegar": cfg.max_cegar if cfg else None,
                "unknown_policy": cfg.unknown_policy if cfg else None,
            },
        },
    }
    return doc


def strip_timings(doc: dict) -> dict:
    """The byte-comparable part of a report."""
    return {k: v for k, v in doc.items() if k not in _TIMING_KEYS}


def report_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _format_state(state: dict) -> str:
    return ", ".join(f"{k}={json.dumps(v)}" for k, v in state.items())


def _trace_lines(trace: dict) -> list[str]:
    lines = [f"  init  [{trace['init']['mode']}] {_format_state(trace['init']['state'])}"]
    for i, step in enumerate(trace["steps"]):
        lines.append(
            f"  {i + 1:>4}  --{step['transition']}--> [{step['mode']}] "
            f"{_format_state(step['state'])}  (t={step['time']})"
        )
        for call in step["calls"]:
            lines.append(
                f"        {call['procedure']}: {_format_state(call['pre'])} "
                f"-> {_format_state(call['post'])}"
            )
    if trace.get("stuck"):
        lines.append("  (no transition enabled past this point)")
    return lines


def render_trace(trace: dict) -> str:
    """A trace dict (trace_to_plain shape) as indented text."""
    return "\n".join(_trace_lines(trace)) + "\n"


def render_text(doc: dict) -> str:
    """The human rendering of a report dict."""
    out = []
    run = doc.get("run", {})
    head = doc["outcome"].upper()
    if doc["outcome"] == "pass":
        head += f" (within bound {doc['bound']})"
    if run.get("model"):
        head += f" — {run['model']}"
    out.append(head)
    if doc.get("reason"):
        out.append(f"reason: {doc['reason']}")
    if doc.get("warning"):
        out.append(f"warning: {doc['warning']}")
    if doc["contracts"]:
        out.append("")
        out.append("contracts:")
        width = max(len(n) for n in doc["contracts"])
        for name, c in sorted(doc["contracts"].items()):
            out.append(f"  {name:<{width}}  pre  {c['pre']}")
            out.append(f"  {'':<{width}}  post {c['post']}")
    if doc.get("trace"):
        out.append("")
        out.append(f"counterexample trace (final time {doc['trace']['final_time']}):")
        out.extend(_trace_lines(doc["trace"]))
    it = doc.get("iterations", {})
    t = doc.get("timings", {})
    out.append("")
    out.append(
        f"iterations: cegar={it.get('cegar', 0)} cegis={it.get('cegis_total', 0)} "
        + " ".join(f"{n}:{k}" for n, k in it.get("cegis", {}).items())
    )
    out.append(
        f"time: total={t.get('total', 0.0):.3f}s synth={t.get('synth_oracle', 0.0):.3f}s "
        f"verify={t.get('verif_oracle', 0.0):.3f}s mc={t.get('model_check', 0.0):.3f}s"
    )
    if run:
        out.append(
            f"run: {run.get('tool', '')} python={run.get('python', '')} "
            f"solver={run.get('solver', '')} oracle={run.get('synth_oracle', '') or '-'}"
        )
    return "\n".join(out) + "\n"
