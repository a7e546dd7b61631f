"""Command-line front end.

Every subcommand is a thin HTTP client over the verification service:
by default the requests run against the in-process ASGI app, so no
server is needed; `--server URL` points them at a remote instance
instead. The run input is either a project file or a bare model file
(a project file references its model by path; a model file declares
`vars:` inline).

Exit codes: 0 the property holds (within the bound), 1 it fails with a
concrete counterexample, 2 no verdict (budget or oracle gave out),
3 usage or configuration error, 4 tool/transport failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from typing import Any, Optional

import httpx
import yaml

from . import __version__
from .modelfile import ModelFileError
from .project import SYNTH_ORACLES, ProjectFile, load_project_file, looks_like_project
from .report import render_text, render_trace, report_json

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_TOOL = 4

_OUTCOME_CODES = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage, which this tool reserves for
    # "inconclusive"; route usage problems to the dedicated code instead.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="compover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"compover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("project", help="project file or model file")
        p.add_argument("--server", default="", help="remote service URL (default: in-process)")
        p.add_argument("--bound", type=int, help="model-checking step bound")
        p.add_argument("--max-cegis", type=int, help="synthesis iterations per procedure")
        p.add_argument("--max-cegar", type=int, help="abstraction-refinement iterations")
        p.add_argument("--synth-oracle", choices=SYNTH_ORACLES, help="contract synthesizer")
        p.add_argument("--solver", help="SMT solver command (default: bundled)")
        p.add_argument("--cbmc", help="cbmc binary for C procedures")
        p.add_argument("--kani", help="kani binary for Rust procedures")
        p.add_argument("--timeout", type=float, help="seconds per oracle/solver call")
        p.add_argument("--out", help="output directory for reports and harnesses")

    p = sub.add_parser("verify", help="run the full verification loop")
    common(p)
    p.add_argument("--seed", type=int, help="recorded in the report for provenance")

    p = sub.add_parser("synth", help="synthesize one procedure's contract")
    common(p)
    p.add_argument("procedure", help="procedure name from the model")

    p = sub.add_parser("emit-harness", help="write the proof harness for a procedure")
    common(p)
    p.add_argument("procedure", help="procedure name from the model")
    p.add_argument("--contract", required=True, help="YAML file with pre:/post: entries")

    p = sub.add_parser("simulate", help="execute a mini-language model concretely")
    common(p)
    p.add_argument("--steps", type=int, default=10, help="transition count (default 10)")
    p.add_argument("--seed", type=int, default=0, help="choice seed (default 0)")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


# ---------------------------------------------------------------- loading


def load_inputs(path: str) -> tuple[str, Optional[ProjectFile]]:
    """Returns the model document text and the project file, if one was given."""
    if not os.path.isfile(path):
        raise CliError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CliError(f"{path}: {exc}") from exc
    if not looks_like_project(doc):
        return text, None
    try:
        project = load_project_file(path)
    except (ModelFileError, OSError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    with open(project.model_path, "r", encoding="utf-8") as fh:
        return fh.read(), project


def _engine_options(args, project: Optional[ProjectFile]) -> dict:
    def pick(flag, key, default):
        if flag is not None:
            return flag
        return getattr(project, key) if project else default

    solver: Any = args.solver.split() if args.solver else None
    if solver is None and project:
        solver = list(project.solver)
    return {
        "bound": pick(args.bound, "bound", 12),
        "max_cegis": pick(args.max_cegis, "max_cegis", 40),
        "max_cegar": pick(args.max_cegar, "max_cegar", 20),
        "unknown_policy": project.unknown_policy if project else "abort",
        "solver": solver or [],
        "solver_timeout": pick(args.timeout, "solver_timeout", 300.0),
    }


def _oracle_options(args, project: Optional[ProjectFile]) -> dict:
    def pick(flag, key, default):
        if flag is not None:
            return flag
        return getattr(project, key) if project else default

    return {
        "synth_oracle": pick(args.synth_oracle, "synth_oracle", "enum"),
        "contracts": list(project.contracts) if project else [],
        "oracle_timeout": pick(args.timeout, "oracle_timeout", 120.0),
        "cbmc": pick(args.cbmc, "cbmc", "cbmc"),
        "kani": pick(args.kani, "kani", "kani"),
    }


def _out_dir(args, project: Optional[ProjectFile]) -> str:
    if args.out:
        return args.out
    return project.out_dir if project else "out"


# ---------------------------------------------------------------- transport


def request(args, method: str, path: str, payload: Optional[dict]) -> httpx.Response:
    timeout = httpx.Timeout(None)
    try:
        if args.server:
            with httpx.Client(base_url=args.server, timeout=timeout) as client:
                return client.request(method, path, json=payload)

        from .service import app

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://compover.internal", timeout=timeout
            ) as client:
                return await client.request(method, path, json=payload)

        return asyncio.run(go())
    except httpx.HTTPError as exc:
        raise CliError(f"service unreachable: {exc}", EXIT_TOOL) from exc


def _checked(resp: httpx.Response) -> dict:
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except (ValueError, AttributeError):
        detail = resp.text
    if resp.status_code in (400, 404, 422):
        raise CliError(str(detail))
    if resp.status_code == 409:  # synthesis gave out: inconclusive, not usage
        raise CliError(str(detail), EXIT_INCONCLUSIVE)
    raise CliError(f"service error {resp.status_code}: {detail}", EXIT_TOOL)


# ---------------------------------------------------------------- commands


def cmd_verify(args) -> int:
    model_text, project = load_inputs(args.project)
    payload = {
        "model": model_text,
        "name": os.path.basename(args.project),
        "engine": _engine_options(args, project),
        "oracle": _oracle_options(args, project),
    }
    if project and project.prop_spec:
        payload["prop"] = {
            "kind": str(project.prop_spec["kind"]),
            "predicate": str(project.prop_spec["predicate"]),
            "deadline": int(project.prop_spec.get("deadline", 0)),
        }
    doc = _checked(request(args, "POST", "/verify", payload))
    if args.seed is not None:
        doc["run"]["seed"] = args.seed

    out = _out_dir(args, project)
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report_json(doc))
    text = render_text(doc)
    with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return _OUTCOME_CODES.get(doc["outcome"], EXIT_TOOL)


def cmd_synth(args) -> int:
    model_text, project = load_inputs(args.project)
    payload = {
        "model": model_text,
        "procedure": args.procedure,
        "engine": _engine_options(args, project),
        "oracle": _oracle_options(args, project),
    }
    doc = _checked(request(args, "POST", "/synth", payload))
    print(f"procedure {doc['procedure']} ({doc['iterations']} iteration(s))")
    print(f"  pre  {doc['pre']}")
    print(f"  post {doc['post']}")
    return EXIT_PASS


def cmd_emit_harness(args) -> int:
    model_text, project = load_inputs(args.project)
    if not os.path.isfile(args.contract):
        raise CliError(f"no such file: {args.contract}")
    with open(args.contract, "r", encoding="utf-8") as fh:
        try:
            section = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise CliError(f"{args.contract}: {exc}") from exc
    if not isinstance(section, dict) or not {"pre", "post"} <= set(section):
        raise CliError(f"{args.contract}: expected a mapping with pre: and post:")
    payload = {
        "model": model_text,
        "procedure": args.procedure,
        "contract": {"pre": str(section["pre"]), "post": str(section["post"])},
    }
    doc = _checked(request(args, "POST", "/harness", payload))
    out = _out_dir(args, project)
    os.makedirs(out, exist_ok=True)
    dest = os.path.join(out, doc["filename"])
    with open(dest, "w", encoding="utf-8") as fh:
        fh.write(doc["text"])
    print(dest)
    return EXIT_PASS


def cmd_simulate(args) -> int:
    model_text, _ = load_inputs(args.project)
    payload = {"model": model_text, "steps": args.steps, "seed": args.seed}
    doc = _checked(request(args, "POST", "/simulate", payload))
    trace = doc["trace"]
    sys.stdout.write(render_trace(trace))
    print(f"final time: {trace['final_time']}  seed: {args.seed}")
    if doc.get("holds") is not None:
        print(f"property on this trace: {doc['holds']}")
    return EXIT_PASS


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_PASS


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "verify": cmd_verify,
        "synth": cmd_synth,
        "emit-harness": cmd_emit_harness,
        "simulate": cmd_simulate,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"compover: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
