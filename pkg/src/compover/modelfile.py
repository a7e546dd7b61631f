"""YAML model files and plain-data conversions.

A model document has sections `vars`, `modes`, `init`, `procedures`,
`transitions` and optionally `property`:

    vars:
      req: u8
      resp: bool
    modes: [query, wait]
    init:
      mode: query
      state: "req == 0 && !resp"          # or procedures: [Reset]
    procedures:
      ProcessQuery:
        language: mini                     # c | rust | mini
        source: |                          # or file: relative/path.c
          if (req <u 3) { havoc resp } else { resp := true }
        reads: [req]                       # optional for mini (derived)
        writes: [resp]
        entry: process_query               # c/rust: entry symbol (default: name)
        preamble: "#include \"types.h\""   # c/rust: prepended to harnesses
        call_args: ["req", "&resp"]        # c: entry arguments (default: none)
    transitions:
      - id: query_env
        from: query
        to: wait
        guard: "!resp"
        update: [ProcessQuery]
        duration: 2
    property:
      kind: eventually-within              # or invariant
      deadline: 16
      predicate: "passed"

Record variable types nest under a `record` key:

    request: {record: {value: u8, is_present: bool}}

Property predicates may use the mode names as bare enum constants next to
the reserved `mode` variable, e.g. `mode == pass`.
"""

from __future__ import annotations

import os
from typing import Any, Optional

import yaml

from .il import (
    Assignment,
    SemType,
    Value,
    VarContext,
    parse_expr,
    parse_type,
)
from .il.check import PRE
from .model import (
    EVENTUALLY_WITHIN,
    INVARIANT,
    MODE_TYPE,
    MODE_VAR,
    PolyglotModel,
    ProcedureRef,
    Property,
    Trace,
    Transition,
)


class ModelFileError(Exception):
    pass


def _fail(msg: str) -> "ModelFileError":
    return ModelFileError(msg)


def parse_var_type(spec: Any) -> SemType:
    if isinstance(spec, str):
        return parse_type(spec)
    if isinstance(spec, dict) and set(spec) == {"record"}:
        fields = spec["record"]
        if not isinstance(fields, dict) or not fields:
            raise _fail("record needs a non-empty field mapping")
        return SemType.record({k: parse_var_type(v) for k, v in fields.items()})
    raise _fail(f"cannot read a variable type from {spec!r}")


def _var_type_to_plain(t: SemType) -> Any:
    if t.kind == "record":
        return {"record": {n: _var_type_to_plain(ft) for n, ft in t.fields}}
    return str(t)


def load_model_dict(doc: dict, base_dir: str = ".") -> tuple[PolyglotModel, Optional[Property]]:
    if not isinstance(doc, dict):
        raise _fail("model document must be a mapping")
    for key in ("vars", "modes", "init", "procedures", "transitions"):
        if key not in doc:
            raise _fail(f"model document is missing the '{key}' section")

    vars_sec = doc["vars"]
    if not isinstance(vars_sec, dict) or not vars_sec:
        raise _fail("'vars' must be a non-empty mapping")
    ctx = VarContext.of({str(n): parse_var_type(t) for n, t in vars_sec.items()})

    modes = tuple(str(m) for m in doc["modes"])
    if not modes:
        raise _fail("'modes' must list at least one mode")

    procedures = []
    for name, body in (doc["procedures"] or {}).items():
        if not isinstance(body, dict):
            raise _fail(f"procedure '{name}' must be a mapping")
        language = str(body.get("language", "mini"))
        if "source" in body and "file" in body:
            raise _fail(f"procedure '{name}': give source or file, not both")
        if "source" in body:
            source = str(body["source"])
        elif "file" in body:
            path = os.path.join(base_dir, str(body["file"]))
            with open(path, "r", encoding="utf-8") as fh:
                source = fh.read()
        else:
            raise _fail(f"procedure '{name}' needs inline source or a file path")
        reads = body.get("reads")
        writes = body.get("writes")
        if language == "mini" and (reads is None or writes is None):
            from .minilang import parse_mini

            mp = parse_mini(source, ctx, name=str(name))
            reads = sorted(mp.reads()) if reads is None else reads
            writes = sorted(mp.writes()) if writes is None else writes
        procedures.append(
            ProcedureRef(
                name=str(name),
                language=language,
                source=source,
                reads=frozenset(str(r) for r in (reads or [])),
                writes=frozenset(str(w) for w in (writes or [])),
                entry=str(body.get("entry", "")),
                preamble=str(body.get("preamble", "")),
                call_args=tuple(str(a) for a in body.get("call_args", [])),
            )
        )

    init = doc["init"]
    if not isinstance(init, dict) or "mode" not in init:
        raise _fail("'init' needs at least a 'mode' key")
    init_pred = None
    init_procs: tuple[str, ...] = ()
    if "state" in init and "procedures" in init:
        raise _fail("'init' takes a state predicate or a procedure list, not both")
    if "state" in init:
        init_pred = parse_expr(str(init["state"]), ctx, position=PRE)
    elif "procedures" in init:
        init_procs = tuple(str(p) for p in init["procedures"])
    else:
        raise _fail("'init' needs a 'state' predicate or 'procedures' list")

    transitions = []
    for i, t in enumerate(doc["transitions"] or []):
        if not isinstance(t, dict):
            raise _fail(f"transition #{i} must be a mapping")
        missing = {"id", "from", "to", "guard", "update"} - set(t)
        if missing:
            raise _fail(f"transition #{i} is missing {sorted(missing)}")
        guard = parse_expr(str(t["guard"]), ctx, position=PRE)
        transitions.append(
            Transition(
                id=str(t["id"]),
                from_mode=str(t["from"]),
                to_mode=str(t["to"]),
                guard=guard,
                update=tuple(str(u) for u in t["update"]),
                duration=int(t.get("duration", 0)),
            )
        )

    model = PolyglotModel(
        modes=modes,
        vars=ctx,
        init_mode=str(init["mode"]),
        transitions=tuple(transitions),
        procedures=tuple(procedures),
        init_pred=init_pred,
        init_procs=init_procs,
    )

    prop = None
    if "property" in doc and doc["property"] is not None:
        prop = load_property_dict(doc["property"], model)
    return model, prop


def load_property_dict(sec: dict, model: PolyglotModel) -> Property:
    if not isinstance(sec, dict) or "kind" not in sec or "predicate" not in sec:
        raise _fail("'property' needs 'kind' and 'predicate'")
    kind = str(sec["kind"]).replace("_", "-")
    if kind not in (INVARIANT, EVENTUALLY_WITHIN):
        raise _fail(f"unknown property kind '{kind}'")
    deadline = int(sec.get("deadline", 0))
    if kind == EVENTUALLY_WITHIN and "deadline" not in sec:
        raise _fail("eventually-within needs a 'deadline'")
    mode_values = model.mode_values()
    enums = {name: (value, MODE_TYPE) for name, value in mode_values}
    ctx = model.property_context()
    predicate = parse_expr(str(sec["predicate"]), ctx, position=PRE, enums=enums)
    return Property(kind=kind, predicate=predicate, deadline=deadline, mode_values=mode_values)


def load_model_file(path: str) -> tuple[PolyglotModel, Optional[Property]]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    return load_model_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def load_model_text(text: str, base_dir: str = ".") -> tuple[PolyglotModel, Optional[Property]]:
    return load_model_dict(yaml.safe_load(text), base_dir=base_dir)


# ---------------------------------------------------------------------------
# Plain-data (JSON-friendly) conversions for values, assignments and traces.


def value_to_plain(v: Value) -> Any:
    t = v.type
    if t.kind == "bool":
        return v.as_bool
    if t.is_int:
        return v.as_signed if t.signed else v.as_unsigned
    return {n: value_to_plain(v.field(n)) for n, _ in t.fields}


def value_from_plain(t: SemType, obj: Any) -> Value:
    if t.kind == "bool":
        if not isinstance(obj, bool):
            raise _fail(f"expected a bool, got {obj!r}")
        return Value.of_bool(obj)
    if t.is_int:
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise _fail(f"expected an int, got {obj!r}")
        lo = -(1 << (t.width - 1)) if t.signed else 0
        hi = (1 << (t.width - 1)) if t.signed else (1 << t.width)
        if not lo <= obj < hi:
            raise _fail(f"{obj} does not fit in {t}")
        return Value.of_int(obj, t)
    if not isinstance(obj, dict):
        raise _fail(f"expected a field mapping, got {obj!r}")
    return Value.of_record(
        t, {n: value_from_plain(ft, obj[n]) for n, ft in t.fields}
    )


def assignment_to_plain(a: Assignment) -> dict:
    return {n: value_to_plain(v) for n, v in a.as_dict().items()}


def assignment_from_plain(ctx: VarContext, obj: dict) -> Assignment:
    if set(obj) != set(ctx.names()):
        raise _fail(
            f"assignment names {sorted(obj)} do not match variables {sorted(ctx.names())}"
        )
    return Assignment.of({n: value_from_plain(ctx.type_of(n), obj[n]) for n in ctx.names()})


def trace_to_plain(t: Trace) -> dict:
    return {
        "init": {"mode": t.init_mode, "state": assignment_to_plain(t.init_state)},
        "steps": [
            {
                "transition": s.transition,
                "mode": s.mode,
                "state": assignment_to_plain(s.state),
                "time": s.time,
                "calls": [
                    {
                        "procedure": c.procedure,
                        "pre": assignment_to_plain(c.pre),
                        "post": assignment_to_plain(c.post),
                    }
                    for c in s.calls
                ],
            }
            for s in t.steps
        ],
        "stuck": t.stuck,
        "final_time": t.final_time,
    }
