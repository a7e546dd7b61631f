"""Project files: one YAML document tying a model to a run configuration.

Schema (all keys except `model` optional):

    model: trainpass.yaml          # model file, relative to the project file
    property:                      # overrides the model file's property
      kind: eventually-within
      deadline: 12
      predicate: "passed"
    bound: 12                      # model-checking step bound
    max_cegis: 40
    max_cegar: 20
    unknown_policy: abort          # or treat-as-fail
    synth_oracle: enum             # enum | llm | scripted
    contracts:                     # scripted oracle replies, in order
      - {pre: "true", post: "resp"}
    oracle_timeout: 120.0          # seconds per external-tool call
    cbmc: cbmc                     # binary for C procedures
    kani: kani                     # binary for Rust procedures
    solver: []                     # SMT solver argv ([] = bundled)
    solver_timeout: 300.0
    out: out                       # report directory, relative to the project file

Credentials never appear here; the LLM oracle reads its endpoint, model
name, and API key from environment variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .engine import EngineConfig, UNKNOWN_ABORT
from .modelfile import ModelFileError, load_model_file, load_property_dict
from .model import PolyglotModel, Property

SYNTH_ORACLES = ("enum", "llm", "scripted")


def _fail(msg: str) -> ModelFileError:
    return ModelFileError(msg)


@dataclass(frozen=True)
class ProjectFile:
    model_path: str
    model: PolyglotModel
    prop: Optional[Property]
    prop_spec: Optional[dict] = None  # raw property section, for forwarding
    bound: int = 12
    max_cegis: int = 40
    max_cegar: int = 20
    unknown_policy: str = UNKNOWN_ABORT
    synth_oracle: str = "enum"
    contracts: tuple[dict, ...] = ()  # scripted replies, {pre, post} each
    oracle_timeout: float = 120.0
    cbmc: str = "cbmc"
    kani: str = "kani"
    solver: tuple[str, ...] = ()
    solver_timeout: float = 300.0
    out_dir: str = "out"

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            bound=self.bound,
            max_cegis=self.max_cegis,
            max_cegar=self.max_cegar,
            unknown_policy=self.unknown_policy,
            solver_command=self.solver or None,
            solver_timeout=self.solver_timeout,
        )


_SCALARS = {
    "bound": int,
    "max_cegis": int,
    "max_cegar": int,
    "oracle_timeout": float,
    "solver_timeout": float,
}


def load_project_dict(doc: dict, base_dir: str = ".") -> ProjectFile:
    if not isinstance(doc, dict):
        raise _fail("project file must be a mapping")
    known = {
        "model", "property", "bound", "max_cegis", "max_cegar", "unknown_policy",
        "synth_oracle", "contracts", "oracle_timeout", "cbmc", "kani", "solver",
        "solver_timeout", "out",
    }
    for key in doc:
        if key not in known:
            raise _fail(f"unknown project key {key!r}")
    if "model" not in doc:
        raise _fail("project file needs a 'model' entry")

    model_path = os.path.join(base_dir, str(doc["model"]))
    if not os.path.isfile(model_path):
        raise _fail(f"model file not found: {model_path}")
    model, prop = load_model_file(model_path)
    prop_spec = None
    if "property" in doc:
        prop = load_property_dict(doc["property"], model)
        prop_spec = dict(doc["property"])

    kw: dict[str, Any] = {}
    for key, kind in _SCALARS.items():
        if key in doc:
            try:
                kw[key] = kind(doc[key])
            except (TypeError, ValueError):
                raise _fail(f"{key} must be a {kind.__name__}") from None
    if "unknown_policy" in doc:
        kw["unknown_policy"] = str(doc["unknown_policy"])
    if "synth_oracle" in doc:
        kw["synth_oracle"] = str(doc["synth_oracle"])
        if kw["synth_oracle"] not in SYNTH_ORACLES:
            raise _fail(f"synth_oracle must be one of {', '.join(SYNTH_ORACLES)}")
    if "contracts" in doc:
        entries = doc["contracts"]
        if not isinstance(entries, list) or not all(
            isinstance(e, dict) and set(e) == {"pre", "post"} for e in entries
        ):
            raise _fail("contracts must be a list of {pre, post} mappings")
        kw["contracts"] = tuple({"pre": str(e["pre"]), "post": str(e["post"])} for e in entries)
    for key in ("cbmc", "kani"):
        if key in doc:
            kw[key] = str(doc[key])
    if "solver" in doc:
        cmd = doc["solver"]
        if isinstance(cmd, str):
            cmd = cmd.split()
        if not isinstance(cmd, list):
            raise _fail("solver must be an argv list or string")
        kw["solver"] = tuple(str(part) for part in cmd)
    if "out" in doc:
        kw["out_dir"] = os.path.join(base_dir, str(doc["out"]))

    project = ProjectFile(
        model_path=model_path, model=model, prop=prop, prop_spec=prop_spec, **kw
    )
    try:
        project.engine_config()
    except ValueError as exc:
        raise _fail(str(exc)) from None
    return project


def load_project_file(path: str) -> ProjectFile:
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    return load_project_dict(doc, base_dir=os.path.dirname(path) or ".")


def looks_like_project(doc: Any) -> bool:
    """Project files name a model by path; model files carry vars inline."""
    return isinstance(doc, dict) and isinstance(doc.get("model"), str)
