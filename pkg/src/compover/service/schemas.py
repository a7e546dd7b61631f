"""Request/response models for the verification service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from .. import __version__


class ContractText(BaseModel):
    pre: str = "true"
    post: str = "true"


class PropertySpec(BaseModel):
    kind: str
    predicate: str
    deadline: int = 0


class EngineOptions(BaseModel):
    bound: int = 12
    max_cegis: int = 40
    max_cegar: int = 20
    unknown_policy: str = "abort"
    solver: list[str] = Field(default_factory=list)
    solver_timeout: float = 300.0


class OracleOptions(BaseModel):
    synth_oracle: str = "enum"  # enum | llm | scripted
    contracts: list[ContractText] = Field(default_factory=list)  # scripted replies
    llm_replies: list[str] = Field(default_factory=list)  # canned transcript
    oracle_timeout: float = 120.0
    cbmc: str = "cbmc"
    kani: str = "kani"


class VerifyRequest(BaseModel):
    model: str  # model document, YAML text
    prop: Optional[PropertySpec] = None  # overrides the model file's property
    name: str = ""  # label for the report
    engine: EngineOptions = Field(default_factory=EngineOptions)
    oracle: OracleOptions = Field(default_factory=OracleOptions)


class SynthRequest(BaseModel):
    model: str
    procedure: str
    engine: EngineOptions = Field(default_factory=EngineOptions)
    oracle: OracleOptions = Field(default_factory=OracleOptions)


class SynthResponse(BaseModel):
    procedure: str
    pre: str
    post: str
    iterations: int
    positives: int  # counterexamples collected on the way


class HarnessRequest(BaseModel):
    model: str
    procedure: str
    contract: ContractText


class HarnessResponse(BaseModel):
    filename: str
    language: str
    text: str


class SimulateRequest(BaseModel):
    model: str
    steps: int = 10
    seed: int = 0


class SimulateResponse(BaseModel):
    trace: dict
    holds: Optional[str] = None  # property verdict on the trace, if one is defined


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str = __version__
