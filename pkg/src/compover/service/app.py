"""HTTP front end over the verification engine.

POST /verify    run the full refinement loop, answer with a run report
POST /synth     synthesize one procedure's contract from empty example sets
POST /harness   render the proof harness for a C or Rust procedure
POST /simulate  execute a mini-language model concretely
GET  /health    liveness + version

The service is stateless: every request carries the model document inline.
LLM credentials come only from the service process's environment.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..engine import (
    EngineConfig,
    Inconclusive,
    OracleStagnation,
    bind_proc,
    polyver,
    synth_contract,
)
from ..il import Contract, IlError, parse_expr, pretty_print
from ..minilang import MiniVerifier
from ..model import NotExecutable, PolyglotModel, holds, simulate
from ..modelfile import ModelFileError, load_model_text, load_property_dict, trace_to_plain
from ..oracles import (
    CbmcVerifier,
    EnumSynth,
    HttpTransport,
    KaniVerifier,
    LlmSynth,
    NoCandidate,
    ScriptExhausted,
    ScriptedSynth,
    TranscriptTransport,
    TransportError,
)
from ..report import report_dict
from ..smt.session import SolverError
from .schemas import (
    EngineOptions,
    HarnessRequest,
    HarnessResponse,
    HealthResponse,
    OracleOptions,
    SimulateRequest,
    SimulateResponse,
    SynthRequest,
    SynthResponse,
    VerifyRequest,
)

app = FastAPI(title="compover", version=__version__)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


def _load_model(text: str, prop_spec=None):
    try:
        model, prop = load_model_text(text)
        if prop_spec is not None:
            prop = load_property_dict(prop_spec.model_dump(), model)
    except (ModelFileError, IlError) as exc:
        raise _bad_request(exc) from exc
    return model, prop


def _engine_config(opts: EngineOptions) -> EngineConfig:
    try:
        return EngineConfig(
            bound=opts.bound,
            max_cegis=opts.max_cegis,
            max_cegar=opts.max_cegar,
            unknown_policy=opts.unknown_policy,
            solver_command=tuple(opts.solver) or None,
            solver_timeout=opts.solver_timeout,
        )
    except ValueError as exc:
        raise _bad_request(exc) from exc


def _synth_oracle(opts: OracleOptions, model: PolyglotModel):
    if opts.synth_oracle == "enum":
        return EnumSynth()
    if opts.synth_oracle == "scripted":
        if not opts.contracts:
            raise _bad_request(ValueError("scripted oracle needs 'contracts'"))
        ctx = model.vars
        try:
            script = [
                Contract(
                    parse_expr(c.pre, ctx, position="pre"),
                    parse_expr(c.post, ctx, position="post"),
                )
                for c in opts.contracts
            ]
        except IlError as exc:
            raise _bad_request(exc) from exc
        return ScriptedSynth(script)
    if opts.synth_oracle == "llm":
        if opts.llm_replies:
            return LlmSynth(TranscriptTransport(opts.llm_replies))
        try:
            return LlmSynth(HttpTransport.from_env(timeout=opts.oracle_timeout))
        except TransportError as exc:
            raise _bad_request(exc) from exc
    raise _bad_request(ValueError(f"unknown synth oracle '{opts.synth_oracle}'"))


def _verifiers(opts: OracleOptions) -> dict:
    return {
        "mini": MiniVerifier(),
        "c": CbmcVerifier(binary=opts.cbmc, timeout=opts.oracle_timeout),
        "rust": KaniVerifier(binary=opts.kani, timeout=opts.oracle_timeout),
    }


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse()


@app.post("/verify")
def verify_endpoint(req: VerifyRequest) -> dict:
    model, prop = _load_model(req.model, req.prop)
    if prop is None:
        raise _bad_request(ValueError("no property: set one in the model or request"))
    cfg = _engine_config(req.engine)
    synth = _synth_oracle(req.oracle, model)
    try:
        verdict = polyver(model, prop, synth, _verifiers(req.oracle), cfg)
    except ValueError as exc:  # malformed model/property
        raise _bad_request(exc) from exc
    return report_dict(
        verdict, cfg, model_name=req.name, synth_oracle=req.oracle.synth_oracle
    )


@app.post("/synth", response_model=SynthResponse)
def synth_endpoint(req: SynthRequest) -> SynthResponse:
    model, _ = _load_model(req.model)
    if not model.has_procedure(req.procedure):
        raise _bad_request(ValueError(f"no procedure named '{req.procedure}'"))
    ref = model.procedure(req.procedure)
    cfg = _engine_config(req.engine)
    synth = _synth_oracle(req.oracle, model)
    verifier = _verifiers(req.oracle)[ref.language]
    proc = bind_proc(ref, model.vars)
    from ..engine import ProcStats

    stats = ProcStats()
    try:
        contract, positives = synth_contract(proc, [], [], synth, verifier, cfg, stats)
    except (Inconclusive, OracleStagnation, NoCandidate, ScriptExhausted) as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except (TransportError, SolverError) as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc
    return SynthResponse(
        procedure=req.procedure,
        pre=pretty_print(contract.pre),
        post=pretty_print(contract.post),
        iterations=stats.cegis_iterations,
        positives=len(positives),
    )


@app.post("/harness", response_model=HarnessResponse)
def harness_endpoint(req: HarnessRequest) -> HarnessResponse:
    from ..codegen import emit_cbmc_harness, emit_kani_harness
    from ..oracles import BoundProc

    model, _ = _load_model(req.model)
    if not model.has_procedure(req.procedure):
        raise _bad_request(ValueError(f"no procedure named '{req.procedure}'"))
    ref = model.procedure(req.procedure)
    if ref.language == "mini":
        raise _bad_request(
            ValueError("mini procedures are verified in-process; no harness to emit")
        )
    try:
        contract = Contract(
            parse_expr(req.contract.pre, model.vars, position="pre"),
            parse_expr(req.contract.post, model.vars, position="post"),
        )
        spec = BoundProc.of(ref, model.vars).harness_spec(contract)
        if ref.language == "c":
            text, suffix = emit_cbmc_harness(spec), "c"
        else:
            text, suffix = emit_kani_harness(spec), "rs"
    except (IlError, ValueError) as exc:
        raise _bad_request(exc) from exc
    return HarnessResponse(
        filename=f"check_{spec.entry}.{suffix}", language=ref.language, text=text
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
    model, prop = _load_model(req.model)
    if req.steps < 0:
        raise _bad_request(ValueError("steps must be >= 0"))
    try:
        trace = simulate(model, req.steps, seed=req.seed)
    except NotExecutable as exc:
        raise _bad_request(exc) from exc
    return SimulateResponse(
        trace=trace_to_plain(trace),
        holds=holds(prop, trace) if prop is not None else None,
    )
