"""Synthesis and verification oracles.

A synthesis oracle proposes a contract from positive/negative example pairs;
a verification oracle decides whether a procedure satisfies a contract and
returns a counterexample pair when it does not. Concrete backends: the exact
brute-force verifier over mini-language procedures, the enumerative
synthesizer, the LLM-backed synthesizer, scripted test doubles, and adapters
driving external C/Rust verifiers.
"""

from .base import (
    ExamplePair,
    NEGATIVE,
    NoCandidate,
    POSITIVE,
    ScriptExhausted,
    SynthBudget,
    SynthOracle,
    TransportError,
    VerifOracle,
    VerifResult,
    pair_impossible_contract,
    verify,
    verify_pair_impossible,
)
from .cbmc import CbmcVerifier, parse_cbmc_json
from .enum_synth import EnumSynth, synthesize_enum
from .external import BoundProc
from .kani import KaniVerifier, playback_values
from .llm import (
    API_KEY_VAR,
    ENDPOINT_VAR,
    HttpTransport,
    LlmSynth,
    MODEL_VAR,
    TranscriptTransport,
    synthesize_llm,
)
from .scripted import ScriptedSynth, ScriptedVerifier

__all__ = [
    "API_KEY_VAR",
    "BoundProc",
    "CbmcVerifier",
    "ENDPOINT_VAR",
    "EnumSynth",
    "ExamplePair",
    "HttpTransport",
    "KaniVerifier",
    "LlmSynth",
    "MODEL_VAR",
    "NEGATIVE",
    "NoCandidate",
    "POSITIVE",
    "ScriptExhausted",
    "ScriptedSynth",
    "ScriptedVerifier",
    "SynthBudget",
    "SynthOracle",
    "TranscriptTransport",
    "TransportError",
    "VerifOracle",
    "VerifResult",
    "pair_impossible_contract",
    "parse_cbmc_json",
    "playback_values",
    "synthesize_enum",
    "synthesize_llm",
    "verify",
    "verify_pair_impossible",
]
