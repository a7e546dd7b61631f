"""Compilation of contract expressions into C, Rust and SMT-LIB text,
plus whole-file proof-harness emission for external verifiers.

Only contract predicates are compiled; procedure bodies stay in their source
language and are verified by that language's own tool.
"""

from .c import c_type, compile_to_c
from .harness import HarnessSpec, HarnessVar, emit_cbmc_harness, emit_kani_harness
from .names import (
    ARROW,
    DIRECT,
    ContractVariableUnmapped,
    NameMap,
    UnmappedVariable,
    UnsupportedWidth,
)
from .rust import compile_to_rust, rust_type
from .smt import compile_to_smt, smt_sort

__all__ = [
    "ARROW",
    "DIRECT",
    "ContractVariableUnmapped",
    "HarnessSpec",
    "HarnessVar",
    "NameMap",
    "UnmappedVariable",
    "UnsupportedWidth",
    "c_type",
    "compile_to_c",
    "compile_to_rust",
    "compile_to_smt",
    "emit_cbmc_harness",
    "emit_kani_harness",
    "rust_type",
    "smt_sort",
]
