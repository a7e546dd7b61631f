"""Typed expression language for procedure contracts.

Expressions are booleans, fixed-width bitvector integers and record values,
with old(...) giving postconditions access to the pre-state. The textual
syntax round-trips through parse_expr and pretty_print.
"""

from .ast import (
    ALL_OPS,
    ARITH_OPS,
    BOOL_OPS,
    CMP_OPS,
    EQ_OPS,
    FALSE,
    TRUE,
    Binary,
    BoolLit,
    Expr,
    IntLit,
    Ite,
    Not,
    Old,
    Select,
    Var,
    all_vars,
    conj,
    disj,
    free_vars,
    size,
)
from .check import PRE, POST, check_bool, typecheck
from .contract import Contract, trivial_contract
from .errors import (
    IlError,
    IlSyntaxError,
    IlTypeError,
    MissingPostState,
    OldInPrecondition,
    UnknownVariable,
)
from .interp import eval_bool, eval_expr
from .parse import parse_expr, tokenize
from .printer import pretty_print
from .types import (
    Assignment,
    SemType,
    Value,
    VarContext,
    assignment_key,
    default_assignment,
    default_value,
    domain_size,
    enumerate_values,
    parse_type,
    value_key,
)

__all__ = [
    "ALL_OPS", "ARITH_OPS", "BOOL_OPS", "CMP_OPS", "EQ_OPS",
    "FALSE", "TRUE",
    "Binary", "BoolLit", "Expr", "IntLit", "Ite", "Not", "Old", "Select", "Var",
    "all_vars", "conj", "disj", "free_vars", "size",
    "PRE", "POST", "check_bool", "typecheck",
    "Contract", "trivial_contract",
    "IlError", "IlSyntaxError", "IlTypeError",
    "MissingPostState", "OldInPrecondition", "UnknownVariable",
    "eval_bool", "eval_expr",
    "parse_expr", "tokenize", "pretty_print",
    "Assignment", "SemType", "Value", "VarContext",
    "assignment_key", "default_assignment", "default_value", "domain_size",
    "enumerate_values", "parse_type", "value_key",
]
