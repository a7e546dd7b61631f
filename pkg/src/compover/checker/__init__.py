"""Abstract-model construction and bounded model checking.

Replaces each procedure call with its contract relation (after checking
the handoff between chained contracts), unrolls the abstraction into an
SMT formula, and reads counterexample traces — including the per-call
pre/post pairs that drive spuriousness analysis — back out of solver
models.
"""

from .bmc import MC_FAIL, MC_PASS, MC_UNKNOWN, McResult, bmc, time_width
from .compose import (
    AbstractCall,
    AbstractModel,
    CompositionFailure,
    CompositionResult,
    check_composition,
    induce,
)
from .extract import extract

__all__ = [
    "AbstractCall",
    "AbstractModel",
    "CompositionFailure",
    "CompositionResult",
    "MC_FAIL",
    "MC_PASS",
    "MC_UNKNOWN",
    "McResult",
    "bmc",
    "check_composition",
    "extract",
    "induce",
    "time_width",
]
