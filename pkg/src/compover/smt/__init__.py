"""SMT-LIB v2 plumbing: a solver subprocess client and a bundled solver.

The checker talks plain SMT-LIB text to a configurable external solver. The
bundled `compover-smt` console script serves QF_BV plus Booleans by
bit-blasting to an internal CDCL SAT core, so verification runs with no
third-party solver installed; pointing the session at z3 or cvc5 works the
same way.
"""

from .session import SolverError, SolverSession, default_solver_command

__all__ = ["SolverError", "SolverSession", "default_solver_command"]
