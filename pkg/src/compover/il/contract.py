"""Pre/postcondition pairs attached to procedures."""

from __future__ import annotations

from dataclasses import dataclass

from .ast import Expr, TRUE
from .check import PRE, POST, check_bool
from .types import VarContext


@dataclass(frozen=True)
class Contract:
    """pre constrains the pre-state; post relates pre-state (old) to post-state."""

    pre: Expr
    post: Expr

    def validate(self, ctx: VarContext) -> None:
        check_bool(self.pre, ctx, PRE)
        check_bool(self.post, ctx, POST)


def trivial_contract() -> Contract:
    """The weakest contract: assumes nothing, guarantees nothing."""
    return Contract(TRUE, TRUE)
