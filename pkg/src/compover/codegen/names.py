"""Variable-name mapping between contract expressions and target code.

A bare Var resolves through the post map and Old(v) through the pre map;
when compiling a precondition (no post-state exists) pass the pre-state
names as both maps. Mapped text is spliced verbatim, so entries may be
plain identifiers or access paths like `request->value`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..il.types import SemType, VarContext

DIRECT = "direct"
ARROW = "arrow"  # pointer-to-aggregate: fields attach with ->


class UnmappedVariable(Exception):
    def __init__(self, name: str):
        super().__init__(f"no target name for variable '{name}'")
        self.name = name


class UnsupportedWidth(Exception):
    pass


class ContractVariableUnmapped(Exception):
    def __init__(self, name: str):
        super().__init__(f"contract references '{name}', which the harness does not declare")
        self.name = name


@dataclass(frozen=True)
class NameMap:
    pre: Mapping[str, str]
    post: Mapping[str, str]
    access: Mapping[str, str] = field(default_factory=dict)  # name -> direct|arrow
    # Variable types let the C/Rust backends pick storage widths for masking
    # and sign extension when no literal in the expression anchors the width.
    types: Mapping[str, SemType] = field(default_factory=dict)

    def __post_init__(self):
        for label, mapping in (("pre", self.pre), ("post", self.post)):
            targets = list(mapping.values())
            if len(set(targets)) != len(targets):
                raise ValueError(f"{label} name map is not injective")

    def pre_of(self, name: str) -> str:
        try:
            return self.pre[name]
        except KeyError:
            raise UnmappedVariable(name) from None

    def post_of(self, name: str) -> str:
        try:
            return self.post[name]
        except KeyError:
            raise UnmappedVariable(name) from None

    def access_of(self, name: str) -> str:
        return self.access.get(name, DIRECT)

    def type_of(self, name: str) -> Optional[SemType]:
        return self.types.get(name)

    @staticmethod
    def identity(names, old_prefix: str = "old_") -> "NameMap":
        """Post-state names map to themselves, pre-state to old_<name>."""
        return NameMap(
            pre={n: f"{old_prefix}{n}" for n in names},
            post={n: n for n in names},
        )

    @staticmethod
    def for_ctx(ctx: VarContext, old_prefix: str = "old_") -> "NameMap":
        """Identity map that also carries every variable's type."""
        return NameMap(
            pre={n: f"{old_prefix}{n}" for n in ctx.names()},
            post={n: n for n in ctx.names()},
            types={n: ctx.type_of(n) for n in ctx.names()},
        )
