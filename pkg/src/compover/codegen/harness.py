"""Whole-file verification harnesses for external model checkers.

The C harness follows the shape: preamble, the procedure under test,
nondet prototypes, file-scope interface variables, then a main() that
gives every variable a nondeterministic value, snapshots the pre-state of
anything the postcondition reads through old(), assumes the compiled
precondition, calls the entry point, and asserts the compiled
postcondition. The procedure communicates through the file-scope
variables unless `call_args` names what to pass.

The Rust harness mirrors that with a #[kani::proof] function: locals from
kani::any(), plain-copy (or .clone()) snapshots, kani::assume before the
call, assert! after. By default every variable is passed `&mut` in
declaration order; `call_args` overrides verbatim.

Record-typed variables are declared in C as a pointer to `<name>_t`
(override with target_type), allocated with calloc and assumed non-null,
with each leaf field set nondeterministically. Widths outside
{8,16,32,64} are masked down to the declared width right after the
nondeterministic read so the storage invariant (upper bits zero) holds.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..il import Contract, free_vars
from ..il.types import SemType
from ._width import MACHINE_WIDTHS
from .c import c_type, compile_to_c
from .names import ARROW, ContractVariableUnmapped, NameMap
from .rust import compile_to_rust, rust_type

ROLES = ("input", "output", "state")


@dataclass(frozen=True)
class HarnessVar:
    name: str
    type: SemType
    role: str = "state"
    target_type: str = ""  # declaration type override (required metadata for C records)

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")


@dataclass(frozen=True)
class HarnessSpec:
    procedure_source: str
    entry: str
    variables: tuple[HarnessVar, ...]
    contract: Contract
    preamble: str = ""
    nondet: tuple[str, ...] = ()  # names to initialize nondeterministically; empty = all
    call_args: tuple[str, ...] = ()  # argument text; empty = no-arg call (C) / &mut each (Rust)

    def __post_init__(self):
        if not self.entry:
            raise ValueError("entry-point name must be nonempty")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate harness variable names")
        declared = set(names)
        pre_olds, pre_curs = free_vars(self.contract.pre)
        post_olds, post_curs = free_vars(self.contract.post)
        for used in sorted(pre_olds | pre_curs | post_olds | post_curs):
            if used not in declared:
                raise ContractVariableUnmapped(used)
        for n in self.nondet:
            if n not in declared:
                raise ValueError(f"nondet list names undeclared variable '{n}'")

    def old_names(self) -> list[str]:
        """Variables the postcondition reads through old(), in declaration order."""
        olds = free_vars(self.contract.post)[0]
        return [v.name for v in self.variables if v.name in olds]

    def wants_nondet(self, name: str) -> bool:
        return not self.nondet or name in self.nondet


def _c_decl_type(v: HarnessVar) -> str:
    if v.target_type:
        return v.target_type
    if v.type.kind == "record":
        return f"{v.name}_t"
    return c_type(v.type)


def _name_map(spec: HarnessSpec, access: bool) -> NameMap:
    return NameMap(
        pre={v.name: f"old_{v.name}" for v in spec.variables},
        post={v.name: v.name for v in spec.variables},
        access={v.name: ARROW for v in spec.variables if v.type.kind == "record"}
        if access
        else {},
        types={v.name: v.type for v in spec.variables},
    )


def _mask_suffix(w: int) -> str:
    return "ULL" if w > 32 else "U"


def _c_nondet(t: SemType) -> str:
    if t.kind == "bool":
        return "nondet_bool()"
    call = f"nondet_{c_type(t)}()"
    if t.width in MACHINE_WIDTHS:
        return call
    mask = (1 << t.width) - 1
    return f"{call} & {mask}{_mask_suffix(t.width)}"


def _c_field_inits(path: str, t: SemType, out: list[str]) -> None:
    for fname, ftype in t.fields:
        access = f"{path}{fname}"
        if ftype.kind == "record":
            _c_field_inits(access + ".", ftype, out)
        else:
            out.append(f"    {access} = {_c_nondet(ftype)};")


def emit_cbmc_harness(h: HarnessSpec) -> str:
    m = _name_map(h, access=True)
    lines: list[str] = [
        "#include <assert.h>",
        "#include <stdbool.h>",
        "#include <stdint.h>",
        "#include <stdlib.h>",
        "",
    ]
    if h.preamble.strip():
        lines += [h.preamble.strip(), ""]
    lines += [h.procedure_source.strip(), ""]

    # Nondet prototypes, one per C type used, in order of first use.
    protos: list[str] = []
    for v in h.variables:
        leaf_types = _leaf_types(v.type)
        for lt in leaf_types:
            ct = "bool" if lt.kind == "bool" else c_type(lt)
            p = f"{ct} nondet_{ct}(void);"
            if p not in protos:
                protos.append(p)
    lines += protos + [""]

    for v in h.variables:
        decl = _c_decl_type(v)
        if v.type.kind == "record":
            lines.append(f"{decl} *{v.name};")
        else:
            lines.append(f"{decl} {v.name};")
    lines += ["", "int main(void) {"]

    for v in h.variables:
        if v.type.kind == "record":
            decl = _c_decl_type(v)
            lines.append(f"    {v.name} = calloc(1, sizeof({decl}));")
            lines.append(f"    __CPROVER_assume({v.name} != NULL);")
            if h.wants_nondet(v.name):
                _c_field_inits(f"{v.name}->", v.type, lines)
        elif h.wants_nondet(v.name):
            lines.append(f"    {v.name} = {_c_nondet(v.type)};")

    by_name = {v.name: v for v in h.variables}
    for name in h.old_names():
        v = by_name[name]
        if v.type.kind == "record":
            lines.append(f"    const {_c_decl_type(v)} old_{name} = *{name};")
        else:
            lines.append(f"    const {_c_decl_type(v)} old_{name} = {name};")

    lines.append(f"    __CPROVER_assume({compile_to_c(h.contract.pre, m)});")
    lines.append(f"    {h.entry}({', '.join(h.call_args)});")
    lines.append(f"    assert({compile_to_c(h.contract.post, m)});")
    lines += ["    return 0;", "}"]
    return "\n".join(lines) + "\n"


def _leaf_types(t: SemType) -> list[SemType]:
    if t.kind != "record":
        return [t]
    out: list[SemType] = []
    for _, ftype in t.fields:
        out.extend(_leaf_types(ftype))
    return out


def _rust_decl_type(v: HarnessVar) -> str:
    if v.target_type:
        return v.target_type
    if v.type.kind == "record":
        raise ValueError(
            f"record variable '{v.name}' needs target_type for the Rust harness"
        )
    return rust_type(v.type)


def _rust_nondet(t: SemType) -> str:
    if t.kind == "bool":
        return "kani::any()"
    rt = rust_type(t)
    if t.width in MACHINE_WIDTHS:
        return "kani::any()"
    mask = (1 << t.width) - 1
    return f"kani::any::<{rt}>() & {mask}{rt}"


def _rust_default(t: SemType) -> str:
    if t.kind == "bool":
        return "false"
    if t.kind == "record":
        return "Default::default()"
    return f"0{rust_type(t)}"


def emit_kani_harness(h: HarnessSpec) -> str:
    m = _name_map(h, access=False)
    lines: list[str] = []
    if h.preamble.strip():
        lines += [h.preamble.strip(), ""]
    lines += [h.procedure_source.strip(), "", "#[kani::proof]", f"fn check_{h.entry}() {{"]

    for v in h.variables:
        decl = _rust_decl_type(v)
        if v.type.kind == "record":
            init = "kani::any()" if h.wants_nondet(v.name) else _rust_default(v.type)
        else:
            init = _rust_nondet(v.type) if h.wants_nondet(v.name) else _rust_default(v.type)
        lines.append(f"    let mut {v.name}: {decl} = {init};")

    by_name = {v.name: v for v in h.variables}
    for name in h.old_names():
        v = by_name[name]
        snap = f"{name}.clone()" if v.type.kind == "record" else name
        lines.append(f"    let old_{name} = {snap};")

    lines.append(f"    kani::assume({compile_to_rust(h.contract.pre, m)});")
    args = ", ".join(h.call_args) if h.call_args else ", ".join(
        f"&mut {v.name}" for v in h.variables
    )
    lines.append(f"    {h.entry}({args});")
    lines.append(f"    assert!({compile_to_rust(h.contract.post, m)});")
    lines.append("}")
    return "\n".join(lines) + "\n"
