"""Semantic types, values and assignments for the contract language.

Integers are fixed-width two's-complement bitvectors (1..64 bits); the stored
payload is always the unsigned residue of the bit pattern. Records are ordered
field aggregates used to model message/port-style interface values. Everything
here is immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import IlTypeError

MAX_WIDTH = 64


@dataclass(frozen=True)
class SemType:
    """One of: bool, uint(width), sint(width), record(fields)."""

    kind: str  # "bool" | "uint" | "sint" | "record"
    width: int = 0
    fields: tuple[tuple[str, "SemType"], ...] = ()

    def __post_init__(self):
        if self.kind in ("uint", "sint"):
            if not 1 <= self.width <= MAX_WIDTH:
                raise IlTypeError(f"integer width must be in 1..{MAX_WIDTH}, got {self.width}")
        elif self.kind == "bool":
            if self.width != 0 or self.fields:
                raise IlTypeError("bool carries no width or fields")
        elif self.kind == "record":
            names = [n for n, _ in self.fields]
            if not names:
                raise IlTypeError("record needs at least one field")
            if len(set(names)) != len(names) or any(not n for n in names):
                raise IlTypeError("record field names must be unique and non-empty")
        else:
            raise IlTypeError(f"unknown type kind '{self.kind}'")

    @staticmethod
    def bool_() -> "SemType":
        return SemType("bool")

    @staticmethod
    def uint(width: int) -> "SemType":
        return SemType("uint", width)

    @staticmethod
    def sint(width: int) -> "SemType":
        return SemType("sint", width)

    @staticmethod
    def record(fields: Mapping[str, "SemType"]) -> "SemType":
        return SemType("record", 0, tuple(fields.items()))

    @property
    def is_int(self) -> bool:
        return self.kind in ("uint", "sint")

    @property
    def signed(self) -> bool:
        return self.kind == "sint"

    def field_type(self, name: str) -> "SemType":
        for fname, ftype in self.fields:
            if fname == name:
                return ftype
        raise IlTypeError(f"record has no field '{name}'")

    def __str__(self) -> str:
        if self.kind == "bool":
            return "bool"
        if self.kind == "uint":
            return f"u{self.width}"
        if self.kind == "sint":
            return f"s{self.width}"
        inner = ", ".join(f"{n}: {t}" for n, t in self.fields)
        return "{" + inner + "}"


def parse_type(text: str) -> SemType:
    """Parse the compact textual form: 'bool', 'u8', 's16'."""
    text = text.strip()
    if text == "bool":
        return SemType.bool_()
    if text and text[0] in "us" and text[1:].isdigit():
        width = int(text[1:])
        return SemType.uint(width) if text[0] == "u" else SemType.sint(width)
    raise IlTypeError(f"cannot parse type '{text}'")


@dataclass(frozen=True)
class Value:
    """A typed runtime value; integer payloads are unsigned residues."""

    type: SemType
    payload: object  # bool | int | tuple[tuple[str, Value], ...]

    def __post_init__(self):
        k = self.type.kind
        if k == "bool":
            if not isinstance(self.payload, bool):
                raise IlTypeError(f"bool value needs a bool payload, got {self.payload!r}")
        elif k in ("uint", "sint"):
            if not isinstance(self.payload, int) or isinstance(self.payload, bool):
                raise IlTypeError(f"integer value needs an int payload, got {self.payload!r}")
            if not 0 <= self.payload < (1 << self.type.width):
                raise IlTypeError(
                    f"payload {self.payload} does not fit in {self.type.width} bits"
                )
        else:
            items = self.payload
            if not isinstance(items, tuple) or len(items) != len(self.type.fields):
                raise IlTypeError("record payload shape mismatch")
            for (fname, ftype), (pname, pval) in zip(self.type.fields, items):
                if fname != pname or not isinstance(pval, Value) or pval.type != ftype:
                    raise IlTypeError(f"record payload mismatch at field '{fname}'")

    @staticmethod
    def of_bool(b: bool) -> "Value":
        return Value(SemType.bool_(), bool(b))

    @staticmethod
    def of_int(v: int, type_: SemType) -> "Value":
        if not type_.is_int:
            raise IlTypeError("of_int needs an integer type")
        return Value(type_, v & ((1 << type_.width) - 1))

    @staticmethod
    def of_record(type_: SemType, fields: Mapping[str, "Value"]) -> "Value":
        return Value(type_, tuple((n, fields[n]) for n, _ in type_.fields))

    @property
    def as_bool(self) -> bool:
        return bool(self.payload)

    @property
    def as_unsigned(self) -> int:
        return int(self.payload)  # type: ignore[arg-type]

    @property
    def as_signed(self) -> int:
        v = self.as_unsigned
        half = 1 << (self.type.width - 1)
        return v - (1 << self.type.width) if v >= half else v

    def field(self, name: str) -> "Value":
        for fname, fval in self.payload:  # type: ignore[union-attr]
            if fname == name:
                return fval
        raise IlTypeError(f"record value has no field '{name}'")

    def __str__(self) -> str:
        if self.type.kind == "bool":
            return "true" if self.payload else "false"
        if self.type.is_int:
            return str(self.payload)
        inner = ", ".join(f"{n}: {v}" for n, v in self.payload)  # type: ignore[union-attr]
        return "{" + inner + "}"


def default_value(type_: SemType) -> Value:
    """All-zero / all-false value of the given type."""
    if type_.kind == "bool":
        return Value.of_bool(False)
    if type_.is_int:
        return Value.of_int(0, type_)
    return Value.of_record(type_, {n: default_value(t) for n, t in type_.fields})


def enumerate_values(type_: SemType) -> Iterator[Value]:
    """Yield every value of the type, in a fixed order."""
    if type_.kind == "bool":
        yield Value.of_bool(False)
        yield Value.of_bool(True)
    elif type_.is_int:
        for v in range(1 << type_.width):
            yield Value.of_int(v, type_)
    else:
        names = [n for n, _ in type_.fields]

        def rec(idx: int, acc: dict):
            if idx == len(names):
                yield Value.of_record(type_, acc)
                return
            for v in enumerate_values(type_.fields[idx][1]):
                acc[names[idx]] = v
                yield from rec(idx + 1, acc)

        yield from rec(0, {})


def domain_size(type_: SemType) -> int:
    if type_.kind == "bool":
        return 2
    if type_.is_int:
        return 1 << type_.width
    n = 1
    for _, t in type_.fields:
        n *= domain_size(t)
    return n


@dataclass(frozen=True)
class VarContext:
    """The shared, ordered set of typed variables a system operates on."""

    vars: tuple[tuple[str, SemType], ...]
    _index: dict = field(default=None, compare=False, hash=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        names = [n for n, _ in self.vars]
        if not names:
            raise IlTypeError("a variable context needs at least one variable")
        if len(set(names)) != len(names):
            raise IlTypeError("variable names must be unique")
        object.__setattr__(self, "_index", dict(self.vars))

    @staticmethod
    def of(vars_: Mapping[str, SemType]) -> "VarContext":
        return VarContext(tuple(vars_.items()))

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def type_of(self, name: str) -> SemType:
        try:
            return self._index[name]
        except KeyError:
            from .errors import UnknownVariable

            raise UnknownVariable(name) from None

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.vars)


@dataclass(frozen=True)
class Assignment:
    """A total valuation of a variable context; keys are exactly its names."""

    values: tuple[tuple[str, Value], ...]
    _index: dict = field(default=None, compare=False, hash=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "_index", dict(self.values))

    @staticmethod
    def of(values: Mapping[str, Value]) -> "Assignment":
        return Assignment(tuple(sorted(values.items())))

    def __getitem__(self, name: str) -> Value:
        return self._index[name]

    def get(self, name: str):
        return self._index.get(name)

    def set(self, name: str, value: Value) -> "Assignment":
        d = dict(self.values)
        d[name] = value
        return Assignment.of(d)

    def as_dict(self) -> dict[str, Value]:
        return dict(self.values)

    def conforms(self, ctx: VarContext) -> bool:
        if set(self._index) != set(ctx.names()):
            return False
        return all(self._index[n].type == t for n, t in ctx.vars)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{n}={v}" for n, v in self.values) + ")"


def default_assignment(ctx: VarContext) -> Assignment:
    return Assignment.of({n: default_value(t) for n, t in ctx.vars})


def value_key(v: Value):
    """Total order over same-typed values, for deterministic iteration."""
    if v.type.kind == "bool":
        return (int(v.payload),)
    if v.type.is_int:
        return (v.as_unsigned,)
    return tuple(k for _, fv in v.payload for k in value_key(fv))  # type: ignore[union-attr]


def assignment_key(a: Assignment):
    return tuple((n, value_key(v)) for n, v in a.values)
