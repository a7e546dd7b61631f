"""Parser for the textual contract expression syntax.

The surface syntax is C-like infix over the expression AST:

    expr     = "if" expr "then" expr "else" expr | implies
    implies  = or [ "->" expr ]
    or       = and { "||" and }
    and      = cmp { "&&" cmp }
    cmp      = sum [ cmpop sum ]              (comparisons do not chain)
    sum      = term { ("+" | "-") term }
    term     = unary { "*" unary }
    unary    = "!" unary | postfix
    postfix  = atom { "." ident }
    atom     = "true" | "false" | int | ident | "old" "(" ident ")" | "(" expr ")"
    cmpop    = "==" | "!=" | "<" | "<=" | ">" | ">=" |
               "<u" | "<=u" | ">u" | ">=u" | "<s" | "<=s" | ">s" | ">=s"
    int      = digits [ ("u" | "s") digits ]  (suffix fixes width and signedness)

Plain comparators take their signedness from the operand type; the explicit
forms are checked against it. Unsuffixed integer literals take their type from
the nearest variable they are compared or combined with; a literal that never
meets a variable needs a suffix. Negative constants are written as bit
patterns (255 is -1 at width 8) or as `0 - n`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .ast import Binary, BoolLit, Expr, IntLit, Ite, Not, Old, Select, Var
from .check import PRE, POST, typecheck
from .errors import IlSyntaxError, IlTypeError, OldInPrecondition, UnknownVariable
from .types import SemType, VarContext

_KEYWORDS = {"true", "false", "old", "if", "then", "else"}

# Longest-match-first operator table.
_OPERATORS = [
    "<=u", "<=s", ">=u", ">=s",
    "&&", "||", "->", "==", "!=", "<=", ">=", "<u", "<s", ">u", ">s",
    "(", ")", ".", "!", "<", ">", "+", "-", "*",
]

_CMP_CANON = {
    "==": "eq", "!=": "neq",
    "<u": "ltu", "<=u": "leu", ">u": "gtu", ">=u": "geu",
    "<s": "lts", "<=s": "les", ">s": "gts", ">=s": "ges",
    "<": "lt", "<=": "le", ">": "gt", ">=": "ge",
}

# Plain comparator name -> (unsigned form, signed form).
_PLAIN_CMP = {
    "lt": ("ltu", "lts"), "le": ("leu", "les"),
    "gt": ("gtu", "gts"), "ge": ("geu", "ges"),
}


@dataclass
class _Token:
    kind: str  # "ident" | "int" | "op" | "eof"
    text: str
    line: int
    col: int
    value: int = 0
    suffix: Optional[SemType] = None


def tokenize(text: str, extra_ops: tuple[str, ...] = ()) -> list[_Token]:
    ops = sorted(set(_OPERATORS) | set(extra_ops), key=len, reverse=True)
    toks: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            value = int(text[i:j])
            suffix = None
            if j < n and text[j] in "us" and j + 1 < n and text[j + 1].isdigit():
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                width = int(text[j + 1:k])
                try:
                    t = SemType.uint(width) if text[j] == "u" else SemType.sint(width)
                except IlTypeError as exc:
                    raise IlSyntaxError(str(exc), line, col) from None
                if not 0 <= value < (1 << width):
                    raise IlSyntaxError(
                        f"literal {value} does not fit in {width} bits", line, col
                    )
                suffix = t
                j = k
            toks.append(_Token("int", text[i:j], line, col, value=value, suffix=suffix))
            col += j - i
            i = j
            continue
        for op in ops:
            if text.startswith(op, i):
                toks.append(_Token("op", op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            raise IlSyntaxError(f"unexpected character {c!r}", line, col)
    toks.append(_Token("eof", "", line, col))
    return toks


@dataclass
class _Raw:
    """Parse-tree node carrying position info; types resolve after parsing."""

    kind: str  # "bool" | "int" | "var" | "old" | "select" | "not" | "binary" | "ite"
    line: int
    col: int
    name: str = ""
    value: int = 0
    op: str = ""
    bvalue: bool = False
    kids: list = field(default_factory=list)
    rtype: Optional[SemType] = None  # resolved type; None = int literal pending


class _Parser:
    def __init__(self, toks: list[_Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> _Token:
        t = self.peek()
        if t.text != text:
            raise IlSyntaxError(f"expected '{text}', found '{t.text or 'end of input'}'", t.line, t.col)
        return self.next()

    def fail(self, message: str) -> IlSyntaxError:
        t = self.peek()
        return IlSyntaxError(message, t.line, t.col)

    def parse_expr(self) -> _Raw:
        t = self.peek()
        if t.kind == "ident" and t.text == "if":
            self.next()
            cond = self.parse_expr()
            self.expect("then")
            then = self.parse_expr()
            self.expect("else")
            orelse = self.parse_expr()
            return _Raw("ite", t.line, t.col, kids=[cond, then, orelse])
        return self.parse_implies()

    def parse_implies(self) -> _Raw:
        left = self.parse_or()
        t = self.peek()
        if t.text == "->":
            self.next()
            right = self.parse_expr()
            return _Raw("binary", t.line, t.col, op="implies", kids=[left, right])
        return left

    def parse_or(self) -> _Raw:
        node = self.parse_and()
        while self.peek().text == "||":
            t = self.next()
            node = _Raw("binary", t.line, t.col, op="or", kids=[node, self.parse_and()])
        return node

    def parse_and(self) -> _Raw:
        node = self.parse_cmp()
        while self.peek().text == "&&":
            t = self.next()
            node = _Raw("binary", t.line, t.col, op="and", kids=[node, self.parse_cmp()])
        return node

    def parse_cmp(self) -> _Raw:
        left = self.parse_sum()
        t = self.peek()
        if t.kind == "op" and t.text in _CMP_CANON:
            self.next()
            right = self.parse_sum()
            after = self.peek()
            if after.kind == "op" and after.text in _CMP_CANON:
                raise IlSyntaxError("comparisons do not chain; use &&", after.line, after.col)
            return _Raw("binary", t.line, t.col, op=_CMP_CANON[t.text], kids=[left, right])
        return left

    def parse_sum(self) -> _Raw:
        node = self.parse_term()
        while self.peek().text in ("+", "-"):
            t = self.next()
            op = "add" if t.text == "+" else "sub"
            node = _Raw("binary", t.line, t.col, op=op, kids=[node, self.parse_term()])
        return node

    def parse_term(self) -> _Raw:
        node = self.parse_unary()
        while self.peek().text == "*":
            t = self.next()
            node = _Raw("binary", t.line, t.col, op="mul", kids=[node, self.parse_unary()])
        return node

    def parse_unary(self) -> _Raw:
        t = self.peek()
        if t.text == "!":
            self.next()
            return _Raw("not", t.line, t.col, kids=[self.parse_unary()])
        return self.parse_postfix()

    def parse_postfix(self) -> _Raw:
        node = self.parse_atom()
        while self.peek().text == ".":
            self.next()
            t = self.peek()
            if t.kind != "ident":
                raise self.fail("expected a field name after '.'")
            self.next()
            node = _Raw("select", t.line, t.col, name=t.text, kids=[node])
        return node

    def parse_atom(self) -> _Raw:
        t = self.peek()
        if t.text == "(":
            self.next()
            node = self.parse_expr()
            self.expect(")")
            return node
        if t.kind == "int":
            self.next()
            return _Raw("int", t.line, t.col, value=t.value, rtype=t.suffix)
        if t.kind == "ident":
            if t.text == "true":
                self.next()
                return _Raw("bool", t.line, t.col, bvalue=True)
            if t.text == "false":
                self.next()
                return _Raw("bool", t.line, t.col, bvalue=False)
            if t.text == "old":
                self.next()
                self.expect("(")
                name_tok = self.peek()
                if name_tok.kind != "ident" or name_tok.text in _KEYWORDS:
                    raise self.fail("expected a variable name inside old(...)")
                self.next()
                self.expect(")")
                return _Raw("old", t.line, t.col, name=name_tok.text)
            if t.text in _KEYWORDS:
                raise self.fail(f"'{t.text}' cannot start an expression here")
            self.next()
            return _Raw("var", t.line, t.col, name=t.text)
        raise self.fail(f"expected an expression, found '{t.text or 'end of input'}'")


class _Resolver:
    """Assigns a concrete type to every node; infers unsuffixed literal widths."""

    def __init__(self, ctx: VarContext, position: str, enums: Optional[Mapping[str, tuple[int, SemType]]]):
        self.ctx = ctx
        self.position = position
        self.enums = enums or {}

    def err(self, node: _Raw, message: str) -> IlTypeError:
        return IlTypeError(f"{message} (line {node.line}, col {node.col})")

    def infer(self, node: _Raw) -> Optional[SemType]:
        k = node.kind
        if k == "bool":
            node.rtype = SemType.bool_()
        elif k == "int":
            pass  # rtype is the suffix type or None
        elif k == "var":
            if node.name in self.ctx:
                node.rtype = self.ctx.type_of(node.name)
            elif node.name in self.enums:
                value, t = self.enums[node.name]
                node.kind = "int"
                node.value = value
                node.rtype = t
            else:
                raise UnknownVariable(node.name)
        elif k == "old":
            if self.position == PRE:
                raise OldInPrecondition(node.name)
            node.rtype = self.ctx.type_of(node.name)
        elif k == "select":
            base = self.infer(node.kids[0])
            if base is None or base.kind != "record":
                raise self.err(node, f"field access on non-record value")
            node.rtype = base.field_type(node.name)
        elif k == "not":
            t = self.infer(node.kids[0])
            if t is None or t.kind != "bool":
                raise self.err(node, "'!' needs a bool operand")
            node.rtype = SemType.bool_()
        elif k == "binary":
            node.rtype = self.infer_binary(node)
        elif k == "ite":
            ct = self.infer(node.kids[0])
            if ct is None or ct.kind != "bool":
                raise self.err(node, "if-condition must be bool")
            tt = self.infer(node.kids[1])
            et = self.infer(node.kids[2])
            node.rtype = self.join(node, tt, et, node.kids[1], node.kids[2])
        else:
            raise AssertionError(k)
        return node.rtype

    def infer_binary(self, node: _Raw) -> Optional[SemType]:
        op = node.op
        left, right = node.kids
        lt = self.infer(left)
        rt = self.infer(right)
        if op in ("and", "or", "implies"):
            for t in (lt, rt):
                if t is None or t.kind != "bool":
                    raise self.err(node, f"'{op}' needs bool operands")
            return SemType.bool_()
        if op in ("eq", "neq"):
            t = self.join(node, lt, rt, left, right, anchor_needed=True)
            if t.kind == "record":
                raise self.err(node, "records are compared field by field, not with ==")
            return SemType.bool_()
        if op in ("add", "sub", "mul"):
            t = self.join(node, lt, rt, left, right)
            if t is not None and not t.is_int:
                raise self.err(node, f"'{op}' needs integer operands")
            return t
        # comparison
        t = self.join(node, lt, rt, left, right, anchor_needed=True)
        if not t.is_int:
            raise self.err(node, "comparison needs integer operands")
        if op in _PLAIN_CMP:
            node.op = _PLAIN_CMP[op][1 if t.signed else 0]
        elif op.endswith("u") and t.signed:
            raise self.err(node, f"unsigned comparison on signed type {t}")
        elif op.endswith("s") and not t.signed:
            raise self.err(node, f"signed comparison on unsigned type {t}")
        return SemType.bool_()

    def join(self, node, lt, rt, left, right, anchor_needed: bool = False):
        """Reconcile sibling types; push a known type into a pending literal side."""
        if lt is not None and rt is not None:
            if lt != rt:
                raise self.err(node, f"operand types disagree: {lt} vs {rt}")
            return lt
        if lt is None and rt is None:
            if anchor_needed:
                raise self.err(
                    node, "cannot infer literal width here; add a suffix like 3u8"
                )
            return None
        known, pending = (lt, right) if lt is not None else (rt, left)
        if not known.is_int:
            raise self.err(node, f"literal used where a {known} is expected")
        self.assign(pending, known)
        return known

    def assign(self, node: _Raw, t: SemType) -> None:
        if node.rtype is not None:
            if node.rtype != t:
                raise self.err(node, f"operand types disagree: {node.rtype} vs {t}")
            return
        if node.kind == "int":
            if not 0 <= node.value < (1 << t.width):
                raise self.err(node, f"literal {node.value} does not fit in {t}")
            node.rtype = t
        elif node.kind == "binary" and node.op in ("add", "sub", "mul"):
            node.rtype = t
            self.assign(node.kids[0], t)
            self.assign(node.kids[1], t)
        elif node.kind == "ite":
            node.rtype = t
            self.assign(node.kids[1], t)
            self.assign(node.kids[2], t)
        else:
            raise self.err(node, "internal: cannot push a type into this node")

    def build(self, node: _Raw) -> Expr:
        k = node.kind
        if k == "bool":
            return BoolLit(node.bvalue)
        if k == "int":
            if node.rtype is None:
                raise self.err(
                    node, f"cannot infer the width of literal {node.value}; add a suffix like u8"
                )
            return IntLit(node.value, node.rtype)
        if k == "var":
            return Var(node.name)
        if k == "old":
            return Old(node.name)
        if k == "select":
            return Select(self.build(node.kids[0]), node.name)
        if k == "not":
            return Not(self.build(node.kids[0]))
        if k == "binary":
            return Binary(node.op, self.build(node.kids[0]), self.build(node.kids[1]))
        if k == "ite":
            return Ite(*(self.build(kid) for kid in node.kids))
        raise AssertionError(k)


def resolve_parsed(
    raw: _Raw,
    ctx: VarContext,
    position: str,
    enums: Optional[Mapping[str, tuple[int, SemType]]] = None,
    expected: Optional[SemType] = SemType.bool_(),
) -> Expr:
    """Type a parsed tree and build the final AST; see parse_expr."""
    resolver = _Resolver(ctx, position, enums)
    t = resolver.infer(raw)
    if t is None:
        if expected is not None and expected.is_int:
            resolver.assign(raw, expected)
            t = expected
        else:
            raise IlTypeError(
                "cannot infer the width of the expression's literals; add a suffix like 3u8"
            )
    elif expected is not None and t != expected:
        raise IlTypeError(f"expected a {expected} expression, got {t}")
    expr = resolver.build(raw)
    assert typecheck(expr, ctx, position) == t
    return expr


def parse_expr(
    text: str,
    ctx: VarContext,
    position: str = POST,
    enums: Optional[Mapping[str, tuple[int, SemType]]] = None,
    expected: Optional[SemType] = SemType.bool_(),
) -> Expr:
    """Parse and type a contract expression.

    position 'pre' rejects old(...); enums maps bare names (mode labels) to
    integer constants; expected is the required result type, bool by default,
    or None to accept any type.
    """
    if position not in (PRE, POST):
        raise ValueError(f"position must be 'pre' or 'post', got {position!r}")
    parser = _Parser(tokenize(text))
    raw = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "eof":
        raise IlSyntaxError(f"unexpected trailing input '{tail.text}'", tail.line, tail.col)
    return resolve_parsed(raw, ctx, position, enums, expected)
