"""Bit-blasting of QF_BV + Boolean terms into CDCL SAT clauses.

Terms arrive as parsed s-expression forms. Booleans become single literals;
bitvectors become LSB-first literal lists. Gates are Tseitin-encoded with
hash-consing and constant folding, so repeated subterms cost one gate.
"""

from __future__ import annotations

from typing import Union

from .sat import SatSolver
from .sexpr import Form, to_text

Sort = tuple  # ("Bool",) or ("BitVec", width)
Term = tuple  # ("bool", lit) or ("bv", [lits])


class BlastError(Exception):
    pass


class BitBlaster:
    def __init__(self, solver: SatSolver):
        self.solver = solver
        self.symbols: dict[str, tuple[Sort, Term]] = {}
        self.aliases: dict[str, Form] = {}
        self.gates: dict[tuple, int] = {}
        t = solver.new_var()
        solver.add_clause([t])
        self.true_lit = t

    # -- declarations ---------------------------------------------------------

    def declare(self, name: str, sort: Sort) -> None:
        if name in self.symbols or name in self.aliases:
            raise BlastError(f"symbol '{name}' already declared")
        if sort[0] == "Bool":
            term: Term = ("bool", self.solver.new_var())
        else:
            term = ("bv", [self.solver.new_var() for _ in range(sort[1])])
        self.symbols[name] = (sort, term)

    def define(self, name: str, body: Form) -> None:
        if name in self.symbols or name in self.aliases:
            raise BlastError(f"symbol '{name}' already declared")
        self.aliases[name] = body

    # -- gate helpers -----------------------------------------------------------

    def _gate(self, key: tuple, build) -> int:
        got = self.gates.get(key)
        if got is None:
            got = build()
            self.gates[key] = got
        return got

    def _and(self, a: int, b: int) -> int:
        t = self.true_lit
        if a == -t or b == -t or a == -b:
            return -t
        if a == t:
            return b
        if b == t or a == b:
            return a
        if abs(a) > abs(b) or (abs(a) == abs(b) and a > b):
            a, b = b, a

        def build():
            z = self.solver.new_var()
            self.solver.add_clause([-z, a])
            self.solver.add_clause([-z, b])
            self.solver.add_clause([z, -a, -b])
            return z

        return self._gate(("and", a, b), build)

    def _or(self, a: int, b: int) -> int:
        return -self._and(-a, -b)

    def _xor(self, a: int, b: int) -> int:
        t = self.true_lit
        if a == t:
            return -b
        if a == -t:
            return b
        if b == t:
            return -a
        if b == -t:
            return a
        if a == b:
            return -t
        if a == -b:
            return t
        if abs(a) > abs(b) or (abs(a) == abs(b) and a > b):
            a, b = b, a
        neg = False
        if a < 0:
            a, neg = -a, not neg
        if b < 0:
            b, neg = -b, not neg

        def build():
            z = self.solver.new_var()
            self.solver.add_clause([-z, a, b])
            self.solver.add_clause([-z, -a, -b])
            self.solver.add_clause([z, -a, b])
            self.solver.add_clause([z, a, -b])
            return z

        z = self._gate(("xor", a, b), build)
        return -z if neg else z

    def _iff(self, a: int, b: int) -> int:
        return -self._xor(a, b)

    def _ite(self, c: int, a: int, b: int) -> int:
        t = self.true_lit
        if c == t:
            return a
        if c == -t:
            return b
        if a == b:
            return a
        if a == t and b == -t:
            return c
        if a == -t and b == t:
            return -c

        def build():
            z = self.solver.new_var()
            self.solver.add_clause([-z, -c, a])
            self.solver.add_clause([-z, c, b])
            self.solver.add_clause([z, -c, -a])
            self.solver.add_clause([z, c, -b])
            return z

        return self._gate(("ite", c, a, b), build)

    def const_bv(self, value: int, width: int) -> Term:
        t = self.true_lit
        return ("bv", [t if (value >> i) & 1 else -t for i in range(width)])

    # -- arithmetic -------------------------------------------------------------

    def _adder(self, xs: list[int], ys: list[int], carry_in: int) -> list[int]:
        out = []
        c = carry_in
        for a, b in zip(xs, ys):
            s = self._xor(self._xor(a, b), c)
            c = self._or(self._and(a, b), self._and(c, self._xor(a, b)))
            out.append(s)
        return out

    def _ult(self, xs: list[int], ys: list[int]) -> int:
        lt = -self.true_lit
        for a, b in zip(xs, ys):  # LSB to MSB; MSB decides first
            lt = self._or(self._and(-a, b), self._and(self._iff(a, b), lt))
        return lt

    def _flip_sign(self, xs: list[int]) -> list[int]:
        return xs[:-1] + [-xs[-1]]

    # -- term compilation ---------------------------------------------------------

    def bool_term(self, form: Form) -> int:
        kind, payload = self.term(form)
        if kind != "bool":
            raise BlastError(f"expected a Bool term: {to_text(form)}")
        return payload

    def bv_term(self, form: Form) -> list[int]:
        kind, payload = self.term(form)
        if kind != "bv":
            raise BlastError(f"expected a BitVec term: {to_text(form)}")
        return payload

    def _bv_args(self, args: list[Form], op: str) -> list[list[int]]:
        vs = [self.bv_term(a) for a in args]
        if any(len(v) != len(vs[0]) for v in vs):
            raise BlastError(f"width mismatch in {op}")
        return vs

    def term(self, form: Form) -> Term:
        if isinstance(form, str):
            return self._atom(form)
        if not form:
            raise BlastError("empty application")
        head = form[0]
        args = form[1:]
        if isinstance(head, list):
            # ((_ extract i j) x) and friends
            if head and head[0] == "_":
                return self._indexed(head, args)
            raise BlastError(f"bad application head: {to_text(head)}")
        if head == "_":
            return self._atom_indexed(form)
        if head == "let":
            raise BlastError("let bindings are not supported")
        if head == "not":
            return ("bool", -self.bool_term(args[0]))
        if head == "and":
            z = self.true_lit
            for a in args:
                z = self._and(z, self.bool_term(a))
            return ("bool", z)
        if head == "or":
            z = -self.true_lit
            for a in args:
                z = self._or(z, self.bool_term(a))
            return ("bool", z)
        if head == "xor":
            z = -self.true_lit
            for a in args:
                z = self._xor(z, self.bool_term(a))
            return ("bool", z)
        if head == "=>":
            lits = [self.bool_term(a) for a in args]
            z = lits[-1]
            for a in reversed(lits[:-1]):
                z = self._or(-a, z)
            return ("bool", z)
        if head == "=":
            return ("bool", self._equal(args))
        if head == "distinct":
            parts = []
            for i in range(len(args)):
                for j in range(i + 1, len(args)):
                    parts.append(-self._equal([args[i], args[j]]))
            z = self.true_lit
            for p in parts:
                z = self._and(z, p)
            return ("bool", z)
        if head == "ite":
            c = self.bool_term(args[0])
            t1 = self.term(args[1])
            t2 = self.term(args[2])
            if t1[0] != t2[0]:
                raise BlastError("ite branches have different sorts")
            if t1[0] == "bool":
                return ("bool", self._ite(c, t1[1], t2[1]))
            if len(t1[1]) != len(t2[1]):
                raise BlastError("ite branch width mismatch")
            return ("bv", [self._ite(c, a, b) for a, b in zip(t1[1], t2[1])])
        if head in ("bvult", "bvule", "bvugt", "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge"):
            xs, ys = self._bv_args(args, head)
            if head in ("bvslt", "bvsle", "bvsgt", "bvsge"):
                xs, ys = self._flip_sign(xs), self._flip_sign(ys)
            if head in ("bvugt", "bvsgt"):
                return ("bool", self._ult(ys, xs))
            if head in ("bvuge", "bvsge"):
                return ("bool", -self._ult(xs, ys))
            if head in ("bvule", "bvsle"):
                return ("bool", -self._ult(ys, xs))
            return ("bool", self._ult(xs, ys))
        if head == "bvadd":
            xs, ys = self._bv_args(args, head)
            return ("bv", self._adder(xs, ys, -self.true_lit))
        if head == "bvsub":
            xs, ys = self._bv_args(args, head)
            return ("bv", self._adder(xs, [-y for y in ys], self.true_lit))
        if head == "bvneg":
            xs = self.bv_term(args[0])
            zero = [-self.true_lit] * len(xs)
            return ("bv", self._adder(zero, [-x for x in xs], self.true_lit))
        if head == "bvmul":
            xs, ys = self._bv_args(args, head)
            w = len(xs)
            acc = [-self.true_lit] * w
            for i in range(w):
                addend = [-self.true_lit] * i + [self._and(ys[i], x) for x in xs[: w - i]]
                acc = self._adder(acc, addend, -self.true_lit)
            return ("bv", acc)
        if head == "bvnot":
            return ("bv", [-x for x in self.bv_term(args[0])])
        if head == "bvand":
            xs, ys = self._bv_args(args, head)
            return ("bv", [self._and(a, b) for a, b in zip(xs, ys)])
        if head == "bvor":
            xs, ys = self._bv_args(args, head)
            return ("bv", [self._or(a, b) for a, b in zip(xs, ys)])
        if head == "bvxor":
            xs, ys = self._bv_args(args, head)
            return ("bv", [self._xor(a, b) for a, b in zip(xs, ys)])
        if head == "concat":
            vs = [self.bv_term(a) for a in args]
            bits: list[int] = []
            for v in reversed(vs):  # SMT concat: first arg is most significant
                bits.extend(v)
            return ("bv", bits)
        raise BlastError(f"unsupported operator '{head}'")

    def _equal(self, args: list[Form]) -> int:
        terms = [self.term(a) for a in args]
        z = self.true_lit
        for t1, t2 in zip(terms, terms[1:]):
            if t1[0] != t2[0]:
                raise BlastError("= over different sorts")
            if t1[0] == "bool":
                z = self._and(z, self._iff(t1[1], t2[1]))
            else:
                if len(t1[1]) != len(t2[1]):
                    raise BlastError("= width mismatch")
                for a, b in zip(t1[1], t2[1]):
                    z = self._and(z, self._iff(a, b))
        return z

    def _indexed(self, head: list, args: list[Form]) -> Term:
        op = head[1]
        if op == "extract":
            hi, lo = int(head[2]), int(head[3])
            xs = self.bv_term(args[0])
            if not 0 <= lo <= hi < len(xs):
                raise BlastError("extract indices out of range")
            return ("bv", xs[lo : hi + 1])
        if op == "zero_extend":
            k = int(head[2])
            xs = self.bv_term(args[0])
            return ("bv", xs + [-self.true_lit] * k)
        if op == "sign_extend":
            k = int(head[2])
            xs = self.bv_term(args[0])
            return ("bv", xs + [xs[-1]] * k)
        raise BlastError(f"unsupported indexed operator '{op}'")

    def _atom_indexed(self, form: Form) -> Term:
        # (_ bvN w)
        if len(form) == 3 and isinstance(form[1], str) and form[1].startswith("bv"):
            value = int(form[1][2:])
            width = int(form[2])
            return self.const_bv(value & ((1 << width) - 1), width)
        raise BlastError(f"unsupported term {to_text(form)}")

    def _atom(self, name: str) -> Term:
        if name == "true":
            return ("bool", self.true_lit)
        if name == "false":
            return ("bool", -self.true_lit)
        if name.startswith("#b"):
            bits = name[2:]
            return self.const_bv(int(bits, 2), len(bits))
        if name.startswith("#x"):
            digits = name[2:]
            return self.const_bv(int(digits, 16), 4 * len(digits))
        if name.startswith("|") and name.endswith("|"):
            name = name[1:-1]
        if name in self.symbols:
            return self.symbols[name][1]
        if name in self.aliases:
            return self.term(self.aliases[name])
        raise BlastError(f"unknown symbol '{name}'")

    def assert_form(self, form: Form) -> None:
        self.solver.add_clause([self.bool_term(form)])

    # -- model reading -----------------------------------------------------------

    def model_of(self, name: str) -> Union[bool, tuple[int, int]]:
        """Bool value, or (value, width) for bitvectors."""
        sort, term = self.symbols[name]
        if sort[0] == "Bool":
            return self._lit_model(term[1])
        value = 0
        for i, lit in enumerate(term[1]):
            if self._lit_model(lit):
                value |= 1 << i
        return (value, sort[1])

    def _lit_model(self, lit: int) -> bool:
        v = self.solver.model_value(abs(lit))
        return v if lit > 0 else not v
