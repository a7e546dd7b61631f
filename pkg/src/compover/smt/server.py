"""A small SMT-LIB v2 solver process for QF_BV plus Booleans.

Runs as the `compover-smt` console script (or `python -m compover.smt.server`)
and speaks enough of the SMT-LIB command language for bounded model checking:
declare-const, define-fun (constants), assert, push/pop, check-sat, get-value,
get-model, echo, reset, exit. check-sat bit-blasts the assertion stack into
the bundled CDCL solver; get-value evaluates terms against the model.
"""

from __future__ import annotations

import sys
from typing import Optional, TextIO

from .bitblast import BitBlaster, BlastError
from .sat import SatSolver
from .sexpr import Form, SexprError, balanced, parse_all, to_text


class CommandError(Exception):
    pass


def _parse_sort(form: Form) -> tuple:
    if form == "Bool":
        return ("Bool",)
    if isinstance(form, list) and len(form) == 3 and form[0] == "_" and form[1] == "BitVec":
        width = int(form[2])
        if width < 1:
            raise CommandError("BitVec width must be positive")
        return ("BitVec", width)
    raise CommandError(f"unsupported sort {to_text(form)}")


def _to_signed(value: int, width: int) -> int:
    half = 1 << (width - 1)
    return value - (1 << width) if value >= half else value


def eval_form(form: Form, env: dict, aliases: dict) -> tuple:
    """Evaluate a term to ("bool", b) or ("bv", width, value) under a model."""

    def ev(f: Form) -> tuple:
        if isinstance(f, str):
            if f == "true":
                return ("bool", True)
            if f == "false":
                return ("bool", False)
            if f.startswith("#b"):
                return ("bv", len(f) - 2, int(f[2:], 2))
            if f.startswith("#x"):
                return ("bv", 4 * (len(f) - 2), int(f[2:], 16))
            name = f[1:-1] if f.startswith("|") and f.endswith("|") else f
            if name in env:
                return env[name]
            if name in aliases:
                return ev(aliases[name])
            raise CommandError(f"unknown symbol '{name}'")
        if not f:
            raise CommandError("empty application")
        head = f[0]
        if isinstance(head, list):
            if head and head[0] == "_":
                return indexed(head, f[1:])
            raise CommandError(f"bad application {to_text(f)}")
        if head == "_":
            if len(f) == 3 and f[1].startswith("bv"):
                width = int(f[2])
                return ("bv", width, int(f[1][2:]) & ((1 << width) - 1))
            raise CommandError(f"unsupported term {to_text(f)}")
        args = f[1:]
        if head == "not":
            return ("bool", not boolv(args[0]))
        if head == "and":
            return ("bool", all(boolv(a) for a in args))
        if head == "or":
            return ("bool", any(boolv(a) for a in args))
        if head == "xor":
            out = False
            for a in args:
                out ^= boolv(a)
            return ("bool", out)
        if head == "=>":
            vals = [boolv(a) for a in args]
            out = vals[-1]
            for v in reversed(vals[:-1]):
                out = (not v) or out
            return ("bool", out)
        if head == "=":
            vals = [ev(a) for a in args]
            return ("bool", all(v == vals[0] for v in vals[1:]))
        if head == "distinct":
            vals = [ev(a) for a in args]
            return ("bool", len(set(vals)) == len(vals))
        if head == "ite":
            return ev(args[1]) if boolv(args[0]) else ev(args[2])
        if head in ("bvult", "bvule", "bvugt", "bvuge"):
            (w1, a), (w2, b) = bvv(args[0]), bvv(args[1])
            cmp = {"bvult": a < b, "bvule": a <= b, "bvugt": a > b, "bvuge": a >= b}
            return ("bool", cmp[head])
        if head in ("bvslt", "bvsle", "bvsgt", "bvsge"):
            (w1, a), (w2, b) = bvv(args[0]), bvv(args[1])
            sa, sb = _to_signed(a, w1), _to_signed(b, w2)
            cmp = {"bvslt": sa < sb, "bvsle": sa <= sb, "bvsgt": sa > sb, "bvsge": sa >= sb}
            return ("bool", cmp[head])
        if head in ("bvadd", "bvsub", "bvmul", "bvand", "bvor", "bvxor"):
            w, a = bvv(args[0])
            mask = (1 << w) - 1
            for arg in args[1:]:
                _, b = bvv(arg)
                if head == "bvadd":
                    a = (a + b) & mask
                elif head == "bvsub":
                    a = (a - b) & mask
                elif head == "bvmul":
                    a = (a * b) & mask
                elif head == "bvand":
                    a = a & b
                elif head == "bvor":
                    a = a | b
                else:
                    a = a ^ b
            return ("bv", w, a)
        if head == "bvnot":
            w, a = bvv(args[0])
            return ("bv", w, a ^ ((1 << w) - 1))
        if head == "bvneg":
            w, a = bvv(args[0])
            return ("bv", w, (-a) & ((1 << w) - 1))
        if head == "concat":
            vals = [bvv(a) for a in args]
            width, value = 0, 0
            for w, v in vals:  # first argument is most significant
                width += w
                value = (value << w) | v
            return ("bv", width, value)
        raise CommandError(f"unsupported operator '{head}'")

    def indexed(head: list, args: list) -> tuple:
        op = head[1]
        if op == "extract":
            hi, lo = int(head[2]), int(head[3])
            w, v = bvv(args[0])
            if not 0 <= lo <= hi < w:
                raise CommandError("extract indices out of range")
            width = hi - lo + 1
            return ("bv", width, (v >> lo) & ((1 << width) - 1))
        if op == "zero_extend":
            k = int(head[2])
            w, v = bvv(args[0])
            return ("bv", w + k, v)
        if op == "sign_extend":
            k = int(head[2])
            w, v = bvv(args[0])
            return ("bv", w + k, _to_signed(v, w) & ((1 << (w + k)) - 1))
        raise CommandError(f"unsupported indexed operator '{op}'")

    def boolv(f: Form) -> bool:
        v = ev(f)
        if v[0] != "bool":
            raise CommandError(f"expected Bool: {to_text(f)}")
        return v[1]

    def bvv(f: Form) -> tuple[int, int]:
        v = ev(f)
        if v[0] != "bv":
            raise CommandError(f"expected BitVec: {to_text(f)}")
        return v[1], v[2]

    return ev(form)


def format_value(v: tuple) -> str:
    if v[0] == "bool":
        return "true" if v[1] else "false"
    _, width, value = v
    return "#b" + format(value, f"0{width}b")


class Server:
    def __init__(self, out: TextIO):
        self.out = out
        self.frames: list[list] = [[]]
        self.names: list[set] = [set()]
        self.blaster: Optional[BitBlaster] = None  # holds the last sat model
        self.running = True

    def reply(self, text: str) -> None:
        self.out.write(text + "\n")
        self.out.flush()

    def error(self, message: str) -> None:
        self.reply('(error "' + message.replace('"', '""') + '")')

    def handle(self, form: Form) -> None:
        try:
            self._dispatch(form)
        except (CommandError, BlastError, SexprError, ValueError) as exc:
            self.error(str(exc))

    def _dispatch(self, form: Form) -> None:
        if not isinstance(form, list) or not form or not isinstance(form[0], str):
            raise CommandError(f"bad command {to_text(form)}")
        cmd = form[0]
        if cmd in ("set-logic", "set-info", "set-option"):
            return
        if cmd == "echo":
            text = form[1] if len(form) > 1 else '""'
            self.reply(text[1:-1] if text.startswith('"') else text)
            return
        if cmd == "declare-const":
            self._declare(form[1], form[2])
            return
        if cmd == "declare-fun":
            if len(form) != 4 or form[2] != []:
                raise CommandError("only zero-arity declare-fun is supported")
            self._declare(form[1], form[3])
            return
        if cmd == "define-fun":
            if len(form) != 5 or form[2] != []:
                raise CommandError("only zero-arity define-fun is supported")
            self._claim(form[1])
            self._record(("define", form[1], form[3], form[4]))
            return
        if cmd == "assert":
            if len(form) != 2:
                raise CommandError("assert takes one term")
            self._record(("assert", form[1]))
            return
        if cmd == "push":
            n = int(form[1]) if len(form) > 1 else 1
            for _ in range(n):
                self.frames.append([])
                self.names.append(set())
            self.blaster = None
            return
        if cmd == "pop":
            n = int(form[1]) if len(form) > 1 else 1
            if n >= len(self.frames):
                raise CommandError("pop below the bottom of the stack")
            for _ in range(n):
                self.frames.pop()
                self.names.pop()
            self.blaster = None
            return
        if cmd == "check-sat":
            self._check_sat()
            return
        if cmd == "get-value":
            self._get_value(form[1])
            return
        if cmd == "get-model":
            self._get_model()
            return
        if cmd == "reset":
            self.frames = [[]]
            self.names = [set()]
            self.blaster = None
            return
        if cmd == "exit":
            self.running = False
            return
        raise CommandError(f"unsupported command '{cmd}'")

    def _claim(self, name: str) -> None:
        if any(name in frame for frame in self.names):
            raise CommandError(f"symbol '{name}' already declared")
        self.names[-1].add(name)

    def _declare(self, name: str, sort_form: Form) -> None:
        sort = _parse_sort(sort_form)
        self._claim(name)
        self._record(("declare", name, sort))

    def _record(self, entry: tuple) -> None:
        self.frames[-1].append(entry)
        self.blaster = None

    def _check_sat(self) -> None:
        solver = SatSolver()
        blaster = BitBlaster(solver)
        for frame in self.frames:
            for entry in frame:
                if entry[0] == "declare":
                    blaster.declare(entry[1], entry[2])
                elif entry[0] == "define":
                    blaster.define(entry[1], entry[3])
                else:
                    blaster.assert_form(entry[1])
        result = solver.solve()
        if result:
            self.blaster = blaster
            self.reply("sat")
        else:
            self.blaster = None
            self.reply("unsat")

    def _model_env(self) -> dict:
        if self.blaster is None:
            raise CommandError("no model available; call check-sat first")
        env = {}
        for name, (sort, _) in self.blaster.symbols.items():
            v = self.blaster.model_of(name)
            env[name] = ("bool", v) if sort[0] == "Bool" else ("bv", sort[1], v[0])
        return env

    def _get_value(self, terms: Form) -> None:
        if not isinstance(terms, list):
            raise CommandError("get-value takes a term list")
        env = self._model_env()
        aliases = self.blaster.aliases if self.blaster else {}
        parts = []
        for t in terms:
            v = eval_form(t, env, aliases)
            parts.append(f"({to_text(t)} {format_value(v)})")
        self.reply("(" + " ".join(parts) + ")")

    def _get_model(self) -> None:
        env = self._model_env()
        lines = ["("]
        for name, v in env.items():
            sort = "Bool" if v[0] == "bool" else f"(_ BitVec {v[1]})"
            lines.append(f"  (define-fun {name} () {sort} {format_value(v)})")
        lines.append(")")
        self.reply("\n".join(lines))


def run(stdin: TextIO, stdout: TextIO) -> int:
    server = Server(stdout)
    buffer = ""
    while server.running:
        line = stdin.readline()
        if not line:
            break
        buffer += line
        if not balanced(buffer):
            continue
        try:
            forms = parse_all(buffer)
        except SexprError as exc:
            server.error(str(exc))
            buffer = ""
            continue
        buffer = ""
        for form in forms:
            server.handle(form)
            if not server.running:
                break
    return 0


def main() -> int:
    return run(sys.stdin, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
