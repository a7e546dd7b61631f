"""Client for an SMT-LIB v2 solver subprocess.

Any solver that reads SMT-LIB on stdin and answers on stdout works (z3,
cvc5, the bundled compover-smt). Commands without a response are followed by
an echo marker so declaration errors surface immediately instead of
desynchronizing the stream; a wall-clock deadline guards every read and a
breach kills the process.
"""

from __future__ import annotations

import queue
import subprocess
import sys
import threading
from typing import Optional, Sequence

from .sexpr import balanced, parse_one, to_text

_SYNC = "@sync"


class SolverError(Exception):
    def __init__(self, message: str, timeout: bool = False):
        super().__init__(message)
        self.timeout = timeout


def default_solver_command() -> list[str]:
    """The bundled solver, run as a module of this interpreter."""
    return [sys.executable, "-m", "compover.smt.server"]


class SolverSession:
    def __init__(self, command: Optional[Sequence[str]] = None, timeout: float = 120.0):
        self.command = list(command) if command else default_solver_command()
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
            )
        except OSError as exc:
            raise SolverError(f"cannot start solver {self.command[0]!r}: {exc}") from None
        self.lines: queue.Queue = queue.Queue()
        self.reader = threading.Thread(target=self._pump, daemon=True)
        self.reader.start()

    def _pump(self) -> None:
        try:
            for line in self.proc.stdout:  # type: ignore[union-attr]
                self.lines.put(line.rstrip("\n"))
        except ValueError:
            pass
        self.lines.put(None)

    def _read_line(self) -> str:
        try:
            line = self.lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise SolverError(f"solver timed out after {self.timeout}s", timeout=True) from None
        if line is None:
            raise SolverError("solver process ended unexpectedly")
        return line

    def _write(self, text: str) -> None:
        if self.proc.poll() is not None:
            raise SolverError("solver process has exited")
        try:
            self.proc.stdin.write(text + "\n")  # type: ignore[union-attr]
            self.proc.stdin.flush()  # type: ignore[union-attr]
        except (BrokenPipeError, OSError) as exc:
            raise SolverError(f"cannot write to solver: {exc}") from None

    def send(self, text: str) -> None:
        """Send commands that produce no output; errors are surfaced via a sync echo."""
        self._write(text)
        self._write(f'(echo "{_SYNC}")')
        while True:
            line = self._read_line()
            if line == _SYNC:
                return
            if line.startswith("(error"):
                raise SolverError(f"solver error: {line}")
            # ignore solver chatter (e.g. success lines)

    def check_sat(self) -> str:
        self._write("(check-sat)")
        while True:
            line = self._read_line().strip()
            if line in ("sat", "unsat", "unknown"):
                return line
            if line.startswith("(error"):
                raise SolverError(f"solver error: {line}")

    def get_value(self, terms: Sequence[str]) -> list[str]:
        """Raw value texts, in the order of the requested terms."""
        self._write("(get-value (" + " ".join(terms) + "))")
        text = ""
        while True:
            line = self._read_line()
            if line.startswith("(error"):
                raise SolverError(f"solver error: {line}")
            text += line + "\n"
            if balanced(text):
                break
        form = parse_one(text)
        if not isinstance(form, list) or len(form) != len(terms):
            raise SolverError(f"malformed get-value response: {text.strip()}")
        out = []
        for entry in form:
            if not isinstance(entry, list) or len(entry) != 2:
                raise SolverError(f"malformed get-value entry in: {text.strip()}")
            value = entry[1]
            out.append(value if isinstance(value, str) else to_text(value))
        return out

    def push(self) -> None:
        self.send("(push 1)")

    def pop(self) -> None:
        self.send("(pop 1)")

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.write("(exit)\n")  # type: ignore[union-attr]
                self.proc.stdin.flush()  # type: ignore[union-attr]
            except (BrokenPipeError, OSError, ValueError):
                pass
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def parse_value(text: str) -> tuple:
    """Decode a solver value literal: true/false, #b..., #x..., (_ bvN w)."""
    if text == "true":
        return ("bool", True)
    if text == "false":
        return ("bool", False)
    if text.startswith("#b"):
        return ("bv", len(text) - 2, int(text[2:], 2))
    if text.startswith("#x"):
        return ("bv", 4 * (len(text) - 2), int(text[2:], 16))
    form = parse_one(text)
    if isinstance(form, list) and len(form) == 3 and form[0] == "_" and form[1].startswith("bv"):
        return ("bv", int(form[2]), int(form[1][2:]))
    raise SolverError(f"cannot parse model value {text!r}")
