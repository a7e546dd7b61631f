"""S-expression reading and writing for SMT-LIB v2 streams.

Forms are plain Python: atoms are strings, applications are lists. Quoted
symbols |...| and string literals "..." survive round-trips.
"""

from __future__ import annotations

from typing import Iterator, Union

Form = Union[str, list]


class SexprError(Exception):
    pass


def tokenize(text: str) -> Iterator[str]:
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SexprError("unterminated |symbol|")
            yield text[i : j + 1]
            i = j + 1
        elif c == '"':
            j = i + 1
            while True:
                j = text.find('"', j)
                if j < 0:
                    raise SexprError("unterminated string literal")
                if j + 1 < n and text[j + 1] == '"':  # doubled quote escape
                    j += 2
                    continue
                break
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"|':
                j += 1
            yield text[i:j]
            i = j


def parse_all(text: str) -> list[Form]:
    stack: list[list] = []
    out: list[Form] = []
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SexprError("unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise SexprError("unbalanced '('")
    return out


def parse_one(text: str) -> Form:
    forms = parse_all(text)
    if len(forms) != 1:
        raise SexprError(f"expected one form, got {len(forms)}")
    return forms[0]


def to_text(form: Form) -> str:
    if isinstance(form, str):
        return form
    return "(" + " ".join(to_text(f) for f in form) + ")"


def balanced(text: str) -> bool:
    """True when the text closes every paren it opens (ready to parse)."""
    depth = 0
    for tok in tokenize(text):
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth -= 1
            if depth < 0:
                return True  # malformed; let the parser report it
    return depth == 0
