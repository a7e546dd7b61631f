"""Errors raised by the contract expression language."""

from __future__ import annotations


class IlError(Exception):
    """Base class for all expression-language errors."""


class IlSyntaxError(IlError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class IlTypeError(IlError):
    pass


class UnknownVariable(IlError):
    def __init__(self, name: str):
        super().__init__(f"unknown variable '{name}'")
        self.name = name


class OldInPrecondition(IlError):
    def __init__(self, name: str):
        super().__init__(f"old({name}) is not allowed in a precondition")
        self.name = name


class MissingPostState(IlError):
    def __init__(self, name: str):
        super().__init__(f"evaluation of '{name}' requires a post-state assignment")
        self.name = name
