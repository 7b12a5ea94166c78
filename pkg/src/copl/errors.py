"""Error hierarchy shared by every stage of the interpreter.

Static errors (lexing, parsing, resolution) map to exit code 2, runtime
faults to exit code 1.
"""

from __future__ import annotations


class CoplError(Exception):
    exit_code = 1

    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    @property
    def kind(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        if self.pos is None:
            return f"{self.kind}: {self.message}"
        return f"{self.pos[0]}:{self.pos[1]}: {self.kind}: {self.message}"


class StaticError(CoplError):
    exit_code = 2


class LexError(StaticError):
    pass


class ParseError(StaticError):
    def __init__(self, message, pos=None, expected=None, found=None):
        super().__init__(message, pos)
        self.expected = expected
        self.found = found


class ResolveError(StaticError):
    """Analyzer failure; ``reason`` is a short stable tag such as ``inclusion cycle``."""

    def __init__(self, reason: str, message: str, pos=None):
        super().__init__(f"{reason}: {message}", pos)
        self.reason = reason


class RuntimeFault(CoplError):
    exit_code = 1


class NoIncomingMethod(RuntimeFault):
    pass


class NoOutgoingMethod(RuntimeFault):
    pass


class NoChildSegment(RuntimeFault):
    pass


class DepthExceeded(RuntimeFault):
    pass


class NotInstantiable(RuntimeFault):
    pass


class ParentMismatch(RuntimeFault):
    pass


class ArityOrTypeError(RuntimeFault):
    pass


class CharArrayOverflow(RuntimeFault):
    pass


class UnknownField(RuntimeFault):
    pass


class NotAnObject(UnknownField):
    """Auto property touched through a plain value, which has no storage."""


class MissingAccessor(RuntimeFault):
    pass


class UndefinedVariable(RuntimeFault):
    pass


class DivisionByZero(RuntimeFault):
    pass


class AssignToSegmentField(RuntimeFault):
    pass


class AssertionFailed(RuntimeFault):
    pass
