from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Half-open byte range into the source text."""

    start: int
    end: int

    def merge(self, other: Span | None) -> Span:
        if other is None:
            return self
        return Span(min(self.start, other.start), max(self.end, other.end))


def line_col(source: str, offset: int) -> tuple[int, int]:
    """1-based line and column of a byte offset in ``source``."""
    data = source.encode("utf-8")[:offset]
    line = data.count(b"\n") + 1
    last_nl = data.rfind(b"\n")
    col = len(data[last_nl + 1 :].decode("utf-8", errors="replace")) + 1
    return line, col


class VspecError(Exception):
    """Base class of every user-facing diagnostic."""

    kind = "error"

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self, path: str = "<input>", source: str | None = None) -> str:
        if self.span is not None and source is not None:
            line, col = line_col(source, self.span.start)
        else:
            line, col = 1, 1
        return f"{path}:{line}:{col}: error: {type(self).__name__}: {self.message}"


class ParseError(VspecError):
    """Syntax error carrying the set of tokens that would have been accepted."""

    def __init__(self, message: str, span: Span | None = None, expected: frozenset[str] = frozenset()):
        if expected:
            message = f"{message} (expected one of: {', '.join(sorted(expected))})"
        super().__init__(message, span)
        self.expected = expected


class DuplicateDeclaration(VspecError):
    pass


class UnboundVariable(VspecError):
    def __init__(self, name: str, span: Span | None = None):
        super().__init__(f"unbound variable '{name}'", span)
        self.name = name


class TypeMismatch(VspecError):
    """Two types that should agree do not."""

    def __init__(self, message: str, span: Span | None = None, expected: str | None = None, actual: str | None = None):
        super().__init__(message, span)
        self.expected = expected
        self.actual = actual


class UnificationFailure(TypeMismatch):
    pass


class ShapeMismatch(TypeMismatch):
    """Two concrete tensor shapes (or index bounds) differ."""


class OccursCheckFailure(VspecError):
    pass


class IndexOutOfBounds(VspecError):
    def __init__(self, value: int, bound: int, span: Span | None = None):
        super().__init__(f"index literal {value} is out of bounds for Index {bound}", span)
        self.value = value
        self.bound = bound


class NotAFunction(VspecError):
    pass


class NetworkTypeInvalid(VspecError):
    pass


class UnresolvableConstraint(VspecError):
    pass


class NonConcreteUse(VspecError):
    pass


class TranslationAmbiguity(VspecError):
    pass
