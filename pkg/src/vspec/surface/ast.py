"""Surface syntax tree. Spans are excluded from equality so parsed trees compare structurally."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from vspec.errors import Span

_span = dict(default=None, compare=False, repr=False)

BINARY_OPS = ("=>", "or", "and", "<=", "<", ">=", ">", "==", "!=", "+", "-", "*", "/")
COMPARISON_OPS = ("<=", "<", ">=", ">", "==", "!=")


# --- types -----------------------------------------------------------------


@dataclass(frozen=True)
class TName:
    """``Bool``, ``Real`` or a type alias."""

    name: str
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class TArrow:
    dom: SType
    cod: SType
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class TTensor:
    elem: SType
    dims: tuple[int, ...]
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class TIndex:
    size: int
    span: Span | None = field(**_span)


SType = Union[TName, TArrow, TTensor, TIndex]


# --- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class SVar:
    name: str
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class SApp:
    fn: SExpr
    arg: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Not:
    arg: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: SExpr
    rhs: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Negate:
    arg: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Lookup:
    tensor: SExpr
    index: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Forall:
    binder: str
    body: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class IfThenElse:
    cond: SExpr
    then: SExpr
    orelse: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Let:
    binder: str
    bound: SExpr
    body: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class VecLiteral:
    items: tuple[SExpr, ...]
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class NatLit:
    value: int
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class RealLit:
    """Exact decimal literal; ``Fraction`` keeps it gcd-reduced with a positive denominator."""

    value: Fraction
    span: Span | None = field(**_span)


SExpr = Union[SVar, SApp, Not, BinOp, Negate, Lookup, Forall, IfThenElse, Let, VecLiteral, BoolLit, NatLit, RealLit]


# --- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class FunctionDef:
    name: str
    type: SType | None
    params: tuple[str, ...]
    body: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class NetworkDecl:
    name: str
    type: SType
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class ParameterDecl:
    names: tuple[str, ...]
    type: SType
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class PropertyDecl:
    name: str
    body: SExpr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class TypeAlias:
    name: str
    type: SType
    span: Span | None = field(**_span)


SurfaceDecl = Union[FunctionDef, NetworkDecl, ParameterDecl, PropertyDecl, TypeAlias]


def declared_names(d: SurfaceDecl) -> tuple[str, ...]:
    return d.names if isinstance(d, ParameterDecl) else (d.name,)


@dataclass(frozen=True)
class SurfaceSpec:
    decls: tuple[SurfaceDecl, ...] = ()
    source: str = field(default="", compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.decls)

    def source_map(self) -> dict[str, Span | None]:
        return {n: d.span for d in self.decls for n in declared_names(d)}
