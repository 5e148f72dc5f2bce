"""Core lambda calculus, generic over the builtin alphabet.

Local binders use de Bruijn indices (``Var``); top-level declarations are
referenced by name (``Ref``) so that monomorphisation can add and rename
declarations without reindexing every later term. Binder names and source
spans are display-only and excluded from equality, so ``==`` on two
expressions is alpha-equivalence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Union

from vspec.errors import Span


class Vis(enum.Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    INSTANCE = "instance"


_span = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Universe:
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Pi:
    name: str = field(compare=False)
    dom: Expr
    cod: Expr
    vis: Vis = Vis.EXPLICIT
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Lam:
    name: str = field(compare=False)
    ann: Expr
    body: Expr
    vis: Vis = Vis.EXPLICIT
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class App:
    fn: Expr
    arg: Expr
    vis: Vis = Vis.EXPLICIT
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Var:
    ix: int
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Ref:
    name: str
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Builtin:
    b: Any
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Meta:
    id: int
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class InstanceMeta:
    id: int
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Hole:
    """Unknown annotation left by the surface language; the checker replaces it by a meta."""

    span: Span | None = field(**_span)


Expr = Union[Universe, Pi, Lam, App, Var, Ref, Builtin, Meta, InstanceMeta, Hole]


@dataclass(frozen=True)
class Function:
    name: str
    type: Expr
    body: Expr
    alias: bool = False
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Network:
    name: str
    type: Expr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Parameter:
    name: str
    type: Expr
    span: Span | None = field(**_span)


@dataclass(frozen=True)
class Property:
    name: str
    body: Expr
    span: Span | None = field(**_span)


Decl = Union[Function, Network, Parameter, Property]


@dataclass(frozen=True)
class Specialisation:
    origin: str
    tags: tuple[str, ...]


@dataclass(frozen=True)
class Spec:
    decls: tuple[Decl, ...] = ()
    # specialised name -> where it came from; filled by monomorphisation
    origins: dict[str, Specialisation] = field(default_factory=dict, compare=False)

    def __iter__(self):
        return iter(self.decls)

    def __len__(self):
        return len(self.decls)

    def lookup(self, name: str) -> Decl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def map(self, f) -> Spec:
        return Spec(tuple(f(d) for d in self.decls), dict(self.origins))


# ---------------------------------------------------------------------------
# Construction helpers


def apps(fn: Expr, *args: Expr, vis: Vis = Vis.EXPLICIT) -> Expr:
    for a in args:
        fn = App(fn, a, vis)
    return fn


def arrow(dom: Expr, cod: Expr) -> Pi:
    """Non-dependent function type; ``cod`` is given at the outer depth."""
    from vspec.core.ops import shift

    return Pi("_", dom, shift(cod, 1))


def spine(e: Expr) -> tuple[Expr, list[tuple[Expr, Vis]]]:
    args: list[tuple[Expr, Vis]] = []
    while isinstance(e, App):
        args.append((e.arg, e.vis))
        e = e.fn
    args.reverse()
    return e, args


def explicit_args(e: Expr) -> tuple[Expr, list[Expr]]:
    head, args = spine(e)
    return head, [a for a, v in args if v is Vis.EXPLICIT]


def rebuild(head: Expr, args: list[tuple[Expr, Vis]]) -> Expr:
    for a, v in args:
        head = App(head, a, v)
    return head


def decl_type(d: Decl) -> Expr | None:
    return None if isinstance(d, Property) else d.type


def with_span(e: Expr, span: Span | None) -> Expr:
    if span is None or getattr(e, "span", None) is not None:
        return e
    return replace(e, span=span)
