"""Constraints produced by the checker and the store of metavariable solutions."""

from __future__ import annotations

from dataclasses import dataclass, field

from vspec.core.ops import instance_metas_in, metas_in, zonk
from vspec.core.syntax import Expr, InstanceMeta, Meta
from vspec.errors import OccursCheckFailure, Span


@dataclass
class Constraint:
    span: Span | None = field(default=None, kw_only=True)


@dataclass
class Unify(Constraint):
    lhs: Expr
    rhs: Expr
    depth: int = 0
    # the top-level pair this constraint was decomposed from, for diagnostics
    origin: tuple[Expr, Expr] | None = field(default=None, kw_only=True)


@dataclass
class BooleansInstance(Constraint):
    meta: int


@dataclass
class Coerce(Constraint):
    """``actual`` may flow into ``expected`` through a sort coercion.

    ``meta`` is applied to the elaborated term and is solved to either the
    identity or the lifting function once both sorts are known.
    """

    actual: Expr
    expected: Expr
    depth: int
    meta: int


@dataclass
class NatLiteral(Constraint):
    value: int
    type: Expr
    term: int  # meta standing for the resolved literal term


class MetaStore:
    """Metavariable solutions. Type metas and instance metas share one id space."""

    def __init__(self) -> None:
        self.next_id = 0
        self.solutions: dict[int, Expr] = {}
        self.instances: dict[int, Expr] = {}
        self.spans: dict[int, Span | None] = {}

    def fresh_meta(self, span: Span | None = None) -> Meta:
        m = self.next_id
        self.next_id += 1
        self.spans[m] = span
        return Meta(m, span)

    def fresh_instance(self, span: Span | None = None) -> InstanceMeta:
        m = self.next_id
        self.next_id += 1
        self.spans[m] = span
        return InstanceMeta(m, span)

    def meta_solution(self, m: int) -> Expr | None:
        return self.solutions.get(m)

    def instance_solution(self, m: int) -> Expr | None:
        return self.instances.get(m)

    def _check(self, m: int, e: Expr, span: Span | None) -> Expr:
        e = zonk(e, self)
        if m in metas_in(e) or m in instance_metas_in(e):
            raise OccursCheckFailure(f"?{m} occurs in its own solution", span)
        return e

    def solve(self, m: int, e: Expr, span: Span | None = None) -> None:
        assert m not in self.solutions
        self.solutions[m] = self._check(m, e, span)

    def solve_instance(self, m: int, e: Expr, span: Span | None = None) -> None:
        assert m not in self.instances
        self.instances[m] = self._check(m, e, span)

    def unsolved(self) -> set[int]:
        return {m for m in range(self.next_id) if m not in self.solutions and m not in self.instances}

    def apply(self, e: Expr) -> Expr:
        return zonk(e, self)
