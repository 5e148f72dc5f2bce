"""The standard builtin alphabet and its types."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from vspec.core.syntax import App, Builtin, Expr, Pi, Universe, Var, Vis


class StdOp(enum.Enum):
    NAT = "Nat"
    LIST = "List"
    NIL = "Nil"
    CONS = "Cons"
    REAL = "Real"
    BOOL = "Bool"
    INDEX = "Index"
    IF = "If"
    TENSOR = "Tensor"
    FORALL = "Forall"
    LOOKUP = "Lookup"
    LEQ = "Leq"
    LT = "Lt"
    EQ = "Eq"
    NEQ = "Neq"
    NOT = "Not"
    AND = "And"
    OR = "Or"
    IMPLIES = "Implies"
    ADD = "Add"
    SUB = "Sub"
    MUL = "Mul"
    DIV = "Div"
    NEG = "Neg"

    def __repr__(self) -> str:
        return self.value


@dataclass(frozen=True)
class NLit:
    value: int
    # set once the literal has been resolved at ``Index bound``; display only
    index_bound: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("natural literal must be non-negative")


@dataclass(frozen=True)
class BLit:
    value: bool


@dataclass(frozen=True)
class TLit:
    shape: tuple[int, ...]
    elems: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.elems) != prod(self.shape):
            raise ValueError(f"tensor literal of shape {list(self.shape)} needs {prod(self.shape)} elements")

    @staticmethod
    def scalar(q) -> TLit:
        return TLit((), (Fraction(q),))


@dataclass(frozen=True)
class Stack:
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("Stack arity must be at least 1")


StandardBuiltin = StdOp | NLit | BLit | TLit | Stack

BOOLEAN_OPS = frozenset({StdOp.NOT, StdOp.AND, StdOp.OR, StdOp.IMPLIES})
COMPARISONS = frozenset({StdOp.LEQ, StdOp.LT, StdOp.EQ, StdOp.NEQ})
ARITH = frozenset({StdOp.ADD, StdOp.SUB, StdOp.MUL, StdOp.DIV})


# ---------------------------------------------------------------------------
# Type construction over an arbitrary embedding of the standard builtins.
# ``wrap`` turns a standard builtin into the alphabet's builtin payload so
# other alphabets can reuse these types unchanged.


def _ident(b):
    return b


class TypeBuilder:
    def __init__(self, wrap=_ident, bool_sort: Expr | None = None):
        self.wrap = wrap
        self._bool = bool_sort

    def b(self, op) -> Expr:
        return Builtin(self.wrap(op))

    @property
    def nat(self) -> Expr:
        return self.b(StdOp.NAT)

    @property
    def bool(self) -> Expr:
        return self._bool if self._bool is not None else self.b(StdOp.BOOL)

    def list_of(self, t: Expr) -> Expr:
        return App(self.b(StdOp.LIST), t)

    def tensor(self, ds: Expr) -> Expr:
        return App(App(self.b(StdOp.TENSOR), self.b(StdOp.REAL)), ds)

    def index(self, n: Expr) -> Expr:
        return App(self.b(StdOp.INDEX), n)

    def cons(self, d: Expr, ds: Expr) -> Expr:
        return App(App(App(self.b(StdOp.CONS), self.nat, Vis.IMPLICIT), d), ds)

    def nil(self) -> Expr:
        return App(self.b(StdOp.NIL), self.nat, Vis.IMPLICIT)

    def shape(self, dims) -> Expr:
        e = self.nil()
        for d in reversed(tuple(dims)):
            e = self.cons(self.b(NLit(d)), e)
        return e


def arr(dom: Expr, cod: Expr) -> Pi:
    """Arrow whose codomain is already expressed under the new binder."""
    return Pi("_", dom, cod)


def std_type(b, tb: TypeBuilder | None = None) -> Expr:
    """Closed type of a standard builtin, expressed through ``tb``."""
    tb = tb or TypeBuilder()
    U = Universe()
    ln = tb.list_of(tb.nat)
    match b:
        case NLit():
            return tb.nat
        case BLit():
            return tb.bool
        case TLit(shape=shape):
            return tb.tensor(tb.shape(shape))
        case Stack(arity=n):
            # {ds} -> T ds -> ... -> T (n :: ds); the k-th arrow sits under k binders
            res: Expr = tb.tensor(tb.cons(tb.b(NLit(n)), Var(n)))
            for k in reversed(range(n)):
                res = arr(tb.tensor(Var(k)), res)
            return Pi("ds", ln, res, Vis.IMPLICIT)
    match b:
        case StdOp.NAT | StdOp.REAL | StdOp.BOOL:
            return U
        case StdOp.LIST:
            return arr(U, U)
        case StdOp.INDEX:
            return arr(tb.nat, U)
        case StdOp.TENSOR:
            return arr(U, arr(ln, U))
        case StdOp.NIL:
            return Pi("t", U, tb.list_of(Var(0)), Vis.IMPLICIT)
        case StdOp.CONS:
            return Pi("t", U, arr(Var(0), arr(tb.list_of(Var(1)), tb.list_of(Var(2)))), Vis.IMPLICIT)
        case StdOp.IF:
            return Pi("t", U, arr(tb.bool, arr(Var(1), arr(Var(2), Var(3)))), Vis.IMPLICIT)
        case StdOp.FORALL:
            return Pi("ds", ln, arr(arr(tb.tensor(Var(0)), tb.bool), tb.bool), Vis.IMPLICIT)
        case StdOp.LOOKUP:
            body = arr(tb.tensor(tb.cons(Var(1), Var(0))), arr(tb.index(Var(2)), tb.tensor(Var(2))))
            return Pi("d", tb.nat, Pi("ds", ln, body, Vis.IMPLICIT), Vis.IMPLICIT)
        case StdOp.NOT:
            return arr(tb.bool, tb.bool)
        case StdOp.AND | StdOp.OR | StdOp.IMPLIES:
            return arr(tb.bool, arr(tb.bool, tb.bool))
        case StdOp.LEQ | StdOp.LT | StdOp.EQ | StdOp.NEQ:
            return Pi("ds", ln, arr(tb.tensor(Var(0)), arr(tb.tensor(Var(1)), tb.bool)), Vis.IMPLICIT)
        case StdOp.ADD | StdOp.SUB | StdOp.MUL | StdOp.DIV:
            return Pi("ds", ln, arr(tb.tensor(Var(0)), arr(tb.tensor(Var(1)), tb.tensor(Var(2)))), Vis.IMPLICIT)
        case StdOp.NEG:
            return Pi("ds", ln, arr(tb.tensor(Var(0)), tb.tensor(Var(1))), Vis.IMPLICIT)
    raise TypeError(f"not a standard builtin: {b!r}")


def all_standard_samples() -> list:
    """One representative of every standard builtin constructor."""
    return list(StdOp) + [NLit(0), NLit(7), BLit(True), BLit(False), TLit.scalar(Fraction(13, 4)), TLit((2,), (Fraction(1), Fraction(2))), Stack(1), Stack(3)]
