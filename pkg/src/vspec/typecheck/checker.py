"""Bidirectional checking that elaborates terms and emits constraints.

The checker never solves anything itself beyond weak-head normalising the
expected type with whatever the store already knows; all unification is
deferred to the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from vspec.core.builtins import NLit, StdOp
from vspec.core.ops import shift, instantiate, whnf
from vspec.core.pretty import Printer
from vspec.core.syntax import (
    App,
    Builtin,
    Decl,
    Expr,
    Function,
    Hole,
    InstanceMeta,
    Lam,
    Meta,
    Network,
    Parameter,
    Pi,
    Property,
    Ref,
    Universe,
    Var,
    Vis,
)
from vspec.errors import NotAFunction, Span, TypeMismatch, UnboundVariable
from vspec.typecheck.alphabet import TypableAlphabet
from vspec.typecheck.constraints import BooleansInstance, Coerce, Constraint, MetaStore, NatLiteral, Unify


@dataclass
class DeclContext:
    """Elaborated types of the declarations checked so far, plus the shared meta store."""

    types: dict[str, Expr] = field(default_factory=dict)
    store: MetaStore = field(default_factory=MetaStore)


class Checker:
    def __init__(self, ctx: DeclContext, alphabet: TypableAlphabet):
        self.ctx = ctx
        self.store = ctx.store
        self.alpha = alphabet
        self.constraints: list[Constraint] = []
        # binder name at each depth of the term being checked, for diagnostics
        self.names: list[str] = []

    # -- utilities ---------------------------------------------------------

    def whnf(self, e: Expr) -> Expr:
        return whnf(e, self.store, self.alpha.reduce)

    def show(self, e: Expr, depth: int = 0) -> str:
        return Printer(self.alpha.describe).expr(self.store.apply(e), self.names[:depth])

    def bind(self, depth: int, name: str) -> None:
        del self.names[depth:]
        self.names.append(name)

    def unify(self, actual: Expr, expected: Expr, depth: int, span: Span | None) -> None:
        self.constraints.append(Unify(actual, expected, depth, span=span))

    def fresh_for(self, vis: Vis, dom: Expr, span: Span | None) -> Expr:
        if vis is Vis.INSTANCE:
            m = self.store.fresh_instance(span)
            self.constraints.append(BooleansInstance(m.id, span=span))
            return m
        return self.store.fresh_meta(span)

    def insert_implicits(self, e: Expr, ty: Expr, span: Span | None) -> tuple[Expr, Expr]:
        while True:
            w = self.whnf(ty)
            if not (isinstance(w, Pi) and w.vis is not Vis.EXPLICIT):
                return e, ty
            m = self.fresh_for(w.vis, w.dom, span)
            e = App(e, m, w.vis, span)
            ty = instantiate(w.cod, m)

    # -- inference ---------------------------------------------------------

    def infer(self, env: list[Expr], e: Expr, insert: bool = True) -> tuple[Expr, Expr]:
        span = getattr(e, "span", None)
        match e:
            case Universe():
                return e, Universe()
            case Var(ix):
                if ix >= len(env):
                    raise UnboundVariable(f"#{ix}", span)
                return e, shift(env[-1 - ix], ix + 1)
            case Ref(name):
                if name not in self.ctx.types:
                    raise UnboundVariable(name, span)
                ty = self.ctx.types[name]
                return self.insert_implicits(e, ty, span) if insert else (e, ty)
            case Builtin(b):
                if isinstance(self.alpha.as_std(b), NLit):
                    ty = self.store.fresh_meta(span)
                    return self.check(env, e, ty), ty
                ty = self.alpha.type_of(b)
                return self.insert_implicits(e, ty, span) if insert else (e, ty)
            case Meta() | Hole():
                m = self.store.fresh_meta(span) if isinstance(e, Hole) else e
                return m, self.store.fresh_meta(span)
            case InstanceMeta():
                return e, self.alpha.instance_class() or Universe()
            case Pi(name, dom, cod, vis):
                dom2 = self.check_type(env, dom)
                self.bind(len(env), name)
                cod2 = self.check_type(env + [dom2], cod)
                return Pi(name, dom2, cod2, vis, span), Universe()
            case Lam(name, ann, body, vis):
                ann2 = self.check_type(env, ann)
                self.bind(len(env), name)
                body2, bty = self.infer(env + [ann2], body)
                return Lam(name, ann2, body2, vis, span), Pi(name, ann2, bty, vis)
            case App(fn, arg, vis):
                fn2, fty = self.infer(env, fn, insert=vis is Vis.EXPLICIT)
                w = self.whnf(fty)
                if isinstance(w, Meta) and vis is Vis.EXPLICIT:
                    dom, cod = self.store.fresh_meta(span), self.store.fresh_meta(span)
                    self.unify(w, Pi("_", dom, cod), len(env), span)
                    w = Pi("_", dom, cod)
                if not isinstance(w, Pi):
                    d = len(env)
                    raise NotAFunction(f"{self.show(fn2, d)} has type {self.show(fty, d)} and cannot be applied", span)
                if w.vis is not vis:
                    raise TypeMismatch(f"argument visibility {vis.value} does not match {w.vis.value} binder", span)
                arg2 = self.check(env, arg, w.dom)
                out, rty = App(fn2, arg2, vis, span), instantiate(w.cod, arg2)
                return self.insert_implicits(out, rty, span) if insert else (out, rty)
        raise TypeError(f"cannot infer {e!r}")

    # -- checking ----------------------------------------------------------

    def check_type(self, env: list[Expr], t: Expr) -> Expr:
        if isinstance(t, Hole):
            return self.store.fresh_meta(t.span)
        return self.check(env, t, Universe())

    def check(self, env: list[Expr], e: Expr, ty: Expr) -> Expr:
        span = getattr(e, "span", None)
        if isinstance(e, Lam):
            w = self.whnf(ty)
            if isinstance(w, Pi) and w.vis is e.vis:
                if isinstance(e.ann, Hole):
                    ann2 = w.dom
                else:
                    ann2 = self.check_type(env, e.ann)
                    self.unify(ann2, w.dom, len(env), span)
                self.bind(len(env), e.name)
                body2 = self.check(env + [ann2], e.body, w.cod)
                return Lam(e.name, ann2, body2, e.vis, span)
        if isinstance(e, Builtin):
            lit = self.alpha.as_std(e.b)
            if isinstance(lit, NLit):
                return self.literal(lit.value, ty, span)
        e2, actual = self.infer(env, e)
        if self.may_coerce(actual, ty):
            m = self.store.fresh_meta(span)
            self.constraints.append(Coerce(actual, ty, len(env), m.id, span=span))
            return App(m, e2, Vis.EXPLICIT, span)
        self.unify(actual, ty, len(env), span)
        return e2

    def may_coerce(self, actual: Expr, expected: Expr) -> bool:
        """Whether a Boolean-sorted term might need lifting into a propositional position."""
        if self.alpha.lift() is None:
            return False
        a, x = self.whnf(actual), self.whnf(expected)
        if "other" in (self.alpha.sort_of(a), self.alpha.sort_of(x)):
            return False
        return a != x

    def literal(self, value: int, ty: Expr, span: Span | None) -> Expr:
        term = self.store.fresh_meta(span)
        self.constraints.append(NatLiteral(value, ty, term.id, span=span))
        return term

    # -- declarations ------------------------------------------------------

    def decl(self, d: Decl) -> Decl:
        match d:
            case Function(name, ty, body, alias):
                ty2 = self.check_type([], ty)
                body2 = self.check([], body, ty2)
                return Function(name, ty2, body2, alias, d.span)
            case Network(name, ty):
                return Network(name, self.check_type([], ty), d.span)
            case Parameter(name, ty):
                return Parameter(name, self.check_type([], ty), d.span)
            case Property(name, body):
                return Property(name, self.check([], body, self.alpha.property_sort()), d.span)
        raise TypeError(d)


def check_decl(ctx: DeclContext, d: Decl, alphabet: TypableAlphabet) -> tuple[Decl, list[Constraint]]:
    """Elaborate one (already converted) declaration, returning it with its constraints."""
    c = Checker(ctx, alphabet)
    out = c.decl(d)
    return out, c.constraints


def std_is(alphabet: TypableAlphabet, e: Expr, op) -> bool:
    return isinstance(e, Builtin) and alphabet.as_std(e.b) == op


__all__ = ["Checker", "DeclContext", "check_decl", "std_is", "StdOp"]
