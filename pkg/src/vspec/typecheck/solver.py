"""Fixpoint constraint solver: first-order unification plus instance resolution."""

from __future__ import annotations

from vspec.core.builtins import NLit, StdOp, TLit
from vspec.core.ops import free_vars, whnf
from vspec.core.pretty import pretty
from vspec.core.syntax import App, Builtin, Expr, InstanceMeta, Lam, Meta, Pi, Universe, Var, Vis, spine
from vspec.errors import IndexOutOfBounds, ShapeMismatch, TypeMismatch, UnificationFailure
from vspec.typecheck.alphabet import TypableAlphabet
from vspec.typecheck.constraints import BooleansInstance, Coerce, Constraint, MetaStore, NatLiteral, Unify

_SHAPE_HEADS = (StdOp.CONS, StdOp.NIL)


class Solver:
    def __init__(self, store: MetaStore, alphabet: TypableAlphabet):
        self.store = store
        self.alpha = alphabet

    def whnf(self, e: Expr) -> Expr:
        return whnf(e, self.store, self.alpha.reduce)

    def show(self, e: Expr) -> str:
        return pretty(self.store.apply(e), self.alpha.describe)

    # -- helpers -----------------------------------------------------------

    def std_head(self, e: Expr):
        head, _ = spine(e)
        if isinstance(head, Builtin):
            return self.alpha.as_std(head.b)
        return None

    def is_shape_term(self, e: Expr) -> bool:
        h = self.std_head(e)
        return h in _SHAPE_HEADS or isinstance(h, NLit)

    def stuck_projection(self, e: Expr) -> int | None:
        """Instance meta id if ``e`` is ``boolTC {{?k}}`` with ``?k`` unsolved."""
        if isinstance(e, App) and isinstance(e.fn, Builtin) and self.alpha.is_sort_projection(e.fn.b):
            arg = self.whnf(e.arg)
            if isinstance(arg, InstanceMeta):
                return arg.id
        return None

    def mismatch(self, c: Unify, lhs: Expr, rhs: Expr) -> TypeMismatch:
        a, b = c.origin if c.origin is not None else (c.lhs, c.rhs)
        cls = ShapeMismatch if self.is_shape_term(lhs) or self.is_shape_term(rhs) else UnificationFailure
        if cls is ShapeMismatch:
            msg = f"shape mismatch: {self.show(lhs)} is not {self.show(rhs)} (in {self.show(a)} vs {self.show(b)})"
        else:
            msg = f"cannot unify {self.show(a)} with {self.show(b)}"
        return cls(msg, c.span, expected=self.show(b), actual=self.show(a))

    # -- steps -------------------------------------------------------------

    def step(self, c: Constraint) -> list[Constraint] | None:
        """New constraints on progress (possibly empty), None when stuck."""
        match c:
            case Unify():
                return self.unify(c)
            case BooleansInstance(meta=m):
                return [] if self.store.instance_solution(m) is not None else None
            case NatLiteral():
                return self.literal(c)
            case Coerce():
                return self.coerce(c)
        raise TypeError(c)

    def settle(self, c: Coerce, lift: bool) -> list[Constraint]:
        body: Expr = App(self.alpha.lift(), Var(0), Vis.EXPLICIT) if lift else Var(0)
        self.store.solve(c.meta, Lam("b", Universe(), body, Vis.EXPLICIT), c.span)
        return [] if lift else [Unify(c.actual, c.expected, c.depth, span=c.span)]

    def coerce(self, c: Coerce) -> list[Constraint] | None:
        ka = self.alpha.sort_of(self.whnf(c.actual))
        kx = self.alpha.sort_of(self.whnf(c.expected))
        if ka == "BI" and kx == "TI":
            return self.settle(c, lift=True)
        # only BI flows into BI and TI only flows into TI
        if "other" in (ka, kx) or kx == "BI" or ka == "TI" or (ka == kx != "open"):
            return self.settle(c, lift=False)
        return None

    def unify(self, c: Unify) -> list[Constraint] | None:
        lhs, rhs = self.whnf(c.lhs), self.whnf(c.rhs)
        if lhs == rhs:
            return []
        origin = c.origin or (c.lhs, c.rhs)

        def sub(a, b, depth=c.depth):
            return Unify(a, b, depth, span=c.span, origin=origin)

        for x, y in ((lhs, rhs), (rhs, lhs)):
            if isinstance(x, Meta):
                if free_vars(y):
                    raise UnificationFailure(f"cannot solve ?{x.id} with a term mentioning local variables: {self.show(y)}", c.span)
                self.store.solve(x.id, y, c.span)
                return []
        for x, y in ((lhs, rhs), (rhs, lhs)):
            if isinstance(x, InstanceMeta):
                if isinstance(y, InstanceMeta) or self.alpha.instance_tag(y) is not None:
                    self.store.solve_instance(x.id, y, c.span)
                    return []
                raise self.mismatch(c, lhs, rhs)
        kl, kr = self.stuck_projection(lhs), self.stuck_projection(rhs)
        if kl is not None or kr is not None:
            if kl is not None and kr is not None:
                # the projections' arguments may be different metas already solved to the same one
                if kl != kr:
                    self.store.solve_instance(kl, InstanceMeta(kr), c.span)
                return []
            k, other = (kl, rhs) if kl is not None else (kr, lhs)
            inst = self.alpha.instance_for_sort(other)
            if inst is None:
                raise self.mismatch(c, lhs, rhs)
            self.store.solve_instance(k, inst, c.span)
            return []
        match lhs, rhs:
            case Pi(), Pi():
                if lhs.vis is not rhs.vis:
                    raise self.mismatch(c, lhs, rhs)
                return [sub(lhs.dom, rhs.dom), sub(lhs.cod, rhs.cod, c.depth + 1)]
            case Lam(), Lam():
                if lhs.vis is not rhs.vis:
                    raise self.mismatch(c, lhs, rhs)
                return [sub(lhs.ann, rhs.ann), sub(lhs.body, rhs.body, c.depth + 1)]
            case App(), App():
                hl, al = spine(lhs)
                hr, ar = spine(rhs)
                if isinstance(self.whnf(hl), Meta) or isinstance(self.whnf(hr), Meta):
                    return None
                if hl != hr or len(al) != len(ar) or any(v1 is not v2 for (_, v1), (_, v2) in zip(al, ar)):
                    raise self.mismatch(c, lhs, rhs)
                return [sub(a, b) for (a, _), (b, _) in zip(al, ar)]
        raise self.mismatch(c, lhs, rhs)

    def literal(self, c: NatLiteral) -> list[Constraint] | None:
        t = self.whnf(c.type)
        if isinstance(t, Meta):
            return None
        head, args = spine(t)
        std = self.alpha.as_std(head.b) if isinstance(head, Builtin) else None
        explicit = [a for a, v in args if v is Vis.EXPLICIT]
        extra: list[Constraint] = []
        if std is StdOp.NAT and not args:
            cand: Expr = self.alpha.std(NLit(c.value))
        elif std is StdOp.INDEX and len(explicit) == 1:
            n = self.whnf(explicit[0])
            if isinstance(n, Meta):
                return None
            nb = self.alpha.as_std(n.b) if isinstance(n, Builtin) else None
            if not isinstance(nb, NLit):
                raise TypeMismatch(f"cannot resolve literal {c.value} at {self.show(t)}", c.span)
            if c.value >= nb.value:
                raise IndexOutOfBounds(c.value, nb.value, c.span)
            cand = self.alpha.std(NLit(c.value, nb.value))
        elif std is StdOp.TENSOR and len(explicit) == 2:
            elem = self.whnf(explicit[0])
            if isinstance(elem, Meta):
                return None
            if not (isinstance(elem, Builtin) and self.alpha.as_std(elem.b) is StdOp.REAL):
                raise TypeMismatch(f"numeric literal {c.value} cannot have type {self.show(t)}", c.span)
            ds = self.whnf(explicit[1])
            dh = self.std_head(ds)
            if isinstance(ds, Meta):
                nil = App(self.alpha.std(StdOp.NIL), self.alpha.std(StdOp.NAT), Vis.IMPLICIT)
                extra.append(Unify(ds, nil, 0, span=c.span))
            elif dh is not StdOp.NIL:
                raise ShapeMismatch(
                    f"numeric literal {c.value} is a scalar but is used at {self.show(t)}", c.span, expected=self.show(t), actual="Real"
                )
            cand = self.alpha.std(TLit.scalar(c.value))
        else:
            raise TypeMismatch(f"numeric literal {c.value} cannot have type {self.show(t)}", c.span, expected=self.show(t), actual="Nat")
        return extra + [Unify(Meta(c.term), cand, 0, span=c.span)]

    # -- driver ------------------------------------------------------------

    def run(self, cs: list[Constraint]) -> list[Constraint]:
        queue = list(cs)
        while True:
            progress = False
            waiting: list[Constraint] = []
            while queue:
                c = queue.pop(0)
                r = self.step(c)
                if r is None:
                    waiting.append(c)
                else:
                    progress = True
                    queue[:0] = r
            if not waiting:
                return waiting
            if not progress:
                # stuck: read the first undecided coercion as the identity and carry on
                k = next((i for i, w in enumerate(waiting) if isinstance(w, Coerce)), None)
                if k is None:
                    return waiting
                waiting[k:k + 1] = self.settle(waiting[k], lift=False)
            queue = waiting


def solve_constraints(cs: list[Constraint], store: MetaStore, alphabet: TypableAlphabet) -> tuple[MetaStore, list[Constraint]]:
    """Solve ``cs`` to a fixpoint, mutating and returning ``store`` with the stuck remainder."""
    return store, Solver(store, alphabet).run(cs)
