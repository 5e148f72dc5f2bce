"""``type_decl`` and ``type_spec``: convert, check, solve, substitute, generalise, monomorphise."""

from __future__ import annotations

from dataclasses import replace

from vspec.core.builtins import NLit, StdOp
from vspec.core.ops import free_vars, has_unknowns, map_builtins, whnf
from vspec.core.pretty import pretty
from vspec.core.syntax import Builtin, Decl, Expr, Function, Network, Pi, Property, Spec, Vis, spine
from vspec.errors import NetworkTypeInvalid, UnresolvableConstraint
from vspec.typecheck.alphabet import STANDARD, TypableAlphabet
from vspec.typecheck.checker import DeclContext, check_decl
from vspec.typecheck.constraints import BooleansInstance, Constraint, NatLiteral, Unify
from vspec.typecheck.generalise import describe_constraint, generalise, zonk_decl
from vspec.typecheck.monomorphise import monomorphise
from vspec.typecheck.solver import solve_constraints


def convert_decl(d: Decl, alphabet: TypableAlphabet) -> Decl:
    conv = alphabet.convert
    if isinstance(d, Function):
        return replace(d, type=map_builtins(d.type, conv), body=map_builtins(d.body, conv))
    if isinstance(d, Property):
        return replace(d, body=map_builtins(d.body, conv))
    return replace(d, type=map_builtins(d.type, conv))


def concrete_shape(e: Expr, alphabet: TypableAlphabet) -> tuple[int, ...] | None:
    dims = []
    while True:
        e = whnf(e, reduce=alphabet.reduce)
        head, args = spine(e)
        explicit = [a for a, v in args if v is Vis.EXPLICIT]
        op = alphabet.as_std(head.b) if isinstance(head, Builtin) else None
        if op is StdOp.NIL and not explicit:
            return tuple(dims)
        if op is StdOp.CONS and len(explicit) == 2:
            d = whnf(explicit[0], reduce=alphabet.reduce)
            lit = alphabet.as_std(d.b) if isinstance(d, Builtin) else None
            if not isinstance(lit, NLit):
                return None
            dims.append(lit.value)
            e = explicit[1]
            continue
        return None


def tensor_shape(t: Expr, alphabet: TypableAlphabet) -> tuple[int, ...] | None:
    """Concrete shape of ``Tensor Real ds``, or None."""
    t = whnf(t, reduce=alphabet.reduce)
    head, args = spine(t)
    explicit = [a for a, v in args if v is Vis.EXPLICIT]
    if not (isinstance(head, Builtin) and alphabet.as_std(head.b) is StdOp.TENSOR and len(explicit) == 2):
        return None
    elem = whnf(explicit[0], reduce=alphabet.reduce)
    if not (isinstance(elem, Builtin) and alphabet.as_std(elem.b) is StdOp.REAL):
        return None
    return concrete_shape(explicit[1], alphabet)


def network_signature(t: Expr, alphabet: TypableAlphabet) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    t = whnf(t, reduce=alphabet.reduce)
    if not (isinstance(t, Pi) and t.vis is Vis.EXPLICIT):
        return None
    if 0 in free_vars(t.cod):
        return None
    ins, outs = tensor_shape(t.dom, alphabet), tensor_shape(t.cod, alphabet)
    if ins is None or outs is None:
        return None
    return ins, outs


class SpecTyper:
    """Types declarations in order over one shared meta store."""

    def __init__(self, alphabet: TypableAlphabet, ctx: DeclContext | None = None):
        self.alpha = alphabet
        self.ctx = ctx or DeclContext()
        self.residual: list[Constraint] = []
        self.decls: list[Decl] = []

    def type_decl(self, d: Decl, defer: bool = True) -> Decl:
        converted = convert_decl(d, self.alpha)
        checked, cs = check_decl(self.ctx, converted, self.alpha)
        store, unsolved = solve_constraints(self.residual + cs, self.ctx.store, self.alpha)
        substituted = zonk_decl(checked, store)
        booleans = [c for c in unsolved if isinstance(c, BooleansInstance)]
        others = [c for c in unsolved if not isinstance(c, BooleansInstance)]
        if others and not defer:
            raise UnresolvableConstraint(describe_constraint(others[0]), others[0].span)
        self.residual = others
        out = generalise(substituted, booleans, store, self.alpha)
        if isinstance(out, Network) and not has_unknowns(out.type):
            self.check_network(out)
        self.ctx.types[out.name] = _decl_type(out, self.alpha)
        self.decls.append(out)
        return out

    def check_network(self, d: Network) -> None:
        if network_signature(d.type, self.alpha) is None:
            shown = pretty(d.type, self.alpha.describe)
            raise NetworkTypeInvalid(f"network '{d.name}' must have type Tensor Real ds1 -> Tensor Real ds2, not {shown}", d.span)

    def finish(self) -> list[Decl]:
        """Default leftover literals to Nat and check that nothing remains unknown."""
        store = self.ctx.store
        _, left = solve_constraints(self.residual, store, self.alpha)
        if left:
            nat = self.alpha.std(StdOp.NAT)
            defaults = [Unify(c.type, nat, 0, span=c.span) for c in left if isinstance(c, NatLiteral)]
            _, left = solve_constraints(defaults + left, store, self.alpha)
        if left:
            raise UnresolvableConstraint(describe_constraint(left[0]), left[0].span)
        self.residual = []
        out = []
        for d in self.decls:
            z = zonk_decl(d, store)
            for part in _parts(z):
                if has_unknowns(part):
                    raise UnresolvableConstraint(f"could not infer a complete type for '{d.name}'", d.span)
            if isinstance(z, Network):
                self.check_network(z)
            self.ctx.types[z.name] = _decl_type(z, self.alpha)
            out.append(z)
        self.decls = out
        return out


def _parts(d: Decl) -> list[Expr]:
    if isinstance(d, Function):
        return [d.type, d.body]
    if isinstance(d, Property):
        return [d.body]
    return [d.type]


def _decl_type(d: Decl, alphabet: TypableAlphabet) -> Expr:
    return alphabet.property_sort() if isinstance(d, Property) else d.type


def type_decl(ctx: DeclContext, d: Decl, alphabet: TypableAlphabet = STANDARD) -> Decl:
    """Type one standard-alphabet declaration on its own; every non-instance constraint must be solved."""
    t = SpecTyper(alphabet, ctx)
    t.type_decl(d, defer=False)
    return t.finish()[0]


def type_spec(s: Spec, alphabet: TypableAlphabet = STANDARD) -> Spec:
    t = SpecTyper(alphabet)
    for d in s.decls:
        t.type_decl(d)
    decls = t.finish()
    return monomorphise(Spec(tuple(decls), dict(s.origins)), alphabet)


__all__ = ["type_decl", "type_spec", "SpecTyper", "network_signature", "tensor_shape", "concrete_shape"]
