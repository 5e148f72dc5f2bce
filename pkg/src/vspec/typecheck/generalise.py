"""Pi-abstraction of a declaration over its unsolved Booleans instance metas."""

from __future__ import annotations

from dataclasses import replace

from vspec.core.ops import instance_metas_in, transform
from vspec.core.syntax import Decl, Expr, Function, InstanceMeta, Lam, Network, Parameter, Pi, Property, Universe, Var, Vis
from vspec.errors import UnresolvableConstraint
from vspec.typecheck.alphabet import TypableAlphabet
from vspec.typecheck.constraints import BooleansInstance, Constraint, MetaStore, NatLiteral, Unify


def describe_constraint(c: Constraint) -> str:
    match c:
        case Unify():
            return "unsolved unification constraint"
        case NatLiteral(value=v):
            return f"cannot determine the type of literal {v}"
        case BooleansInstance(meta=m):
            return f"unsolved Booleans instance ?{m}"
    return repr(c)


def _abstract(e: Expr, ids: list[int]) -> Expr:
    n = len(ids)
    pos = {m: j for j, m in enumerate(ids)}

    def f(node, depth):
        if isinstance(node, InstanceMeta) and node.id in pos:
            return Var(depth + n - 1 - pos[node.id], node.span)
        return None

    return transform(e, f)


def _binder_name(j: int) -> str:
    return "i" if j == 0 else f"i{j}"


def generalise(
    d: Decl, unsolved: list[Constraint], store: MetaStore, alphabet: TypableAlphabet
) -> Decl:
    """Abstract ``d`` over unsolved Booleans metas occurring in its type.

    Metas that only occur in the body are defaulted to the Boolean-level
    instance, since no caller can observe the choice.
    """
    for c in unsolved:
        if not isinstance(c, BooleansInstance):
            raise UnresolvableConstraint(describe_constraint(c), c.span)
    pending = {c.meta for c in unsolved if store.instance_solution(c.meta) is None}
    if not pending:
        return d
    d = _zonk_decl(d, store)
    in_type = [m for m in instance_metas_in(_decl_type(d)) if m in pending]
    in_body = [m for m in instance_metas_in(_decl_body(d)) if m in pending and m not in in_type]
    if isinstance(d, (Network, Parameter)):
        # opaque declarations cannot be specialised, so their Booleans are values
        in_body, in_type = in_type + in_body, []
    for m in in_body:
        store.solve_instance(m, alphabet.instance_term("BI"))
    d = _zonk_decl(d, store)
    if not in_type:
        return d
    cls = alphabet.instance_class()
    match d:
        case Function(name, ty, body, alias):
            ty2, body2 = _abstract(ty, in_type), _abstract(body, in_type)
            for j in reversed(range(len(in_type))):
                ty2 = Pi(_binder_name(j), cls, ty2, Vis.INSTANCE)
                body2 = Lam(_binder_name(j), cls, body2, Vis.INSTANCE)
            return Function(name, ty2, body2, alias, d.span)
    return d


def _decl_type(d: Decl) -> Expr:
    return Universe() if isinstance(d, Property) else d.type


def _decl_body(d: Decl) -> Expr:
    match d:
        case Function(body=b) | Property(body=b):
            return b
    return d.type


def _zonk_decl(d: Decl, store: MetaStore) -> Decl:
    match d:
        case Function():
            return replace(d, type=store.apply(d.type), body=store.apply(d.body))
        case Property():
            return replace(d, body=store.apply(d.body))
    return replace(d, type=store.apply(d.type))


zonk_decl = _zonk_decl
