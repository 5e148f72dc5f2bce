"""Substitution, normalisation and traversal on core terms."""

from __future__ import annotations

from typing import Callable, Iterator

from vspec.core.syntax import (
    App,
    Builtin,
    Expr,
    Hole,
    InstanceMeta,
    Lam,
    Meta,
    Pi,
    Ref,
    Universe,
    Var,
    Vis,
    with_span,
)

Rewrite = Callable[[Expr, int], "Expr | None"]


def transform(e: Expr, f: Rewrite, depth: int = 0) -> Expr:
    """Top-down rewrite: ``f(node, depth)`` may return a replacement, which is not revisited."""
    r = f(e, depth)
    if r is not None:
        return r
    match e:
        case App(fn, arg, vis):
            fn2, arg2 = transform(fn, f, depth), transform(arg, f, depth)
            return e if fn2 is fn and arg2 is arg else App(fn2, arg2, vis, e.span)
        case Pi(name, dom, cod, vis):
            d2, c2 = transform(dom, f, depth), transform(cod, f, depth + 1)
            return e if d2 is dom and c2 is cod else Pi(name, d2, c2, vis, e.span)
        case Lam(name, ann, body, vis):
            a2, b2 = transform(ann, f, depth), transform(body, f, depth + 1)
            return e if a2 is ann and b2 is body else Lam(name, a2, b2, vis, e.span)
    return e


def subterms(e: Expr, depth: int = 0) -> Iterator[tuple[Expr, int]]:
    """Pre-order traversal yielding each node with its binder depth."""
    stack = [(e, depth)]
    while stack:
        node, d = stack.pop()
        yield node, d
        match node:
            case App(fn, arg):
                stack.append((arg, d))
                stack.append((fn, d))
            case Pi(_, dom, cod):
                stack.append((cod, d + 1))
                stack.append((dom, d))
            case Lam(_, ann, body):
                stack.append((body, d + 1))
                stack.append((ann, d))


def shift(e: Expr, by: int, cutoff: int = 0) -> Expr:
    if by == 0:
        return e

    def f(node, depth):
        if isinstance(node, Var):
            return Var(node.ix + by, node.span) if node.ix >= cutoff + depth else node
        if isinstance(node, (Builtin, Ref, Meta, InstanceMeta, Universe, Hole)):
            return node
        return None

    return transform(e, f)


def instantiate(body: Expr, arg: Expr) -> Expr:
    """Substitute ``arg`` for the outermost bound variable of ``body`` (index 0)."""

    def f(node, depth):
        if isinstance(node, Var):
            if node.ix == depth:
                return shift(arg, depth)
            if node.ix > depth:
                return Var(node.ix - 1, node.span)
            return node
        if isinstance(node, (Builtin, Ref, Meta, InstanceMeta, Universe, Hole)):
            return node
        return None

    return transform(body, f)


def map_builtins(e: Expr, f: Callable[[object], Expr]) -> Expr:
    """Replace every ``Builtin(b)`` by ``f(b)``; ``f`` must return closed terms."""

    # the replacement inherits the builtin's source location
    return transform(e, lambda n, d: with_span(f(n.b), n.span) if isinstance(n, Builtin) else None)


def free_vars(e: Expr) -> set[int]:
    """Indices of variables free in ``e``, relative to its top-level depth."""
    out: set[int] = set()
    for node, d in subterms(e):
        if isinstance(node, Var) and node.ix >= d:
            out.add(node.ix - d)
    return out


def is_closed(e: Expr) -> bool:
    return not free_vars(e)


def well_scoped(e: Expr, depth: int = 0) -> bool:
    return all(i < depth for i in free_vars(e))


def metas_in(e: Expr) -> list[int]:
    seen: dict[int, None] = {}
    for node, _ in subterms(e):
        if isinstance(node, Meta):
            seen.setdefault(node.id)
    return list(seen)


def instance_metas_in(e: Expr) -> list[int]:
    """Instance meta ids in first-occurrence (left-to-right) order."""
    seen: dict[int, None] = {}
    for node, _ in subterms(e):
        if isinstance(node, InstanceMeta):
            seen.setdefault(node.id)
    return list(seen)


def has_unknowns(e: Expr) -> bool:
    return any(isinstance(n, (Meta, InstanceMeta, Hole)) for n, _ in subterms(e))


def zonk(e: Expr, store) -> Expr:
    """Replace every solved meta by its (recursively zonked) solution."""

    def f(node, depth):
        if isinstance(node, App) and isinstance(node.fn, Meta):
            sol = store.meta_solution(node.fn.id)
            if isinstance(sol, Lam):
                return zonk(instantiate(sol.body, node.arg), store)
            return None
        if isinstance(node, Meta):
            sol = store.meta_solution(node.id)
            return node if sol is None else zonk(sol, store)
        if isinstance(node, InstanceMeta):
            sol = store.instance_solution(node.id)
            return node if sol is None else zonk(sol, store)
        return None

    return transform(e, f)


def whnf(e: Expr, store=None, reduce=None, defs: Callable[[str], Expr | None] | None = None) -> Expr:
    """Weak-head normal form: beta, solved metas, alphabet reductions, optional delta."""
    while True:
        match e:
            case Meta(id=m) if store is not None:
                sol = store.meta_solution(m)
                if sol is None:
                    return e
                e = sol
                continue
            case InstanceMeta(id=m) if store is not None:
                sol = store.instance_solution(m)
                if sol is None:
                    return e
                e = sol
                continue
            case Ref(name) if defs is not None:
                body = defs(name)
                if body is None:
                    return e
                e = body
                continue
            case App():
                head, args = _spine(e)
                h = whnf(head, store, reduce, defs)
                if isinstance(h, Lam):
                    (a0, _), rest = args[0], args[1:]
                    e = _rebuild(instantiate(h.body, a0), rest)
                    continue
                if isinstance(h, Builtin) and reduce is not None:
                    r = reduce(h.b, args, lambda x: whnf(x, store, reduce, defs))
                    if r is not None:
                        e = r
                        continue
                return e if h is head else _rebuild(h, args)
        return e


def normalise(e: Expr, store=None, reduce=None, defs=None) -> Expr:
    """Full normal form by repeated whnf under every binder and argument."""
    e = whnf(e, store, reduce, defs)
    match e:
        case App():
            head, args = _spine(e)
            return _rebuild(head, [(normalise(a, store, reduce, defs), v) for a, v in args])
        case Pi(name, dom, cod, vis):
            return Pi(name, normalise(dom, store, reduce, defs), normalise(cod, store, reduce, defs), vis, e.span)
        case Lam(name, ann, body, vis):
            return Lam(name, normalise(ann, store, reduce, defs), normalise(body, store, reduce, defs), vis, e.span)
    return e


def alpha_eq(a: Expr, b: Expr) -> bool:
    # binder names and spans are excluded from dataclass equality
    return a == b


def _spine(e: Expr) -> tuple[Expr, list[tuple[Expr, Vis]]]:
    args = []
    while isinstance(e, App):
        args.append((e.arg, e.vis))
        e = e.fn
    args.reverse()
    return e, args


def _rebuild(head: Expr, args) -> Expr:
    for a, v in args:
        head = App(head, a, v)
    return head
