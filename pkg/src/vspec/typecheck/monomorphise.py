"""Specialisation of instance-polymorphic declarations and elimination of class operations."""

from __future__ import annotations

from dataclasses import replace

from vspec.core.ops import instantiate, subterms, transform
from vspec.core.syntax import App, Builtin, Decl, Expr, Function, Lam, Pi, Ref, Spec, Specialisation, Vis, spine
from vspec.errors import NonConcreteUse
from vspec.typecheck.alphabet import TypableAlphabet

SUFFIX = {"BI": "Bool", "TI": "Type"}


def instance_arity(ty: Expr) -> int:
    n = 0
    while isinstance(ty, Pi) and ty.vis is Vis.INSTANCE:
        n += 1
        ty = ty.cod
    return n


def reduce_class_ops(e: Expr, alphabet: TypableAlphabet) -> Expr:
    """Replace every class projection applied to a concrete instance by the instance's builtin."""

    def f(node, depth):
        if isinstance(node, App) and isinstance(node.fn, Builtin) and node.vis is Vis.INSTANCE:
            arg = transform(node.arg, f, depth)
            r = alphabet.reduce(node.fn.b, [(arg, node.vis)], lambda x: x)
            if r is not None:
                return r
        return None

    return transform(e, f)


class Monomorphiser:
    def __init__(self, spec: Spec, alphabet: TypableAlphabet):
        self.spec = spec
        self.alpha = alphabet
        self.arity = {d.name: instance_arity(d.type) for d in spec.decls if isinstance(d, Function)}
        self.arity = {k: v for k, v in self.arity.items() if v}
        self.taken = {d.name for d in spec.decls}
        self.names: dict[tuple[str, tuple[str, ...]], str] = {}

    def special_name(self, name: str, tags: tuple[str, ...]) -> str:
        key = (name, tags)
        if key not in self.names:
            base = name + "".join(SUFFIX[t] for t in tags)
            cand, k = base, 1
            while cand in self.taken:
                cand = f"{base}_{k}"
                k += 1
            self.taken.add(cand)
            self.names[key] = cand
        return self.names[key]

    def uses(self, e: Expr, where: str) -> list[tuple[str, tuple[str, ...]]]:
        """Generalised references in ``e`` with their concrete instance tags, in pre-order."""
        out = []
        for node, _ in subterms(e):
            if isinstance(node, App):
                head, args = spine(node)
                if isinstance(head, Ref) and head.name in self.arity and _is_full_spine(node, head, self.arity[head.name]):
                    n = self.arity[head.name]
                    inst = [a for a, v in args[:n]]
                    tags = tuple(self.alpha.instance_tag(a) for a in inst)
                    if None in tags or any(v is not Vis.INSTANCE for _, v in args[:n]):
                        raise NonConcreteUse(f"'{head.name}' is used in '{where}' without a concrete Booleans instance", getattr(node, "span", None))
                    out.append((head.name, tags))
        # bare references that were never applied to their instance arguments
        for node, _ in subterms(e):
            if isinstance(node, Ref) and node.name in self.arity and not self._applied(e, node):
                raise NonConcreteUse(f"'{node.name}' is used in '{where}' without a concrete Booleans instance", node.span)
        return out

    def _applied(self, e: Expr, ref: Ref) -> bool:
        for node, _ in subterms(e):
            if isinstance(node, App):
                head, args = spine(node)
                if head is ref and len(args) >= self.arity[ref.name]:
                    return True
        return False

    def rewrite(self, e: Expr) -> Expr:
        def f(node, depth):
            if isinstance(node, App):
                head, args = spine(node)
                if isinstance(head, Ref) and head.name in self.arity:
                    n = self.arity[head.name]
                    if len(args) >= n:
                        tags = tuple(self.alpha.instance_tag(a) for a, _ in args[:n])
                        out: Expr = Ref(self.special_name(head.name, tags), head.span)
                        for a, v in args[n:]:
                            out = App(out, transform(a, f, depth), v, node.span)
                        return out
            return None

        return reduce_class_ops(transform(e, f), self.alpha)

    def specialise(self, d: Function, tags: tuple[str, ...]) -> Function:
        ty, body = d.type, d.body
        for t in tags:
            inst = self.alpha.instance_term(t)
            assert isinstance(ty, Pi) and ty.vis is Vis.INSTANCE
            assert isinstance(body, Lam) and body.vis is Vis.INSTANCE
            ty, body = instantiate(ty.cod, inst), instantiate(body.body, inst)
        return replace(d, name=self.special_name(d.name, tags), type=ty, body=body)

    def run(self) -> Spec:
        decls = self.spec.decls
        demands: dict[str, list[tuple[tuple[int, int, int], tuple[str, ...]]]] = {}
        emitted: dict[int, list[Decl]] = {}
        origins: dict[str, Specialisation] = dict(self.spec.origins)
        for pos in reversed(range(len(decls))):
            d = decls[pos]
            if d.name in self.arity:
                wanted = sorted(demands.get(d.name, []))
                tag_list: list[tuple[str, ...]] = []
                for _, tags in wanted:
                    if tags not in tag_list:
                        tag_list.append(tags)
                if not tag_list:
                    tag_list = [("BI",) * self.arity[d.name]]
                copies: list[Decl] = [self.specialise(d, t) for t in tag_list]
                for t, c in zip(tag_list, copies):
                    origins[c.name] = Specialisation(d.name, t)
            else:
                copies = [d]
            final = []
            for ci, c in enumerate(copies):
                for oi, (g, tags) in enumerate(self.uses(_body_and_type(c), c.name)):
                    demands.setdefault(g, []).append(((pos, ci, oi), tags))
                final.append(_map_decl(c, self.rewrite))
            emitted[pos] = final
        out = [c for pos in range(len(decls)) for c in emitted[pos]]
        return Spec(tuple(out), origins)


def _is_full_spine(node: App, head: Ref, n: int) -> bool:
    _, args = spine(node)
    return len(args) >= n


def _body_and_type(d: Decl) -> Expr:
    match d:
        case Function(type=t, body=b):
            return App(t, b)
        case _ if hasattr(d, "body"):
            return d.body
    return d.type


def _map_decl(d: Decl, f) -> Decl:
    if isinstance(d, Function):
        return replace(d, type=f(d.type), body=f(d.body))
    if hasattr(d, "body"):
        return replace(d, body=f(d.body))
    return replace(d, type=f(d.type))


def monomorphise(s: Spec, alphabet: TypableAlphabet) -> Spec:
    return Monomorphiser(s, alphabet).run()
