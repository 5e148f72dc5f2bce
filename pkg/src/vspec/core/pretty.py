"""Surface-style printing of core terms.

The printer is alphabet-agnostic: ``describe(b)`` maps a builtin payload to
either a standard builtin (rendered with surface operators) or a plain name
(rendered as a prefix function).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from vspec.core.builtins import BLit, NLit, Stack, StdOp, TLit
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
    Spec,
    Universe,
    Var,
    Vis,
    spine,
)
from vspec.rationals import format_decimal

Describe = Callable[[object], object]

# binding strength, loosest first
P_BINDER, P_IMPLIES, P_OR, P_AND, P_NOT, P_CMP, P_ADD, P_MUL, P_NEG, P_LOOKUP, P_APP, P_ATOM = range(12)

_INFIX = {
    StdOp.IMPLIES: ("=>", P_IMPLIES, "right"),
    StdOp.OR: ("or", P_OR, "left"),
    StdOp.AND: ("and", P_AND, "left"),
    StdOp.LEQ: ("<=", P_CMP, "none"),
    StdOp.LT: ("<", P_CMP, "none"),
    StdOp.EQ: ("==", P_CMP, "none"),
    StdOp.NEQ: ("!=", P_CMP, "none"),
    StdOp.ADD: ("+", P_ADD, "left"),
    StdOp.SUB: ("-", P_ADD, "left"),
    StdOp.MUL: ("*", P_MUL, "left"),
    StdOp.DIV: ("/", P_MUL, "left"),
    StdOp.LOOKUP: ("!", P_LOOKUP, "left"),
}


def _std(b):
    return b


def rational_text(q: Fraction) -> str:
    dec = format_decimal(q)
    if dec is not None:
        return dec
    return f"({q.numerator} / {q.denominator})"


def tensor_literal_text(t: TLit) -> str:
    if not t.shape:
        return rational_text(t.elems[0])

    def go(shape, elems):
        if not shape:
            return rational_text(elems[0])
        n = len(elems) // shape[0]
        return "[" + ", ".join(go(shape[1:], elems[i * n : (i + 1) * n]) for i in range(shape[0])) + "]"

    return go(t.shape, t.elems)


class Printer:
    def __init__(self, describe: Describe = _std, show_implicit: bool = False, show_instances: bool = True):
        self.describe = describe
        self.show_implicit = show_implicit
        self.show_instances = show_instances

    # names in scope, innermost last
    def fresh(self, names: list[str], hint: str) -> str:
        if hint and hint != "_" and hint not in names:
            return hint
        i = 0
        while f"x{i}" in names:
            i += 1
        return f"x{i}"

    def expr(self, e: Expr, names: list[str] | None = None) -> str:
        return self._go(e, list(names or []), P_BINDER)

    def _wrap(self, text: str, level: int, ctx: int) -> str:
        return f"({text})" if level < ctx else text

    def _shape_dims(self, e: Expr) -> list[str] | None:
        out = []
        while True:
            head, args = spine(e)
            exp = [a for a, v in args if v is Vis.EXPLICIT]
            if not isinstance(head, Builtin):
                return None
            d = self.describe(head.b)
            if d is StdOp.NIL and not exp:
                return out
            if d is StdOp.CONS and len(exp) == 2:
                out.append(self._go(exp[0], [], P_ATOM))
                e = exp[1]
                continue
            return None

    def _go(self, e: Expr, names: list[str], ctx: int) -> str:
        match e:
            case Universe():
                return "Type"
            case Var(ix):
                return names[-1 - ix] if ix < len(names) else f"#{ix}"
            case Ref(name):
                return name
            case Meta(id):
                return f"?{id}"
            case InstanceMeta(id):
                return f"?{id}"
            case Hole():
                return "_"
            case Builtin(b):
                return self._builtin_atom(b, ctx)
            case Pi(name, dom, cod, vis):
                if vis is Vis.EXPLICIT and 0 not in _free0(cod):
                    inner = f"{self._go(dom, names, P_IMPLIES + 1)} -> {self._go(cod, names + ['_'], P_IMPLIES)}"
                    return self._wrap(inner, P_IMPLIES, ctx)
                n = self.fresh(names, name)
                dom_s = self._go(dom, names, P_BINDER)
                binder = {Vis.IMPLICIT: f"{{{n} : {dom_s}}}", Vis.INSTANCE: f"{{{{{n} : {dom_s}}}}}"}.get(vis, f"({n} : {dom_s})")
                return self._wrap(f"{binder} -> {self._go(cod, names + [n], P_IMPLIES)}", P_IMPLIES, ctx)
            case Lam(name, ann, body, vis):
                n = self.fresh(names, name)
                b = {Vis.IMPLICIT: f"{{{n}}}", Vis.INSTANCE: f"{{{{{n}}}}}"}.get(vis, n)
                return self._wrap(f"\\{b} -> {self._go(body, names + [n], P_BINDER)}", P_BINDER, ctx)
            case App():
                return self._app(e, names, ctx)
        raise TypeError(f"cannot print {e!r}")

    def _builtin_atom(self, b, ctx: int) -> str:
        d = self.describe(b)
        match d:
            case str():
                return d
            case NLit(value=v):
                return str(v)
            case BLit(value=v):
                return "True" if v else "False"
            case TLit():
                text = tensor_literal_text(d)
                return self._wrap(text, P_NEG, ctx) if text.startswith("-") else text
            case Stack(arity=n):
                return f"stack{n}"
            case StdOp.NIL:
                return "[]"
            case StdOp():
                return d.value
        return str(d)

    def _app(self, e: Expr, names: list[str], ctx: int) -> str:
        head, args = spine(e)
        explicit = [a for a, v in args if v is Vis.EXPLICIT]
        d = self.describe(head.b) if isinstance(head, Builtin) else None
        go = lambda x, c: self._go(x, names, c)  # noqa: E731

        if d is StdOp.TENSOR and len(explicit) == 2:
            dims = self._shape_dims(explicit[1])
            elem = go(explicit[0], P_ATOM)
            if dims == [] and elem == "Real":
                return "Real"
            if dims is not None:
                return self._wrap(f"Tensor {elem} [{', '.join(dims)}]", P_APP, ctx)
        if d in (StdOp.CONS, StdOp.NIL):
            dims = self._shape_dims(e)
            if dims is not None:
                return "[" + ", ".join(dims) + "]"
        if d in _INFIX and len(explicit) == 2:
            sym, lvl, assoc = _INFIX[d]
            lc = lvl if assoc == "left" else lvl + 1
            rc = lvl if assoc == "right" else lvl + 1
            return self._wrap(f"{go(explicit[0], lc)} {sym} {go(explicit[1], rc)}", lvl, ctx)
        if d is StdOp.NOT and len(explicit) == 1:
            return self._wrap(f"not {go(explicit[0], P_NOT)}", P_NOT, ctx)
        if d is StdOp.NEG and len(explicit) == 1:
            return self._wrap(f"- {go(explicit[0], P_NEG)}", P_NEG, ctx)
        if d is StdOp.IF and len(explicit) == 3:
            c, t, f = (go(x, P_BINDER) for x in explicit)
            return self._wrap(f"if {c} then {t} else {f}", P_BINDER, ctx)
        if d is StdOp.FORALL and len(explicit) == 1 and isinstance(explicit[0], Lam):
            lam = explicit[0]
            n = self.fresh(names, lam.name)
            return self._wrap(f"forall {n} . {self._go(lam.body, names + [n], P_BINDER)}", P_BINDER, ctx)
        if isinstance(d, Stack) and len(explicit) == d.arity:
            return "[" + ", ".join(go(x, P_BINDER) for x in explicit) + "]"

        parts = [go(head, P_ATOM)]
        for a, v in args:
            if v is Vis.EXPLICIT:
                parts.append(go(a, P_ATOM))
            elif v is Vis.INSTANCE and self.show_instances:
                parts.append("{{" + go(a, P_BINDER) + "}}")
            elif v is Vis.IMPLICIT and self.show_implicit:
                parts.append("{" + go(a, P_BINDER) + "}")
        if len(parts) == 1:
            return parts[0]
        return self._wrap(" ".join(parts), P_APP, ctx)

    def decl(self, d: Decl) -> str:
        match d:
            case Function(name, ty, body, alias=True):
                return f"type {name} = {self.expr(body)}"
            case Function(name, ty, body):
                params: list[str] = []
                t, b = ty, body
                while isinstance(b, Lam) and b.vis is Vis.EXPLICIT:
                    n = self.fresh(params, b.name)
                    params.append(n)
                    b = b.body
                sig = f"{name} : {self.expr(ty)}"
                lhs = " ".join([name] + params)
                return f"{sig}\n{lhs} = {self._go(b, params, P_BINDER)}"
            case Network(name, ty):
                return f"@network\n{name} : {self.expr(ty)}"
            case Parameter(name, ty):
                return f"@parameter\n{name} : {self.expr(ty)}"
            case Property(name, body):
                return f"@property\n{name} = {self.expr(body)}"
        raise TypeError(d)

    def spec(self, s: Spec) -> str:
        return "\n\n".join(self.decl(d) for d in s.decls) + ("\n" if s.decls else "")


def _free0(e: Expr) -> set[int]:
    from vspec.core.ops import free_vars

    return free_vars(e)


def pretty(e: Expr, describe: Describe = _std, **kw) -> str:
    return Printer(describe, **kw).expr(e)


def pretty_spec(s: Spec, describe: Describe = _std, **kw) -> str:
    return Printer(describe, **kw).spec(s)
