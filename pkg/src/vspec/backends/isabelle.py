"""Isabelle/HOL backend.

Output order: shape typedefs, coercion registrations, rewrite lemmas,
definitions (outside the locale, taking the networks as leading arguments),
then one locale that fixes the networks and assumes the properties.
"""

from __future__ import annotations

from vspec.core.syntax import Expr, Function, Network, Parameter, Property, Spec
from vspec.backends.common import (
    P_ATOM,
    P_BINDER,
    R,
    EmissionError,
    EmitOptions,
    Renderer,
    alias_shapes,
    is_function_typed,
    make_plan,
)
from vspec.itp_ir import DECIDABILITY
from vspec.typecheck.pipeline import network_signature

IMPORTS = ("Vehicle_Tensor",)


def shape_type_name(shape: tuple[int, ...]) -> str:
    return "TensorS_" + "_".join(str(n) for n in shape) if shape else "TensorS"


class IsabelleRenderer(Renderer):
    target = "Isabelle"
    reserved = frozenset({"and", "where", "for", "if", "then", "else", "let", "in", "case", "of", "o", "lemma", "definition", "fixes", "assumes", "shows", "real", "nat", "bool"})
    _bool = {
        "TRUE": "True",
        "FALSE": "False",
        "NOT": "\\<not>",
        "AND": "\\<and>",
        "OR": "\\<or>",
        "IMPLIES": "-->",
        "LEQ": "\\<le>",
        "LT": "<",
        "EQ": "=",
        "NEQ": "\\<noteq>",
    }
    bool_ops = {(k, lvl): v for k, v in _bool.items() for lvl in ("BI", "TI")}
    bool_type = "bool"
    prop_type = "bool"
    nat_type = "nat"

    def __init__(self, s: Spec, opts: EmitOptions):
        super().__init__(s, opts)
        self.aliases = alias_shapes(s)
        self.networks = [d for d in s.decls if isinstance(d, Network)]
        self.parameters = [d for d in s.decls if isinstance(d, Parameter)]
        self.sigs = {}
        for d in self.networks:
            sig = network_signature(d.type, DECIDABILITY)
            if sig is None:
                raise EmissionError(f"network '{d.name}' has no concrete tensor signature")
            self.sigs[d.name] = sig
        self.shape_names: dict[tuple[int, ...], str] = {}
        for ins, outs in self.sigs.values():
            for shape in (ins, outs):
                if shape not in self.shape_names:
                    self.shape_names[shape] = self.aliases.get(shape, shape_type_name(shape))
        self.extra = self.extra_params()

    def extra_params(self) -> dict[str, list[str]]:
        """Leading network and parameter arguments for each definition."""
        opaque = [d.name for d in self.networks] + [d.name for d in self.parameters]
        out: dict[str, list[str]] = {}
        for d in self.spec.decls:
            if not isinstance(d, Function) or d.alias or not opaque:
                continue
            refs = self.mentions(d.body)
            if is_function_typed(d) or refs & (set(opaque) | set(out)):
                out[d.name] = [self.names[n] for n in opaque]
        return out

    def scalar_type(self) -> str:
        return "real"

    def tensor_type(self, shape) -> str:
        return "real tensor"

    def index_type(self, n: int) -> str:
        return "nat"

    def arrow(self, dom: str, cod: str) -> str:
        return f"{dom} => {cod}"

    def network_type(self, name: str) -> str:
        ins, outs = self.sigs[name]
        return f"{self.shape_names[ins]} => {self.shape_names[outs]}"

    def application(self, fn: str, args: list[str]) -> R:
        return R(f"({' '.join([fn] + args)})", P_ATOM)

    def ref(self, name: str, args: list[Expr], scope: list[str]) -> R:
        fn = self.names[name]
        if name in self.sigs and len(args) == 1:
            ins, outs = self.sigs[name]
            x = self.wrap(self.expr(args[0], scope), P_ATOM)
            return R(f"(Rep_{self.shape_names[outs]} ({fn} (Abs_{self.shape_names[ins]} {x})))", P_ATOM)
        extra = self.extra.get(name, [])
        rendered = extra + self.app_args(args, scope)
        return self.application(fn, rendered) if rendered else R(fn, P_ATOM)

    def lookup(self, t, i, scope) -> R:
        return self.application("lookup", [self.wrap(self.expr(t, scope), P_ATOM), f"[{self.expr(i, scope).text}]"])

    def stack(self, items) -> R:
        return R(f"(stack [{', '.join(items)}])", P_ATOM)

    def if_then_else(self, c, a, b) -> R:
        return R(f"(if {c} then {a} else {b})", P_ATOM)

    def forall(self, name: str, body: str) -> R:
        return R(f"(\\<forall> {name}. {body})", P_ATOM)

    def let(self, name, bound, body) -> R:
        return R(f"(let {name} = {bound} in {body})", P_ATOM)

    def lam(self, name, body) -> R:
        return R(f"(\\<lambda> {name}. {body})", P_BINDER)

    def prefix(self, sym, prec, e, scope) -> R:
        return R(f"{sym} {self.wrap(self.expr(e, scope), prec)}", prec)

    # -- blocks --------------------------------------------------------------
    def typedefs(self) -> list[str]:
        out = []
        for shape, name in self.shape_names.items():
            dims = ", ".join(str(n) for n in shape)
            out += [f'typedef {name} = "{{ a :: real tensor. (dims a) = [{dims}] }}"', "  using dims_tensor_from_lookup by blast", ""]
        return out

    def coercions(self) -> list[str]:
        out = []
        for name in self.shape_names.values():
            out += [
                f"declare [[coercion Rep_{name}]]",
                f'definition flex_to_{name} :: "real FlexTensor => {name}"',
                f'  where "flex_to_{name} t = Abs_{name} (flex_to_tensor t)"',
                f"declare [[coercion flex_to_{name}]]",
                "",
            ]
        return out

    def lemmas(self) -> list[str]:
        out = []
        for shape, name in self.shape_names.items():
            parts = [f"({n} :: nat)" if i == 0 else str(n) for i, n in enumerate(shape)]
            dims = " # ".join(parts + ["[]"])
            out += [
                f"lemma {name}_tensor_rewrite0[simp]:",
                '  assumes "prod_list shape = length elems"',
                f'      and "shape = {dims}"',
                f'    shows "(Rep_tensor (Rep_{name} (Abs_{name} (Abs_tensor (shape,elems))))) = (shape,elems)"',
                f"  using assms by (simp add: Abs_{name}_inverse Abs_tensor_inverse)",
                "",
            ]
        return out

    def opaque_type(self, name: str) -> str:
        d = self.decls[name]
        return self.network_type(name) if isinstance(d, Network) else self.type(d.type)

    def definition(self, d: Function) -> list[str]:
        name = self.names[d.name]
        extra = self.extra.get(d.name, [])
        opaque = [x.name for x in self.networks + self.parameters]
        types = [f"({self.opaque_type(n)})" for n in opaque] if extra else []
        sig = " => ".join(types + [self.type(d.type)])
        ps, _, body, scope = self.params(d)
        lhs = " ".join([name] + extra + [p for p, _ in ps])
        return [f'definition {name} :: "{sig}"', f'  where "{lhs} = {self.expr(body, scope).text}"', ""]

    def type_alias(self, d: Function) -> list[str]:
        name = self.names[d.name]
        shape = next((s for s, n in self.shape_names.items() if n == d.name), None)
        if shape is not None:
            return []  # rendered as a typedef
        return [f'type_synonym {name} = "{self.type(d.body)}"', ""]

    def locale(self) -> list[str]:
        props = [d for d in self.spec.decls if isinstance(d, Property)]
        fixes = self.networks + self.parameters
        if not fixes and not props:
            return []
        locale = self.opts.locale or self.opts.module
        lines = [f"locale {locale} ="]
        for i, d in enumerate(fixes):
            kw = "fixes" if i == 0 else "  and"
            lines.append(f'  {kw} {self.names[d.name]} :: "{self.opaque_type(d.name)}"')
        for i, d in enumerate(props):
            kw = "assumes" if i == 0 else "  and"
            lines.append(f'  {kw} {self.names[d.name]}: "{self.expr(d.body, []).text}"')
        lines.append("begin end")
        return lines + [""]

    def render(self) -> str:
        lines = [self.header(), f"theory {self.opts.module}", f"  imports {' '.join(IMPORTS)}", "begin", ""]
        lines += self.typedefs() + self.coercions() + self.lemmas()
        for d in self.spec.decls:
            if isinstance(d, Function):
                lines += self.type_alias(d) if d.alias else self.definition(d)
        lines += self.locale()
        lines.append("end")
        return "\n".join(lines) + "\n"


def emit_isabelle(s: Spec, opts: EmitOptions | None = None) -> str:
    return IsabelleRenderer(s, opts or EmitOptions()).render()


def isabelle_plan(s: Spec, opts: EmitOptions):
    return make_plan(s, opts.module, IMPORTS)


__all__ = ["emit_isabelle", "isabelle_plan", "IsabelleRenderer", "shape_type_name"]
