"""Imandra (IML) backend.

IML is classical, so both Boolean levels render as executable ``bool``
predicates. Identifiers are converted to snake_case.
"""

from __future__ import annotations

from fractions import Fraction

from vspec.core.syntax import Decl, Function, Network, Parameter, Property, Spec
from vspec.backends.common import P_APP, P_ATOM, P_BINDER, R, EmissionError, EmitOptions, Renderer, make_plan, to_snake
from vspec.rationals import format_decimal

PREAMBLE = ('#use "vehicle_tensor.iml";;',)

_KEYWORDS = frozenset(
    {"and", "as", "assert", "axiom", "begin", "do", "done", "else", "end", "false", "for", "fun", "function", "if", "in", "let",
     "match", "module", "not", "of", "open", "or", "rec", "then", "to", "true", "type", "val", "when", "while", "with", "theorem", "lemma"}
)


class ImandraRenderer(Renderer):
    target = "Imandra"
    reserved = _KEYWORDS
    _bool = {
        "TRUE": "true",
        "FALSE": "false",
        "NOT": "not",
        "AND": "&&",
        "OR": "||",
        "IMPLIES": "==>",
        "LEQ": "<=.",
        "LT": "<.",
        "EQ": "=",
        "NEQ": "<>",
    }
    bool_ops = {(k, lvl): v for k, v in _bool.items() for lvl in ("BI", "TI")}
    arith_ops = {"ADD": "+.", "SUB": "-.", "MUL": "*.", "DIV": "/."}
    neg_op = "-."
    bool_type = "bool"
    prop_type = "bool"
    nat_type = "int"

    def global_names(self) -> dict[str, str]:
        out = super().global_names()
        seen: dict[str, str] = {}
        for k, v in out.items():
            if v in seen:
                raise EmissionError(f"'{seen[v]}' and '{k}' both become '{v}' in snake_case")
            seen[v] = k
        return out

    def target_name(self, d: Decl, name: str) -> str:
        return to_snake(name)

    def clean_local(self, hint: str) -> str:
        return to_snake(super().clean_local(hint))

    def real(self, q: Fraction) -> R:
        text = format_decimal(abs(q), force_point=True)
        if text is None:
            text = f"({abs(q.numerator)}.0 /. {q.denominator}.0)"
        return R(f"(-. {text})", P_ATOM) if q < 0 else R(text, P_ATOM)

    def scalar_type(self) -> str:
        return "real"

    def tensor_type(self, shape) -> str:
        return "real tensor"

    def index_type(self, n: int) -> str:
        return "int"

    def stack(self, items) -> R:
        return R(f"stack [{'; '.join(items)}]", P_APP)

    def forall(self, name: str, body: str) -> R:
        return R(f"forall_tensor (fun {name} -> {body})", P_APP)

    def lam(self, name: str, body: str) -> R:
        return R(f"fun {name} -> {body}", P_BINDER)

    def if_then_else(self, c, a, b) -> R:
        return R(f"if {c} then {a} else {b}", P_BINDER)

    def decl(self, d: Decl) -> str:
        name = self.names[d.name]
        match d:
            case Function(alias=True):
                return f"type {name} = {self.type(d.body)}"
            case Function():
                ps, rest, body, scope = self.params(d)
                binders = "".join(f" ({p} : {self.type(t)})" for p, t in ps)
                return f"let {name}{binders} : {self.type(rest)} =\n  {self.expr(body, scope).text}"
            case Network() | Parameter():
                return f"let {name} : {self.type(d.type)} = () [@@opaque]"
            case Property():
                names, body = self.property_binders(d.body)
                head = " ".join([f"axiom {name}"] + names)
                return f"{head} = {self.expr(body, names).text}"
        raise TypeError(d)

    def render(self) -> str:
        lines = [self.header(), *PREAMBLE]
        for d in self.spec.decls:
            lines.append("")
            lines.append(self.decl(d))
        return "\n".join(lines) + "\n"


def emit_imandra(s: Spec, opts: EmitOptions | None = None) -> str:
    return ImandraRenderer(s, opts or EmitOptions()).render()


def imandra_plan(s: Spec, opts: EmitOptions):
    return make_plan(s, opts.module, PREAMBLE)


__all__ = ["emit_imandra", "imandra_plan", "ImandraRenderer"]
