"""Rocq backend: opaque network parameters, ordinary definitions, one axiom per property.

Real numbers render against the MathComp analysis interface by default, or
against the standard-library reals when constructive mode is enabled. Only the
preamble block and literals depend on that choice.
"""

from __future__ import annotations

from fractions import Fraction

from vspec.core.syntax import Decl, Function, Network, Parameter, Property, Spec
from vspec.backends.common import P_APP, P_ATOM, P_BINDER, P_NEG, R, EmitOptions, Renderer, make_plan

COMMON_IMPORTS = (
    "From mathcomp Require Import all_ssreflect all_algebra.",
    "From Vehicle Require Import Tensor.",
)
INTERFACE_REALS = (
    "From mathcomp.analysis Require Import reals.",
    "Local Open Scope ring_scope.",
    "Parameter R : realType.",
)
CONSTRUCTIVE_REALS = (
    "From Coq Require Import Reals QArith Qreals.",
    "Local Open Scope R_scope.",
    "Notation R := Rdefinitions.R.",
)


class RocqRenderer(Renderer):
    target = "Rocq"
    lift_op = "is_true"
    reserved = frozenset({"fun", "forall", "let", "in", "if", "then", "else", "match", "with", "end", "Definition", "Axiom", "Parameter", "Prop", "Type", "Set", "R"})
    bool_ops = {
        ("TRUE", "BI"): "true",
        ("FALSE", "BI"): "false",
        ("NOT", "BI"): "~~",
        ("AND", "BI"): "&&",
        ("OR", "BI"): "||",
        ("IMPLIES", "BI"): "==>",
        ("LEQ", "BI"): "<=?",
        ("LT", "BI"): "<?",
        ("EQ", "BI"): "==?",
        ("NEQ", "BI"): "!=?",
        ("TRUE", "TI"): "True",
        ("FALSE", "TI"): "False",
        ("NOT", "TI"): "~",
        ("AND", "TI"): "/\\",
        ("OR", "TI"): "\\/",
        ("IMPLIES", "TI"): "->",
        ("LEQ", "TI"): "<=",
        ("LT", "TI"): "<",
        ("EQ", "TI"): "=",
        ("NEQ", "TI"): "<>",
    }
    bool_type = "bool"
    prop_type = "Prop"
    nat_type = "nat"

    @property
    def constructive(self) -> bool:
        return self.opts.constructive_reals

    def real(self, q: Fraction) -> R:
        if self.constructive:
            return R(f"(Q2R ({q.numerator} # {q.denominator}))", P_ATOM)
        a = abs(q)
        text = f"{a.numerator}%:R" if a.denominator == 1 else f"({a.numerator}%:R / {a.denominator}%:R)"
        return R(f"- {text}", P_NEG) if q < 0 else R(text, P_ATOM)

    def index(self, n: int, bound) -> R:
        return R(f"inord {n}", P_APP)

    def scalar_type(self) -> str:
        return "R"

    def tensor_type(self, shape) -> str:
        return f"(tensor R [:: {'; '.join(str(n) for n in shape)}])"

    def index_type(self, n: int) -> str:
        return f"'I_{n}"

    def stack(self, items) -> R:
        return R(f"stack [:: {'; '.join(items)}]", P_APP)

    def forall(self, name: str, body: str) -> R:
        return R(f"forall {name}, {body}", P_BINDER)

    def let(self, name: str, bound: str, body: str) -> R:
        return R(f"let {name} := {bound} in {body}", P_BINDER)

    def lam(self, name: str, body: str) -> R:
        return R(f"fun {name} => {body}", P_BINDER)

    def decl(self, d: Decl) -> str:
        name = self.names[d.name]
        match d:
            case Function(alias=True):
                return f"Definition {name} : Type := {self.type(d.body)}."
            case Function():
                ps, rest, body, scope = self.params(d)
                binders = "".join(f" ({p} : {self.type(t)})" for p, t in ps)
                return f"Definition {name}{binders} : {self.type(rest)} :=\n  {self.expr(body, scope).text}."
            case Network():
                return f"Parameter {name} : {self.type(d.type)}."
            case Parameter():
                return f"Parameter {name} : {self.type(d.type)}."
            case Property():
                return f"Axiom {name} : {self.expr(d.body, []).text}."
        raise TypeError(d)

    def render(self) -> str:
        reals = CONSTRUCTIVE_REALS if self.constructive else INTERFACE_REALS
        lines = [self.header(), *COMMON_IMPORTS, *reals]
        for d in self.spec.decls:
            lines.append("")
            lines.append(self.decl(d))
        return "\n".join(lines) + "\n"


def emit_rocq(s: Spec, opts: EmitOptions | None = None) -> str:
    return RocqRenderer(s, opts or EmitOptions()).render()


def rocq_plan(s: Spec, opts: EmitOptions):
    reals = CONSTRUCTIVE_REALS if opts.constructive_reals else INTERFACE_REALS
    return make_plan(s, opts.module, COMMON_IMPORTS + reals)
