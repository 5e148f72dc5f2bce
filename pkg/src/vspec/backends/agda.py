"""Agda backend: one-to-one definitions, networks via ``callNetwork``, properties via the cache macro."""

from __future__ import annotations

from vspec.core.syntax import Decl, Function, Network, Parameter, Property, Spec, Universe
from vspec.backends.common import (
    P_ATOM,
    P_BINDER,
    P_LOOKUP,
    P_APP,
    R,
    EmitOptions,
    MissingCache,
    Renderer,
    make_plan,
    result_sort,
)

IMPORTS = (
    "Data.Bool using (Bool; true; false; if_then_else_; not; _∧_; _∨_; T)",
    "Data.Empty using (⊥)",
    "Data.Fin using (Fin; #_)",
    "Data.Nat using (ℕ)",
    "Data.Product using (_×_)",
    "Data.Sum using (_⊎_)",
    "Data.Unit using (⊤)",
    "Relation.Binary.PropositionalEquality using (_≡_; _≢_)",
    "Relation.Nullary using (¬_)",
    "Vehicle.Companion",
)


class AgdaRenderer(Renderer):
    target = "Agda"
    comment = ("--", "")
    lift_op = "T"
    reserved = frozenset({"data", "record", "where", "module", "open", "import", "let", "in", "forall", "postulate", "Set", "if", "then", "else"})
    bool_ops = {
        ("TRUE", "BI"): "true",
        ("FALSE", "BI"): "false",
        ("NOT", "BI"): "not",
        ("AND", "BI"): "∧",
        ("OR", "BI"): "∨",
        ("IMPLIES", "BI"): "⇒ᵇ",
        ("LEQ", "BI"): "≤ᵇ",
        ("LT", "BI"): "<ᵇ",
        ("EQ", "BI"): "≡ᵇ",
        ("NEQ", "BI"): "≢ᵇ",
        ("TRUE", "TI"): "⊤",
        ("FALSE", "TI"): "⊥",
        ("NOT", "TI"): "¬",
        ("AND", "TI"): "×",
        ("OR", "TI"): "⊎",
        ("IMPLIES", "TI"): "→",
        ("LEQ", "TI"): "≤",
        ("LT", "TI"): "<",
        ("EQ", "TI"): "≡",
        ("NEQ", "TI"): "≢",
    }
    bool_type = "Bool"
    prop_type = "Set"
    nat_type = "ℕ"

    def target_name(self, d: Decl, name: str) -> str:
        # a predicate that only exists at type level reads as a type family
        if name != d.name and isinstance(d, Function) and isinstance(result_sort(d.type), Universe):
            return name[:1].upper() + name[1:]
        return name

    def scalar_type(self) -> str:
        return "ℝ"

    def tensor_type(self, shape) -> str:
        dims = " ∷ ".join(str(n) for n in shape) + " ∷ []"
        return f"Tensor ℝ ({dims})"

    def index_type(self, n: int) -> str:
        return f"Fin {n}"

    def arrow(self, dom: str, cod: str) -> str:
        return f"{dom} → {cod}"

    def index(self, n: int, bound) -> R:
        return R(f"# {n}", P_APP)

    def stack(self, items) -> R:
        return R("[ " + " , ".join(items) + " ]", P_ATOM)

    def lookup(self, t, i, scope) -> R:
        return R(f"{self.wrap(self.expr(t, scope), P_LOOKUP)} ! {self.wrap(self.expr(i, scope), P_ATOM)}", P_LOOKUP)

    def forall(self, name: str, body: str) -> R:
        return R(f"∀ {name} → {body}", P_BINDER)

    def lam(self, name: str, body: str) -> R:
        return R(f"λ {name} → {body}", P_BINDER)

    # -- declarations ------------------------------------------------------
    def decl(self, d: Decl) -> list[str]:
        name = self.names[d.name]
        match d:
            case Function(alias=True):
                return [f"{name} : Set", f"{name} = {self.type(d.body)}"]
            case Function():
                ps, _, body, scope = self.params(d)
                lhs = " ".join([name] + [p for p, _ in ps])
                return [f"{name} : {self.type(d.type)}", f"{lhs} = {self.expr(body, scope).text}"]
            case Network():
                return [f"{name} : {self.type(d.type)}", f'{name} = callNetwork "{self.network_path(d.name)}"']
            case Parameter():
                return ["postulate", f"  {name} : {self.type(d.type)}"]
            case Property():
                if self.opts.cache_ref is None:
                    raise MissingCache(f"property '{d.name}' needs a verification cache; pass -c")
                return [f"{name} : {self.expr(d.body, []).text}", f'{name} = checkVehicleProperty "{self.opts.cache_ref}"']
        raise TypeError(d)

    def render(self) -> str:
        lines = [self.header(), f"module {self.opts.module} where", ""]
        lines += [f"open import {imp}" for imp in IMPORTS]
        for d in self.spec.decls:
            lines.append("")
            lines += self.decl(d)
        return "\n".join(lines) + "\n"


def emit_agda(s: Spec, opts: EmitOptions | None = None) -> str:
    return AgdaRenderer(s, opts or EmitOptions()).render()


def agda_plan(s: Spec, opts: EmitOptions):
    return make_plan(s, opts.module, IMPORTS, opts.cache_ref)


__all__ = ["emit_agda", "agda_plan", "AgdaRenderer"]
