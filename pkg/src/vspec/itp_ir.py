"""The ITP intermediate language: Boolean operations overloaded between a
decidable (Boolean-level) and a propositional (type-level) reading.

Every Boolean builtin of the standard alphabet is routed through an internal
``Booleans`` class with exactly two instances, BI and TI. Type checking over
this alphabet lets the ordinary unifier pick an instance at each use:
``if`` conditions force BI, ``Forall`` (whose type is overridden to live in
``Type``) forces TI, and anything left open is generalised and later
specialised by monomorphisation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from vspec.core.builtins import BLit, StdOp, TypeBuilder, std_type
from vspec.core.ops import map_builtins, shift, subterms, transform
from vspec.core.syntax import (
    App,
    Builtin,
    Decl,
    Expr,
    Function,
    InstanceMeta,
    Meta,
    Pi,
    Property,
    Ref,
    Spec,
    Universe,
    Var,
    Vis,
)
from vspec.errors import TranslationAmbiguity
from vspec.typecheck.alphabet import TypableAlphabet
from vspec.typecheck.pipeline import type_spec


@dataclass(frozen=True)
class Standard:
    b: object

    def __repr__(self) -> str:
        return f"Standard({self.b!r})"


class TypeOp(enum.Enum):
    TRUE = "trueType"
    FALSE = "falseType"
    NOT = "notType"
    AND = "andType"
    OR = "orType"
    IMPLIES = "impliesType"
    LEQ = "leqType"
    LT = "ltType"
    EQ = "eqType"
    NEQ = "neqType"


class ClassOp(enum.Enum):
    BOOL = "boolTC"
    TRUE = "trueTC"
    FALSE = "falseTC"
    NOT = "notTC"
    AND = "andTC"
    OR = "orTC"
    IMPLIES = "impliesTC"
    LEQ = "leqTC"
    LT = "ltTC"
    EQ = "eqTC"
    NEQ = "neqTC"


class Coercion(enum.Enum):
    # a decidable Boolean used where a proposition is expected
    LIFT = "liftBool"


class BooleansClass(enum.Enum):
    BOOLEANS = "Booleans"


class BooleansInstance(enum.Enum):
    BI = "BI"
    TI = "TI"


# the standard builtin each class member / type-level builtin is twinned with
_TWIN = {
    "TRUE": BLit(True),
    "FALSE": BLit(False),
    "NOT": StdOp.NOT,
    "AND": StdOp.AND,
    "OR": StdOp.OR,
    "IMPLIES": StdOp.IMPLIES,
    "LEQ": StdOp.LEQ,
    "LT": StdOp.LT,
    "EQ": StdOp.EQ,
    "NEQ": StdOp.NEQ,
}
_CONVERT = {StdOp.BOOL: ClassOp.BOOL} | {v: ClassOp[k] for k, v in _TWIN.items()}


def twin(op: TypeOp | ClassOp):
    """Standard builtin a type-level or class builtin stands for."""
    return StdOp.BOOL if op is ClassOp.BOOL else _TWIN[op.name]


_TB = TypeBuilder(Standard)
_STD_BOOL = Builtin(Standard(StdOp.BOOL))


def _std_embedded(b) -> Expr:
    return map_builtins(std_type(b), lambda x: Builtin(Standard(x)))


def _replace_bool(t: Expr, sort) -> Expr:
    """Replace ``Bool`` by ``sort(depth)`` throughout ``t``."""
    return transform(t, lambda n, d: sort(d) if n == _STD_BOOL else None)


def convert_to_decidability(b) -> Expr:
    """Boolean-sorted builtins become bare class projections; the checker
    supplies their instance argument as a fresh instance meta."""
    op = _CONVERT.get(b)
    return Builtin(op) if op is not None else Builtin(Standard(b))


def ir_builtin_type(b) -> Expr:
    match b:
        case Standard(StdOp.FORALL):
            u = Universe()
            return Pi("ds", _TB.list_of(_TB.nat), Pi("_", Pi("_", _TB.tensor(Var(0)), u), u), Vis.IMPLICIT)
        case Standard(x):
            return _std_embedded(x)
        case TypeOp():
            return _replace_bool(_std_embedded(twin(b)), lambda d: Universe())
        case ClassOp.BOOL:
            return Pi("i", Builtin(BooleansClass.BOOLEANS), Universe(), Vis.INSTANCE)
        case ClassOp():
            body = shift(_std_embedded(twin(b)), 1)
            body = _replace_bool(body, lambda d: App(Builtin(ClassOp.BOOL), Var(d), Vis.INSTANCE))
            return Pi("i", Builtin(BooleansClass.BOOLEANS), body, Vis.INSTANCE)
        case Coercion.LIFT:
            return Pi("_", _STD_BOOL, Universe(), Vis.EXPLICIT)
        case BooleansClass():
            return Universe()
        case BooleansInstance():
            return Builtin(BooleansClass.BOOLEANS)
    raise TypeError(f"not a decidability builtin: {b!r}")


class DecidabilityAlphabet(TypableAlphabet):
    name = "decidability"

    def convert(self, b) -> Expr:
        return convert_to_decidability(b)

    def type_of(self, b) -> Expr:
        return ir_builtin_type(b)

    def property_sort(self) -> Expr:
        return Universe()

    def std(self, b) -> Expr:
        return Builtin(Standard(b))

    def as_std(self, payload):
        return payload.b if isinstance(payload, Standard) else None

    def reduce(self, b, args, force):
        if not isinstance(b, ClassOp) or not args or args[0][1] is not Vis.INSTANCE:
            return None
        inst = force(args[0][0])
        tag = self.instance_tag(inst)
        if tag is None:
            return None
        if tag == "BI":
            head: Expr = Builtin(Standard(twin(b)))
        elif b is ClassOp.BOOL:
            head = Universe()
        else:
            head = Builtin(TypeOp[b.name])
        for a, v in args[1:]:
            head = App(head, a, v)
        return head

    def describe(self, b):
        match b:
            case Standard(x):
                return x
            case TypeOp() | ClassOp() | Coercion() | BooleansClass() | BooleansInstance():
                return b.value
        return b

    def is_sort_projection(self, b) -> bool:
        return b is ClassOp.BOOL

    def instance_for_sort(self, sort: Expr) -> Expr | None:
        if sort == _STD_BOOL:
            return Builtin(BooleansInstance.BI)
        if isinstance(sort, Universe):
            return Builtin(BooleansInstance.TI)
        return None

    def instance_class(self) -> Expr:
        return Builtin(BooleansClass.BOOLEANS)

    def instance_tag(self, e: Expr) -> str | None:
        if isinstance(e, Builtin) and isinstance(e.b, BooleansInstance):
            return e.b.value
        return None

    def instance_term(self, tag: str) -> Expr:
        return Builtin(BooleansInstance[tag])

    def is_class_op(self, b) -> bool:
        return isinstance(b, ClassOp)

    def lift(self) -> Expr:
        return Builtin(Coercion.LIFT)

    def sort_of(self, t: Expr) -> str:
        if t == _STD_BOOL:
            return "BI"
        if isinstance(t, Universe):
            return "TI"
        if isinstance(t, Meta):
            return "open"
        if isinstance(t, App) and t.fn == Builtin(ClassOp.BOOL) and isinstance(t.arg, InstanceMeta):
            return "open"
        return "other"


DECIDABILITY = DecidabilityAlphabet()


def _leftovers(s: Spec) -> list[str]:
    bad = []
    for d in s.decls:
        parts = [d.body] if isinstance(d, Property) else [d.type] + ([d.body] if isinstance(d, Function) else [])
        for p in parts:
            for n, _ in subterms(p):
                if isinstance(n, InstanceMeta) or (isinstance(n, Builtin) and isinstance(n.b, (ClassOp, BooleansInstance, BooleansClass))):
                    bad.append(d.name)
                elif isinstance(n, Pi) and n.vis is Vis.INSTANCE:
                    bad.append(d.name)
    return bad


def to_itp_ir(s: Spec) -> Spec:
    """Type a desugared standard spec over the decidability alphabet and monomorphise it."""
    out = type_spec(s, DECIDABILITY)
    bad = _leftovers(out)
    if bad:
        raise TranslationAmbiguity(f"Booleans instance left open in '{bad[0]}'")
    return out


def recheck(s: Spec) -> list:
    """Re-elaborate every IR declaration over the decidability alphabet.

    Raises on a type error; returns the constraints the solver could not
    discharge (empty for well-typed output).
    """
    from vspec.typecheck.checker import DeclContext, check_decl
    from vspec.typecheck.solver import solve_constraints

    ctx = DeclContext()
    residual = []
    for d in s.decls:
        out, cs = check_decl(ctx, d, DECIDABILITY)
        _, rest = solve_constraints(cs, ctx.store, DECIDABILITY)
        residual += rest
        ctx.types[d.name] = DECIDABILITY.property_sort() if isinstance(out, Property) else out.type
    return residual


# ---------------------------------------------------------------------------
# Erasure back to the standard alphabet


def _erase_builtin(b) -> Expr:
    match b:
        case Standard(x):
            return Builtin(x)
        case TypeOp():
            return Builtin(twin(b))
    raise TranslationAmbiguity(f"cannot erase {b!r}")


def erase_expr(e: Expr, rename: dict[str, str] | None = None) -> Expr:
    rename = rename or {}

    def f(node, depth):
        match node:
            case App(Builtin(Coercion.LIFT), arg):
                return erase_expr(arg, rename)
            case Builtin(b):
                return _erase_builtin(b)
            case Universe():
                return Builtin(StdOp.BOOL)
            case Ref(name) if name in rename:
                return Ref(rename[name], node.span)
        return None

    return transform(e, f)


def erase(s: Spec) -> Spec:
    """Map every BI/TI specialisation back to one standard declaration.

    Raises ``TranslationAmbiguity`` when two specialisations of the same
    declaration do not erase to the same thing.
    """
    rename = {name: spec.origin for name, spec in s.origins.items()}
    out: list[Decl] = []
    seen: dict[str, Decl] = {}
    for d in s.decls:
        target = rename.get(d.name, d.name)
        match d:
            case Function(alias=True):
                e: Decl = Function(target, d.type, erase_expr(d.body, rename), True, d.span)
            case Function():
                e = Function(target, erase_expr(d.type, rename), erase_expr(d.body, rename), False, d.span)
            case Property():
                e = Property(target, erase_expr(d.body, rename), d.span)
            case _:
                e = type(d)(target, erase_expr(d.type, rename), d.span)
        if target in seen:
            if seen[target] != e:
                raise TranslationAmbiguity(f"specialisations of '{target}' disagree after erasure")
            continue
        seen[target] = e
        out.append(e)
    return Spec(tuple(out))
