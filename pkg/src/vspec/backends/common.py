"""Shared machinery for the four prover backends.

Each backend is a ``Renderer`` subclass that supplies operator tables and a
handful of syntax hooks; naming, scoping, precedence and declaration
classification live here.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction

from vspec import __version__
from vspec.core.builtins import BLit, NLit, Stack, StdOp, TLit
from vspec.core.ops import free_vars, subterms
from vspec.core.syntax import Builtin, Decl, Expr, Function, Lam, Network, Parameter, Pi, Property, Ref, Spec, Universe, Var, Vis, spine
from vspec.errors import VspecError
from vspec.itp_ir import DECIDABILITY, ClassOp, Coercion, Standard, TypeOp
from vspec.rationals import format_decimal
from vspec.typecheck.pipeline import tensor_shape

TARGETS = ("Agda", "Rocq", "Isabelle", "Imandra")
EXTENSIONS = {"Agda": ".agda", "Rocq": ".v", "Isabelle": ".thy", "Imandra": ".iml"}


class EmissionError(VspecError):
    pass


class MissingCache(EmissionError):
    pass


@dataclass(frozen=True)
class EmitTarget:
    name: str
    constructive_reals: bool = False

    def __post_init__(self):
        if self.name not in TARGETS:
            raise ValueError(f"unknown target {self.name!r}; expected one of {', '.join(TARGETS)}")
        if self.constructive_reals and self.name != "Rocq":
            raise ValueError("constructive reals are only meaningful for Rocq")


@dataclass
class EmitOptions:
    module: str = "Spec"
    source_hash: str | None = None
    # network name -> model file path, shown where a prover needs it
    network_paths: dict[str, str] = field(default_factory=dict)
    cache_ref: str | None = None
    constructive_reals: bool = False
    locale: str | None = None


@dataclass(frozen=True)
class EmissionPlan:
    module: str
    imports: tuple[str, ...]
    # declaration name -> one of alias/network/parameter/definition/property
    strategies: dict[str, str]
    cache_ref: str | None = None


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def spec_digest(s: Spec, opts: EmitOptions) -> str:
    if opts.source_hash:
        return opts.source_hash
    from vspec.core.pretty import pretty_spec

    return sha256_hex(pretty_spec(s, DECIDABILITY.describe).encode("utf-8"))


def header_text(digest: str) -> str:
    return f"Generated by vspec {__version__} from specification sha256:{digest}"


def strategy(d: Decl) -> str:
    match d:
        case Function(alias=True):
            return "alias"
        case Function():
            return "definition"
        case Network():
            return "network"
        case Parameter():
            return "parameter"
        case Property():
            return "property"
    raise TypeError(d)


def make_plan(s: Spec, module: str, imports: tuple[str, ...], cache_ref: str | None = None) -> EmissionPlan:
    return EmissionPlan(module, imports, {d.name: strategy(d) for d in s.decls}, cache_ref)


def lone_specialisations(s: Spec) -> dict[str, str]:
    """Specialised names that are the only copy of their origin, mapped to the origin name."""
    by_origin: dict[str, list[str]] = {}
    present = {d.name for d in s.decls}
    for name, sp in s.origins.items():
        if name in present:
            by_origin.setdefault(sp.origin, []).append(name)
    return {names[0]: o for o, names in by_origin.items() if len(names) == 1 and o not in present}


def result_sort(t: Expr) -> Expr:
    while isinstance(t, Pi):
        t = t.cod
    return t


def op_key(b) -> tuple[str, str] | None:
    """(operation, level) for Boolean-valued builtins; level is BI or TI."""
    match b:
        case Standard(BLit(value=v)):
            return ("TRUE" if v else "FALSE", "BI")
        case Standard(StdOp() as op) if op.name in {"NOT", "AND", "OR", "IMPLIES", "LEQ", "LT", "EQ", "NEQ"}:
            return (op.name, "BI")
        case TypeOp():
            return (b.name, "TI")
        case ClassOp():
            raise EmissionError(f"class operation {b.value} survived elaboration")
    return None


def to_snake(name: str) -> str:
    s = re.sub(r"(?<=[a-z0-9])([A-Z])", r"_\1", name)
    s = re.sub(r"(?<=[A-Z])([A-Z][a-z])", r"_\1", s)
    return s.lower()


P_BINDER, P_IMPLIES, P_OR, P_AND, P_NOT, P_CMP, P_ADD, P_MUL, P_NEG, P_LOOKUP, P_APP, P_ATOM = range(12)

_PREC = {
    "IMPLIES": (P_IMPLIES, "right"),
    "OR": (P_OR, "right"),
    "AND": (P_AND, "right"),
    "LEQ": (P_CMP, "none"),
    "LT": (P_CMP, "none"),
    "EQ": (P_CMP, "none"),
    "NEQ": (P_CMP, "none"),
    "ADD": (P_ADD, "left"),
    "SUB": (P_ADD, "left"),
    "MUL": (P_MUL, "left"),
    "DIV": (P_MUL, "left"),
}


@dataclass(frozen=True)
class R:
    text: str
    prec: int


class Renderer:
    """Precedence-aware expression printer over the ITP IR."""

    target = "?"
    reserved: frozenset[str] = frozenset()
    # (op, level) -> symbol, for binary and prefix operators and constants
    bool_ops: dict[tuple[str, str], str] = {}
    arith_ops: dict[str, str] = {"ADD": "+", "SUB": "-", "MUL": "*", "DIV": "/"}
    neg_op = "-"
    comment = ("(*", "*)")
    # function turning a decidable Boolean into a proposition; None where they coincide
    lift_op: str | None = None

    def __init__(self, s: Spec, opts: EmitOptions):
        self.spec = s
        self.opts = opts
        self.decls = {d.name: d for d in s.decls}
        self.names = self.global_names()
        self.globals = set(self.names.values())

    # -- naming ---------------------------------------------------------
    def base_name(self, name: str) -> str:
        return lone_specialisations(self.spec).get(name, name)

    def global_names(self) -> dict[str, str]:
        out: dict[str, str] = {}
        seen: dict[str, str] = {}
        lone = lone_specialisations(self.spec)
        for d in self.spec.decls:
            want = self.target_name(d, lone.get(d.name, d.name))
            if want in seen or want in self.reserved:
                fallback = self.target_name(d, d.name)
                if fallback in seen or fallback in self.reserved:
                    raise EmissionError(f"'{d.name}' and '{seen.get(want, want)}' both render as '{want}' in {self.target}")
                want = fallback
            seen[want] = d.name
            out[d.name] = want
        return out

    def target_name(self, d: Decl, name: str) -> str:
        return name

    def local_name(self, hint: str, scope: list[str]) -> str:
        base = self.clean_local(hint or "x")
        cand, k = base, 0
        while cand in scope or cand in self.globals or cand in self.reserved:
            k += 1
            cand = f"{base}{k}"
        return cand

    def clean_local(self, hint: str) -> str:
        return "x" if hint in ("_", "") else hint

    # -- literals and types -----------------------------------------------
    def real(self, q: Fraction) -> R:
        text = format_decimal(abs(q))
        if text is None:
            text = f"({abs(q.numerator)} / {q.denominator})"
        if q < 0:
            return R(f"{self.neg_op} {text}", P_NEG)
        return R(text, P_ATOM)

    def nat(self, n: int) -> R:
        return R(str(n), P_ATOM)

    def index(self, n: int, bound: int | None) -> R:
        return self.nat(n)

    def tensor_type(self, shape: tuple[int, ...]) -> str:
        raise NotImplementedError

    def scalar_type(self) -> str:
        raise NotImplementedError

    bool_type = "Bool"
    prop_type = "Set"
    nat_type = "Nat"

    def index_type(self, n: int) -> str:
        return f"Index {n}"

    def arrow(self, dom: str, cod: str) -> str:
        return f"{dom} -> {cod}"

    def type_atom(self, t: Expr) -> tuple[str, bool]:
        """Rendered type and whether it may appear unparenthesised as an arrow domain."""
        if isinstance(t, Universe):
            return self.prop_type, True
        if isinstance(t, Pi):
            if t.vis is not Vis.EXPLICIT or 0 in free_vars(t.cod):
                raise EmissionError("dependent or implicit function types cannot be emitted")
            dom, atomic = self.type_atom(t.dom)
            return self.arrow(dom if atomic else f"({dom})", self.type(t.cod)), False
        shape = tensor_shape(t, DECIDABILITY)
        if shape is not None:
            return self.scalar_type() if shape == () else self.tensor_type(shape), True
        head, args = spine(t)
        explicit = [a for a, v in args if v is Vis.EXPLICIT]
        if isinstance(head, Builtin) and isinstance(head.b, Standard):
            op = head.b.b
            if op is StdOp.BOOL:
                return self.bool_type, True
            if op is StdOp.NAT:
                return self.nat_type, True
            if op is StdOp.INDEX and explicit:
                n = explicit[0]
                if isinstance(n, Builtin) and isinstance(n.b, Standard) and isinstance(n.b.b, NLit):
                    return self.index_type(n.b.b.value), True
        if isinstance(head, Builtin) and isinstance(head.b, ClassOp):
            raise EmissionError("Booleans class projection survived elaboration")
        raise EmissionError(f"type cannot be emitted for {self.target}")

    def type(self, t: Expr) -> str:
        return self.type_atom(t)[0]

    # -- expressions -------------------------------------------------------
    @staticmethod
    def wrap(r: R, need: int) -> str:
        return r.text if r.prec >= need else f"({r.text})"

    def binary(self, sym: str, key: str, l: Expr, r: Expr, scope: list[str]) -> R:
        prec, assoc = _PREC[key]
        lneed = prec if assoc == "left" else prec + 1
        rneed = prec if assoc == "right" else prec + 1
        return R(f"{self.wrap(self.expr(l, scope), lneed)} {sym} {self.wrap(self.expr(r, scope), rneed)}", prec)

    def prefix(self, sym: str, prec: int, e: Expr, scope: list[str]) -> R:
        return R(f"{sym} {self.wrap(self.expr(e, scope), prec)}", prec)

    def application(self, fn: str, args: list[str]) -> R:
        return R(" ".join([fn] + args), P_APP)

    def app_args(self, args: list[Expr], scope: list[str]) -> list[str]:
        return [self.wrap(self.expr(a, scope), P_ATOM) for a in args]

    def lookup(self, t: Expr, i: Expr, scope: list[str]) -> R:
        return self.application("lookup", self.app_args([t, i], scope))

    def stack(self, items: list[str]) -> R:
        raise NotImplementedError

    def if_then_else(self, c: str, a: str, b: str) -> R:
        return R(f"if {c} then {a} else {b}", P_BINDER)

    def forall(self, name: str, body: str) -> R:
        raise NotImplementedError

    def let(self, name: str, bound: str, body: str) -> R:
        return R(f"let {name} = {bound} in {body}", P_BINDER)

    def lam(self, name: str, body: str) -> R:
        raise NotImplementedError

    def ref(self, name: str, args: list[Expr], scope: list[str]) -> R:
        fn = self.names.get(name, name)
        if not args:
            return R(fn, P_ATOM)
        return self.application(fn, self.app_args(args, scope))

    def tensor_literal(self, lit: TLit) -> R:
        if lit.shape == ():
            return self.real(lit.elems[0])
        raise EmissionError("only scalar literals are expected after desugaring")

    def expr(self, e: Expr, scope: list[str]) -> R:
        head, all_args = spine(e)
        args = [a for a, v in all_args if v is Vis.EXPLICIT]
        if isinstance(head, Lam) and head.vis is Vis.EXPLICIT and args:
            name = self.local_name(head.name, scope)
            bound = self.expr(args[0], scope).text
            body = self.expr(head.body, scope + [name]).text
            r = self.let(name, bound, body)
            return self.apply_rest(r, args[1:], scope)
        match head:
            case Var(ix):
                return self.apply_rest(R(scope[-1 - ix], P_ATOM), args, scope)
            case Ref(name):
                return self.ref(name, args, scope)
            case Lam(vis=Vis.EXPLICIT):
                name = self.local_name(head.name, scope)
                return self.lam(name, self.expr(head.body, scope + [name]).text)
            case Builtin(b):
                return self.builtin(b, args, scope)
            case Universe():
                return R(self.prop_type, P_ATOM)
        raise EmissionError(f"cannot emit expression {e!r}")

    def apply_rest(self, r: R, args: list[Expr], scope: list[str]) -> R:
        if not args:
            return r
        return self.application(self.wrap(r, P_ATOM), self.app_args(args, scope))

    def builtin(self, b, args: list[Expr], scope: list[str]) -> R:
        if b is Coercion.LIFT and len(args) == 1:
            if self.lift_op is None:
                return self.expr(args[0], scope)
            return self.apply_rest(R(self.lift_op, P_ATOM), args, scope)
        key = op_key(b)
        if key is not None:
            op, level = key
            sym = self.bool_ops[(op, level)]
            if op in ("TRUE", "FALSE"):
                return self.apply_rest(R(sym, P_ATOM), args, scope)
            if op == "NOT" and len(args) == 1:
                return self.prefix(sym, P_NOT, args[0], scope)
            if len(args) == 2:
                return self.binary(sym, op, args[0], args[1], scope)
            raise EmissionError(f"partially applied {op.lower()} cannot be emitted")
        inner = b.b if isinstance(b, Standard) else None
        match inner:
            case NLit(value=v, index_bound=n):
                return self.index(v, n) if n is not None else self.nat(v)
            case TLit():
                return self.tensor_literal(inner)
            case Stack(arity=n) if len(args) == n:
                return self.stack([self.expr(a, scope).text for a in args])
            case StdOp.IF if len(args) == 3:
                c, x, y = (self.expr(a, scope).text for a in args)
                return self.if_then_else(c, x, y)
            case StdOp.FORALL if len(args) == 1 and isinstance(args[0], Lam):
                lam = args[0]
                name = self.local_name(lam.name, scope)
                return self.forall(name, self.expr(lam.body, scope + [name]).text)
            case StdOp.LOOKUP if len(args) == 2:
                return self.lookup(args[0], args[1], scope)
            case StdOp.NEG if len(args) == 1:
                return self.prefix(self.neg_op, P_NEG, args[0], scope)
            case StdOp() if inner.name in self.arith_ops and len(args) == 2:
                return self.binary(self.arith_ops[inner.name], inner.name, args[0], args[1], scope)
        raise EmissionError(f"builtin {DECIDABILITY.describe(b)!r} cannot be emitted here")

    # -- declarations ------------------------------------------------------
    def params(self, d: Function) -> tuple[list[tuple[str, Expr]], Expr, Expr, list[str]]:
        """Leading explicit parameters shared by the type and the body."""
        ty, body = d.type, d.body
        ps: list[tuple[str, Expr]] = []
        scope: list[str] = []
        while isinstance(ty, Pi) and isinstance(body, Lam) and ty.vis is Vis.EXPLICIT and body.vis is Vis.EXPLICIT:
            name = self.local_name(body.name, scope)
            ps.append((name, ty.dom))
            scope.append(name)
            ty, body = ty.cod, body.body
        return ps, ty, body, scope

    def property_binders(self, body: Expr) -> tuple[list[str], Expr]:
        """Strip leading quantifiers from a property body."""
        names: list[str] = []
        while True:
            head, all_args = spine(body)
            args = [a for a, v in all_args if v is Vis.EXPLICIT]
            if isinstance(head, Builtin) and isinstance(head.b, Standard) and head.b.b is StdOp.FORALL and len(args) == 1 and isinstance(args[0], Lam):
                names.append(self.local_name(args[0].name, names))
                body = args[0].body
                continue
            return names, body

    def header(self) -> str:
        a, b = self.comment
        return f"{a} {header_text(spec_digest(self.spec, self.opts))} {b}".rstrip()

    def mentions(self, e: Expr) -> set[str]:
        return {n.name for n, _ in subterms(e) if isinstance(n, Ref)}

    def network_path(self, name: str) -> str:
        return self.opts.network_paths.get(name, f"{name}.onnx")


def is_function_typed(d: Decl) -> bool:
    return isinstance(d, Function) and not d.alias and isinstance(d.type, Pi) and d.type.vis is Vis.EXPLICIT


def alias_shapes(s: Spec) -> dict[tuple[int, ...], str]:
    """First alias naming each concrete tensor shape."""
    out: dict[tuple[int, ...], str] = {}
    for d in s.decls:
        if isinstance(d, Function) and d.alias:
            shape = tensor_shape(d.body, DECIDABILITY)
            if shape is not None and shape not in out:
                out[shape] = d.name
    return out
