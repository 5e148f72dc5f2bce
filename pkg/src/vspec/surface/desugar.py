"""Name resolution and translation of surface trees into the core calculus."""

from __future__ import annotations

from vspec.core.builtins import BLit, NLit, Stack, StdOp, TLit, TypeBuilder
from vspec.core.syntax import (
    App,
    Builtin,
    Decl,
    Expr,
    Function,
    Hole,
    Lam,
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
from vspec.errors import UnboundVariable, VspecError
from vspec.surface.ast import (
    BinOp,
    BoolLit,
    Forall,
    FunctionDef,
    IfThenElse,
    Let,
    Lookup,
    NatLit,
    Negate,
    NetworkDecl,
    Not,
    ParameterDecl,
    PropertyDecl,
    RealLit,
    SApp,
    SExpr,
    SType,
    SurfaceSpec,
    SVar,
    TArrow,
    TIndex,
    TName,
    TTensor,
    TypeAlias,
    VecLiteral,
)

_TB = TypeBuilder()

_BINOP = {
    "and": StdOp.AND,
    "or": StdOp.OR,
    "=>": StdOp.IMPLIES,
    "<=": StdOp.LEQ,
    "<": StdOp.LT,
    "==": StdOp.EQ,
    "!=": StdOp.NEQ,
    "+": StdOp.ADD,
    "-": StdOp.SUB,
    "*": StdOp.MUL,
    "/": StdOp.DIV,
}
# a >= b is b <= a
_SWAPPED = {">=": StdOp.LEQ, ">": StdOp.LT}


class NotAType(VspecError):
    pass


def _b(op, span=None) -> Expr:
    return Builtin(op, span)


def real_tensor_shape(t: Expr) -> Expr | None:
    """Shape argument of ``Tensor Real ds``, or None."""
    head, args = spine(t)
    if isinstance(head, Builtin) and head.b is StdOp.TENSOR and len(args) == 2:
        elem, ds = args[0][0], args[1][0]
        if elem == _b(StdOp.REAL):
            return ds
    return None


class Desugarer:
    def __init__(self):
        self.globals: set[str] = set()
        self.aliases: dict[str, Expr] = {}

    def type_(self, t: SType) -> Expr:
        match t:
            case TName("Bool"):
                return _b(StdOp.BOOL, t.span)
            case TName("Real"):
                return _TB.tensor(_TB.nil())
            case TName(name):
                if name in self.aliases:
                    return self.aliases[name]
                if name in self.globals:
                    raise NotAType(f"'{name}' is not a type", t.span)
                raise UnboundVariable(name, t.span)
            case TArrow(dom, cod):
                return Pi("_", self.type_(dom), self.type_(cod), Vis.EXPLICIT, t.span)
            case TTensor(elem, dims):
                e = self.type_(elem)
                inner = real_tensor_shape(e)
                if inner is not None:
                    ds = inner
                    for d in reversed(dims):
                        ds = _TB.cons(_b(NLit(d)), ds)
                    return _TB.tensor(ds)
                return App(App(_b(StdOp.TENSOR), e), _TB.shape(dims), Vis.EXPLICIT, t.span)
            case TIndex(n):
                return App(_b(StdOp.INDEX), _b(NLit(n)), Vis.EXPLICIT, t.span)
        raise TypeError(t)

    def expr(self, e: SExpr, scope: list[str]) -> Expr:
        go = lambda x: self.expr(x, scope)  # noqa: E731
        sp = e.span
        match e:
            case SVar(name):
                for k in range(len(scope) - 1, -1, -1):
                    if scope[k] == name:
                        return Var(len(scope) - 1 - k, sp)
                if name in self.globals:
                    return Ref(name, sp)
                raise UnboundVariable(name, sp)
            case SApp(fn, arg):
                return App(go(fn), go(arg), Vis.EXPLICIT, sp)
            case Not(a):
                return App(_b(StdOp.NOT, sp), go(a), Vis.EXPLICIT, sp)
            case BinOp(op, lhs, rhs) if op in _SWAPPED:
                return App(App(_b(_SWAPPED[op], sp), go(rhs)), go(lhs), Vis.EXPLICIT, sp)
            case BinOp(op, lhs, rhs):
                return App(App(_b(_BINOP[op], sp), go(lhs)), go(rhs), Vis.EXPLICIT, sp)
            case Negate(RealLit(q)):
                return _b(TLit.scalar(-q), sp)
            case Negate(NatLit(n)):
                return _b(TLit.scalar(-n), sp)
            case Negate(a):
                return App(_b(StdOp.NEG, sp), go(a), Vis.EXPLICIT, sp)
            case Lookup(t, i):
                return App(App(_b(StdOp.LOOKUP, sp), go(t)), go(i), Vis.EXPLICIT, sp)
            case Forall(x, body):
                lam = Lam(x, Hole(sp), self.expr(body, scope + [x]), Vis.EXPLICIT, sp)
                return App(_b(StdOp.FORALL, sp), lam, Vis.EXPLICIT, sp)
            case IfThenElse(c, t, f):
                return App(App(App(_b(StdOp.IF, sp), go(c)), go(t)), go(f), Vis.EXPLICIT, sp)
            case Let(x, bound, body):
                lam = Lam(x, Hole(sp), self.expr(body, scope + [x]), Vis.EXPLICIT, sp)
                return App(lam, go(bound), Vis.EXPLICIT, sp)
            case VecLiteral(items):
                out: Expr = _b(Stack(len(items)), sp)
                for it in items:
                    out = App(out, go(it), Vis.EXPLICIT, sp)
                return out
            case BoolLit(v):
                return _b(BLit(v), sp)
            case NatLit(n):
                return _b(NLit(n), sp)
            case RealLit(q):
                return _b(TLit.scalar(q), sp)
        raise TypeError(e)

    def spec(self, s: SurfaceSpec) -> Spec:
        out: list[Decl] = []
        for d in s.decls:
            match d:
                case TypeAlias(name, t):
                    core = self.type_(t)
                    out.append(Function(name, Universe(), core, True, d.span))
                    self.aliases[name] = core
                case NetworkDecl(name, t):
                    out.append(Network(name, self.type_(t), d.span))
                case ParameterDecl(names, t):
                    ty = self.type_(t)
                    out.extend(Parameter(n, ty, d.span) for n in names)
                case PropertyDecl(name, body):
                    out.append(Property(name, self.expr(body, []), d.span))
                case FunctionDef(name, t, params, body):
                    ty = self.type_(t) if t is not None else Hole(d.span)
                    core = self.expr(body, list(params))
                    for p in reversed(params):
                        core = Lam(p, Hole(d.span), core, Vis.EXPLICIT, d.span)
                    out.append(Function(name, ty, core, False, d.span))
            if isinstance(d, ParameterDecl):
                self.globals.update(d.names)
            else:
                self.globals.add(d.name)
        return Spec(tuple(out))


def desugar(s: SurfaceSpec) -> Spec:
    return Desugarer().spec(s)
