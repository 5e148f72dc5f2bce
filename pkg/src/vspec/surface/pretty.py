"""Printer for surface trees; its output re-parses to an equal tree."""

from __future__ import annotations

from vspec.rationals import format_decimal
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
    SurfaceDecl,
    SurfaceSpec,
    SVar,
    TArrow,
    TIndex,
    TName,
    TTensor,
    TypeAlias,
    VecLiteral,
)

BINDER, IMPLIES, OR, AND, NOT, CMP, ADD, MUL, NEG, LOOKUP, APP, ATOM = range(12)

_LEVEL = {"=>": IMPLIES, "or": OR, "and": AND, "+": ADD, "-": ADD, "*": MUL, "/": MUL}
for _op in ("<=", "<", ">=", ">", "==", "!="):
    _LEVEL[_op] = CMP


def _paren(text: str, level: int, ctx: int) -> str:
    return f"({text})" if level < ctx else text


def pretty_type(t: SType, ctx: int = 0) -> str:
    match t:
        case TName(name):
            return name
        case TArrow(dom, cod):
            return _paren(f"{pretty_type(dom, 1)} -> {pretty_type(cod, 0)}", 0, ctx)
        case TTensor(elem, dims):
            return _paren(f"Tensor {pretty_type(elem, 2)} [{', '.join(map(str, dims))}]", 1, ctx)
        case TIndex(size):
            return _paren(f"Index {size}", 1, ctx)
    raise TypeError(t)


def pretty_expr(e: SExpr, ctx: int = BINDER) -> str:
    match e:
        case SVar(name):
            return name
        case NatLit(v):
            return str(v)
        case RealLit(q):
            text = format_decimal(q, force_point=True)
            if text is None or q < 0:
                raise ValueError(f"real literal {q} has no surface form")
            return text
        case BoolLit(v):
            return "True" if v else "False"
        case VecLiteral(items):
            return "[" + ", ".join(pretty_expr(i) for i in items) + "]"
        case SApp(fn, arg):
            return _paren(f"{pretty_expr(fn, APP)} {pretty_expr(arg, ATOM)}", APP, ctx)
        case Lookup(t, i):
            return _paren(f"{pretty_expr(t, LOOKUP)} ! {pretty_expr(i, APP)}", LOOKUP, ctx)
        case Negate(a):
            inner = pretty_expr(a, NEG)
            if inner.startswith("-"):
                inner = f"({inner})"
            return _paren(f"-{inner}", NEG, ctx)
        case Not(a):
            return _paren(f"not {pretty_expr(a, NOT)}", NOT, ctx)
        case BinOp(op, lhs, rhs):
            lvl = _LEVEL[op]
            if op == "=>":
                lc, rc = lvl + 1, lvl
            elif lvl == CMP:
                lc = rc = lvl + 1
            else:
                lc, rc = lvl, lvl + 1
            return _paren(f"{pretty_expr(lhs, lc)} {op} {pretty_expr(rhs, rc)}", lvl, ctx)
        case Forall(x, body):
            return _paren(f"forall {x} . {pretty_expr(body)}", BINDER, ctx)
        case IfThenElse(c, t, f):
            return _paren(f"if {pretty_expr(c)} then {pretty_expr(t)} else {pretty_expr(f)}", BINDER, ctx)
        case Let(x, bound, body):
            return _paren(f"let {x} = {pretty_expr(bound)} in {pretty_expr(body)}", BINDER, ctx)
    raise TypeError(e)


def pretty_decl(d: SurfaceDecl) -> str:
    match d:
        case TypeAlias(name, t):
            return f"type {name} = {pretty_type(t)}"
        case NetworkDecl(name, t):
            return f"@network\n{name} : {pretty_type(t)}"
        case ParameterDecl(names, t):
            return f"@parameter\n{', '.join(names)} : {pretty_type(t)}"
        case PropertyDecl(name, body):
            return f"@property\n{name} = {pretty_expr(body)}"
        case FunctionDef(name, t, params, body):
            lhs = " ".join((name,) + params)
            head = f"{name} : {pretty_type(t)}\n" if t is not None else ""
            return f"{head}{lhs} = {pretty_expr(body)}"
    raise TypeError(d)


def pretty_surface(s: SurfaceSpec) -> str:
    return "".join(pretty_decl(d) + "\n\n" for d in s.decls)
