"""Recursive-descent parser for the surface language."""

from __future__ import annotations

from vspec.errors import DuplicateDeclaration, ParseError, Span
from vspec.rationals import parse_rational
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
    declared_names,
)
from vspec.surface.lexer import Token, tokenize

_CMP = ("<=", "<", ">=", ">", "==", "!=")
_ATOM_START_KW = frozenset({"True", "False", "true", "false"})
_BINDER_KW = frozenset({"forall", "if", "let"})


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.toks = tokenize(source)
        self.i = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.is_(text)

    def accept(self, text: str) -> Token | None:
        return self.advance() if self.at(text) else None

    def fail(self, what: str, expected) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "EOF" else ("end of declaration" if t.kind == "SEP" else repr(t.text))
        return ParseError(f"{what}, found {found}", t.span, frozenset(expected))

    def expect(self, text: str, what: str | None = None) -> Token:
        if not self.at(text):
            raise self.fail(what or f"expected '{text}'", {text})
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "IDENT":
            raise self.fail("expected an identifier", {"identifier"})
        return self.advance()

    def skip_seps(self) -> None:
        while self.tok.kind == "SEP":
            self.i += 1

    def span_from(self, start: Span) -> Span:
        prev = self.toks[self.i - 1].span
        return Span(start.start, max(start.end, prev.end))

    # -- declarations ------------------------------------------------------

    def spec(self) -> SurfaceSpec:
        decls: list[SurfaceDecl] = []
        seen: set[str] = set()
        self.skip_seps()
        while self.tok.kind != "EOF":
            d = self.decl()
            for n in declared_names(d):
                if n in seen:
                    raise DuplicateDeclaration(f"'{n}' is declared more than once", d.span)
                seen.add(n)
            decls.append(d)
            if self.tok.kind not in ("SEP", "EOF"):
                raise self.fail("expected end of declaration", {"end of declaration"})
            self.skip_seps()
        return SurfaceSpec(tuple(decls), self.source)

    def decl(self) -> SurfaceDecl:
        start = self.tok.span
        if self.accept("type"):
            name = self.ident().text
            self.expect("=")
            return TypeAlias(name, self.type_(), self.span_from(start))
        if self.accept("@network"):
            self.skip_seps()
            name = self.ident().text
            self.expect(":")
            return NetworkDecl(name, self.type_(), self.span_from(start))
        if self.accept("@parameter"):
            self.skip_seps()
            names = [self.ident().text]
            while self.accept(","):
                self.skip_seps()
                names.append(self.ident().text)
            self.expect(":")
            return ParameterDecl(tuple(names), self.type_(), self.span_from(start))
        if self.accept("@property"):
            self.skip_seps()
            name_tok = self.ident()
            if self.accept(":"):
                ann = self.type_()
                if ann != TName("Bool"):
                    raise ParseError("a property may only be annotated with Bool", ann.span, frozenset({"Bool"}))
                if self.tok.kind != "SEP":
                    raise self.fail("expected the property definition on a new line", {"end of declaration"})
                self.skip_seps()
                again = self.ident()
                if again.text != name_tok.text:
                    raise ParseError(f"definition of '{again.text}' follows signature of '{name_tok.text}'", again.span)
            self.expect("=")
            return PropertyDecl(name_tok.text, self.expr(), self.span_from(start))
        if self.tok.kind == "IDENT":
            name_tok = self.advance()
            sig: SType | None = None
            if self.accept(":"):
                sig = self.type_()
                if self.tok.kind != "SEP":
                    raise self.fail("expected a definition after the signature", {"end of declaration"})
                self.skip_seps()
                again = self.ident()
                if again.text != name_tok.text:
                    raise ParseError(f"signature for '{name_tok.text}' has no definition", name_tok.span)
            params: list[str] = []
            while self.tok.kind == "IDENT":
                params.append(self.advance().text)
            self.expect("=", "expected '=' or a parameter name")
            return FunctionDef(name_tok.text, sig, tuple(params), self.expr(), self.span_from(start))
        raise self.fail("expected a declaration", {"type", "@network", "@parameter", "@property", "identifier"})

    # -- types -------------------------------------------------------------

    def type_(self) -> SType:
        start = self.tok.span
        dom = self.type_app()
        if self.accept("->"):
            return TArrow(dom, self.type_(), self.span_from(start))
        return dom

    def type_app(self) -> SType:
        start = self.tok.span
        if self.tok.kind == "IDENT" and self.tok.text == "Tensor":
            self.advance()
            elem = self.type_atom()
            self.expect("[", "expected a dimension list")
            dims = [self.nat()]
            while self.accept(","):
                dims.append(self.nat())
            self.expect("]")
            return TTensor(elem, tuple(dims), self.span_from(start))
        if self.tok.kind == "IDENT" and self.tok.text == "Index":
            self.advance()
            return TIndex(self.nat(), self.span_from(start))
        return self.type_atom()

    def type_atom(self) -> SType:
        start = self.tok.span
        if self.accept("("):
            t = self.type_()
            self.expect(")")
            return t
        if self.tok.kind == "IDENT" and self.tok.text not in ("Tensor", "Index"):
            return TName(self.advance().text, start)
        raise self.fail("expected a type", {"Bool", "Real", "Tensor", "Index", "(", "identifier"})

    def nat(self) -> int:
        if self.tok.kind != "NAT":
            raise self.fail("expected a natural number", {"natural number"})
        return int(self.advance().text)

    # -- expressions -------------------------------------------------------

    def expr(self) -> SExpr:
        if self.tok.kind == "KW" and self.tok.text in _BINDER_KW:
            return self.binder()
        return self.implies()

    def binder(self) -> SExpr:
        start = self.tok.span
        if self.accept("forall"):
            name = self.ident().text
            self.expect(".")
            return Forall(name, self.expr(), self.span_from(start))
        if self.accept("if"):
            c = self.expr()
            self.skip_seps_in_expr()
            self.expect("then")
            t = self.expr()
            self.skip_seps_in_expr()
            self.expect("else")
            return IfThenElse(c, t, self.expr(), self.span_from(start))
        self.expect("let")
        name = self.ident().text
        self.expect("=")
        bound = self.expr()
        self.skip_seps_in_expr()
        self.expect("in")
        return Let(name, bound, self.expr(), self.span_from(start))

    def skip_seps_in_expr(self) -> None:
        # `then`/`else`/`in` may start a line inside an expression
        if self.tok.kind == "SEP" and self.tok.text == "" and self.toks[self.i + 1].text in ("then", "else", "in"):
            self.i += 1

    def _right_operand(self, sub):
        # a bare binder extends as far right as possible, so it ends the operator chain
        bare = self.tok.kind == "KW" and self.tok.text in _BINDER_KW
        e = self.binder() if bare else sub()
        self._bare_binder = bare
        return e

    def implies(self) -> SExpr:
        start = self.tok.span
        lhs = self.or_()
        if self.accept("=>"):
            rhs = self._right_operand(self.implies)
            return BinOp("=>", lhs, rhs, self.span_from(start))
        return lhs

    def or_(self) -> SExpr:
        start = self.tok.span
        e = self.and_()
        while self.accept("or"):
            e = BinOp("or", e, self._right_operand(self.and_), self.span_from(start))
            if self._bare_binder:
                break
        return e

    def and_(self) -> SExpr:
        start = self.tok.span
        e = self.not_()
        while self.accept("and"):
            e = BinOp("and", e, self._right_operand(self.not_), self.span_from(start))
            if self._bare_binder:
                break
        return e

    def not_(self) -> SExpr:
        start = self.tok.span
        if self.accept("not"):
            return Not(self._right_operand(self.not_), self.span_from(start))
        return self.cmp()

    def cmp(self) -> SExpr:
        start = self.tok.span
        first = self.add()
        links: list[tuple[str, SExpr]] = []
        while self.tok.kind == "SYM" and self.tok.text in _CMP:
            op = self.advance().text
            links.append((op, self._right_operand(self.add)))
            if self._bare_binder:
                break
        if not links:
            return first
        span = self.span_from(start)
        parts = []
        lhs = first
        for op, rhs in links:
            parts.append(BinOp(op, lhs, rhs, span))
            lhs = rhs
        e = parts[0]
        for p in parts[1:]:
            e = BinOp("and", e, p, span)
        return e

    def add(self) -> SExpr:
        start = self.tok.span
        e = self.mul()
        while self.tok.kind == "SYM" and self.tok.text in ("+", "-"):
            op = self.advance().text
            e = BinOp(op, e, self._right_operand(self.mul), self.span_from(start))
            if self._bare_binder:
                break
        return e

    def mul(self) -> SExpr:
        start = self.tok.span
        e = self.neg()
        while self.tok.kind == "SYM" and self.tok.text in ("*", "/"):
            op = self.advance().text
            e = BinOp(op, e, self._right_operand(self.neg), self.span_from(start))
            if self._bare_binder:
                break
        return e

    def neg(self) -> SExpr:
        start = self.tok.span
        if self.accept("-"):
            return Negate(self._right_operand(self.neg), self.span_from(start))
        return self.lookup()

    def lookup(self) -> SExpr:
        start = self.tok.span
        e = self.app()
        while self.accept("!"):
            e = Lookup(e, self.app(), self.span_from(start))
        return e

    def _atom_start(self) -> bool:
        t = self.tok
        return (
            t.kind in ("IDENT", "NAT", "DECIMAL")
            or (t.kind == "KW" and t.text in _ATOM_START_KW)
            or t.is_("(")
            or t.is_("[")
        )

    def app(self) -> SExpr:
        start = self.tok.span
        e = self.atom()
        while self._atom_start():
            e = SApp(e, self.atom(), self.span_from(start))
        return e

    def atom(self) -> SExpr:
        t = self.tok
        if t.kind == "IDENT":
            self.advance()
            return SVar(t.text, t.span)
        if t.kind == "NAT":
            self.advance()
            return NatLit(int(t.text), t.span)
        if t.kind == "DECIMAL":
            self.advance()
            return RealLit(parse_rational(t.text), t.span)
        if t.kind == "KW" and t.text in _ATOM_START_KW:
            self.advance()
            return BoolLit(t.text in ("True", "true"), t.span)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("["):
            items = [self.expr()]
            while self.accept(","):
                items.append(self.expr())
            self.expect("]")
            return VecLiteral(tuple(items), self.span_from(t.span))
        if t.kind == "KW" and t.text in _BINDER_KW:
            return self.binder()
        raise self.fail("expected an expression", {"identifier", "number", "True", "False", "(", "["})


def parse_spec(source: str) -> SurfaceSpec:
    return Parser(source).spec()


def parse_expr(source: str) -> SExpr:
    p = Parser(source)
    e = p.expr()
    if p.tok.kind != "EOF":
        raise p.fail("unexpected trailing input", {"end of input"})
    return e
