"""Tokeniser. Emits virtual ``SEP`` tokens before every token that starts a line at column 0."""

from __future__ import annotations

import re
from dataclasses import dataclass

from vspec.errors import ParseError, Span

KEYWORDS = frozenset(
    {"type", "forall", "if", "then", "else", "let", "in", "not", "and", "or", "True", "False", "true", "false"}
)
ANNOTATIONS = frozenset({"@network", "@parameter", "@property"})

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<annot>@[A-Za-z]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>=>|->|<=|>=|==|!=|[()\[\],:;=.!+\-*/<>\\])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NAT, DECIMAL, KW, ANNOT, SYM, SEP, EOF
    text: str
    span: Span

    def is_(self, text: str) -> bool:
        return self.kind in ("KW", "SYM", "ANNOT") and self.text == text


def _byte_offsets(source: str):
    if source.isascii():
        return lambda i: i
    table = [0]
    for ch in source:
        table.append(table[-1] + len(ch.encode("utf-8")))
    return table.__getitem__


def tokenize(source: str) -> list[Token]:
    off = _byte_offsets(source)
    toks: list[Token] = []
    pos, n = 0, len(source)
    at_line_start = True
    while pos < n:
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", Span(off(pos), off(pos + 1)))
        kind = m.lastgroup
        text = m.group()
        start, end = pos, m.end()
        pos = end
        if kind == "nl":
            at_line_start = True
            continue
        if kind == "ws":
            at_line_start = False
            continue
        if kind == "comment":
            continue
        span = Span(off(start), off(end))
        col0 = at_line_start and (start == 0 or source[start - 1] == "\n")
        at_line_start = False
        if col0 and toks:
            toks.append(Token("SEP", "", Span(span.start, span.start)))
        if kind == "number":
            toks.append(Token("DECIMAL" if "." in text else "NAT", text, span))
        elif kind == "annot":
            if text not in ANNOTATIONS:
                raise ParseError(f"unknown annotation {text}", span, frozenset(ANNOTATIONS))
            toks.append(Token("ANNOT", text, span))
        elif kind == "ident":
            toks.append(Token("KW" if text in KEYWORDS else "IDENT", text, span))
        elif text == ";":
            toks.append(Token("SEP", ";", span))
        else:
            toks.append(Token("SYM", text, span))
    end = off(n)
    toks.append(Token("EOF", "", Span(end, end)))
    return toks
