"""Tokenizer for the ASP dialect and the assertion language."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import ParseError, SourceSpan


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, ID, VAR, DIRECTIVE, OP, ANNOT, EOF
    value: str
    line: int
    col: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.col)


# longest operators first
_OPS = [":-", "...", "..", "<->", "->", "!=", "<=", ">=", "=", "<", ">", "+", "-", "*",
        "/", "\\", "|", "(", ")", "{", "}", ",", ";", ":", ".", "!"]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<block>%\*.*?\*%)"
    r"|(?P<annot>%@[^\n]*)"
    r"|(?P<comment>%[^\n]*)"
    r"|(?P<num>\d+)"
    r"|(?P<directive>\#[a-z]+)"
    r"|(?P<id>[a-z][A-Za-z0-9_']*)"
    r"|(?P<var>[A-Z_][A-Za-z0-9_']*)"
    r"|(?P<op>" + "|".join(re.escape(o) for o in _OPS) + ")",
    re.S,
)


def tokenize(text: str, file: str = "<string>", line: int = 1, col: int = 1,
             annotations: bool = True) -> Iterator[Token]:
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(file, line, col))
        kind = m.lastgroup
        value = m.group()
        if kind == "annot" and annotations:
            yield Token("ANNOT", value[2:], line, col)
        elif kind in ("num", "directive", "id", "var", "op"):
            yield Token({"num": "NUM", "directive": "DIRECTIVE", "id": "ID",
                         "var": "VAR", "op": "OP"}[kind], value, line, col)
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    yield Token("EOF", "", line, col)


class TokenStream:
    """Cursor over a token list with backtracking support."""

    def __init__(self, tokens: list[Token], file: str = "<string>"):
        self.tokens = tokens
        self.pos = 0
        self.file = file

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, value: str, kind: str | None = None) -> bool:
        t = self.cur
        return t.value == value and (kind is None or t.kind == kind) and t.kind != "EOF"

    def at_op(self, *values: str) -> bool:
        return self.cur.kind == "OP" and self.cur.value in values

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def accept(self, value: str) -> bool:
        if self.cur.kind != "EOF" and self.cur.value == value:
            self.pos += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        if self.cur.value != value or self.cur.kind == "EOF":
            self.error(f"expected {value!r}, found {self.describe()}")
        return self.advance()

    def describe(self) -> str:
        return "end of input" if self.cur.kind == "EOF" else repr(self.cur.value)

    def span(self) -> SourceSpan:
        return self.cur.span(self.file)

    def error(self, message: str):
        raise ParseError(message, self.span())
