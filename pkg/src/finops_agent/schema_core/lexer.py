"""Tokenizer shared by the SDL and query parsers.

Covers the subset of GraphQL lexical grammar the gateway accepts: names,
punctuation, string/int/float/boolean literals. Comments (# to end of
line) and commas are treated as whitespace, per the GraphQL lexical
rules. Every token carries its 1-based line and column for error
reporting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from finops_agent.errors import FinopsError


class GraphQLSyntaxError(FinopsError):
    """Malformed SDL or query text."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


PUNCT = set("(){}[]:!=@$&|")

_NAME_RE = re.compile(r"[_A-Za-z][_0-9A-Za-z]*")
_NUMBER_RE = re.compile(r"-?\d+(\.\d+)?([eE][+-]?\d+)?")


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "punct" | "string" | "int" | "float" | "spread" | "eof"
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    """Split text into tokens, raising GraphQLSyntaxError on bad input."""
    tokens: list[Token] = []
    line = 1
    col = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r,":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == ".":
            if text[i : i + 3] == "...":
                tokens.append(Token("spread", "...", line, col))
                i += 3
                col += 3
                continue
            raise GraphQLSyntaxError("unexpected '.'", line, col)
        if ch in PUNCT:
            tokens.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            value, consumed = _read_string(text, i, line, col)
            tokens.append(Token("string", value, line, col))
            i += consumed
            col += consumed
            continue
        m = _NAME_RE.match(text, i)
        if m:
            tokens.append(Token("name", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            raw = m.group(0)
            kind = "float" if any(c in raw for c in ".eE") else "int"
            tokens.append(Token(kind, raw, line, col))
            col += m.end() - i
            i = m.end()
            continue
        raise GraphQLSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


def _read_string(text: str, start: int, line: int, col: int) -> tuple[str, int]:
    """Read a double-quoted string starting at text[start]; returns (value, chars consumed)."""
    if text[start : start + 3] == '"""':
        raise GraphQLSyntaxError("block strings are not supported", line, col)
    i = start + 1
    out: list[str] = []
    while i < len(text):
        ch = text[i]
        if ch == '"':
            return "".join(out), i - start + 1
        if ch == "\n":
            raise GraphQLSyntaxError("unterminated string", line, col)
        if ch == "\\":
            if i + 1 >= len(text):
                break
            esc = text[i + 1]
            mapping = {'"': '"', "\\": "\\", "/": "/", "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f"}
            if esc in mapping:
                out.append(mapping[esc])
                i += 2
                continue
            if esc == "u":
                hexpart = text[i + 2 : i + 6]
                if len(hexpart) == 4 and all(c in "0123456789abcdefABCDEF" for c in hexpart):
                    code = int(hexpart, 16)
                    i += 6
                    # Two \u escapes forming a surrogate pair are one character.
                    if 0xD800 <= code <= 0xDBFF and text[i : i + 2] == "\\u":
                        lowpart = text[i + 2 : i + 6]
                        if len(lowpart) == 4 and all(c in "0123456789abcdefABCDEF" for c in lowpart):
                            low = int(lowpart, 16)
                            if 0xDC00 <= low <= 0xDFFF:
                                code = 0x10000 + ((code - 0xD800) << 10) + (low - 0xDC00)
                                i += 6
                    out.append(chr(code))
                    continue
            raise GraphQLSyntaxError(f"bad escape \\{esc}", line, col)
        out.append(ch)
        i += 1
    raise GraphQLSyntaxError("unterminated string", line, col)


class TokenStream:
    """Cursor over a token list with expect/accept helpers."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self) -> Token:
        return self._tokens[self._pos]

    def next(self) -> Token:
        tok = self._tokens[self._pos]
        if tok.kind != "eof":
            self._pos += 1
        return tok

    def accept_punct(self, value: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == value:
            self.next()
            return True
        return False

    def expect_punct(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != value:
            raise GraphQLSyntaxError(f"expected {value!r}, found {tok.value or tok.kind!r}", tok.line, tok.col)
        return self.next()

    def expect_name(self, what: str = "name") -> Token:
        tok = self.peek()
        if tok.kind != "name":
            raise GraphQLSyntaxError(f"expected {what}, found {tok.value or tok.kind!r}", tok.line, tok.col)
        return self.next()
