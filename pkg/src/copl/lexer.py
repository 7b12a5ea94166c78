"""Tokenizer for ``.cop`` source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LexError

KEYWORDS = frozenset(
    """concept in out super sub this new get set value if else while return
    true false void int double bool string char""".split()
)

KEYWORD = "keyword"
IDENT = "identifier"
INT = "int-literal"
FLOAT = "float-literal"
STRING = "string-literal"
PUNCT = "punctuation"
EOI = "end-of-input"

# longest first so that "==" wins over "="
PUNCTUATION = ("==", "!=", "<=", ">=", "&&", "||",
               "{", "}", "(", ")", "[", "]", ";", ",", ".",
               "=", "<", ">", "+", "-", "*", "/", "%", "!")

INT_MAX = 2**63 - 1

_NUMBER = re.compile(r"[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.column)

    def __repr__(self) -> str:
        return f"{self.kind}({self.lexeme!r})@{self.line}:{self.column}"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, line_start = 0, 1, 0
    n = len(source)

    while i < n:
        c = source[i]
        col = i - line_start + 1

        if c == "\n":
            i += 1
            line, line_start = line + 1, i
            continue
        if c in " \t\r\f\v":
            i += 1
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            i = n if end < 0 else end
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated block comment", (line, col))
            body = source[i:end]
            newlines = body.count("\n")
            if newlines:
                line += newlines
                line_start = i + body.rfind("\n") + 1
            i = end + 2
            continue

        if c == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    break
                if source[j] == "\\":
                    if j + 1 >= n or source[j + 1] not in _ESCAPES:
                        raise LexError("invalid escape sequence in string", (line, j - line_start + 1))
                    j += 1
                j += 1
            if j >= n or source[j] != '"':
                raise LexError("unterminated string", (line, col))
            tokens.append(Token(STRING, source[i:j + 1], line, col))
            i = j + 1
            continue

        if "0" <= c <= "9":
            m = _NUMBER.match(source, i)
            text = m.group()
            if m.group(1) or m.group(2):
                tokens.append(Token(FLOAT, text, line, col))
            else:
                if int(text) > INT_MAX:
                    raise LexError(f"integer literal {text} out of range", (line, col))
                tokens.append(Token(INT, text, line, col))
            i = m.end()
            continue

        m = _WORD.match(source, i)
        if m:
            text = m.group()
            tokens.append(Token(KEYWORD if text in KEYWORDS else IDENT, text, line, col))
            i = m.end()
            continue

        for p in PUNCTUATION:
            if source.startswith(p, i):
                tokens.append(Token(PUNCT, p, line, col))
                i += len(p)
                break
        else:
            raise LexError(f"unexpected character {c!r}", (line, col))

    tokens.append(Token(EOI, "", line, n - line_start + 1))
    return tokens


def string_value(lexeme: str) -> str:
    """Decode a string-literal lexeme (quotes included) to its text."""
    out = []
    it = iter(lexeme[1:-1])
    for ch in it:
        out.append(_ESCAPES[next(it)] if ch == "\\" else ch)
    return "".join(out)
