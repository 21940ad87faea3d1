"""Tokenizer for model and type-declaration files.

Both formats share one token set: names, integer and string literals, keywords,
punctuation, ``--`` (absence), stereotype delimiters in both ``<<``/``>>`` and
guillemet form, plus ``//`` and ``/* */`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import SourceLoc

KEYWORDS = frozenset({
    "package", "import", "component", "port", "in", "out",
    "automaton", "state", "initial", "connect", "var", "enum",
    "true", "false",
})

# Multi-character symbols, longest first.
_SYMBOLS = [
    "<<", ">>", "->", "--", "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "[", "]", "(", ")", "<", ">", ",", ";", ".", "=", "|",
    "/", "!", "+", "-", "*", ":",
]

_GUILLEMETS = {"«": "<<", "»": ">>"}


class LexError(Exception):
    def __init__(self, loc: SourceLoc, message: str):
        super().__init__(f"{loc}: {message}")
        self.loc = loc
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, STRING, KEYWORD, SYMBOL, EOF
    text: str
    value: object
    loc: SourceLoc


def tokenize(text: str, origin: str) -> list[Token]:
    """Split source text into tokens; raises :class:`LexError` on bad input."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def loc() -> SourceLoc:
        return SourceLoc(origin, line, col)

    def advance(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance()
            continue
        if text.startswith("/*", i):
            start = loc()
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance()
            if i >= n:
                raise LexError(start, "unterminated block comment")
            advance(2)
            continue
        if ch == '"':
            start = loc()
            advance()
            buf = []
            while i < n and text[i] != '"':
                if text[i] == "\n":
                    raise LexError(start, "unterminated string literal")
                if text[i] == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        raise LexError(loc(), "unsupported escape sequence")
                    buf.append(text[i + 1])
                    advance(2)
                else:
                    buf.append(text[i])
                    advance()
            if i >= n:
                raise LexError(start, "unterminated string literal")
            advance()
            tokens.append(Token("STRING", '"' + "".join(buf) + '"', "".join(buf), start))
            continue
        if ch.isdigit():
            start = loc()
            j = i
            while j < n and text[j].isdigit():
                j += 1
            lit = text[i:j]
            advance(j - i)
            tokens.append(Token("INT", lit, int(lit), start))
            continue
        if ch.isalpha() or ch == "_":
            start = loc()
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            advance(j - i)
            kind = "KEYWORD" if name in KEYWORDS else "NAME"
            value = name == "true" if name in ("true", "false") else name
            tokens.append(Token(kind, name, value, start))
            continue
        if ch in _GUILLEMETS:
            tokens.append(Token("SYMBOL", _GUILLEMETS[ch], _GUILLEMETS[ch], loc()))
            advance()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYMBOL", sym, sym, loc()))
                advance(len(sym))
                break
        else:
            raise LexError(loc(), f"unexpected character {ch!r}")

    tokens.append(Token("EOF", "", None, loc()))
    return tokens
