"""Lexer for the ASCII STL surface syntax.

Unicode operator aliases and word keywords are accepted on input and
normalized to canonical token kinds; lexemes keep the source text so a
token stream stays faithful to what was written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum, unique

from stlkit.errors import LexError


@unique
class TokenKind(Enum):
    ALWAYS = "ALWAYS"
    EVENTUALLY = "EVENTUALLY"
    UNTIL = "UNTIL"
    NOT = "NOT"
    AND = "AND"
    OR = "OR"
    IMPLIES = "IMPLIES"
    LPAREN = "LPAREN"
    RPAREN = "RPAREN"
    LBRACKET = "LBRACKET"
    RBRACKET = "RBRACKET"
    COMMA = "COMMA"
    LT = "LT"
    LE = "LE"
    GT = "GT"
    GE = "GE"
    EQ = "EQ"
    NE = "NE"
    PLUS = "PLUS"
    MINUS = "MINUS"
    STAR = "STAR"
    SLASH = "SLASH"
    ABS_BAR = "ABS_BAR"
    IDENT = "IDENT"
    NUMBER = "NUMBER"
    TRUE = "TRUE"
    FALSE = "FALSE"
    PLACEHOLDER = "PLACEHOLDER"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: tuple[int, int]

    def __repr__(self) -> str:  # compact form for test failures
        return f"{self.kind.value}({self.lexeme!r}@{self.span[0]})"


TEMPORAL_KINDS = frozenset({TokenKind.ALWAYS, TokenKind.EVENTUALLY, TokenKind.UNTIL})
CMP_KINDS = frozenset(
    {TokenKind.LT, TokenKind.LE, TokenKind.GT, TokenKind.GE, TokenKind.EQ, TokenKind.NE}
)
#: Token kinds that count as formula operators when classifying mismatches.
OPERATOR_KINDS = TEMPORAL_KINDS | CMP_KINDS | frozenset(
    {TokenKind.NOT, TokenKind.AND, TokenKind.OR, TokenKind.IMPLIES}
)

# Word-shaped lexemes that are reserved rather than identifiers.
_KEYWORDS = {
    "G": TokenKind.ALWAYS,
    "always": TokenKind.ALWAYS,
    "globally": TokenKind.ALWAYS,
    "F": TokenKind.EVENTUALLY,
    "eventually": TokenKind.EVENTUALLY,
    "U": TokenKind.UNTIL,
    "until": TokenKind.UNTIL,
    "not": TokenKind.NOT,
    "and": TokenKind.AND,
    "or": TokenKind.OR,
    "true": TokenKind.TRUE,
    "false": TokenKind.FALSE,
}

# Symbolic lexemes; multi-character entries must appear in the regex before
# their prefixes so maximal munch applies.
_SYMBOLS = {
    "->": TokenKind.IMPLIES,
    "→": TokenKind.IMPLIES,
    "||": TokenKind.OR,
    "&&": TokenKind.AND,
    "==": TokenKind.EQ,
    "!=": TokenKind.NE,
    "<=": TokenKind.LE,
    ">=": TokenKind.GE,
    "≤": TokenKind.LE,
    "≥": TokenKind.GE,
    "<": TokenKind.LT,
    ">": TokenKind.GT,
    "!": TokenKind.NOT,
    "¬": TokenKind.NOT,
    "&": TokenKind.AND,
    "|": TokenKind.ABS_BAR,
    "∧": TokenKind.AND,
    "∨": TokenKind.OR,
    "□": TokenKind.ALWAYS,
    "◊": TokenKind.EVENTUALLY,
    "⊤": TokenKind.TRUE,
    "⊥": TokenKind.FALSE,
    "φ": TokenKind.PLACEHOLDER,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    ",": TokenKind.COMMA,
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
}

_SYMBOL_ALT = "|".join(re.escape(s) for s in sorted(_SYMBOLS, key=len, reverse=True))
_TOKEN_RE = re.compile(
    rf"""(?P<WS>\s+)
       | (?P<NUMBER>\d+(?:\.\d+)?)
       | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
       | (?P<SYM>{_SYMBOL_ALT})
    """,
    re.VERBOSE,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def tokenize(text: str) -> list[Token]:
    """Split formula text into tokens, raising :class:`LexError` on junk.

    Spans are character offsets into ``text``; whitespace is skipped and
    everything else is covered by exactly one token.
    """
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(pos, text[pos])
        if m.lastgroup == "NUMBER":
            tokens.append(Token(TokenKind.NUMBER, m.group(), (m.start(), m.end())))
        elif m.lastgroup == "IDENT":
            lexeme = m.group()
            kind = _KEYWORDS.get(lexeme, TokenKind.IDENT)
            tokens.append(Token(kind, lexeme, (m.start(), m.end())))
        elif m.lastgroup == "SYM":
            tokens.append(Token(_SYMBOLS[m.group()], m.group(), (m.start(), m.end())))
        pos = m.end()
    return tokens


def line_col(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of a character offset."""
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    return line, offset - last_nl
