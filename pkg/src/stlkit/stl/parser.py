"""Recursive-descent parser and syntax checker for STL formulas.

Binding strength, loosest to tightest: ``->`` (right-associative), ``|``,
``&``, ``U`` (left-associative), then the prefix operators ``!``/``G``/``F``,
then atoms and parenthesized groups.  A parenthesized group is first tried
as the arithmetic side of a comparison and re-parsed as a formula group on
failure, so both ``(x + 1) > 0`` and ``(x > 0) & y > 0`` work.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from stlkit.errors import IntervalError, LexError, ParseError
from stlkit.stl.ast import (
    Abs,
    And,
    Atom,
    Atomic,
    BinOp,
    BoolConst,
    Const,
    Eventually,
    Expr,
    Formula,
    Implies,
    Interval,
    Neg,
    Not,
    Or,
    Always,
    Until,
    Var,
)
from stlkit.stl.tokens import Token, TokenKind, line_col, tokenize

_CMP_LEXEMES = {
    TokenKind.LT: "<",
    TokenKind.LE: "<=",
    TokenKind.GT: ">",
    TokenKind.GE: ">=",
    TokenKind.EQ: "==",
    TokenKind.NE: "!=",
}


class _Parser:
    def __init__(self, text: str, tokens: list[Token]):
        self.text = text
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, *kinds: TokenKind) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in kinds

    def take(self, *kinds: TokenKind) -> Token | None:
        if self.at(*kinds):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, what: str) -> Token:
        tok = self.take(kind)
        if tok is None:
            self.fail(f"expected {what}", expected=(what,))
        return tok

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        tok = self.peek()
        if tok is None:
            end = len(self.text)
            raise ParseError(f"{message}, found end of input", (end, end), expected)
        raise ParseError(f"{message}, found {tok.lexeme!r}", tok.span, expected)

    # -- formula levels -------------------------------------------------------

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.take(TokenKind.IMPLIES):
            right = self.parse_formula()  # right-associative
            return Implies(left, right)
        return left

    def parse_or(self) -> Formula:
        # An infix bar is unambiguous, so accept it as "or" alongside "||".
        left = self.parse_and()
        while self.take(TokenKind.OR, TokenKind.ABS_BAR):
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_until()
        while self.take(TokenKind.AND):
            left = And(left, self.parse_until())
        return left

    def parse_until(self) -> Formula:
        left = self.parse_unary()
        while self.take(TokenKind.UNTIL):
            interval = self.parse_optional_interval()
            left = Until(interval, left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        if self.take(TokenKind.NOT):
            return Not(self.parse_unary())
        if self.at(TokenKind.ALWAYS, TokenKind.EVENTUALLY):
            op = self.advance()
            interval = self.parse_optional_interval()
            operand = self.parse_unary()
            node = Always if op.kind == TokenKind.ALWAYS else Eventually
            return node(interval, operand)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self.fail("expected expression", expected=("expression",))
        if tok.kind == TokenKind.TRUE:
            self.advance()
            return BoolConst(True)
        if tok.kind == TokenKind.FALSE:
            self.advance()
            return BoolConst(False)
        # Atom first: covers "(x + 1) > 0" where the paren opens arithmetic.
        saved = self.pos
        try:
            return Atomic(self.parse_atom())
        except ParseError:
            self.pos = saved
        if self.take(TokenKind.LPAREN):
            inner = self.parse_formula()
            self.expect(TokenKind.RPAREN, "')'")
            return inner
        self.fail("expected expression", expected=("expression",))

    # -- intervals ----------------------------------------------------------

    def parse_optional_interval(self) -> Interval | None:
        open_tok = self.take(TokenKind.LBRACKET)
        if open_tok is None:
            return None
        lo_tok = self.expect(TokenKind.NUMBER, "interval lower bound")
        self.expect(TokenKind.COMMA, "','")
        hi_tok = self.expect(TokenKind.NUMBER, "interval upper bound")
        close_tok = self.expect(TokenKind.RBRACKET, "']'")
        lo, hi = float(lo_tok.lexeme), float(hi_tok.lexeme)
        if lo < 0 or lo >= hi:
            raise IntervalError(lo, hi, (open_tok.span[0], close_tok.span[1]))
        return Interval(lo, hi)

    # -- atoms and arithmetic -------------------------------------------------

    def parse_atom(self) -> Atom:
        lhs = self.parse_arith()
        tok = self.peek()
        if tok is None or tok.kind not in _CMP_LEXEMES:
            self.fail("expected comparison operator", expected=tuple(_CMP_LEXEMES.values()))
        self.advance()
        rhs = self.parse_arith()
        return Atom(lhs, _CMP_LEXEMES[tok.kind], rhs)

    def parse_arith(self) -> Expr:
        left = self.parse_term()
        while self.at(TokenKind.PLUS, TokenKind.MINUS):
            op = self.advance()
            left = BinOp("+" if op.kind == TokenKind.PLUS else "-", left, self.parse_term())
        return left

    def parse_term(self) -> Expr:
        left = self.parse_factor()
        while self.at(TokenKind.STAR, TokenKind.SLASH):
            op = self.advance()
            left = BinOp("*" if op.kind == TokenKind.STAR else "/", left, self.parse_factor())
        return left

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if tok is None:
            self.fail("expected expression", expected=("expression",))
        if tok.kind == TokenKind.NUMBER:
            self.advance()
            return Const(float(tok.lexeme))
        if tok.kind == TokenKind.MINUS:
            self.advance()
            operand = self.parse_factor()
            # Fold a negated literal into a signed constant.
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Neg(operand)
        if tok.kind == TokenKind.IDENT:
            self.advance()
            if tok.lexeme == "abs" and self.take(TokenKind.LPAREN):
                inner = self.parse_arith()
                self.expect(TokenKind.RPAREN, "')'")
                return Abs(inner)
            self._consume_time_suffix()
            return Var(tok.lexeme)
        if tok.kind == TokenKind.LPAREN:
            self.advance()
            inner = self.parse_arith()
            self.expect(TokenKind.RPAREN, "')'")
            return inner
        if tok.kind == TokenKind.ABS_BAR:
            self.advance()
            inner = self.parse_arith()
            self.expect(TokenKind.ABS_BAR, "'|'")
            return Abs(inner)
        self.fail("expected expression", expected=("expression",))

    def _consume_time_suffix(self) -> None:
        # "x[t]" is dataset notation for the signal value at the current
        # time; the suffix is normalized away.
        if not self.at(TokenKind.LBRACKET):
            return
        nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
        if nxt is None or nxt.kind != TokenKind.IDENT or nxt.lexeme != "t":
            return  # leave the bracket for the caller (e.g. a following U[  ])
        self.advance()
        self.advance()
        self.expect(TokenKind.RBRACKET, "']'")


def parse(text: str) -> Formula:
    """Parse formula text into a syntax tree.

    Raises :class:`LexError`, :class:`ParseError` or :class:`IntervalError`.
    """
    tokens = tokenize(text)
    parser = _Parser(text, tokens)
    formula = parser.parse_formula()
    if parser.peek() is not None:
        parser.fail("unexpected trailing input")
    return formula


# --- syntax checking -----------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: tuple[int, int]
    line: int
    col: int

    def render(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass
class CheckResult:
    diagnostics: list[Diagnostic] = field(default_factory=list)
    formula: Formula | None = None

    @property
    def ok(self) -> bool:
        return all(d.severity != "error" for d in self.diagnostics)


def check_syntax(text: str) -> CheckResult:
    """Check formula text, returning diagnostics instead of raising.

    The result is ok iff the text parses and all intervals are valid;
    style issues (constant-only comparisons, missing interval bounds)
    surface as warnings.
    """
    result = CheckResult()

    def add(severity: str, message: str, span: tuple[int, int]):
        line, col = line_col(text, span[0] if span[0] < len(text) else max(len(text) - 1, 0))
        result.diagnostics.append(Diagnostic(severity, message, span, line, col))

    try:
        formula = parse(text)
    except LexError as e:
        add("error", str(e), (e.position, e.position + 1))
        return result
    except IntervalError as e:
        add("error", str(e), e.span or (0, len(text)))
        return result
    except ParseError as e:
        add("error", str(e), e.span)
        return result

    result.formula = formula
    for node in _walk(formula):
        if isinstance(node, Atomic) and not (
            _has_var(node.atom.lhs) or _has_var(node.atom.rhs)
        ):
            add("warning", "degenerate comparison: no signal variable on either side", (0, len(text)))
        if isinstance(node, (Always, Eventually, Until)) and node.interval is None:
            add("warning", "temporal operator without interval bounds cannot be monitored", (0, len(text)))
    return result


def _walk(f: Formula):
    yield f
    match f:
        case Not(operand) | Always(_, operand) | Eventually(_, operand):
            yield from _walk(operand)
        case And(left, right) | Or(left, right) | Implies(left, right) | Until(_, left, right):
            yield from _walk(left)
            yield from _walk(right)
        case _:
            pass


def _has_var(e: Expr) -> bool:
    match e:
        case Var():
            return True
        case Const():
            return False
        case Neg(operand) | Abs(operand):
            return _has_var(operand)
        case BinOp(_, left, right):
            return _has_var(left) or _has_var(right)
    return False


def iter_formula_lines(text: str):
    """Yield (line_number, stripped_line) for a formula file.

    One formula per line; blank lines and lines starting with ``#`` are
    skipped.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line
