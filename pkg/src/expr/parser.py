"""
Reader and printer for the jet-expression DSL.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' factor)?
    base   := number | ident | func '(' args ')' | '(' expr ')'

Identifiers resolve against a :class:`~src.expr.frame.Frame`. A declared unknown
may be written bare (``F``) or with its exact declared argument list
(``F(h,u_x,h_x)``); its partial derivatives are written ``pd(F, h, u_x)``.
Lexing is delegated to :mod:`tokenize`, so every error carries the byte offset of
the offending token.
"""

import io
import logging
import re
import tokenize
from dataclasses import dataclass

import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.printing.str import StrPrinter

from src.exceptions import ParseError, UnknownIdentifierError
from src.expr.frame import Frame

logger = logging.getLogger(__name__)

FUNCTIONS = {
    "ln": sp.log,
    "exp": sp.exp,
    "sin": sp.sin,
    "cos": sp.cos,
    "sqrt": sp.sqrt,
    "besselJ": sp.besselj,
    "besselY": sp.bessely,
}
_ARITY = {"besselJ": 2, "besselY": 2}
_CONSTANTS = {"pi": sp.pi}
_OPERATORS = set("+-*/^(),")
_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?")
_SKIPPED = {tokenize.ENCODING, tokenize.NEWLINE, tokenize.NL, tokenize.INDENT, tokenize.DEDENT, tokenize.ENDMARKER}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _lex(text: str) -> list[_Token]:
    flat = re.sub(r"\s", " ", text)
    encoded = flat.encode()
    tokens = []
    try:
        for tok in tokenize.tokenize(io.BytesIO(encoded).readline):
            if tok.type in _SKIPPED:
                continue
            offset = len(flat[: tok.start[1]].encode())
            if tok.type == tokenize.NUMBER and _NUMBER.fullmatch(tok.string):
                tokens.append(_Token("num", tok.string, offset))
            elif tok.type == tokenize.NAME:
                tokens.append(_Token("name", tok.string, offset))
            elif tok.type == tokenize.OP and tok.string in _OPERATORS:
                tokens.append(_Token("op", tok.string, offset))
            else:
                raise ParseError(f"unexpected token '{tok.string}'", offset)
    except tokenize.TokenError as err:
        raise ParseError(f"unbalanced input: {err.args[0]}", len(encoded)) from err
    except SyntaxError as err:
        column = max((err.offset or 1) - 1, 0)
        raise ParseError(f"malformed token: {err.msg}", len(flat[:column].encode())) from err
    tokens.append(_Token("end", "", len(encoded)))
    return tokens


class _Parser:
    def __init__(self, text: str, frame: Frame):
        self.frame = frame
        self.tokens = _lex(text)
        self.position = 0

    @property
    def peek(self) -> _Token:
        return self.tokens[self.position]

    def advance(self) -> _Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def accept(self, op: str) -> bool:
        if self.peek.kind == "op" and self.peek.text == op:
            self.position += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            found = self.peek.text or "end of input"
            raise ParseError(f"expected '{op}' but found '{found}'", self.peek.offset)

    def parse(self) -> sp.Expr:
        value = self.expr()
        if self.peek.kind != "end":
            raise ParseError(f"unexpected token '{self.peek.text}'", self.peek.offset)
        return value

    def expr(self) -> sp.Expr:
        value = self.term()
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> sp.Expr:
        value = self.factor()
        while True:
            if self.accept("*"):
                value = value * self.factor()
            elif self.accept("/"):
                value = value / self.factor()
            else:
                return value

    def factor(self) -> sp.Expr:
        if self.accept("-"):
            return -self.factor()
        if self.accept("+"):
            return self.factor()
        value = self.base()
        if self.accept("^"):
            return value ** self.factor()
        return value

    def base(self) -> sp.Expr:
        token = self.advance()
        if token.kind == "num":
            return sp.Rational(token.text)
        if token.kind == "op" and token.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if token.kind != "name":
            found = token.text or "end of input"
            raise ParseError(f"unexpected token '{found}'", token.offset)
        if token.text in FUNCTIONS:
            return self.call(token)
        if token.text == "pd":
            return self.partial(token)
        if self.frame.has_unknown(token.text):
            return self.unknown(token)
        if token.text in _CONSTANTS:
            return _CONSTANTS[token.text]
        return self.coordinate(token)

    def arguments(self) -> list[sp.Expr]:
        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        return args

    def call(self, token: _Token) -> sp.Expr:
        args = self.arguments()
        arity = _ARITY.get(token.text, 1)
        if len(args) != arity:
            raise ParseError(f"{token.text} takes {arity} argument(s), got {len(args)}", token.offset)
        return FUNCTIONS[token.text](*args)

    def unknown(self, token: _Token) -> sp.Expr:
        applied = self.frame.unknown(token.text)
        if not (self.peek.kind == "op" and self.peek.text == "("):
            return applied
        args = tuple(self.arguments())
        if args != applied.args:
            declared = ",".join(self.frame.unknown_args(token.text))
            raise ParseError(f"unknown '{token.text}' only accepts its declared arguments ({declared})", token.offset)
        return applied

    def partial(self, token: _Token) -> sp.Expr:
        args = self.arguments()
        target, variables = args[0], args[1:]
        if not isinstance(target, AppliedUndef):
            raise ParseError("pd(...) differentiates a declared unknown only", token.offset)
        for variable in variables:
            if not isinstance(variable, sp.Symbol) or self.frame.coord(variable) is None:
                raise ParseError(f"pd(...) variable '{variable}' is not a frame coordinate", token.offset)
        return sp.diff(target, *variables)

    def coordinate(self, token: _Token) -> sp.Symbol:
        symbol = sp.Symbol(token.text)
        if self.frame.coord(symbol) is not None:
            return symbol
        base, underscore, _ = token.text.partition("_")
        if underscore and base in self.frame.independents:
            raise ParseError(f"derivative of independent variable '{base}' in '{token.text}'", token.offset)
        raise UnknownIdentifierError(f"unknown identifier '{token.text}'", token.offset)


def parse(text: str, frame: Frame) -> sp.Expr:
    """
    Parse DSL text into a sympy expression over the symbols of ``frame``.

    Args:
        text (str): Expression text, e.g. ``"u_t + u*u_x + h_x"``.
        frame (Frame): Declared coordinates, parameters and unknowns.

    Returns:
        sp.Expr: The parsed expression. Decimal literals become exact rationals.

    Raises:
        ParseError: On syntax errors or a derivative of an independent variable.
        UnknownIdentifierError: On an identifier the frame does not declare.
    """
    value = _Parser(text, frame).parse()
    logger.debug("parsed %r -> %s", text, value)
    return sp.sympify(value)


class DSLPrinter(StrPrinter):
    """String printer emitting text that :func:`parse` reads back."""

    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational).replace("**", "^")

    def _print_log(self, expr):
        return f"ln({self._print(expr.args[0])})"

    def _print_besselj(self, expr):
        return f"besselJ({self._print(expr.order)}, {self._print(expr.argument)})"

    def _print_bessely(self, expr):
        return f"besselY({self._print(expr.order)}, {self._print(expr.argument)})"

    def _print_Exp1(self, expr):
        return "exp(1)"

    def _print_Derivative(self, expr):
        target = expr.expr
        name = target.func.__name__ if isinstance(target, AppliedUndef) else self._print(target)
        variables = []
        for variable, count in expr.variable_count:
            variables.extend([self._print(variable)] * count)
        return f"pd({name}, {', '.join(variables)})"


def to_dsl(expr: sp.Expr) -> str:
    """Render ``expr`` in DSL syntax."""
    return DSLPrinter().doprint(expr).replace("**", "^")
