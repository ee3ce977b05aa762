"""Infix expression language for catalog formulas.

Grammar (standard precedence, binary operators left associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INTEGER)?
    atom    := INTEGER | NAME | '(' expr ')'

Rationals are written as quotients of integer literals (``1/2``).  Unary minus
binds tighter than ``*`` and looser than ``^``, so ``-x^2`` is ``-(x^2)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1,
             positions: list[tuple[int, int]] | None = None) -> list[Token]:
    """Split ``text`` into tokens; ``positions`` maps string offsets to (line, column)."""
    def where(offset: int) -> tuple[int, int]:
        if positions is not None:
            return positions[min(offset, len(positions) - 1)]
        return line, column + offset

    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            tokens.append(Token("int", m.group(1), *where(m.start(1))))
        elif m.group(2):
            tokens.append(Token("name", m.group(2), *where(m.start(2))))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", *where(m.start(3)))
            tokens.append(Token("op", ch, *where(m.start(3))))
        pos = m.end()
    tokens.append(Token("end", "", *where(len(text))))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.take()
        if tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.line, tok.column)
        return tok

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            sign = 1
            if self.peek().kind == "op" and self.peek().text == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok.kind != "int":
                raise ParseError("exponent must be an integer literal", tok.line, tok.column)
            if self.peek().kind == "op" and self.peek().text == "^":
                tok2 = self.peek()
                raise ParseError("chained exponents need parentheses", tok2.line, tok2.column)
            return Pow(base, sign * int(tok.text))
        return base

    def atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "int":
            return Num(int(tok.text))
        if tok.kind == "name":
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.line, tok.column)


def parse_expression(text: str, line: int = 1, column: int = 1,
                     positions: list[tuple[int, int]] | None = None) -> Expr:
    parser = _Parser(tokenize(text, line, column, positions))
    node = parser.expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected {tok.text!r} after expression", tok.line, tok.column)
    return node


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def format_expression(node: Expr) -> str:
    """Canonical text; parsing the output gives back the same tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = format_expression(node.operand)
        return f"-{inner}" if _prec(node.operand) >= 3 else f"-({inner})"
    if isinstance(node, Pow):
        inner = format_expression(node.base)
        if _prec(node.base) < 5:
            inner = f"({inner})"
        return f"{inner}^{node.exponent}"
    p = _PREC[node.op]
    left = format_expression(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = format_expression(node.right)
    if _prec(node.right) <= p or isinstance(node.right, Neg):
        right = f"({right})"
    if node.op in "+-":
        return f"{left} {node.op} {right}"
    return f"{left}{node.op}{right}"


def free_names(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return free_names(node.operand)
    if isinstance(node, Pow):
        return free_names(node.base)
    return free_names(node.left) | free_names(node.right)


@dataclass(frozen=True)
class SquareOnly:
    """A symbol known only through its square; it may appear with even exponents."""

    name: str
    square: object


def evaluate(node: Expr, env: Mapping[str, object], convert: Callable | None = None):
    """Evaluate with Python arithmetic on whatever values ``env`` provides.

    ``convert`` maps integer literals into the value domain (default Fraction).
    """
    if isinstance(node, Num):
        return convert(Fraction(node.value)) if convert else Fraction(node.value)
    if isinstance(node, Var):
        if node.name not in env:
            raise EvaluationError(f"unknown symbol {node.name!r}")
        value = env[node.name]
        if isinstance(value, SquareOnly):
            raise EvaluationError(f"{node.name} is only defined through {node.name}^2; use an even power")
        return value
    if isinstance(node, Neg):
        return -evaluate(node.operand, env, convert)
    if isinstance(node, Pow):
        if isinstance(node.base, Var) and isinstance(env.get(node.base.name), SquareOnly):
            if node.exponent % 2:
                raise EvaluationError(f"{node.base.name} is only defined through its square; odd power")
            return env[node.base.name].square ** (node.exponent // 2)
        base = evaluate(node.base, env, convert)
        return base ** node.exponent
    a = evaluate(node.left, env, convert)
    b = evaluate(node.right, env, convert)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if isinstance(b, Fraction) and b == 0:
        raise EvaluationError("division by zero")
    if hasattr(b, "is_zero") and b.is_zero():
        raise EvaluationError("division by zero")
    return a / b
