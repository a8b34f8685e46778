"""Recursive-descent parser for the expression grammar.

::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' integer)?
    base   := number | identifier | func '(' expr ')' | '(' expr ')'

A leading unary minus is accepted on terms and exponents as a harmless
extension, so printed output always parses back.
"""
from __future__ import annotations

from typing import Iterable

from gmpy2 import mpq

from .core import FUNCTIONS, ScalarExpr, const, func, sym
from .vartable import VarTable


class ParseError(ValueError):
    """Syntax error; ``offset`` is the byte offset into the UTF-8 input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownIdentifierError(ValueError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at byte {offset}")
        self.name = name
        self.offset = offset


class _Parser:
    def __init__(self, text: str, names):
        self.text = text
        self.pos = 0
        self.names = names

    def offset(self, pos=None) -> int:
        pos = self.pos if pos is None else pos
        return len(self.text[:pos].encode("utf-8"))

    def error(self, msg, pos=None):
        raise ParseError(msg, self.offset(pos))

    def skip(self):
        t = self.text
        while self.pos < len(t) and t[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        start = self.pos
        t = self.text
        while self.pos < len(t) and t[self.pos].isdigit() and t[self.pos].isascii():
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int(t[start:self.pos])

    def parse(self) -> ScalarExpr:
        if not self.peek():
            self.error("empty expression")
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> ScalarExpr:
        neg = False
        if self.peek() == "-":
            self.pos += 1
            neg = True
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            c = self.peek()
            if c == "+":
                self.pos += 1
                acc = acc + self.term()
            elif c == "-":
                self.pos += 1
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> ScalarExpr:
        acc = self.factor()
        while True:
            c = self.peek()
            if c == "*":
                self.pos += 1
                acc = acc * self.factor()
            elif c == "/":
                self.pos += 1
                pos = self.pos
                d = self.factor()
                if d.is_constant() and d.constant_value() == 0:
                    self.error("division by zero", pos)
                acc = acc / d
            else:
                return acc

    def factor(self) -> ScalarExpr:
        b = self.base()
        if self.peek() == "^":
            self.pos += 1
            sign = 1
            if self.peek() == "-":
                self.pos += 1
                sign = -1
            pos = self.pos
            n = sign * self.integer()
            if n < 0 and b.is_constant() and b.constant_value() == 0:
                self.error("zero to a negative power", pos)
            b = b ** n
        return b

    def base(self) -> ScalarExpr:
        c = self.peek()
        if not c:
            self.error("unexpected end of input")
        if c == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if c == "-":
            # unary minus binding a factor, e.g. "x*-y"
            self.pos += 1
            return -self.factor()
        if c.isdigit() and c.isascii():
            return const(mpq(self.integer()))
        if c.isalpha() and c.isascii():
            start = self.pos
            t = self.text
            while self.pos < len(t) and (t[self.pos].isalnum() or t[self.pos] == "_") and t[self.pos].isascii():
                self.pos += 1
            name = t[start:self.pos]
            if name in FUNCTIONS and self.peek() == "(":
                self.pos += 1
                arg = self.expr()
                self.expect(")")
                return func(name, arg)
            if self.names is not None and name not in self.names:
                raise UnknownIdentifierError(name, self.offset(start))
            return sym(name)
        self.error(f"unexpected character {c!r}")


def parse(text: str, vars: VarTable | Iterable[str] | None = None) -> ScalarExpr:
    """Parse ``text`` into a canonical expression.

    ``vars`` restricts the admissible identifiers; ``None`` admits any.
    """
    names = None
    if vars is not None:
        names = set(vars.names) if isinstance(vars, VarTable) else set(vars)
    return _Parser(text, names).parse()
