"""Text front end: expressions, differential forms and solution files.

Grammar (precedence low to high)::

    sum     := product (('+'|'-') product)*
    product := unary (('*'|'/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' exponent)?          right-associative
    atom    := number | name | name '(' args ')' | 'D[' ints ']' name '(' args ')'
             | '(' sum ')'

Decimal literals are read as exact rationals.  Exponents must reduce to
rational constants.  ``sqrt(e)`` is ``e^(1/2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import expr as E

__all__ = ["ParseError", "parse", "parse_form", "parse_solution", "RESERVED"]

RESERVED = ("x", "y", "z", "t", "u", "v", "w", "p", "nu", "tau", "k", "alpha_x", "alpha_t")
DIFFERENTIALS = {f"d{n}": i for i, n in enumerate("xyztuvwp")}


class ParseError(ValueError):
    """Raised on malformed input; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{msg} at position {pos}")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<deriv>D\[\s*\d+(?:\s*,\s*\d+)*\s*\])"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<wedge>/\\)|(?P<op>[-+*/^(),=]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    text = text.replace("−", "-")
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, auto_declare: bool, allow_wedge: bool = False):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.auto_declare = auto_declare
        self.allow_wedge = allow_wedge

    # helpers
    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise ParseError(msg, tok.pos, self.text)

    def accept(self, text: str) -> bool:
        if self.cur.kind in ("op", "wedge") and self.cur.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}")

    # grammar
    def sum(self) -> E.Expr:
        terms = [self.product()]
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.cur.text
            self.i += 1
            t = self.product()
            terms.append(t if op == "+" else E.neg(t))
        return E.add(*terms)

    def product(self) -> E.Expr:
        left = self.unary()
        while self.cur.kind == "op" and self.cur.text in "*/":
            op_tok = self.cur
            self.i += 1
            right = self.unary()
            if op_tok.text == "*":
                left = E.mul(left, right)
            else:
                if right.is_zero_literal:
                    self.error("zero denominator", op_tok)
                left = E.div(left, right)
        return left

    def unary(self) -> E.Expr:
        if self.accept("-"):
            return E.neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> E.Expr:
        base = self.atom()
        if self.cur.kind == "op" and self.cur.text == "^":
            tok = self.cur
            self.i += 1
            ex = self.unary_exponent()
            if not isinstance(ex, E.Const):
                self.error("exponent must be a rational constant", tok)
            if ex.value < 0 and base.is_zero_literal:
                self.error("zero denominator", tok)
            return E.power(base, ex.value)
        return base

    def unary_exponent(self) -> E.Expr:
        if self.accept("-"):
            return E.neg(self.unary_exponent())
        if self.accept("+"):
            return self.unary_exponent()
        return self.power()

    def args(self) -> list[E.Expr]:
        self.expect("(")
        out = [self.sum()]
        while self.accept(","):
            out.append(self.sum())
        self.expect(")")
        return out

    def atom(self) -> E.Expr:
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            return E.const(Fraction(tok.text))  # decimals are read exactly
        if tok.kind == "deriv":
            self.i += 1
            idx = [int(s) for s in re.findall(r"\d+", tok.text)]
            if self.cur.kind != "name":
                self.error("expected function name after derivative marker")
            name = self.cur.text
            self.i += 1
            a = self.args()
            if any(i < 1 or i > len(a) for i in idx):
                self.error("derivative slot out of range", tok)
            return E.call(name, a, idx)
        if tok.kind == "name":
            self.i += 1
            if self.cur.kind == "op" and self.cur.text == "(":
                a = self.args()
                if tok.text == "sqrt":
                    if len(a) != 1:
                        self.error("sqrt takes one argument", tok)
                    return E.sqrt(a[0])
                if tok.text in RESERVED:
                    self.error(f"{tok.text!r} is a variable, not a function", tok)
                return E.call(tok.text, a)
            name = tok.text
            if self.allow_wedge and name in DIFFERENTIALS:
                self.error("differential inside coefficient", tok)
            if not E.is_declared(name):
                if not self.auto_declare:
                    self.error(f"unknown symbol {name!r}", tok)
            return E.symbol(name)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            e = self.sum()
            self.expect(")")
            return e
        if tok.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {tok.text!r}")


def parse(text: str, auto_declare: bool = False) -> E.Expr:
    """Parse a DSL string into a normalized expression."""
    p = _Parser(text, auto_declare)
    e = p.sum()
    if p.cur.kind != "end":
        p.error(f"unexpected token {p.cur.text!r}")
    return e


def parse_form(text: str, auto_declare: bool = False):
    """Parse ``coef d.. /\\ d.. + coef d.. - ...`` into a KForm.

    A term is an optional coefficient followed by one or more differentials
    joined by ``/\\``.  A bare coefficient is a 0-form term.
    """
    from .exterior import KForm

    text = text.replace("∧", "/\\").replace("−", "-")
    p = _Parser(text, auto_declare, allow_wedge=True)
    terms: dict[tuple, E.Expr] = {}
    degree = None
    sign = 1
    first = True
    while True:
        tok = p.cur
        if tok.kind == "end":
            if first:
                p.error("empty form")
            break
        if not first:
            if p.accept("+"):
                sign = 1
            elif p.accept("-"):
                sign = -1
            else:
                p.error("expected '+' or '-' between form terms")
        else:
            sign = -1 if p.accept("-") else 1
            if sign == 1:
                p.accept("+")
        first = False
        coef: E.Expr = E.ONE
        if not (p.cur.kind == "name" and p.cur.text in DIFFERENTIALS):
            coef = p.product()
        diffs: list[int] = []
        while p.cur.kind == "name" and p.cur.text in DIFFERENTIALS:
            diffs.append(DIFFERENTIALS[p.cur.text])
            p.i += 1
            if not p.accept("/\\"):
                break
            if not (p.cur.kind == "name" and p.cur.text in DIFFERENTIALS):
                p.error("expected differential after '/\\'")
        if degree is None:
            degree = len(diffs)
        elif degree != len(diffs):
            p.error("terms of mixed degree", tok)
        # sort the differentials and track the permutation sign
        s = 1
        arr = list(diffs)
        if len(set(arr)) != len(arr):
            continue  # repeated differential: term vanishes
        for a in range(len(arr)):
            for b in range(len(arr) - 1 - a):
                if arr[b] > arr[b + 1]:
                    arr[b], arr[b + 1] = arr[b + 1], arr[b]
                    s = -s
        key = tuple(arr)
        c = E.mul(E.const(sign * s), coef)
        terms[key] = E.add(terms.get(key, E.ZERO), c)
    return KForm(degree or 0, terms)


def parse_solution(text: str, auto_declare: bool = True) -> dict[str, E.Expr]:
    """Parse ``name = expr`` lines (u, v, w, p and optional nu, tau)."""
    allowed = {"u", "v", "w", "p", "nu", "tau"}
    out: dict[str, E.Expr] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'name = expression'", 0, raw)
        lhs, rhs = line.split("=", 1)
        lhs = lhs.strip()
        if lhs not in allowed:
            raise ParseError(f"line {lineno}: unknown field {lhs!r}", 0, raw)
        if lhs in out:
            raise ParseError(f"line {lineno}: field {lhs!r} given twice", 0, raw)
        try:
            out[lhs] = parse(rhs, auto_declare=auto_declare)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc.args[0]}", exc.pos, raw) from None
    missing = {"u", "v", "w", "p"} - set(out)
    if missing:
        raise ParseError(f"missing fields: {', '.join(sorted(missing))}", 0, text)
    return out
