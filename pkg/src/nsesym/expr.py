"""Immutable symbolic expressions kept in a canonical form.

Every node is built through the constructor functions :func:`add`, :func:`mul`,
:func:`power`, :func:`const`, :func:`call` and :func:`symbol`; those functions
flatten, fold constants, collect like terms and sort children, so two
expressions that differ only by ordering or grouping compare equal.

Fractional powers follow the real principal branch and are only defined for
positive bases.  Power rules that would change the value on a negative base
(``(x^2)^(1/2) -> x``) are applied only when the base is known to be
non-negative.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

__all__ = [
    "Expr", "Const", "Symbol", "Add", "Mul", "Pow", "Call",
    "const", "symbol", "declare", "add", "mul", "power", "call", "sub", "div",
    "neg", "sqrt", "as_expr", "diff", "substitute", "to_str", "is_nonneg",
    "CORE_VARIABLES", "ZERO", "ONE", "calls_in", "Number",
]

Number = Union[int, Fraction]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ("_key", "_hash", "free")

    def _finish(self, key, free):
        self._key = key
        self._hash = hash(key)
        self.free = free

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    # arithmetic sugar
    def __add__(self, o):
        return add(self, as_expr(o))

    def __radd__(self, o):
        return add(as_expr(o), self)

    def __sub__(self, o):
        return sub(self, as_expr(o))

    def __rsub__(self, o):
        return sub(as_expr(o), self)

    def __mul__(self, o):
        return mul(self, as_expr(o))

    def __rmul__(self, o):
        return mul(as_expr(o), self)

    def __truediv__(self, o):
        return div(self, as_expr(o))

    def __rtruediv__(self, o):
        return div(as_expr(o), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, e):
        return power(self, e)

    def __repr__(self):
        return f"Expr({to_str(self)!r})"

    def __str__(self):
        return to_str(self)

    @property
    def is_zero_literal(self) -> bool:
        return isinstance(self, Const) and self.value == 0


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Fraction):
        self.value = value
        self._finish((0, value), frozenset())


class Symbol(Expr):
    """A named scalar.  Created only through :func:`symbol` / :func:`declare`."""

    __slots__ = ("name", "kind", "positive", "order")

    def __init__(self, name: str, kind: str, positive: bool, order: int):
        self.name = name
        self.kind = kind
        self.positive = positive
        self.order = order
        self._finish((1, order, name), frozenset())
        self.free = frozenset((self,))

    def __reduce__(self):
        return (symbol, (self.name,))


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        self.terms = terms
        free = frozenset().union(*(t.free for t in terms))
        self._finish((5, tuple(t._key for t in terms)), free)


class Mul(Expr):
    """``coeff * prod(factors)``; factors are never constants or products."""

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff: Fraction, factors: tuple):
        self.coeff = coeff
        self.factors = factors
        free = frozenset().union(*(f.free for f in factors))
        self._finish((4, tuple(_factor_key(f) for f in factors), coeff), free)


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Fraction):
        self.base = base
        self.exp = exp
        self._finish((3, base._key, exp), base.free)


class Call(Expr):
    """Opaque function application; ``derivs`` lists differentiated slots (1-based)."""

    __slots__ = ("name", "args", "derivs")

    def __init__(self, name: str, args: tuple, derivs: tuple):
        self.name = name
        self.args = args
        self.derivs = derivs
        free = frozenset().union(*(a.free for a in args)) if args else frozenset()
        self._finish((2, name, derivs, tuple(a._key for a in args)), free)


def _factor_key(f: Expr):
    if isinstance(f, Pow):
        return (f.base._key, f.exp)
    return (f._key, Fraction(1))


# --------------------------------------------------------------------------
# symbols

_LOCK = threading.Lock()
_SYMBOLS: dict[str, Symbol] = {}

_CORE_ORDER = ["x", "y", "z", "t", "u", "v", "w", "p",
               "nu", "tau", "k", "alpha_x", "alpha_t"]
_KINDS = {"independent", "dependent", "parameter", "derivative"}


def declare(name: str, kind: str = "parameter", positive: bool = False) -> Symbol:
    """Create (or fetch) a symbol; the kind of an existing name cannot change."""
    if kind not in _KINDS:
        raise ValueError(f"unknown symbol kind {kind!r}")
    with _LOCK:
        s = _SYMBOLS.get(name)
        if s is not None:
            if s.kind != kind:
                raise ValueError(f"symbol {name!r} already declared as {s.kind}")
            return s
        order = _CORE_ORDER.index(name) if name in _CORE_ORDER else 100
        s = Symbol(name, kind, positive, order)
        _SYMBOLS[name] = s
        return s


def symbol(name: str) -> Symbol:
    """Look up a symbol by name, declaring an unknown name as a parameter."""
    s = _SYMBOLS.get(name)
    if s is not None:
        return s
    return declare(name, "parameter")


def is_declared(name: str) -> bool:
    return name in _SYMBOLS


for _n in "xyz":
    declare(_n, "independent")
declare("t", "independent", positive=True)
for _n in "uvwp":
    declare(_n, "dependent")
declare("nu", "parameter", positive=True)
declare("tau", "parameter", positive=True)
declare("k", "parameter", positive=True)
declare("alpha_x", "parameter")
declare("alpha_t", "parameter")

CORE_VARIABLES: tuple[Symbol, ...] = tuple(_SYMBOLS[n] for n in "xyztuvwp")

# --------------------------------------------------------------------------
# constructors

_CONST_CACHE: dict[Fraction, Const] = {}


def const(q: Number) -> Const:
    q = Fraction(q)
    c = _CONST_CACHE.get(q)
    if c is None:
        c = Const(q)
        if len(_CONST_CACHE) < 4096:
            _CONST_CACHE[q] = c
    return c


ZERO = const(0)
ONE = const(1)
MINUS_ONE = const(-1)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return const(x)
    if isinstance(x, str):
        return symbol(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _split_coeff(e: Expr) -> tuple[Fraction, Expr]:
    if isinstance(e, Mul):
        if len(e.factors) == 1:
            return e.coeff, e.factors[0]
        return e.coeff, (e if e.coeff == 1 else Mul(Fraction(1), e.factors))
    return Fraction(1), e


def _scale(rest: Expr, c: Fraction) -> Expr:
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul(c * rest.coeff, rest.factors)
    if isinstance(rest, Const):
        return const(c * rest.value)
    return Mul(c, (rest,))


def add(*args: Expr) -> Expr:
    c0 = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Const):
            c0 += a.value
        elif isinstance(a, Add):
            stack.extend(a.terms)
        else:
            c, rest = _split_coeff(a)
            coeffs[rest] = coeffs.get(rest, 0) + c
    terms = [_scale(r, c) for r, c in coeffs.items() if c != 0]
    if c0 != 0:
        terms.append(const(c0))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=lambda t: t._key)
    return Add(tuple(terms))


def mul(*args: Expr) -> Expr:
    coeff = Fraction(1)
    bases: dict[Expr, Fraction] = {}
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Const):
            if a.value == 0:
                return ZERO
            coeff *= a.value
        elif isinstance(a, Mul):
            coeff *= a.coeff
            stack.extend(a.factors)
        elif isinstance(a, Pow):
            bases[a.base] = bases.get(a.base, 0) + a.exp
        else:
            bases[a] = bases.get(a, 0) + 1
    factors = []
    again = False
    for b, e in bases.items():
        if e == 0:
            continue
        f = power(b, e) if e != 1 else b
        if isinstance(f, Const):
            coeff *= f.value
        elif isinstance(f, Mul):
            again = True
            coeff *= f.coeff
            factors.extend(f.factors)
        else:
            factors.append(f)
    if coeff == 0:
        return ZERO
    if again:
        return mul(const(coeff), *factors)
    if not factors:
        return const(coeff)
    if coeff == 1 and len(factors) == 1:
        return factors[0]
    factors.sort(key=_factor_key)
    return Mul(coeff, tuple(factors))


def _iroot(n: int, d: int):
    """Exact integer d-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = int(round(n ** (1.0 / d)))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** d == n:
            return c
    # large numbers: integer Newton
    lo, hi = 0, 1 << (n.bit_length() // d + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** d < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** d == n else None


def _const_power(q: Fraction, e: Fraction) -> Expr:
    if q == 0:
        if e < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return ZERO
    if e.denominator == 1:
        return const(q ** int(e))
    if q == 1:
        return ONE
    if q > 0:
        a, b = _iroot(q.numerator, e.denominator), _iroot(q.denominator, e.denominator)
        if a is not None and b is not None:
            return const(Fraction(a, b) ** e.numerator)
        whole = e.numerator // e.denominator
        frac = e - whole
        if whole != 0:
            return Mul(q ** whole, (Pow(const(q), frac),))
    return Pow(const(q), e)


def power(b: Expr, e) -> Expr:
    b = as_expr(b)
    e = Fraction(e)
    if e == 0:
        return ONE
    if e == 1:
        return b
    if isinstance(b, Const):
        return _const_power(b.value, e)
    if isinstance(b, Pow):
        b2, e2 = b.base, b.exp
        if e.denominator == 1 or e2.numerator % 2 == 1 or is_nonneg(b2):
            return power(b2, e2 * e)
        return Pow(b, e)
    if isinstance(b, Mul):
        if e.denominator == 1 or (b.coeff > 0 and all(is_nonneg(f) for f in b.factors)):
            return mul(_const_power(b.coeff, e), *(power(f, e) for f in b.factors))
        return Pow(b, e)
    return Pow(b, e)


def call(name: str, args: Iterable[Expr], derivs: Iterable[int] = ()) -> Call:
    return Call(name, tuple(as_expr(a) for a in args), tuple(sorted(derivs)))


def neg(a: Expr) -> Expr:
    return mul(MINUS_ONE, a)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, mul(MINUS_ONE, b))


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, power(b, -1))


def sqrt(a: Expr) -> Expr:
    return power(a, Fraction(1, 2))


def is_nonneg(e: Expr) -> bool:
    """Conservative test that ``e`` can never be negative where defined."""
    if isinstance(e, Const):
        return e.value >= 0
    if isinstance(e, Symbol):
        return e.positive
    if isinstance(e, Pow):
        if e.exp.denominator != 1:
            return True  # principal branch of a fractional power
        return e.exp.numerator % 2 == 0 or is_nonneg(e.base)
    if isinstance(e, Mul):
        return e.coeff > 0 and all(is_nonneg(f) for f in e.factors)
    if isinstance(e, Add):
        return all(is_nonneg(t) for t in e.terms)
    return False


# --------------------------------------------------------------------------
# calculus

@lru_cache(maxsize=1 << 17)
def diff(e: Expr, v: Symbol) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol ``v``."""
    if v not in e.free:
        return ZERO
    if isinstance(e, Symbol):
        return ONE
    if isinstance(e, Add):
        return add(*(diff(t, v) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        out = []
        for i, f in enumerate(fs):
            if v in f.free:
                out.append(mul(const(e.coeff), diff(f, v), *fs[:i], *fs[i + 1:]))
        return add(*out)
    if isinstance(e, Pow):
        return mul(const(e.exp), power(e.base, e.exp - 1), diff(e.base, v))
    if isinstance(e, Call):
        out = []
        for i, a in enumerate(e.args):
            if v in a.free:
                out.append(mul(Call(e.name, e.args, tuple(sorted(e.derivs + (i + 1,)))),
                               diff(a, v)))
        return add(*out)
    raise TypeError(type(e))


def substitute(e: Expr, mapping: Mapping[Symbol, Expr]) -> Expr:
    """Simultaneous substitution of symbols by expressions."""
    if not mapping:
        return e
    keys = frozenset(mapping)
    memo: dict[Expr, Expr] = {}

    def go(n: Expr) -> Expr:
        if not (n.free & keys):
            return n
        r = memo.get(n)
        if r is not None:
            return r
        if isinstance(n, Symbol):
            r = as_expr(mapping[n])
        elif isinstance(n, Add):
            r = add(*(go(t) for t in n.terms))
        elif isinstance(n, Mul):
            r = mul(const(n.coeff), *(go(f) for f in n.factors))
        elif isinstance(n, Pow):
            r = power(go(n.base), n.exp)
        elif isinstance(n, Call):
            r = Call(n.name, tuple(go(a) for a in n.args), n.derivs)
        else:
            raise TypeError(type(n))
        memo[n] = r
        return r

    return go(e)


def calls_in(e: Expr) -> dict[str, int]:
    """Names and arities of the opaque functions occurring in ``e``."""
    out: dict[str, int] = {}
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if isinstance(n, Call):
            out[n.name] = len(n.args)
            stack.extend(n.args)
        elif isinstance(n, Add):
            stack.extend(n.terms)
        elif isinstance(n, Mul):
            stack.extend(n.factors)
        elif isinstance(n, Pow):
            stack.append(n.base)
    return out


# --------------------------------------------------------------------------
# printing (output re-parses to the identical canonical structure)

def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_exp(e: Fraction) -> str:
    if e.denominator == 1 and e > 0:
        return str(e.numerator)
    return f"({_fmt_q(e)})"


def _atomic(e: Expr) -> str:
    """Render so the result can stand as the base of ``^``."""
    if isinstance(e, (Symbol, Call)):
        return to_str(e)
    if isinstance(e, Const) and e.value.denominator == 1 and e.value >= 0:
        return to_str(e)
    return f"({to_str(e)})"


def _factor_str(b: Expr, ex: Fraction) -> str:
    if ex == 1:
        return _atomic(b)
    return f"{_atomic(b)}^{_fmt_exp(ex)}"


def _mul_str(coeff: Fraction, factors: tuple) -> str:
    num, den = [], []
    for f in factors:
        b, ex = (f.base, f.exp) if isinstance(f, Pow) else (f, Fraction(1))
        if ex < 0 and ex.denominator == 1:
            den.append(_factor_str(b, -ex))
        else:
            num.append(_factor_str(b, ex))
    sign = "-" if coeff < 0 else ""
    c = abs(coeff)
    parts = []
    if c != 1 or not num:
        parts.append(_fmt_q(c))
    parts.extend(num)
    s = "*".join(parts)
    if den:
        s += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    return sign + s


def to_str(e: Expr) -> str:
    if isinstance(e, Const):
        return _fmt_q(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Call):
        head = e.name
        if e.derivs:
            head = "D[" + ",".join(map(str, e.derivs)) + "]" + head
        return head + "(" + ", ".join(to_str(a) for a in e.args) + ")"
    if isinstance(e, Pow):
        if e.exp < 0 and e.exp.denominator == 1:
            return _mul_str(Fraction(1), (e,))
        return _factor_str(e.base, e.exp)
    if isinstance(e, Mul):
        return _mul_str(e.coeff, e.factors)
    if isinstance(e, Add):
        out = ""
        for i, t in enumerate(e.terms):
            s = to_str(t)
            if i == 0:
                out = s
            elif s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    raise TypeError(type(e))
