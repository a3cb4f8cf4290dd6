"""Rational normal form used for structural zero tests and simplification.

An expression is rewritten as ``N / D`` where ``N`` is a polynomial and ``D``
a single monomial over *atoms*.  Atoms are symbols, opaque calls (with
simplified arguments), constant radicals, and compound atoms: the monic part
of a multi-term polynomial that had to be inverted or raised to a fractional
power, or an opaque power whose base could not be split.  A compound atom
never appears in ``N`` with exponent >= 1; such powers are multiplied out.

This is not a complete canonical form (radical relations beyond the compound
atoms themselves are not tracked), but when it reports zero the expression is
identically zero on its domain of definition.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache

from . import expr as E

__all__ = ["RF", "from_expr", "to_expr", "simplify", "is_structural_zero", "TooLarge"]

MAX_TERMS = 4000


class TooLarge(RuntimeError):
    """The normal form grew past the term budget."""


Mono = tuple  # tuple of (atom Expr, Fraction exponent), sorted by atom key

_LOCK = threading.RLock()
_COMPOUND: dict[E.Expr, "RF"] = {}  # compound atom -> its value as an RF
_ONE_MONO: Mono = ()


def _akey(item):
    return item[0]._key


def _mono(d: dict) -> Mono:
    return tuple(sorted(((a, e) for a, e in d.items() if e != 0), key=_akey))


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) + e
    return _mono(d)


class RF:
    """``sum(num) / den`` with ``num: {Mono: Fraction}`` and ``den: Mono``."""

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: Mono = _ONE_MONO):
        self.num = num
        self.den = den

    @staticmethod
    def const(q) -> "RF":
        q = Fraction(q)
        return RF({_ONE_MONO: q} if q else {})

    @staticmethod
    def atom(a: E.Expr, e=Fraction(1)) -> "RF":
        return _normalize({((a, Fraction(e)),): Fraction(1)}, _ONE_MONO)

    def is_zero(self) -> bool:
        return not self.num

    def __add__(self, o: "RF") -> "RF":
        return rf_add(self, o)

    def __mul__(self, o: "RF") -> "RF":
        return rf_mul(self, o)

    def __neg__(self) -> "RF":
        return RF({m: -c for m, c in self.num.items()}, self.den)


# --------------------------------------------------------------------------
# normalization


def _split_den(num: dict, den: Mono):
    """Move negative exponents from numerator monomials into the denominator."""
    need: dict = {}
    for m in num:
        for a, e in m:
            if e < 0 and -e > need.get(a, 0):
                need[a] = -e
    if not need:
        return num, den
    out = {}
    for m, c in num.items():
        out_m = _mono_mul(m, tuple(need.items()))
        out[out_m] = out.get(out_m, 0) + c
    return out, _mono_mul(den, tuple(need.items()))


def _cancel_gcd(num: dict, den: Mono):
    """Divide numerator and denominator by their common monomial factor."""
    if not den or not num:
        return num, den
    g = dict(den)
    for m in num:
        md = dict(m)
        for a in list(g):
            g[a] = min(g[a], md.get(a, 0))
            if g[a] <= 0:
                del g[a]
        if not g:
            return num, den
    inv = tuple((a, -e) for a, e in g.items())
    num = {_mono_mul(m, inv): c for m, c in num.items()}
    return num, _mono_mul(den, inv)


_COS = "cos_theta"
_SIN = "sin_theta"


def _expand_compounds(num: dict):
    """Multiply out compound atoms with exponent >= 1 and apply cos^2 = 1 - sin^2.

    Returns ``(num, extra)`` where ``extra`` is a list of RFs to add (possibly
    carrying denominators), or ``None`` when nothing had to be expanded.
    """
    plain: dict = {}
    extra: list = []
    for m, c in num.items():
        keep = []
        factors: list[RF] = []
        for a, e in m:
            if isinstance(a, E.Const):
                whole = e.numerator // e.denominator
                if whole:
                    c = c * a.value ** whole
                    e = e - whole
                if e:
                    keep.append((a, e))
                continue
            comp = _COMPOUND.get(a)
            if comp is not None and e >= 1:
                whole = e.numerator // e.denominator
                rest = e - whole
                factors.append(rf_pow_int(comp, whole))
                if rest:
                    keep.append((a, rest))
                continue
            if isinstance(a, E.Symbol) and a.name == _COS and e >= 2:
                whole = e.numerator // e.denominator
                pairs = whole // 2
                rest = e - 2 * pairs
                sin = E.symbol(_SIN)
                one_minus = RF({_ONE_MONO: Fraction(1), ((sin, Fraction(2)),): Fraction(-1)})
                factors.append(rf_pow_int(one_minus, pairs))
                if rest:
                    keep.append((a, rest))
                continue
            keep.append((a, e))
        km = tuple(keep)
        if factors:
            acc = RF({km: c})
            for f in factors:
                acc = rf_mul(acc, f)
            extra.append(acc)
        else:
            plain[km] = plain.get(km, 0) + c
    return plain, extra


def _lex_vector(m: Mono, order: dict) -> tuple:
    v = [Fraction(0)] * len(order)
    for a, e in m:
        v[order[a]] = e
    return tuple(v)


def _divide_poly(num: dict, div: dict):
    """Exact quotient num/div if div divides num, else None."""
    atoms = set()
    for m in num:
        atoms.update(a for a, _ in m)
    for m in div:
        atoms.update(a for a, _ in m)
    order = {a: i for i, a in enumerate(sorted(atoms, key=lambda a: a._key))}
    dkeys = {m: _lex_vector(m, order) for m in div}
    lt_d = max(div, key=dkeys.__getitem__)
    lt_dv = dkeys[lt_d]
    lc_d = div[lt_d]
    rem = dict(num)
    quo: dict = {}
    for _ in range(20000):
        if not rem:
            return quo
        lt_n = max(rem, key=lambda m: _lex_vector(m, order))
        lv = _lex_vector(lt_n, order)
        diffv = [a - b for a, b in zip(lv, lt_dv)]
        if any(x < 0 for x in diffv):
            return None
        qm = _mono({a: diffv[i] for a, i in order.items()})
        qc = rem[lt_n] / lc_d
        quo[qm] = quo.get(qm, 0) + qc
        for m, c in div.items():
            pm = _mono_mul(qm, m)
            nv = rem.get(pm, 0) - qc * c
            if nv:
                rem[pm] = nv
            else:
                rem.pop(pm, None)
        if len(rem) > MAX_TERMS:
            return None
    return None


def _cancel_compound_dens(num: dict, den: Mono):
    changed = True
    while changed and num:
        changed = False
        for a, e in den:
            comp = _COMPOUND.get(a)
            if comp is None or comp.den:
                continue
            q = _divide_poly(num, comp.num)
            if q is None:
                continue
            num = q
            d = dict(den)
            d[a] = e - 1
            den = _mono(d)
            num, den = _split_den(num, den)
            num, den = _cancel_gcd(num, den)
            changed = True
            break
    return num, den


def _normalize(num: dict, den: Mono) -> RF:
    num = {m: c for m, c in num.items() if c}
    if not num:
        return RF({})
    num, den = _split_den(num, den)
    num, den = _cancel_gcd(num, den)
    num, extra = _expand_compounds(num)
    if extra:
        acc = RF(num, _ONE_MONO) if num else RF({})
        for x in extra:
            acc = _add_raw(acc, x)
        # the extras are already normal; divide the sum by den
        inv = RF({_ONE_MONO: Fraction(1)}, den)
        return rf_mul(acc, inv)
    num, den = _cancel_compound_dens(num, den)
    if len(num) > MAX_TERMS:
        raise TooLarge(f"{len(num)} terms")
    return RF(num, den)


def _add_raw(a: RF, b: RF) -> RF:
    if not a.num:
        return b
    if not b.num:
        return a
    if a.den == b.den:
        num = dict(a.num)
        for m, c in b.num.items():
            num[m] = num.get(m, 0) + c
        return _normalize(num, a.den)
    da, db = dict(a.den), dict(b.den)
    lcm = dict(da)
    for x, e in db.items():
        lcm[x] = max(lcm.get(x, 0), e)
    fa = _mono({x: e - da.get(x, 0) for x, e in lcm.items()})
    fb = _mono({x: e - db.get(x, 0) for x, e in lcm.items()})
    num: dict = {}
    for m, c in a.num.items():
        k = _mono_mul(m, fa)
        num[k] = num.get(k, 0) + c
    for m, c in b.num.items():
        k = _mono_mul(m, fb)
        num[k] = num.get(k, 0) + c
    return _normalize(num, _mono(lcm))


def rf_add(a: RF, b: RF) -> RF:
    return _add_raw(a, b)


def rf_mul(a: RF, b: RF) -> RF:
    if not a.num or not b.num:
        return RF({})
    if len(a.num) * len(b.num) > MAX_TERMS * 4:
        raise TooLarge("product too large")
    num: dict = {}
    for m1, c1 in a.num.items():
        for m2, c2 in b.num.items():
            k = _mono_mul(m1, m2)
            num[k] = num.get(k, 0) + c1 * c2
    return _normalize(num, _mono_mul(a.den, b.den))


def rf_pow_int(a: RF, n: int) -> RF:
    if n == 0:
        return RF.const(1)
    if n < 0:
        return rf_pow_int(rf_inv(a), -n)
    if len(a.num) == 1:
        (m, c), = a.num.items()
        return _normalize({tuple((x, e * n) for x, e in m): c ** n},
                          tuple((x, e * n) for x, e in a.den))
    result = RF.const(1)
    base = a
    while n:
        if n & 1:
            result = rf_mul(result, base)
        n >>= 1
        if n:
            base = rf_mul(base, base)
    return result


def _content(num: dict):
    """Split ``num`` as ``c * g * P`` with monomial gcd ``g`` and monic ``P``."""
    g = None
    for m in num:
        md = dict(m)
        if g is None:
            g = md
        else:
            for a in list(g):
                g[a] = min(g[a], md.get(a, 0))
                if g[a] <= 0:
                    del g[a]
    g = g or {}
    inv = tuple((a, -e) for a, e in g.items())
    rest = {_mono_mul(m, inv): c for m, c in num.items()}
    lead = max(rest, key=lambda m: tuple((a._key, e) for a, e in m))
    c = rest[lead]
    P = {m: v / c for m, v in rest.items()}
    return c, _mono(g), P


def _compound_atom(rf: RF) -> E.Expr:
    """Register (or fetch) the atom standing for ``rf``."""
    ex = to_expr(rf)
    with _LOCK:
        if ex not in _COMPOUND:
            _COMPOUND[ex] = rf
    return ex


def rf_inv(a: RF) -> RF:
    if not a.num:
        raise ZeroDivisionError("division by zero")
    if len(a.num) == 1:
        (m, c), = a.num.items()
        return _normalize({a.den: 1 / c}, m)
    c, g, P = _content(a.num)
    atom = _compound_atom(RF(P))
    den = _mono_mul(g, ((atom, Fraction(1)),))
    return _normalize({a.den: 1 / c}, den)


def _atom_nonneg(a: E.Expr, e: Fraction) -> bool:
    if e.denominator != 1:
        return True  # the atom itself is constrained to be positive
    if e.numerator % 2 == 0:
        return True
    if isinstance(a, (E.Symbol, E.Const)):
        return E.is_nonneg(a)
    comp = _COMPOUND.get(a)
    if comp is not None:
        return E.is_nonneg(a)
    return False


def _frac_power_ok(items, q: Fraction) -> bool:
    """Can ``prod(a^e)^q`` be rewritten as ``prod(a^(e q))``?"""
    unknown_odd = 0
    for a, e in items:
        if e.denominator != 1:
            continue
        if _atom_nonneg(a, Fraction(1)):
            continue
        if e.numerator % 2 == 0:
            ex = e * q
            if not (ex.denominator == 1 and ex.numerator % 2 == 0):
                return False
        else:
            unknown_odd += 1
    return unknown_odd <= 1


def rf_pow(a: RF, q: Fraction) -> RF:
    q = Fraction(q)
    if q.denominator == 1:
        return rf_pow_int(a, int(q))
    if not a.num:
        if q < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return RF({})
    if len(a.num) == 1:
        (m, c), = a.num.items()
        P = None
    else:
        c, m, P = _content(a.num)
    items = list(m) + [(x, -e) for x, e in a.den]
    compound = None
    if P is not None:
        compound = _compound_atom(RF(P))
        items.append((compound, Fraction(1)))
    if c > 0 and _frac_power_ok(items, q):
        out = from_expr(E._const_power(c, q))
        mono = _mono({x: e * q for x, e in items})
        return rf_mul(out, _normalize({mono: Fraction(1)}, _ONE_MONO))
    # opaque radical of the whole value
    atom = _compound_atom(a)
    return _normalize({((atom, q),): Fraction(1)}, _ONE_MONO)


# --------------------------------------------------------------------------
# conversion


@lru_cache(maxsize=1 << 16)
def from_expr(e: E.Expr) -> RF:
    if isinstance(e, E.Const):
        return RF.const(e.value)
    if isinstance(e, E.Symbol):
        return RF({((e, Fraction(1)),): Fraction(1)})
    if isinstance(e, E.Add):
        acc = RF({})
        for t in e.terms:
            acc = rf_add(acc, from_expr(t))
        return acc
    if isinstance(e, E.Mul):
        acc = RF.const(e.coeff)
        for f in e.factors:
            acc = rf_mul(acc, from_expr(f))
        return acc
    if isinstance(e, E.Pow):
        if isinstance(e.base, E.Const):
            c = e.base.value
            if c > 0:
                return _normalize({((e.base, e.exp),): Fraction(1)}, _ONE_MONO)
            return RF({((e, Fraction(1)),): Fraction(1)})
        return rf_pow(from_expr(e.base), e.exp)
    if isinstance(e, E.Call):
        args = tuple(simplify(x) for x in e.args)
        c = E.Call(e.name, args, e.derivs)
        return RF({((c, Fraction(1)),): Fraction(1)})
    raise TypeError(type(e))


def _mono_expr(m: Mono) -> list:
    return [E.power(a, e) for a, e in m]


def to_expr(rf: RF) -> E.Expr:
    if not rf.num:
        return E.ZERO
    terms = [E.mul(E.const(c), *_mono_expr(m)) for m, c in rf.num.items()]
    n = E.add(*terms)
    if not rf.den:
        return n
    return E.mul(n, *(E.power(a, -e) for a, e in rf.den))


@lru_cache(maxsize=1 << 15)
def simplify(e: E.Expr) -> E.Expr:
    """Return an equivalent expression in rational normal form.

    Falls back to ``e`` unchanged if the normal form exceeds the term budget.
    """
    try:
        return to_expr(from_expr(e))
    except TooLarge:
        return e


def is_structural_zero(e: E.Expr) -> bool:
    if e.is_zero_literal:
        return True
    try:
        return from_expr(e).is_zero()
    except TooLarge:
        return False
