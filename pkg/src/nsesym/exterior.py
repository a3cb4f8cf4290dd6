"""Differential forms on the space (x, y, z, t, u, v, w, p)."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping

from . import expr as E
from . import ratfunc

__all__ = [
    "VARS", "VAR_INDEX", "KForm", "VectorField", "FiniteTransform",
    "wedge", "d", "exterior_derivative", "interior", "interior_product",
    "lie_derivative", "pullback", "one_form", "zero_form", "dvar",
]

VARS: tuple[E.Symbol, ...] = E.CORE_VARIABLES
VAR_INDEX = {s: i for i, s in enumerate(VARS)}
DIFF_NAMES = tuple("d" + s.name for s in VARS)


class KForm:
    """A k-form stored as ``{strictly increasing index tuple: coefficient}``."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping[tuple, E.Expr] | None = None):
        if not 0 <= degree <= 8:
            raise ValueError(f"degree {degree} outside 0..8")
        self.degree = degree
        clean: dict[tuple, E.Expr] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"bad index tuple {idx} for a {degree}-form")
            c = E.as_expr(c)
            if not c.is_zero_literal:
                clean[idx] = c
        self.terms = dict(sorted(clean.items()))

    # basic algebra
    def __add__(self, o: "KForm") -> "KForm":
        if o.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.terms)
        for k, c in o.terms.items():
            out[k] = E.add(out.get(k, E.ZERO), c)
        return KForm(self.degree, out)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, {k: E.neg(c) for k, c in self.terms.items()})

    def __sub__(self, o: "KForm") -> "KForm":
        return self + (-o)

    def scale(self, f) -> "KForm":
        f = E.as_expr(f)
        return KForm(self.degree, {k: E.mul(f, c) for k, c in self.terms.items()})

    def map(self, fn) -> "KForm":
        return KForm(self.degree, {k: fn(c) for k, c in self.terms.items()})

    def simplify(self) -> "KForm":
        return self.map(ratfunc.simplify)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, o) -> bool:
        return isinstance(o, KForm) and o.degree == self.degree and o.terms == self.terms

    def __hash__(self):
        return hash((self.degree, tuple(self.terms.items())))

    def is_zero_literal(self) -> bool:
        return not self.terms

    def coefficient(self, idx: Iterable) -> E.Expr:
        return self.terms.get(tuple(idx), E.ZERO)

    def __repr__(self) -> str:
        return f"KForm({self.degree}, {format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)


def format_form(f: KForm) -> str:
    if not f.terms:
        return "0"
    parts = []
    for idx, c in f.terms.items():
        wedge_s = " /\\ ".join(DIFF_NAMES[i] for i in idx)
        cs = E.to_str(c)
        if not idx:
            parts.append(f"({cs})")
        elif cs == "1":
            parts.append(wedge_s)
        else:
            parts.append(f"({cs}) {wedge_s}")
    return " + ".join(parts)


def zero_form(f) -> KForm:
    return KForm(0, {(): E.as_expr(f)})


def dvar(v) -> KForm:
    """The basis 1-form dv."""
    s = v if isinstance(v, E.Symbol) else E.symbol(v)
    return KForm(1, {(VAR_INDEX[s],): E.ONE})


def one_form(coeffs: Mapping) -> KForm:
    return KForm(1, {(VAR_INDEX[s if isinstance(s, E.Symbol) else E.symbol(s)],): E.as_expr(c)
                     for s, c in coeffs.items()})


def _merge_sign(a: tuple, b: tuple):
    """Sign and sorted tuple of a+b, or (0, None) if they share an index."""
    if set(a) & set(b):
        return 0, None
    inv = 0
    for i in a:
        for j in b:
            if j < i:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


def wedge(a: KForm, b: KForm) -> KForm:
    deg = a.degree + b.degree
    if deg > 8:
        return KForm(8)
    out: dict[tuple, list] = {}
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            s, idx = _merge_sign(ia, ib)
            if not s:
                continue
            term = E.mul(ca, cb)
            out.setdefault(idx, []).append(term if s > 0 else E.neg(term))
    return KForm(deg, {k: E.add(*v) for k, v in out.items()})


def exterior_derivative(a: KForm) -> KForm:
    if a.degree == 8:
        return KForm(8)
    out: dict[tuple, list] = {}
    for idx, c in a.terms.items():
        for v, s in enumerate(VARS):
            if v in idx or s not in c.free:
                continue
            dc = E.diff(c, s)
            if dc.is_zero_literal:
                continue
            before = sum(1 for i in idx if i < v)
            new = tuple(sorted(idx + (v,)))
            out.setdefault(new, []).append(dc if before % 2 == 0 else E.neg(dc))
    return KForm(a.degree + 1, {k: E.add(*v) for k, v in out.items()})


d = exterior_derivative


@dataclass(frozen=True)
class VectorField:
    """A generator ``sum_v coeff[v] * d/dv``; ``coeffs`` may include parameters like nu."""

    name: str
    coeffs: tuple  # tuple of (Symbol, Expr), nonzero entries only

    @staticmethod
    def make(name: str, coeffs: Mapping) -> "VectorField":
        items = []
        for s, c in coeffs.items():
            s = s if isinstance(s, E.Symbol) else E.symbol(s)
            c = E.as_expr(c)
            if not c.is_zero_literal:
                items.append((s, c))
        items.sort(key=lambda sc: sc[0]._key)
        return VectorField(name, tuple(items))

    def coeff(self, s) -> E.Expr:
        s = s if isinstance(s, E.Symbol) else E.symbol(s)
        for k, c in self.coeffs:
            if k == s:
                return c
        return E.ZERO

    def vector(self) -> tuple:
        """Coefficients on the eight core variables, in canonical order."""
        return tuple(self.coeff(s) for s in VARS)

    def parameter_part(self) -> tuple:
        return tuple((s, c) for s, c in self.coeffs if s not in VAR_INDEX)

    def __call__(self, e: E.Expr) -> E.Expr:
        return E.add(*(E.mul(c, E.diff(e, s)) for s, c in self.coeffs if s in e.free))

    def __add__(self, o: "VectorField") -> "VectorField":
        acc: dict = dict(self.coeffs)
        for s, c in o.coeffs:
            acc[s] = E.add(acc.get(s, E.ZERO), c)
        return VectorField.make(f"{self.name}+{o.name}", acc)

    def scaled(self, q) -> "VectorField":
        q = E.as_expr(q)
        return VectorField.make(f"{q}*{self.name}", {s: E.mul(q, c) for s, c in self.coeffs})

    def __str__(self) -> str:
        parts = [f"({E.to_str(c)})*d/d{s.name}" for s, c in self.coeffs]
        return " + ".join(parts) if parts else "0"


def interior_product(V: VectorField, a: KForm) -> KForm:
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    vec = V.vector()
    out: dict[tuple, list] = {}
    for idx, c in a.terms.items():
        for j, i in enumerate(idx):
            vi = vec[i]
            if vi.is_zero_literal:
                continue
            term = E.mul(vi, c)
            new = idx[:j] + idx[j + 1:]
            out.setdefault(new, []).append(term if j % 2 == 0 else E.neg(term))
    return KForm(a.degree - 1, {k: E.add(*v) for k, v in out.items()})


interior = interior_product


def _parameter_term(V: VectorField, a: KForm) -> KForm | None:
    params = V.parameter_part()
    if not params:
        return None
    out = {}
    for idx, c in a.terms.items():
        t = E.add(*(E.mul(vc, E.diff(c, s)) for s, vc in params if s in c.free))
        if not t.is_zero_literal:
            out[idx] = t
    return KForm(a.degree, out)


def lie_derivative(V: VectorField, a: KForm) -> KForm:
    """Cartan's formula ``L_V = i_V d + d i_V``.

    Components of ``V`` on parameters (such as nu) act on coefficients as a
    directional derivative, since parameters carry no differentials.
    """
    if a.degree == 0:
        return KForm(0, {(): V(a.coefficient(()))})
    res = exterior_derivative(interior_product(V, a))
    if a.degree < 8:  # d of a top form vanishes
        res = interior_product(V, exterior_derivative(a)) + res
    extra = _parameter_term(V, a)
    return res + extra if extra is not None else res


@dataclass
class FiniteTransform:
    """A substitution ``symbol -> Expr`` with named parameters and their identity values."""

    name: str
    mapping: dict
    params: tuple = ()
    identity: dict = field(default_factory=dict)
    exponents: tuple | None = None  # (ax, at) for scaling transforms

    def apply(self, e: E.Expr) -> E.Expr:
        return E.substitute(e, self.mapping)

    __call__ = apply

    def image(self, s) -> E.Expr:
        s = s if isinstance(s, E.Symbol) else E.symbol(s)
        return self.mapping.get(s, s)

    def at(self, values: Mapping) -> "FiniteTransform":
        """Bind parameters (by symbol or name) to values."""
        m = {(k if isinstance(k, E.Symbol) else E.symbol(k)): E.as_expr(v)
             for k, v in values.items()}
        mapping = {s: E.substitute(e, m) for s, e in self.mapping.items()}
        params = tuple(p for p in self.params if p not in m)
        return FiniteTransform(self.name, mapping, params,
                               {p: v for p, v in self.identity.items() if p in params})

    def at_identity(self) -> "FiniteTransform":
        return self.at(self.identity)

    def is_identity(self) -> bool:
        return all(ratfunc.is_structural_zero(E.sub(e, s)) for s, e in self.mapping.items())

    def then(self, other: "FiniteTransform") -> "FiniteTransform":
        """Substitution composition: apply ``self`` then ``other`` to an expression."""
        keys = set(self.mapping) | set(other.mapping)
        mapping = {s: E.substitute(self.image(s), other.mapping) for s in keys}
        return FiniteTransform(f"{self.name};{other.name}", mapping,
                               self.params + other.params, {**self.identity, **other.identity})


def pullback(phi: FiniteTransform, a: KForm) -> KForm:
    """phi^* a: substitute coefficients, expand each dv by the chain rule."""
    dphi: dict[int, KForm] = {}

    def dimage(i: int) -> KForm:
        f = dphi.get(i)
        if f is None:
            img = phi.image(VARS[i])
            f = KForm(1, {(j,): E.diff(img, s) for j, s in enumerate(VARS) if s in img.free})
            dphi[i] = f
        return f

    acc = KForm(a.degree)
    for idx, c in a.terms.items():
        piece = zero_form(phi.apply(c))
        for i in idx:
            piece = wedge(piece, dimage(i))
        acc = acc + piece
    return acc


def max_terms(k: int) -> int:
    return comb(8, k)
