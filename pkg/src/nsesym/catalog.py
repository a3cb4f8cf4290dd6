"""Conserved forms B0, B2-B6, B8 transcribed term by term.

Each coefficient is written with the shorthands ``S = u^2+v^2+w^2`` and
``s = S^(1/2)`` and multiplied by the Euler number ``E = p/S``.  The listings
are verbatim, including entries that do not survive verification; corrections
live in a separate overlay produced by the solver (see ``conserved``).
"""

from __future__ import annotations

from functools import lru_cache

from . import expr as E
from .exterior import DIFF_NAMES, KForm
from .parser import parse

__all__ = ["RAW", "RAW_TERM_COUNTS", "catalog_form", "raw_terms", "euler_expr",
           "expand_shorthand", "CATALOG_DEGREES", "NoCatalogEntry"]

S_TXT = "(u^2+v^2+w^2)"
s_TXT = "(u^2+v^2+w^2)^(1/2)"

# (sign, coefficient / E, differentials)
RAW: dict[int, list[tuple[int, str, str]]] = {
    0: [(1, "1", "")],
    2: [
        (1, "(S + u^2)/S", "dx du"),
        (1, "(S*w + u*s*v)/(S*s)", "dx dv"),
        (1, "(u*s*w - v*S)/(S*s)", "dx dw"),
        (1, "(u*s*v - w*S)/(S*s)", "dy du"),
        (1, "(S + v^2)/S", "dy dv"),
        (1, "(s*v^3 + u*S*w)/(S*s*w)", "dy dw"),
        (1, "(u*s*w - v*S)/(S*s)", "dz du"),
        (1, "(s*v*w - u*S)/(S*s)", "dz dv"),
        (1, "(S + w^2)/S", "dz dw"),
        (1, "1", "dt dp"),
    ],
    3: [
        (1, "w/s", "dx dy dp"),
        (-1, "v/s", "dx dz dp"),
        (1, "u/s", "dy dz dp"),
        (1, "w/s", "dt du dv"),
        (-1, "v/s", "dt du dw"),
        (1, "u/s", "dt dv dw"),
    ],
    4: [
        (1, "(2*S - u^2 - v^2)/(2*S)", "dx dy du dv"),
        (1, "(2*S*u - w*v*s)/(2*S*s)", "dx dy du dw"),
        (1, "(S*s*w + 2*u*v*S)/(2*S*s*u)", "dx dy dv dw"),
        (-1, "(w*v*s + 2*u*S)/(2*S*s)", "dx dz du dv"),
        (1, "(2*S - u^2 - w^2)/(2*S)", "dx dz du dw"),
        (1, "(2*S*u*w - u^2*v*s)/(2*S*s*u)", "dx dz dv dw"),
        (1, "(S*w*s - 2*u*v*S)/(2*S*s*u)", "dy dz du dv"),
        (-1, "(u^2*v*s + 2*u*w*S)/(2*S*s*u)", "dy dz du dw"),
        (1, "(2*S - v^2 - w^2)/(2*S)", "dy dz dv dw"),
        (1, "(S + u^2)/S", "dx dt du dp"),
        (1, "(w*S + u*v*s)/(S*s)", "dx dt dv dp"),
        (1, "(u*s*w^2 - S*v*w)/(S*s*w)", "dx dt dw dp"),
        (1, "(u*s*v - S*w)/(S*s)", "dy dt du dp"),
        (1, "(S + v^2)/S", "dy dt dv dp"),
        (1, "(s*v*w^2 + S*u*w)/(S*s*w)", "dy dt dw dp"),
        (1, "(u*s*w^2 + S*v*w)/(S*s*w)", "dz dt du dp"),
        (1, "(s*v*w - S*u)/(S*s)", "dz dt dv dp"),
        (1, "(S + w^2)/S", "dz dt dw dp"),
    ],
    5: [
        (1, "u/s", "dx dy dz du dp"),
        (1, "v/s", "dx dy dz dv dp"),
        (1, "w/s", "dx dy dz dw dp"),
        (1, "u/s", "dx dt du dv dw"),
        (1, "v/s", "dy dt du dv dw"),
        (1, "w/s", "dz dt du dv dw"),
    ],
    6: [
        (1, "1", "dx dy dz du dv dw"),
        (1, "(2*S - u^2 - v^2)/(2*S)", "dx dy dt du dv dp"),
        (1, "(2*S*u - s*v*w)/(2*S*s)", "dx dy dt du dv dp"),
        (1, "(u^2*s*w + 2*S*u*v)/(2*S*s*u)", "dx dy dt dv dw dp"),
        (-1, "(s*v*w + 2*S*u)/(2*S*s)", "dx dz dt du dv dp"),
        (1, "(2*S - u^2 - w^2)/(2*S)", "dx dz dt du dv dp"),
        (-1, "(u*s*v - 2*S*w)/(2*S*s)", "dx dz dt dv dw dp"),
        (1, "(u*s*w - 2*S*v)/(2*S*s)", "dy dz dt du dv dp"),
        (-1, "(u*s*v + 2*S*w)/(2*S*s)", "dy dz dt du dv dp"),
        (1, "(2*S - v^2 - w^2)/(2*S)", "dy dz dt dv dw dp"),
    ],
    8: [(1, "1", "dx dy dz dt du dv dw dp")],
}

CATALOG_DEGREES = tuple(sorted(RAW))
RAW_TERM_COUNTS = {k: len(v) for k, v in RAW.items()}


class NoCatalogEntry(KeyError):
    """Degrees 1 and 7 have no conserved form in the catalog."""


def expand_shorthand(text: str) -> str:
    """Replace the S and s shorthands by their definitions."""
    out = []
    for i, ch in enumerate(text):
        if ch in "Ss" and (i == 0 or not text[i - 1].isalnum()) and \
                (i + 1 == len(text) or not (text[i + 1].isalnum() or text[i + 1] == "_")):
            out.append(S_TXT if ch == "S" else s_TXT)
        else:
            out.append(ch)
    return "".join(out)


def euler_expr() -> E.Expr:
    return parse("p/(u^2+v^2+w^2)")


def _indices(diffs: str) -> tuple:
    names = diffs.split()
    return tuple(DIFF_NAMES.index(n) for n in names)


@lru_cache(maxsize=None)
def raw_terms(k: int) -> tuple:
    """Listed terms as ``(index tuple, coefficient Expr including E)``, duplicates kept."""
    if k not in RAW:
        raise NoCatalogEntry("paper reports none" if k in (1, 7) else f"no degree-{k} entry")
    eu = euler_expr()
    out = []
    for sign, coef, diffs in RAW[k]:
        idx = _indices(diffs)
        if list(idx) != sorted(idx):
            raise AssertionError(f"non-canonical differential order in {diffs!r}")
        c = E.mul(E.const(sign), eu, parse(expand_shorthand(coef)))
        out.append((idx, c))
    return tuple(out)


@lru_cache(maxsize=None)
def catalog_form(k: int) -> KForm:
    """The transcribed conserved k-form; repeated monomials are summed."""
    if k in (1, 7):
        raise NoCatalogEntry("paper reports none")
    terms: dict = {}
    for idx, c in raw_terms(k):
        terms[idx] = E.add(terms.get(idx, E.ZERO), c)
    return KForm(k, terms)
