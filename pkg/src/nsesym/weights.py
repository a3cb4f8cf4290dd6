"""Isobaric weights, homogeneity degrees and the criticality / smoothness classification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from . import expr as E
from . import ratfunc

__all__ = [
    "Weight", "NonIsobaricArgument", "BASE_WEIGHTS", "weight_of", "grade",
    "homogeneity_degree", "ScalingExponents", "CriticalityReport", "classify",
    "ScenarioReport", "smoothness_scenario", "energy_scaling_exponent",
    "isobaric_diagnostic",
]


@dataclass(frozen=True)
class Weight:
    """``a*alpha_x + b*alpha_t``."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __add__(self, o: "Weight") -> "Weight":
        return Weight(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "Weight") -> "Weight":
        return Weight(self.a - o.a, self.b - o.b)

    def __mul__(self, q) -> "Weight":
        q = Fraction(q)
        return Weight(self.a * q, self.b * q)

    __rmul__ = __mul__

    def __neg__(self) -> "Weight":
        return Weight(-self.a, -self.b)

    def at(self, ax, at) -> Fraction:
        return self.a * Fraction(ax) + self.b * Fraction(at)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __str__(self) -> str:
        return f"({_qs(self.a)}, {_qs(self.b)})"

    def to_json(self) -> list:
        return [_qs(self.a), _qs(self.b)]


ZERO_W = Weight(0, 0)

BASE_WEIGHTS = {
    "x": Weight(1, 0), "y": Weight(1, 0), "z": Weight(1, 0),
    "t": Weight(0, 1), "tau": Weight(0, 1),
    "u": Weight(1, -1), "v": Weight(1, -1), "w": Weight(1, -1),
    "p": Weight(2, -2), "nu": Weight(2, -1),
}


class NonIsobaricArgument(ValueError):
    """An opaque function was applied to an argument of nonzero weight."""

    def __init__(self, call: E.Expr, weight):
        self.call = call
        self.weight = weight
        super().__init__(f"non-isobaric argument in {E.to_str(call)}: weight {weight}")


def _qs(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def grade(e: E.Expr, table: Callable[[E.Symbol], object], zero, strict_calls: bool = True):
    """Common grading of ``e`` under an additive symbol grading, or ``None``.

    ``table`` maps a symbol to its grade; ``zero`` is the neutral grade.  With
    ``strict_calls`` an opaque call whose argument is not of grade ``zero``
    raises :class:`NonIsobaricArgument`; otherwise it yields ``None``.
    """
    memo: dict = {}
    missing = object()

    def go(n: E.Expr):
        r = memo.get(n, missing)
        if r is not missing:
            return r
        if isinstance(n, E.Const):
            r = zero
        elif isinstance(n, E.Symbol):
            r = table(n)
        elif isinstance(n, E.Mul):
            r = zero
            for f in n.factors:
                g = go(f)
                if g is None:
                    r = None
                    break
                r = r + g
        elif isinstance(n, E.Pow):
            g = go(n.base)
            r = None if g is None else g * n.exp
        elif isinstance(n, E.Add):
            gs = [go(tm) for tm in n.terms]
            r = gs[0] if gs[0] is not None and all(g == gs[0] for g in gs) else None
        elif isinstance(n, E.Call):
            for a in n.args:
                g = go(a)
                if g != zero:
                    if strict_calls:
                        raise NonIsobaricArgument(n, g)
                    memo[n] = None
                    return None
            r = zero
        else:
            raise TypeError(type(n))
        memo[n] = r
        return r

    # expand first so that cancellations across terms are seen
    return go(ratfunc.simplify(e))


def weight_of(e: E.Expr) -> Weight | None:
    """Isobaric weight of ``e`` or ``None`` if its monomials disagree."""
    return grade(e, lambda s: BASE_WEIGHTS.get(s.name, ZERO_W), ZERO_W)


def isobaric_diagnostic(e: E.Expr) -> dict:
    """Non-raising summary: ``{"isobaric": bool, "weight": ..., "reason": ...}``."""
    try:
        w = weight_of(e)
    except NonIsobaricArgument as exc:
        return {"isobaric": False, "weight": None, "reason": str(exc)}
    if w is None:
        return {"isobaric": False, "weight": None, "reason": "monomials of different weight"}
    return {"isobaric": True, "weight": w.to_json(), "reason": ""}


def homogeneity_degree(e: E.Expr, variables: Iterable) -> Fraction | None:
    """Degree ``d`` with ``e(lam*vars) = lam^d e``, or ``None``."""
    names = {v.name if isinstance(v, E.Symbol) else str(v) for v in variables}
    return grade(e, lambda s: Fraction(1) if s.name in names else Fraction(0), Fraction(0),
                 strict_calls=False)


# --------------------------------------------------------------------------
# criticality


@dataclass(frozen=True)
class ScalingExponents:
    ax: Fraction
    at: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ax", Fraction(self.ax))
        object.__setattr__(self, "at", Fraction(self.at))

    @property
    def degenerate(self) -> bool:
        return self.ax == 0 and self.at == 0


def _exps(s, at=None) -> ScalingExponents:
    if isinstance(s, ScalingExponents):
        return s
    if at is None:
        s, at = s
    return ScalingExponents(s, at)


def energy_scaling_exponent(s, at=None) -> Fraction:
    """Exponent c in E' = k^c E for the kinetic energy: 5 ax - 2 at."""
    s = _exps(s, at)
    return 5 * s.ax - 2 * s.at


def _sign_verdict(d: Fraction) -> str:
    return "subcritical" if d < 0 else ("critical" if d == 0 else "supercritical")


@dataclass
class CriticalityReport:
    verdict: str
    energy_exponent: Fraction
    velocity_exponent: Fraction
    method: str
    severity_verdict: str
    mixed_sign_verdict: str | None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "energy_exponent": _qs(self.energy_exponent),
            "velocity_exponent": _qs(self.velocity_exponent),
            "method": self.method,
            "severity_verdict": self.severity_verdict,
            "mixed_sign_verdict": self.mixed_sign_verdict,
        }


def classify(s, at=None) -> CriticalityReport:
    """Energy criticality under the 5/2 law in inequality form.

    The severity comparison |ax - at| versus |3/2 ax| is reported alongside,
    and for ax*at < 0 the |at/ax| versus 1/2 rule is reported as information.
    """
    s = _exps(s, at)
    if s.degenerate:
        raise ValueError("degenerate scaling exponents (0, 0)")
    e = energy_scaling_exponent(s)
    lhs, rhs = abs(s.ax - s.at), abs(Fraction(3, 2) * s.ax)
    severity = "subcritical" if lhs > rhs else ("critical" if lhs == rhs else "supercritical")
    mixed = None
    if s.ax * s.at < 0:
        r = abs(s.at / s.ax)
        h = Fraction(1, 2)
        mixed = "subcritical" if r > h else ("critical" if r == h else "supercritical")
    return CriticalityReport(_sign_verdict(e), e, s.ax - s.at, "inequality-form", severity, mixed)


@dataclass
class ScenarioReport:
    applicable: bool
    scenario: int | None
    smooth_at_zero_possible: bool | None
    blowup_excluded: bool | None
    reason: str = ""
    time_exponent: Fraction | None = None
    space_exponent: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "scenario": self.scenario,
            "smooth_at_zero_possible": self.smooth_at_zero_possible,
            "blowup_excluded": self.blowup_excluded,
            "reason": self.reason,
            "time_exponent": None if self.time_exponent is None else _qs(self.time_exponent),
            "space_exponent": None if self.space_exponent is None else _qs(self.space_exponent),
        }


def smoothness_scenario(s, at=None) -> ScenarioReport:
    """Smoothness at t = 0 and the six sign/criticality scenarios.

    Scenarios 1-3 are the sub/critical/supercritical cases with both exponents
    positive, 4-6 the same with both negative; mixed signs fall in none.
    Blow-up is excluded only in scenario 4.
    """
    s = _exps(s, at)
    if s.degenerate:
        raise ValueError("degenerate scaling exponents (0, 0)")
    if s.ax == 0 or s.at == 0:
        which = "alpha_x" if s.ax == 0 else "alpha_t"
        return ScenarioReport(False, None, None, None,
                              f"not applicable: {which} = 0 leaves the exponents undefined")
    te = (s.ax - s.at) / s.at
    se = (s.ax - s.at) / s.ax
    smooth = te > 0 and se > 0
    verdict = classify(s).verdict
    offset = {"subcritical": 1, "critical": 2, "supercritical": 3}[verdict]
    if s.ax > 0 and s.at > 0:
        scen = offset
    elif s.ax < 0 and s.at < 0:
        scen = 3 + offset
    else:
        scen = None
    reason = "" if scen is not None else "mixed signs of alpha_x and alpha_t"
    return ScenarioReport(True, scen, smooth, scen == 4, reason, te, se)
