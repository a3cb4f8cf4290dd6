"""Navier-Stokes point-symmetry generators, their finite transforms, and covariance factors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as E
from . import numeric, ratfunc
from .exterior import VARS, FiniteTransform, VectorField

__all__ = [
    "GeneratorCatalog", "catalog", "generator", "GENERATOR_NAMES", "EQ40_GENERATORS",
    "apply_generator", "finite_scaling", "finite_rotation", "time_translation",
    "parse_transform", "CovarianceReport", "covariance_factor",
    "generator_consistency_check", "flow", "COS", "SIN",
]

x, y, z, t, u, v, w, p = VARS
nu = E.symbol("nu")
tau = E.symbol("tau")
k_sym = E.symbol("k")
COS = E.declare("cos_theta", "parameter")
SIN = E.declare("sin_theta", "parameter")

GENERATOR_NAMES = ("T", "X", "X1", "X2", "Rx", "Ry", "Rz")
EQ40_GENERATORS = ("T", "X", "Rx", "Ry", "Rz")


@dataclass(frozen=True)
class GeneratorCatalog:
    T: VectorField
    X: VectorField
    X1: VectorField
    X2: VectorField
    Rx: VectorField
    Ry: VectorField
    Rz: VectorField

    def __getitem__(self, name: str) -> VectorField:
        if name not in GENERATOR_NAMES:
            raise KeyError(f"unknown generator {name!r}; choose from {', '.join(GENERATOR_NAMES)}")
        return getattr(self, name)

    def select(self, names) -> list[VectorField]:
        return [self[n] for n in names]

    def items(self):
        return [(n, self[n]) for n in GENERATOR_NAMES]


def _rot(a, b, c, d, name):
    # a d/db - b d/da on both position and velocity pairs
    return VectorField.make(name, {b: a, a: E.neg(b), d: c, c: E.neg(d)})


_CATALOG = GeneratorCatalog(
    T=VectorField.make("T", {t: 1}),
    X=VectorField.make("X", {x: x, y: y, z: z, t: E.mul(E.const(2), t), u: -u, v: -v,
                             w: -w, p: E.mul(E.const(-2), p)}),
    X1=VectorField.make("X1", {x: x, y: y, z: z, u: u, v: v, w: w,
                               p: E.mul(E.const(2), p), nu: E.mul(E.const(2), nu)}),
    X2=VectorField.make("X2", {t: t, u: -u, v: -v, w: -w, p: E.mul(E.const(-2), p), nu: -nu}),
    Rx=_rot(y, z, v, w, "Rx"),
    Ry=_rot(z, x, w, u, "Ry"),
    Rz=_rot(x, y, u, v, "Rz"),
)


def catalog() -> GeneratorCatalog:
    """The seven generators: T, X, X1, X2, Rx, Ry, Rz (gravity terms dropped)."""
    return _CATALOG


def generator(name: str) -> VectorField:
    return _CATALOG[name]


def apply_generator(g: VectorField, e: E.Expr) -> E.Expr:
    """``sum_v g_v de/dv`` in rational normal form."""
    return ratfunc.simplify(g(e))


# --------------------------------------------------------------------------
# finite transforms


def _q(a) -> Fraction:
    return a if isinstance(a, Fraction) else Fraction(a)


def finite_scaling(ax, at, with_k: E.Symbol | str = "k") -> FiniteTransform:
    """The two-parameter scaling family with symbolic group parameter ``k``."""
    ax, at = _q(ax), _q(at)
    kk = with_k if isinstance(with_k, E.Symbol) else E.declare(with_k, "parameter", positive=True)

    def kp(e):
        return E.power(kk, e)

    mapping = {
        x: E.mul(kp(ax), x), y: E.mul(kp(ax), y), z: E.mul(kp(ax), z),
        t: E.mul(kp(at), t),
        u: E.mul(kp(ax - at), u), v: E.mul(kp(ax - at), v), w: E.mul(kp(ax - at), w),
        p: E.mul(kp(2 * ax - 2 * at), p),
        nu: E.mul(kp(2 * ax - at), nu),
        tau: E.mul(kp(at), tau),
    }
    return FiniteTransform(f"scale:ax={ax},at={at}", mapping, (kk,), {kk: E.ONE}, (ax, at))


_ROT_PAIRS = {"x": ((y, z), (v, w)), "y": ((z, x), (w, u)), "z": ((x, y), (u, v))}


def finite_rotation(axis: str, cos: E.Expr | None = None, sin: E.Expr | None = None) -> FiniteTransform:
    """Flow of the rotation generator about ``axis``; cos/sin default to symbols."""
    if axis not in _ROT_PAIRS:
        raise ValueError(f"axis must be x, y or z, not {axis!r}")
    c = COS if cos is None else E.as_expr(cos)
    s = SIN if sin is None else E.as_expr(sin)
    mapping = {}
    for a, b in _ROT_PAIRS[axis]:
        mapping[a] = E.sub(E.mul(a, c), E.mul(b, s))
        mapping[b] = E.add(E.mul(b, c), E.mul(a, s))
    params = tuple(q for q in (c, s) if isinstance(q, E.Symbol))
    ident = {q: val for q, val in ((COS, E.ONE), (SIN, E.ZERO)) if q in params}
    return FiniteTransform(f"rot:{axis}", mapping, params, ident)


def time_translation(shift: E.Symbol | E.Expr | str = "tau") -> FiniteTransform:
    sh = E.symbol(shift) if isinstance(shift, str) else shift
    params = (sh,) if isinstance(sh, E.Symbol) else ()
    return FiniteTransform("tshift", {t: E.add(t, sh)}, params, {sh: E.ZERO} if params else {})


def flow(name: str):
    """Finite transform of a catalog generator plus its parameter values at flow time eps.

    Returns ``(transform, values)`` where ``values(eps)`` maps the transform
    parameters to floats; scalings use k = exp(eps).
    """
    if name == "T":
        sh = E.declare("eps_shift", "parameter")
        return time_translation(sh), lambda eps: {sh: eps}
    if name in ("X", "X1", "X2"):
        ax, at = {"X": (1, 2), "X1": (1, 0), "X2": (0, 1)}[name]
        return finite_scaling(ax, at), lambda eps: {k_sym: math.exp(eps)}
    if name in ("Rx", "Ry", "Rz"):
        return finite_rotation(name[1]), lambda eps: {COS: math.cos(eps), SIN: math.sin(eps)}
    raise KeyError(name)


def parse_transform(spec: str) -> FiniteTransform:
    """``scale:ax=1,at=2`` | ``rot:z`` | ``tshift``."""
    spec = spec.strip()
    if spec.startswith("scale:"):
        kv = dict(part.split("=", 1) for part in spec[6:].split(",") if part)
        try:
            return finite_scaling(Fraction(kv["ax"]), Fraction(kv["at"]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad scaling spec {spec!r}") from exc
    if spec.startswith("rot:"):
        return finite_rotation(spec[4:])
    if spec == "tshift":
        return time_translation()
    raise ValueError(f"unknown transform spec {spec!r}")


# --------------------------------------------------------------------------
# covariance


@dataclass
class CovarianceReport:
    verdict: str  # "invariant" | "covariant" | "not-covariant"
    transform: str
    exponent: Fraction | None = None  # c in the factor k^c
    weight: tuple | None = None  # (a, b) with c = a*ax + b*at
    structural: bool = False
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "transform": self.transform,
               "structural": self.structural}
        if self.exponent is not None:
            out["exponent"] = _qs(self.exponent)
        if self.weight is not None:
            out["weight"] = [_qs(self.weight[0]), _qs(self.weight[1])]
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _qs(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _structural_exponent(ratio: E.Expr, kk: E.Symbol):
    r = ratfunc.simplify(ratio)
    if r == E.ONE:
        return Fraction(0)
    if r == kk:
        return Fraction(1)
    if isinstance(r, E.Pow) and r.base == kk:
        return r.exp
    return None


def _exponent(e: E.Expr, tr: FiniteTransform, rng, n_points: int):
    """Return (exponent, structural, witness) for the factor of ``e`` under ``tr``."""
    kk = tr.params[0]
    ratio = E.div(tr.apply(e), e)
    c = _structural_exponent(ratio, kk)
    if c is not None:
        return c, True, None
    # constancy in every variable except k, probabilistically
    for s in sorted(ratio.free - {kk}, key=lambda s: s._key):
        verdict = numeric.is_zero(E.diff(ratio, s), n_points=n_points, rng=rng, tol=1e-8)
        if not verdict.is_zero:
            return None, False, verdict.witness
    funcs = numeric.make_funcs([ratio], rng)
    env, vals, _ = numeric.sample_points([E.substitute(ratio, {kk: E.const(2)})], 1, rng, funcs)
    pt = {s: float(env[s][0]) for s in env}
    r2 = float(numeric.eval_numeric(ratio, {**pt, kk: 2.0}, funcs))
    r3 = float(numeric.eval_numeric(ratio, {**pt, kk: 3.0}, funcs))
    if r2 <= 0 or r3 <= 0:
        return None, False, {**{s.name: v for s, v in pt.items()}, "k": 2.0}
    c2 = math.log(r2) / math.log(2.0)
    c3 = math.log(r3) / math.log(3.0)
    if abs(c2 - c3) > 1e-7 * (1 + abs(c2)):
        return None, False, {**{s.name: v for s, v in pt.items()}, "k": 3.0}
    return Fraction(c2).limit_denominator(10**6), False, None


def covariance_factor(e: E.Expr, tr: FiniteTransform, rng=None, n_points: int = 25) -> CovarianceReport:
    """Decide whether ``tr(e) = k^c * e`` and report ``c``.

    ``tr`` must be a scaling transform with a symbolic group parameter.  The
    weight ``(a, b)`` is read off from the two unit transforms so that
    ``c = a*ax + b*at``.
    """
    if ratfunc.is_structural_zero(e):
        raise ValueError("zero expression has no covariance factor")
    if not tr.params:
        raise ValueError("transform has no symbolic group parameter")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    c, structural, witness = _exponent(e, tr, rng, n_points)
    if c is None:
        return CovarianceReport("not-covariant", tr.name, witness=witness)
    weight = None
    if tr.exponents is not None:
        a, sa, _ = _exponent(e, finite_scaling(1, 0, tr.params[0]), rng, n_points)
        b, sb, _ = _exponent(e, finite_scaling(0, 1, tr.params[0]), rng, n_points)
        if a is not None and b is not None:
            weight = (a, b)
            structural = structural and sa and sb
    verdict = "invariant" if c == 0 else "covariant"
    return CovarianceReport(verdict, tr.name, c, weight, structural)


@dataclass
class ConsistencyReport:
    ok: bool
    rows: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": self.rows}


def generator_consistency_check(ax, at) -> ConsistencyReport:
    """d/dk at k = 1 of each scaled variable equals the coefficient of ax*X1 + at*X2."""
    ax, at = _q(ax), _q(at)
    tr = finite_scaling(ax, at)
    gen = _CATALOG.X1.scaled(E.const(ax)) + _CATALOG.X2.scaled(E.const(at))
    rows = []
    ok = True
    for s in list(VARS) + [nu]:
        img = tr.image(s)
        slope = E.substitute(E.diff(img, k_sym), {k_sym: E.ONE})
        coeff = gen.coeff(s)
        exact = ratfunc.is_structural_zero(E.sub(slope, coeff))
        # independent numeric slope by central difference
        h = 1e-6
        pt = {q: 1.3 for q in img.free if q != k_sym}
        fd = (numeric.eval_numeric(img, {**pt, k_sym: 1 + h})
              - numeric.eval_numeric(img, {**pt, k_sym: 1 - h})) / (2 * h)
        cv = float(numeric.eval_numeric(coeff, pt))
        num_ok = abs(float(fd) - cv) < 1e-6 * (1 + abs(cv))
        ok = ok and exact and num_ok
        rows.append({"variable": s.name, "slope": E.to_str(ratfunc.simplify(slope)),
                     "coefficient": E.to_str(coeff), "exact": exact, "numeric": num_ok})
    return ConsistencyReport(ok, rows)
