"""Numeric evaluation and probabilistic zero testing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import expr as E
from . import ratfunc

__all__ = [
    "EvalError", "eval_numeric", "PolyProfile", "Sampler", "evaluate_batch",
    "Verdict", "is_zero", "SIGNED",
]

SIGNED = frozenset("xyzuvw")
SINGULAR_EPS = 1e-6
LOW, HIGH = 0.5, 2.0


class EvalError(ValueError):
    """Missing symbol, division by zero or a negative fractional-power base."""


class PolyProfile:
    """Random dense quadratic ``c0 + sum b_i a_i + sum_{i<=j} c_ij a_i a_j``."""

    def __init__(self, arity: int, rng: np.random.Generator):
        self.arity = arity
        self.c0 = rng.uniform(-1, 1)
        self.b = rng.uniform(-1, 1, arity)
        Q = np.triu(rng.uniform(-1, 1, (arity, arity)))
        # symmetric Hessian-style matrix so that the quadratic is a^T M a
        self.M = (Q + Q.T) / 2

    def __call__(self, args, derivs: tuple = ()):
        n = len(derivs)
        if n == 0:
            val = self.c0 + sum(self.b[i] * args[i] for i in range(self.arity))
            for i in range(self.arity):
                for j in range(self.arity):
                    val = val + self.M[i, j] * args[i] * args[j]
            return val
        if n == 1:
            i = derivs[0] - 1
            val = self.b[i] + 0 * args[0]
            for j in range(self.arity):
                val = val + 2 * self.M[i, j] * args[j]
            return val
        if n == 2:
            i, j = derivs[0] - 1, derivs[1] - 1
            return 2 * self.M[i, j] + 0 * args[0]
        return 0 * args[0]


def _frac_pow_scalar(b, q: Fraction):
    if isinstance(b, (int, Fraction)):
        b = Fraction(b)
        if q.denominator == 1:
            if b == 0 and q < 0:
                raise EvalError("division by zero")
            return b ** q.numerator
        if b <= 0:
            raise EvalError("non-positive base under a fractional power")
        r = E._const_power(b, q)
        if isinstance(r, E.Const):
            return r.value
        return float(b) ** float(q)
    if q.denominator == 1:
        if b == 0 and q < 0:
            raise EvalError("division by zero")
        return b ** q.numerator
    if b <= 0:
        raise EvalError("non-positive base under a fractional power")
    return b ** float(q)


def eval_numeric(e: E.Expr, pt: Mapping, funcs: Mapping | None = None):
    """Evaluate ``e`` at one point.

    ``pt`` maps symbols or symbol names to numbers; if every value is an int
    or Fraction and no irrational radical appears, the result is exact.
    """
    vals = {}
    for k, v in pt.items():
        vals[k if isinstance(k, E.Symbol) else E.symbol(k)] = v
    funcs = funcs or {}
    memo: dict = {}

    def go(n: E.Expr):
        r = memo.get(n)
        if r is not None:
            return r
        if isinstance(n, E.Const):
            r = n.value
        elif isinstance(n, E.Symbol):
            if n not in vals:
                raise EvalError(f"no value for symbol {n.name!r}")
            r = vals[n]
        elif isinstance(n, E.Add):
            r = sum(go(t) for t in n.terms)
        elif isinstance(n, E.Mul):
            r = n.coeff
            for f in n.factors:
                r = r * go(f)
        elif isinstance(n, E.Pow):
            r = _frac_pow_scalar(go(n.base), n.exp)
        elif isinstance(n, E.Call):
            f = funcs.get(n.name)
            if f is None:
                raise EvalError(f"no instantiation for function {n.name!r}")
            r = f([go(a) for a in n.args], n.derivs)
        else:
            raise TypeError(type(n))
        memo[n] = r
        return r

    return go(e)


# --------------------------------------------------------------------------
# batch evaluation


@dataclass
class BatchResult:
    value: np.ndarray
    bad: np.ndarray
    scale: np.ndarray


def evaluate_batch(e: E.Expr, env: Mapping[E.Symbol, np.ndarray], funcs: Mapping,
                   memo: dict | None = None, state: dict | None = None) -> BatchResult:
    """Vectorized evaluation with a singular-point mask and a magnitude scale.

    ``memo`` and ``state`` may be shared across several expressions evaluated
    on the same points.
    """
    size = len(next(iter(env.values()))) if env else 1
    if memo is None:
        memo = {}
    if state is None:
        state = {"bad": np.zeros(size, bool), "scale": np.zeros(size)}
    bad = state["bad"]
    scale = state["scale"]

    def go(n: E.Expr) -> np.ndarray:
        r = memo.get(n)
        if r is not None:
            return r
        if isinstance(n, E.Const):
            r = np.full(size, float(n.value))
        elif isinstance(n, E.Symbol):
            if n not in env:
                raise EvalError(f"no value for symbol {n.name!r}")
            r = env[n]
        elif isinstance(n, E.Add):
            parts = [go(t) for t in n.terms]
            r = parts[0].copy()
            for p_ in parts[1:]:
                r = r + p_
            mx = np.max(np.abs(np.vstack(parts)), axis=0)
            np.maximum(scale, mx, out=scale)
        elif isinstance(n, E.Mul):
            r = np.full(size, float(n.coeff))
            for f in n.factors:
                r = r * go(f)
        elif isinstance(n, E.Pow):
            b = go(n.base)
            q = n.exp
            with np.errstate(all="ignore"):
                if q.denominator == 1:
                    if q < 0:
                        np.logical_or(bad, np.abs(b) < SINGULAR_EPS, out=bad)
                        safe = np.where(np.abs(b) < SINGULAR_EPS, 1.0, b)
                        r = safe ** float(q.numerator)
                    else:
                        r = b ** float(q.numerator)
                else:
                    np.logical_or(bad, b < SINGULAR_EPS, out=bad)
                    safe = np.where(b < SINGULAR_EPS, 1.0, b)
                    r = safe ** float(q)
        elif isinstance(n, E.Call):
            f = funcs.get(n.name)
            if f is None:
                raise EvalError(f"no instantiation for function {n.name!r}")
            r = np.asarray(f([go(a) for a in n.args], n.derivs), float)
            if r.shape != (size,):
                r = np.broadcast_to(r, (size,)).copy()
        else:
            raise TypeError(type(n))
        memo[n] = r
        return r

    v = go(e)
    bad |= ~np.isfinite(v)
    return BatchResult(v, bad, scale)


class Sampler:
    """Draws nondegenerate random points for a set of expressions."""

    def __init__(self, rng: np.random.Generator | int | None = None,
                 fixed: Mapping | None = None):
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        self.rng = rng
        self.fixed = {(k if isinstance(k, E.Symbol) else E.symbol(k)): v
                      for k, v in (fixed or {}).items()}

    def draw(self, symbols, n: int, unsigned=frozenset()) -> dict:
        env = {}
        names = {s.name: s for s in symbols}
        if "cos_theta" in names or "sin_theta" in names:
            th = self.rng.uniform(-math.pi, math.pi, n)
            env[E.symbol("cos_theta")] = np.cos(th)
            env[E.symbol("sin_theta")] = np.sin(th)
        for s in sorted(symbols, key=lambda s: s._key):
            if s in env:
                continue
            if s in self.fixed:
                env[s] = np.full(n, float(self.fixed[s]))
                continue
            vals = self.rng.uniform(LOW, HIGH, n)
            if s.name in SIGNED and s not in unsigned:
                vals = vals * self.rng.choice([-1.0, 1.0], n)
            env[s] = vals
        return env


def _radical_bases(e: E.Expr) -> frozenset:
    """Symbols appearing directly as the base of a fractional power."""
    out = set()
    stack = [e]
    seen = set()
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if isinstance(n, E.Pow):
            if n.exp.denominator != 1:
                if isinstance(n.base, E.Symbol):
                    out.add(n.base)
                elif isinstance(n.base, E.Mul):
                    out.update(f for f in n.base.factors if isinstance(f, E.Symbol))
            stack.append(n.base)
        elif isinstance(n, E.Add):
            stack.extend(n.terms)
        elif isinstance(n, E.Mul):
            stack.extend(n.factors)
        elif isinstance(n, E.Call):
            stack.extend(n.args)
    return frozenset(out)


def make_funcs(exprs, rng: np.random.Generator, funcs: Mapping | None = None) -> dict:
    """Fill in random quadratic instantiations for every opaque function used."""
    out = dict(funcs or {})
    for e in exprs:
        for name, arity in sorted(E.calls_in(e).items()):
            if name not in out:
                out[name] = PolyProfile(arity, rng)
    return out


def sample_points(exprs, n: int, rng, funcs: Mapping, fixed: Mapping | None = None,
                  max_rounds: int = 40):
    """Return ``(env, results)`` with ``n`` points where every expression is regular."""
    exprs = list(exprs)
    sampler = Sampler(rng, fixed)
    syms = frozenset().union(*(e.free for e in exprs)) if exprs else frozenset()
    unsigned = frozenset().union(*(_radical_bases(e) for e in exprs)) if exprs else frozenset()
    keep_env: dict = {s: [] for s in syms}
    keep_vals: list[list] = [[] for _ in exprs]
    keep_scale: list[list] = [[] for _ in exprs]
    got = 0
    batch = max(2 * n, 8)
    for _ in range(max_rounds):
        env = sampler.draw(syms, batch, unsigned)
        if not syms:
            env = {}
        memo: dict = {}
        res = []
        bad = np.zeros(batch, bool)
        for e in exprs:
            st = {"bad": np.zeros(batch, bool), "scale": np.zeros(batch)}
            r = evaluate_batch(e, env, funcs, memo, st) if syms else _const_batch(e, batch, funcs)
            res.append(r)
            bad |= r.bad
        ok = np.flatnonzero(~bad)[: n - got]
        for s in syms:
            keep_env[s].append(env[s][ok])
        for i, r in enumerate(res):
            keep_vals[i].append(r.value[ok])
            keep_scale[i].append(r.scale[ok])
        got += len(ok)
        if got >= n:
            break
    if got == 0:
        raise EvalError("could not find a regular sample point")
    env = {s: np.concatenate(v) for s, v in keep_env.items()}
    vals = [np.concatenate(v) for v in keep_vals]
    scales = [np.concatenate(v) for v in keep_scale]
    return env, vals, scales


def _const_batch(e: E.Expr, size: int, funcs) -> BatchResult:
    st = {"bad": np.zeros(size, bool), "scale": np.zeros(size)}
    return evaluate_batch(e, {E.symbol("x"): np.ones(size)}, funcs, {}, st)


# --------------------------------------------------------------------------
# verdicts


@dataclass
class Verdict:
    kind: str  # "zero-structural" | "zero-probabilistic" | "nonzero"
    witness: dict | None = None
    residual: float = 0.0
    points: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return self.kind != "nonzero"

    def __bool__(self) -> bool:
        return self.is_zero

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "residual": self.residual, "points": self.points}
        if self.witness is not None:
            out["witness"] = {k: float(v) for k, v in sorted(self.witness.items())}
        return out


def is_zero(e: E.Expr, n_points: int = 25, tol: float = 1e-9, rng=None,
            funcs: Mapping | None = None, structural: bool = True,
            fixed: Mapping | None = None) -> Verdict:
    """Decide whether ``e`` vanishes identically.

    The structural normal form is tried first; otherwise ``e`` is evaluated at
    ``n_points`` random regular points and compared against
    ``tol * (1 + largest intermediate magnitude)``.
    """
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    if e.is_zero_literal:
        return Verdict("zero-structural")
    if structural and ratfunc.is_structural_zero(e):
        return Verdict("zero-structural")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    funcs = make_funcs([e], rng, funcs)
    env, vals, scales = sample_points([e], n_points, rng, funcs, fixed)
    v, sc = vals[0], scales[0]
    rel = np.abs(v) / (1.0 + np.maximum(sc, np.abs(v)))
    worst = int(np.argmax(rel))
    residual = float(rel[worst])
    if np.all(np.abs(v) < tol * (1.0 + np.maximum(sc, np.abs(v)))):
        return Verdict("zero-probabilistic", residual=residual, points=len(v))
    witness = {s.name: float(env[s][worst]) for s in env}
    return Verdict("nonzero", witness=witness, residual=residual, points=len(v),
                   detail={"value": float(v[worst])})
