"""Self-similar ansatze, isobaricity conditions, NSE residuals and the Euler number."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from . import expr as E
from . import numeric, ratfunc
from .exterior import VARS
from .symmetry import covariance_factor, finite_rotation, finite_scaling, time_translation
from .weights import _exps, isobaric_diagnostic

__all__ = [
    "SolutionFields", "ProfileSet", "bouton_ansatz", "classical_family",
    "stagnation_solution", "ResidualReport", "verify_isobaricity", "nse_residual",
    "EulerReport", "euler_number", "initial_data", "l1prime_form",
    "translate_in_time", "rotate_solution", "XI",
]

x, y, z, t, u, v, w, p = VARS
nu = E.symbol("nu")
tau = E.symbol("tau")
XI = tuple(E.declare(f"xi{i}", "parameter") for i in (1, 2, 3))


@dataclass
class SolutionFields:
    u: E.Expr
    v: E.Expr
    w: E.Expr
    p: E.Expr
    params: dict = field(default_factory=dict)  # optional bindings for nu, tau
    mode: str = "dimensionalized"
    label: str = ""
    flags: dict = field(default_factory=dict)

    @property
    def velocity(self) -> tuple:
        return (self.u, self.v, self.w)

    def bound(self) -> "SolutionFields":
        """Fields with the parameter bindings substituted in."""
        if not self.params:
            return self
        m = {(k if isinstance(k, E.Symbol) else E.symbol(k)): E.as_expr(val)
             for k, val in self.params.items()}
        return replace(self, u=E.substitute(self.u, m), v=E.substitute(self.v, m),
                       w=E.substitute(self.w, m), p=E.substitute(self.p, m), params={})

    def items(self):
        return [("u", self.u), ("v", self.v), ("w", self.w), ("p", self.p)]

    def to_json(self) -> dict:
        out = {k: E.to_str(e) for k, e in self.items()}
        out["mode"] = self.mode
        if self.params:
            out["params"] = {str(k): E.to_str(E.as_expr(val)) for k, val in self.params.items()}
        if self.flags:
            out["flags"] = self.flags
        return out

    @staticmethod
    def from_mapping(m: Mapping, label: str = "") -> "SolutionFields":
        params = {k: m[k] for k in ("nu", "tau") if k in m}
        return SolutionFields(m["u"], m["v"], m["w"], m["p"], params, label=label)


ProfileSet = Mapping  # name -> function name (opaque) or Expr body over xi1..xi3


def _profile(spec, default: str, args: Sequence[E.Expr]) -> E.Expr:
    """Instantiate one profile: opaque call by name, or an explicit body in xi1..xi3."""
    if spec is None:
        spec = default
    if isinstance(spec, str):
        return E.call(spec, args)
    body = E.as_expr(spec)
    return E.substitute(body, {XI[i]: a for i, a in enumerate(args)})


def bouton_ansatz(s, profiles: ProfileSet | None = None, at=None) -> SolutionFields:
    """Self-similar fields ``t^b F_i(x/t^g, ...)`` with b = (ax-at)/at, g = ax/at."""
    s = _exps(s, at)
    if s.at == 0:
        raise ValueError("ansatz exponents undefined for alpha_t = 0")
    profiles = profiles or {}
    beta = (s.ax - s.at) / s.at
    gamma = s.ax / s.at
    tg = E.power(t, -gamma)
    args = (E.mul(x, tg), E.mul(y, tg), E.mul(z, tg))
    tb = E.power(t, beta)
    comps = [E.mul(tb, _profile(profiles.get(f"F{i}"), f"F{i}", args)) for i in (1, 2, 3)]
    pp = E.mul(E.power(t, 2 * beta), _profile(profiles.get("F4"), "F4", args))
    return SolutionFields(*comps, pp, label=f"bouton({s.ax},{s.at})",
                          flags={"ax": str(s.ax), "at": str(s.at)})


def classical_family(profiles: ProfileSet | None = None, shift: E.Expr | None = None) -> SolutionFields:
    """Partially integrated classical family ``x/(t+tau) F_i(y/x, z/x)``."""
    profiles = profiles or {}
    sh = tau if shift is None else E.as_expr(shift)
    T = E.add(t, sh)
    args = (E.div(y, x), E.div(z, x))
    base = E.div(x, T)
    comps = [E.mul(base, _profile(profiles.get(f"F{i}"), f"F{i}", args)) for i in (1, 2, 3)]
    pp = E.mul(E.div(E.power(x, 2), E.power(T, 2)), _profile(profiles.get("F4"), "F4", args))
    return SolutionFields(*comps, pp, label="classical")


def stagnation_solution(shift: E.Expr | None = None) -> SolutionFields:
    """u = (x, -y, 0)/(t+tau), p = -y^2/(t+tau)^2."""
    xi1 = XI[0]
    f = classical_family({"F1": E.ONE, "F2": E.neg(xi1), "F3": E.ZERO,
                          "F4": E.neg(E.power(xi1, 2))}, shift)
    f.label = "stagnation"
    return f


# --------------------------------------------------------------------------
# residual reports


@dataclass
class ResidualReport:
    labels: list
    residuals: list  # simplified Exprs
    verdicts: list  # numeric.Verdict

    @property
    def all_zero(self) -> bool:
        return all(v.is_zero for v in self.verdicts)

    @property
    def all_structural(self) -> bool:
        return all(v.kind == "zero-structural" for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "all_zero": self.all_zero,
            "all_structural": self.all_structural,
            "residuals": [
                {"name": n, "expr": E.to_str(r), **vd.to_json()}
                for n, r, vd in zip(self.labels, self.residuals, self.verdicts)
            ],
        }


def _report(labels, exprs, n_points: int, tol: float, rng, funcs=None) -> ResidualReport:
    simp = [ratfunc.simplify(e) for e in exprs]
    verdicts = [numeric.is_zero(e, n_points=n_points, tol=tol, rng=rng, funcs=funcs) for e in simp]
    return ResidualReport(list(labels), simp, verdicts)


def _r_grad(q: E.Expr) -> E.Expr:
    return E.add(*(E.mul(c, E.diff(q, c)) for c in (x, y, z)))


def verify_isobaricity(f: SolutionFields, s=None, mode: str = "general",
                       include_shift: bool = True, n_points: int = 25, tol: float = 1e-9,
                       rng=None) -> ResidualReport:
    """Relative-invariance conditions of the scaling group.

    ``mode="split"``: the four pairs ``r.grad q - c q`` and ``t dq/dt - d q``
    with (c, d) = (1, -1) for velocity and (2, -2) for pressure.

    ``mode="general"``: ``ax r.grad q + at (t d/dt + tau d/dtau) q - W q`` with
    W = ax - at for velocity and 2 (ax - at) for pressure.
    """
    fb = f.bound()
    labels, exprs = [], []
    if mode == "split":
        for name, q, c, dd in (("u", fb.u, 1, -1), ("v", fb.v, 1, -1), ("w", fb.w, 1, -1),
                               ("p", fb.p, 2, -2)):
            labels.append(f"r.grad {name} - {c}*{name}")
            exprs.append(E.sub(_r_grad(q), E.mul(E.const(c), q)))
            labels.append(f"t d{name}/dt - ({dd})*{name}")
            exprs.append(E.sub(E.mul(t, E.diff(q, t)), E.mul(E.const(dd), q)))
    elif mode == "general":
        s = _exps(s if s is not None else (1, 2))
        ax, at = E.const(s.ax), E.const(s.at)
        for name, q, wq in (("u", fb.u, s.ax - s.at), ("v", fb.v, s.ax - s.at),
                            ("w", fb.w, s.ax - s.at), ("p", fb.p, 2 * (s.ax - s.at))):
            time_part = E.mul(t, E.diff(q, t))
            if include_shift and tau in q.free:
                time_part = E.add(time_part, E.mul(tau, E.diff(q, tau)))
            labels.append(f"isobaric {name}")
            exprs.append(E.add(E.mul(ax, _r_grad(q)), E.mul(at, time_part),
                               E.mul(E.const(-wq), q)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _report(labels, exprs, n_points, tol, rng)


def nse_residual(f: SolutionFields, n_points: int = 25, tol: float = 1e-9, rng=None) -> ResidualReport:
    """Momentum (three components) and continuity residuals of the NSE."""
    fb = f.bound()
    vel = fb.velocity
    nu_e = E.as_expr(nu)
    exprs = []
    for i, ui in enumerate(vel):
        conv = E.add(*(E.mul(vel[j], E.diff(ui, c)) for j, c in enumerate((x, y, z))))
        lap = E.add(*(E.diff(E.diff(ui, c), c) for c in (x, y, z)))
        exprs.append(E.add(E.diff(ui, t), conv, E.neg(E.mul(nu_e, lap)),
                           E.diff(fb.p, (x, y, z)[i])))
    exprs.append(E.add(*(E.diff(vel[j], c) for j, c in enumerate((x, y, z)))))
    return _report(["momentum x", "momentum y", "momentum z", "continuity"], exprs,
                   n_points, tol, rng)


@dataclass
class EulerReport:
    value: E.Expr
    time_independent: bool
    scale_invariant: bool
    isobaric: dict

    def to_json(self) -> dict:
        return {"euler_number": E.to_str(self.value), "time_independent": self.time_independent,
                "scale_invariant": self.scale_invariant, "isobaric": self.isobaric}


def euler_number(f: SolutionFields, s=(1, 2), rng=None) -> EulerReport:
    """p / (u^2 + v^2 + w^2) with time-independence and scale-invariance flags."""
    fb = f.bound()
    speed2 = ratfunc.simplify(E.add(*(E.power(c, 2) for c in fb.velocity)))
    if ratfunc.is_structural_zero(speed2):
        raise ValueError("Euler number undefined for a zero velocity field")
    val = ratfunc.simplify(E.div(fb.p, speed2))
    ti = numeric.is_zero(E.diff(val, t), rng=rng).is_zero
    s = _exps(s)
    if ratfunc.is_structural_zero(val):
        si = True
    else:
        si = covariance_factor(val, finite_scaling(s.ax, s.at), rng=rng).verdict == "invariant"
    return EulerReport(val, ti, si, isobaric_diagnostic(val))


def _positive_t_power(e: E.Expr) -> bool:
    factors = e.factors if isinstance(e, E.Mul) else (e,)
    for fct in factors:
        if fct == t:
            return True
        if isinstance(fct, E.Pow) and fct.base == t and fct.exp > 0:
            return True
    return False


def initial_data(f: SolutionFields) -> tuple:
    """Velocity at t = 0."""
    fb = f.bound()
    out = []
    for c in fb.velocity:
        if _positive_t_power(c):
            out.append(E.ZERO)
            continue
        try:
            val = ratfunc.simplify(E.substitute(c, {t: E.ZERO}))
        except ZeroDivisionError:
            raise ValueError("undefined at t = 0") from None
        out.append(val)
    return tuple(out)


def l1prime_form(s, constants: Sequence = ("C1", "C2", "C3", "C0"),
                 polys: ProfileSet | None = None, pressure: str = "verbatim",
                 at=None) -> SolutionFields:
    """``C t^b + x^(b') P(y/x, z/x)`` fields, smooth at t = 0 when both exponents are positive.

    ``pressure="verbatim"`` keeps the printed x-exponent (ax-at)/ax on the
    pressure correction; ``"doubled"`` uses 2(ax-at)/ax, which is the
    exponent of weight 2(ax-at).
    """
    s = _exps(s, at)
    if s.at == 0 or s.ax == 0:
        raise ValueError("exponents undefined for alpha_x = 0 or alpha_t = 0")
    if pressure not in ("verbatim", "doubled"):
        raise ValueError("pressure must be 'verbatim' or 'doubled'")
    polys = polys or {}
    te = (s.ax - s.at) / s.at
    se = (s.ax - s.at) / s.ax
    pe = se if pressure == "verbatim" else 2 * se
    args = (E.div(y, x), E.div(z, x))
    cs = [E.as_expr(c) if not isinstance(c, str) else E.declare(c, "parameter") for c in constants]
    comps = []
    for i in range(3):
        P = _profile(polys.get(f"P{i + 1}"), f"P{i + 1}", args)
        comps.append(E.add(E.mul(cs[i], E.power(t, te)), E.mul(E.power(x, se), P)))
    P4 = _profile(polys.get("P4"), "P4", args)
    pp = E.add(E.mul(cs[3], E.power(t, 2 * te)), E.mul(E.power(x, pe), P4))
    flags = {"preconditions_ok": te > 0 and se > 0, "pressure_exponent": pressure}
    return SolutionFields(*comps, pp, label="l1prime", flags=flags)


# --------------------------------------------------------------------------
# transforms of solutions


def translate_in_time(f: SolutionFields, shift) -> SolutionFields:
    tr = time_translation(E.as_expr(shift) if not isinstance(shift, str) else shift)
    return replace(f, u=tr(f.u), v=tr(f.v), w=tr(f.w), p=tr(f.p),
                   label=f"{f.label}+tshift")


def rotate_solution(f: SolutionFields, axis: str, cos=None, sin=None) -> SolutionFields:
    """New solution ``R u(R^-1 r)``, ``p(R^-1 r)`` for the rotation flow about ``axis``."""
    fwd = finite_rotation(axis, cos, sin)
    c = fwd.params[0] if cos is None else E.as_expr(cos)
    s_ = fwd.params[1] if sin is None else E.as_expr(sin)
    inv = finite_rotation(axis, c, E.neg(s_))
    pos = {q: inv.image(q) for q in (x, y, z)}
    old = [E.substitute(comp, pos) for comp in f.velocity]
    vals = dict(zip((u, v, w), old))
    new = [E.substitute(fwd.image(q), vals) for q in (u, v, w)]
    return replace(f, u=new[0], v=new[1], w=new[2], p=E.substitute(f.p, pos),
                   label=f"{f.label}+rot:{axis}")
