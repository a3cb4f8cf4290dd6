"""``nsesym`` command line.

Exit codes: 0 when every check in the invocation passed, 1 when a check failed
(a witness is printed), 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import expr as E
from . import numeric, ratfunc
from .catalog import NoCatalogEntry, catalog_form
from .checks import run_suite
from .conserved import (AnsatzBasis, compare_with_catalog, corrected_form, invariant_arguments,
                        solve_forms, verify_conserved)
from .exterior import KForm, format_form, lie_derivative
from .parser import ParseError, parse, parse_form, parse_solution
from .solutions import (SolutionFields, bouton_ansatz, classical_family, euler_number,
                        nse_residual, rotate_solution, stagnation_solution, translate_in_time,
                        verify_isobaricity)
from .symmetry import (GENERATOR_NAMES, apply_generator, covariance_factor, generator,
                       parse_transform)
from .weights import classify, homogeneity_degree, isobaric_diagnostic, smoothness_scenario

SEED_ENV = "BOUTON_FORMS_SEED"


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _samples(text: str):
    if text == "auto":
        return "auto"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--samples takes a positive integer or 'auto'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("--samples must be positive")
    return n


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _gens(text: str | None, default=None):
    if not text:
        return default
    names = [g.strip() for g in text.split(",") if g.strip()]
    for n in names:
        if n not in GENERATOR_NAMES:
            raise UsageError(f"unknown generator {n!r}; choose from {', '.join(GENERATOR_NAMES)}")
    return names


def _read(args, attr: str = "expr") -> str:
    text = getattr(args, attr, None)
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    if text is None:
        raise UsageError(f"give --{attr} or --file")
    return text


def _expr(args) -> E.Expr:
    return parse(_read(args).strip(), auto_declare=True)


def _points(args, default: int) -> int:
    return default if args.samples in (None, "auto") else args.samples


def _solution(args) -> SolutionFields:
    kind = args.solution
    if args.file:
        f = SolutionFields.from_mapping(parse_solution(_read(args)), label=args.file)
    elif kind == "stagnation":
        f = stagnation_solution()
    elif kind == "classical":
        f = classical_family()
    elif kind == "bouton":
        f = bouton_ansatz((args.ax, args.at))
    else:
        raise UsageError(f"unknown solution {kind!r}")
    if getattr(args, "shift", None):
        f = translate_in_time(f, E.declare(args.shift, "parameter"))
    if getattr(args, "rotate", None):
        f = rotate_solution(f, args.rotate)
    return f


# --------------------------------------------------------------------------
# subcommands; each returns (ok, json payload, text lines)


def cmd_weights(args):
    e = _expr(args)
    diag = isobaric_diagnostic(e)
    out = {"expr": E.to_str(e), **diag}
    if args.vars:
        deg = homogeneity_degree(e, [v.strip() for v in args.vars.split(",")])
        out["homogeneity_degree"] = None if deg is None else str(deg)
    if diag["isobaric"]:
        lines = [f"weight {tuple(diag['weight'])}".replace("'", "")]
    else:
        lines = [f"not isobaric: {diag['reason']}"]
    if "homogeneity_degree" in out:
        lines.append(f"homogeneity degree: {out['homogeneity_degree']}")
    return diag["isobaric"], out, lines


def cmd_classify(args):
    rep = classify(args.ax, args.at)
    out = rep.to_json()
    scen = smoothness_scenario(args.ax, args.at)
    out["scenario"] = scen.scenario
    out["blowup_excluded"] = scen.blowup_excluded
    lines = [f"{rep.verdict} (energy exponent {out['energy_exponent']}, "
             f"velocity exponent {out['velocity_exponent']})",
             f"severity comparison: {rep.severity_verdict}"]
    if rep.mixed_sign_verdict:
        lines.append(f"mixed-sign rule: {rep.mixed_sign_verdict}")
    return True, out, lines


def cmd_scenario(args):
    rep = smoothness_scenario(args.ax, args.at)
    out = rep.to_json()
    if not rep.applicable:
        return True, out, [rep.reason]
    lines = [f"scenario: {rep.scenario if rep.scenario is not None else 'none (' + rep.reason + ')'}",
             f"smooth at t = 0 possible: {rep.smooth_at_zero_possible}",
             f"blow-up excluded: {rep.blowup_excluded}"]
    return True, out, lines


def cmd_apply(args):
    e = _expr(args)
    if args.transform:
        tr = parse_transform(args.transform)
        if tr.exponents is not None:
            rep = covariance_factor(e, tr, rng=_seed(args), n_points=_points(args, 25))
            out = {"expr": E.to_str(e), **rep.to_json()}
            line = f"{rep.verdict}"
            if rep.exponent is not None:
                line += f", factor k^({out['exponent']})"
            if rep.witness:
                line += ", witness " + ", ".join(f"{k}={v:.6g}" for k, v in sorted(rep.witness.items()))
            return rep.verdict != "not-covariant", out, [line]
        img = ratfunc.simplify(tr(e))
        return True, {"expr": E.to_str(e), "transform": tr.name, "image": E.to_str(img)}, \
            [E.to_str(img)]
    if not args.generator:
        raise UsageError("give --generator or --transform")
    g = generator(args.generator)
    res = apply_generator(g, e)
    vd = numeric.is_zero(res, n_points=_points(args, 25), tol=args.tol, rng=_seed(args))
    out = {"expr": E.to_str(e), "generator": g.name, "result": E.to_str(res), **vd.to_json()}
    return True, out, [E.to_str(res), f"({vd.kind})"]


def _form_arg(args) -> KForm:
    if args.form or args.file:
        return parse_form(_read(args, "form"))
    if args.k is None:
        raise UsageError("give --k, --form or --file")
    if getattr(args, "corrected", False):
        return corrected_form(args.k, _seed(args))[0]
    try:
        return catalog_form(args.k)
    except NoCatalogEntry as exc:
        raise UsageError(f"no catalog {args.k}-form: {exc.args[0]}") from None


def cmd_lie(args):
    form = _form_arg(args)
    g = generator(args.generator)
    res = lie_derivative(g, form).simplify()
    out = {"generator": g.name, "degree": res.degree, "result": format_form(res),
           "zero": not res.terms}
    return True, out, [format_form(res)]


def cmd_verify_form(args):
    form = _form_arg(args)
    gens = _gens(args.generators)
    rep = verify_conserved(form, gens, mode=args.mode, n_points=_points(args, 100),
                           tol=args.tol, rng=_seed(args))
    out = rep.to_json()
    lines = []
    for c in rep.checks:
        tag = "structural" if c.structural else "probabilistic"
        lines.append(f"{c.generator:>3}: {'pass' if c.passed else 'FAIL'} ({tag})")
        for idx, vd in c.failing:
            wit = ", ".join(f"{k}={v:.6g}" for k, v in sorted((vd.witness or {}).items()))
            if "value" in vd.detail:
                wit = f"{wit}; value {vd.detail['value']:.6g}".lstrip("; ")
            lines.append(f"     term {'^'.join('d' + 'xyztuvwp'[i] for i in idx)}: "
                         f"{vd.kind}, witness {wit}")
    lines.append("verified" if rep.verified else "NOT verified")
    return rep.verified, out, lines


def cmd_solve_forms(args):
    gens = _gens(args.generators)
    basis = AnsatzBasis.default(args.degree)
    r = solve_forms(args.k, gens, basis, n_samples=args.samples or "auto", svd_tol=args.svd_tol,
                    rng=_seed(args), threads=args.threads)
    out = r.to_json(max_singular=args.singular)
    lines = [f"k = {r.k}: {r.unknowns} unknowns, {r.rows} rows, nullspace dimension "
             f"{r.nullspace_dim} (gap {r.gap:.3g})"]
    for i, f in enumerate(r.forms, 1):
        lines.append(f"  [{i}] {'verified' if f.verified else 'unverified'}: {format_form(f.form)}")
    ok = all(f.verified for f in r.forms)
    if args.compare:
        cmp = compare_with_catalog(r, rng=_seed(args))
        out["comparison"] = cmp.to_json()
        lines.append(f"catalog: {cmp.status}")
        for fl in cmp.flagged:
            lines.append(f"  flagged {fl['term']} (listed as {fl['listed']}; fitted {fl['fitted']})")
        ok = ok and (cmp.ok or cmp.status == "no catalog entry")
    return ok, out, lines


def cmd_residual(args):
    f = _solution(args)
    rep = nse_residual(f, n_points=_points(args, 25), tol=args.tol, rng=_seed(args))
    out = {"solution": f.to_json(), **rep.to_json()}
    lines = [f"{n}: {vd.kind}" for n, vd in zip(rep.labels, rep.verdicts)]
    return rep.all_zero, out, lines


def cmd_euler(args):
    f = _solution(args)
    rep = euler_number(f, rng=_seed(args))
    out = rep.to_json()
    lines = [f"E = {out['euler_number']}", f"time independent: {rep.time_independent}",
             f"scale invariant: {rep.scale_invariant}"]
    return True, out, lines


def cmd_ansatz(args):
    if args.solution == "classical":
        f = classical_family()
        s = (1, 2)
    else:
        f = bouton_ansatz((args.ax, args.at))
        s = (args.ax, args.at)
    rep = verify_isobaricity(f, s, mode=args.mode, n_points=_points(args, 25), tol=args.tol,
                             rng=_seed(args))
    out = {"fields": f.to_json(), **rep.to_json()}
    lines = [f"{k} = {E.to_str(e)}" for k, e in f.items()]
    lines += [f"{n}: {vd.kind}" for n, vd in zip(rep.labels, rep.verdicts)]
    return rep.all_zero, out, lines


def cmd_invariant_args(args):
    gens = _gens(args.generators, ("X1", "X2"))
    r = invariant_arguments(gens, rng=_seed(args), threads=args.threads)
    out = r.to_json()
    lines = [E.to_str(e) for e in r.invariants]
    lines += [f"{t}: {'found' if ok else 'MISSING'}" for t, ok in r.targets.items()]
    return r.ok, out, lines


def cmd_reproduce(args):
    results = run_suite(args.suite, _seed(args))
    ok = all(r.passed for r in results)
    # timings are left out of the JSON so that output is reproducible
    rows = []
    for r in results:
        row = r.to_json()
        row.pop("seconds")
        row.pop("within_budget")
        rows.append(row)
    out = {"suite": args.suite, "passed": ok, "rows": rows}
    lines = [r.line() for r in results]
    if not ok:
        first = next(r for r in results if not r.passed)
        lines.append(f"first failure {first.key}: {json.dumps(first.to_json()['detail'])[:800]}")
    return ok, out, lines


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostic instead of the usage block
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH",
                        help="emit JSON (to PATH if given, else stdout)")
    common.add_argument("--seed", type=int, default=None,
                        help=f"seed for all sampling (fallback: ${SEED_ENV}, then 0)")
    common.add_argument("--threads", type=int, default=None, help="worker threads")
    common.add_argument("--tol", type=float, default=1e-9, help="zero-test tolerance")
    common.add_argument("--samples", type=_samples, default=None,
                        help="sample count: points per zero test, rows for solve-forms")
    common.add_argument("--file", default=None, help="read the input from a file")

    exps = argparse.ArgumentParser(add_help=False)
    exps.add_argument("--ax", type=_rational, required=True)
    exps.add_argument("--at", type=_rational, required=True)

    ap = _Parser(prog="nsesym", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", parents=[common], help="isobaric weight of an expression")
    p.add_argument("--expr")
    p.add_argument("--vars", help="comma-separated variables for a homogeneity degree")
    p.set_defaults(fn=cmd_weights)

    p = sub.add_parser("classify", parents=[common, exps], help="criticality verdict")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("scenario", parents=[common, exps], help="smoothness scenario")
    p.set_defaults(fn=cmd_scenario)

    p = sub.add_parser("apply", parents=[common], help="apply a generator or finite transform")
    p.add_argument("--expr")
    p.add_argument("--generator", choices=GENERATOR_NAMES)
    p.add_argument("--transform", help="scale:ax=1,at=2 | rot:z | tshift")
    p.set_defaults(fn=cmd_apply)

    def form_args(q):
        q.add_argument("--k", type=int)
        q.add_argument("--form", help="form text, e.g. 'p dx /\\ dy'")

    p = sub.add_parser("lie", parents=[common], help="Lie derivative of a form")
    form_args(p)
    p.add_argument("--generator", choices=GENERATOR_NAMES, required=True)
    p.set_defaults(fn=cmd_lie)

    p = sub.add_parser("verify-form", parents=[common], help="check a form is conserved")
    form_args(p)
    p.add_argument("--generators", help="comma-separated (default T,X,Rx,Ry,Rz)")
    p.add_argument("--mode", choices=("structural", "probabilistic", "auto"), default="auto")
    p.add_argument("--corrected", action="store_true",
                   help="use the solver-derived correction of the catalog form")
    p.set_defaults(fn=cmd_verify_form)

    p = sub.add_parser("solve-forms", parents=[common], help="derive conserved k-forms")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--degree", type=int, default=2, help="ansatz degree in u/s, v/s, w/s")
    p.add_argument("--generators")
    p.add_argument("--svd-tol", type=float, default=1e-8)
    p.add_argument("--singular", type=int, default=None,
                   help="report only the smallest N singular values")
    p.add_argument("--compare", action="store_true", help="compare with the catalog form")
    p.set_defaults(fn=cmd_solve_forms)

    def sol_args(q):
        q.add_argument("--solution", choices=("stagnation", "classical", "bouton"),
                       default="stagnation")
        q.add_argument("--ax", type=_rational, default=Fraction(1))
        q.add_argument("--at", type=_rational, default=Fraction(2))

    p = sub.add_parser("residual", parents=[common], help="NSE residuals of a solution")
    sol_args(p)
    p.add_argument("--shift", help="translate in time by a new parameter of this name")
    p.add_argument("--rotate", choices=("x", "y", "z"))
    p.set_defaults(fn=cmd_residual)

    p = sub.add_parser("euler", parents=[common], help="Euler number of a solution")
    sol_args(p)
    p.set_defaults(fn=cmd_euler)

    p = sub.add_parser("ansatz", parents=[common], help="self-similar ansatz and its isobaricity")
    sol_args(p)
    p.set_defaults(solution="bouton")
    p.add_argument("--mode", choices=("general", "split"), default="general")
    p.set_defaults(fn=cmd_ansatz)

    p = sub.add_parser("invariant-args", parents=[common],
                       help="invariants of the two scaling generators")
    p.add_argument("--generators")
    p.set_defaults(fn=cmd_invariant_args)

    p = sub.add_parser("reproduce", parents=[common], help="run a reproduction suite")
    p.add_argument("--suite", choices=("paper-table", "properties", "acceptance", "all"),
                   default="paper-table")
    p.set_defaults(fn=cmd_reproduce)
    return ap


def _emit(args, ok: bool, payload: dict, lines: list[str]) -> None:
    if args.json is not None:
        text = json.dumps(payload, indent=2, sort_keys=True, default=str)
        if args.json == "-":
            print(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            print("\n".join(lines))
    else:
        print("\n".join(lines))


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ok, payload, lines = args.fn(args)
    except (UsageError, ParseError, ValueError, KeyError, ZeroDivisionError) as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        print(f"nsesym {args.command}: error: {msg}", file=sys.stderr)
        return 2
    _emit(args, ok, payload, lines)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
