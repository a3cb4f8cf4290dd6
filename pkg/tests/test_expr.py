import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nsesym import expr as E
from nsesym import numeric, ratfunc
from nsesym.catalog import RAW, expand_shorthand
from nsesym.parser import ParseError, parse

x, y, z, t = (E.symbol(n) for n in "xyzt")
u, v, w, p = (E.symbol(n) for n in "uvwp")
tau, k = E.symbol("tau"), E.symbol("k")


def ev(e, **pt):
    return float(numeric.eval_numeric(e, {E.symbol(n): val for n, val in pt.items()}))


def same(a, b):
    return ratfunc.is_structural_zero(E.sub(a, b))


# parsing ------------------------------------------------------------------

def test_parse_atoms_and_euler_number():
    assert parse("x") == x
    eu = parse("p/(u^2+v^2+w^2)")
    assert ev(eu, u=1, v=0, w=0, p=2) == pytest.approx(2.0)


def test_parse_opaque_call_product():
    e = parse("(x/(t+tau))*F1(y/x, z/x)")
    assert isinstance(e, E.Mul)
    assert E.calls_in(e) == {"F1": 2}


@pytest.mark.parametrize("bad", ["x +", "(x", "x $ y", "F1(", "2 ^"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse(bad)


@pytest.mark.parametrize("k", sorted(RAW))
def test_print_parse_roundtrip_on_catalog_coefficients(k):
    for _, coef, _ in RAW[k]:
        e = parse(expand_shorthand(coef))
        assert parse(E.to_str(e)) == e


# differentiation ------------------------------------------------------------

def test_diff_power():
    assert same(E.diff(parse("x^2"), x), parse("2*x"))


def test_diff_sqrt_matches_central_difference(rng):
    s = parse("(u^2+v^2+w^2)^(1/2)")
    ds = E.diff(s, u)
    assert same(ds, parse("u*(u^2+v^2+w^2)^(-1/2)"))
    h = 1e-6
    for _ in range(10):
        a, b, c = rng.uniform(0.5, 2, 3)
        fd = (ev(s, u=a + h, v=b, w=c) - ev(s, u=a - h, v=b, w=c)) / (2 * h)
        assert abs(fd - ev(ds, u=a, v=b, w=c)) < 1e-8 * max(1, abs(fd))


def _product(args, derivs=()):
    # F1(a, b) = a*b and its partial derivatives
    a, b = args
    if not derivs:
        return a * b
    if tuple(derivs) == (1,):
        return b
    if tuple(derivs) == (2,):
        return a
    return 0 * a + (1 if sorted(derivs) == [1, 2] else 0)


def test_diff_opaque_chain_rule_against_instantiation():
    de = E.diff(parse("F1(y/x, z/x)"), x)
    args = (parse("y/x"), parse("z/x"))
    expected = E.add(E.mul(parse("-y/x^2"), E.call("F1", args, (1,))),
                     E.mul(parse("-z/x^2"), E.call("F1", args, (2,))))
    assert same(de, expected)
    direct = E.diff(parse("(y/x)*(z/x)"), x)
    for pt in ({x: 1.3, y: 0.7, z: -1.1}, {x: -0.6, y: 2.0, z: 0.4}):
        got = float(numeric.eval_numeric(de, pt, {"F1": _product}))
        assert got == pytest.approx(float(numeric.eval_numeric(direct, pt)), rel=1e-12)


# substitution ---------------------------------------------------------------

def test_substitute_examples():
    kk = E.declare("k", "parameter", positive=True)
    assert same(E.substitute(u, {u: E.mul(E.power(kk, -1), u)}), parse("u/k"))
    assert E.substitute(parse("x+y"), {}) == parse("x+y")
    assert same(E.substitute(t, {t: parse("t+tau")}), parse("t+tau"))


# numeric evaluation -----------------------------------------------------------

def test_eval_examples():
    assert ev(parse("x/(t+tau)"), x=3, t=1, tau=2) == pytest.approx(1.0)
    assert ev(parse("(u^2+v^2+w^2)^(1/2)"), u=3, v=4, w=0) == pytest.approx(5.0)


# zero testing ---------------------------------------------------------------

def test_is_zero_structural():
    assert numeric.is_zero(parse("(u^2+v^2) - (v^2+u^2)")).kind == "zero-structural"
    rz = parse("(-v)*2*u + u*2*v")
    assert numeric.is_zero(rz).kind == "zero-structural"


def test_is_zero_nonzero_has_witness():
    vd = numeric.is_zero(parse("p - p*1.000001"), rng=0)
    assert vd.kind == "nonzero"
    assert vd.witness and "p" in vd.witness


def test_is_zero_probabilistic_with_opaque_calls():
    e = parse("F1(y/x, z/x)*x - x*F1(y/x, z/x)")
    assert numeric.is_zero(e, rng=0).is_zero
    assert not numeric.is_zero(parse("F1(y/x, z/x) - F1(z/x, y/x)"), rng=0).is_zero


# properties -----------------------------------------------------------------

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)
names = st.sampled_from(["x", "y", "z", "t", "u", "v", "w", "p"])


@st.composite
def polys(draw):
    terms = []
    for _ in range(draw(st.integers(1, 4))):
        c = E.const(draw(small))
        vs = [E.power(E.symbol(draw(names)), draw(st.integers(0, 3))) for _ in range(2)]
        terms.append(E.mul(c, *vs))
    return E.add(*terms)


@given(polys(), polys(), small, small, names)
def test_diff_is_linear(f, g, a, b, var):
    s = E.symbol(var)
    lhs = E.diff(E.add(E.mul(E.const(a), f), E.mul(E.const(b), g)), s)
    rhs = E.add(E.mul(E.const(a), E.diff(f, s)), E.mul(E.const(b), E.diff(g, s)))
    assert same(lhs, rhs)


@given(polys(), polys(), names)
def test_product_rule(f, g, var):
    s = E.symbol(var)
    lhs = E.diff(E.mul(f, g), s)
    rhs = E.add(E.mul(E.diff(f, s), g), E.mul(f, E.diff(g, s)))
    assert same(lhs, rhs)


@given(polys())
def test_print_parse_roundtrip(f):
    assert same(parse(E.to_str(f)), f)


@given(polys(), polys())
def test_simplify_preserves_value(f, g):
    e = E.div(f, E.add(E.mul(g, g), E.ONE))
    pt = {E.symbol(n): val for n, val in zip("xyztuvwp", (0.7, -1.3, 1.1, 0.9, 1.7, -0.4, 0.6, 1.2))}
    a = float(numeric.eval_numeric(e, pt))
    b = float(numeric.eval_numeric(ratfunc.simplify(e), pt))
    assert b == pytest.approx(a, rel=1e-9, abs=1e-12)


def test_rational_constants_are_exact():
    assert E.const(Fraction(1, 3)) == E.const(Fraction(2, 6))
    assert E.to_str(E.add(E.const(Fraction(1, 3)), E.const(Fraction(1, 6)))) == "1/2"
    assert math.isclose(ev(E.power(E.const(4), Fraction(1, 2))), 2.0)


def test_declare_conflict_is_rejected():
    E.declare("zeta_param", "parameter")
    with pytest.raises(ValueError):
        E.declare("zeta_param", "dependent")
