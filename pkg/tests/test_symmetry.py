from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsesym import expr as E
from nsesym import numeric, ratfunc
from nsesym.exterior import VARS
from nsesym.parser import parse
from nsesym.symmetry import (EQ40_GENERATORS, GENERATOR_NAMES, apply_generator, catalog,
                             covariance_factor, finite_rotation, finite_scaling, generator,
                             generator_consistency_check, parse_transform, time_translation)
from nsesym.weights import weight_of

x, y, z, t, u, v, w, p = VARS
nu, tau = E.symbol("nu"), E.symbol("tau")
k = E.symbol("k")
rats = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def same(a, b):
    return ratfunc.is_structural_zero(E.sub(a, b))


def test_catalog_coefficients():
    cat = catalog()
    assert cat.T.vector() == tuple(E.ONE if s == t else E.ZERO for s in VARS)
    assert same(cat.X.coeff(p), parse("-2*p"))
    assert cat.X2.coeff(t) == t and same(cat.X2.coeff(u), parse("-u"))
    assert same(cat.X1.coeff(nu), parse("2*nu")) and same(cat.X2.coeff(nu), parse("-nu"))
    assert [n for n, _ in cat.items()] == list(GENERATOR_NAMES)
    assert EQ40_GENERATORS == ("T", "X", "Rx", "Ry", "Rz")


def test_unknown_generator():
    with pytest.raises(KeyError):
        generator("Q")


def test_classical_scaling_is_restriction_of_the_pair():
    # X = X1 + 2 X2 away from the nu direction
    pair = generator("X1") + generator("X2").scaled(2)
    for s in VARS:
        assert same(pair.coeff(s), generator("X").coeff(s))


def test_apply_generator_examples():
    assert same(apply_generator(generator("X"), p), parse("-2*p"))
    assert ratfunc.is_structural_zero(apply_generator(generator("Rz"), parse("u^2+v^2+w^2")))
    e = parse("nu*t/x^2")
    for g in ("X1", "X2"):
        assert ratfunc.is_structural_zero(apply_generator(generator(g), e))


@pytest.mark.parametrize("axis", ["Rx", "Ry", "Rz"])
@pytest.mark.parametrize("text", ["u^2+v^2+w^2", "x*u+y*v+z*w",
                                  "(y*w-z*v)^2+(z*u-x*w)^2+(x*v-y*u)^2"])
def test_rotation_invariants(axis, text):
    assert ratfunc.is_structural_zero(apply_generator(generator(axis), parse(text)))


def test_helicity_like_quantity_is_scale_invariant():
    e = parse("((y*w-z*v)^2+(z*u-x*w)^2+(x*v-y*u)^2)^(1/2) + p*(x^2+y^2+z^2)/nu")
    assert numeric.is_zero(apply_generator(generator("X"), e), rng=0).is_zero


def test_finite_scaling_examples():
    f = finite_scaling(1, 2)
    assert same(f(u), parse("u/k")) and same(f(p), parse("p/k^2"))
    g = finite_scaling(0, 1)
    assert g(x) == x and same(g(t), parse("k*t")) and same(g(u), parse("u/k"))


@given(rats, rats)
def test_finite_scaling_identity_at_k1(ax, at):
    assert finite_scaling(ax, at).at_identity().is_identity()


@given(rats, rats)
def test_scaling_group_law(ax, at):
    k1, k2 = E.declare("k1", "parameter", True), E.declare("k2", "parameter", True)
    a = finite_scaling(ax, at, k1)
    b = finite_scaling(ax, at, k2)
    both = a.then(b)
    once = finite_scaling(ax, at).at({k: E.mul(k1, k2)})
    for s in list(VARS) + [nu, tau]:
        assert same(both.image(s), once.image(s))


def test_rotation_identity_and_explicit_form():
    r = finite_rotation("z")
    assert r.at_identity().is_identity()
    c, s = r.params
    assert same(r(x), E.sub(E.mul(x, c), E.mul(y, s)))
    assert same(r(y), E.add(E.mul(y, c), E.mul(x, s)))
    assert same(r(u), E.sub(E.mul(u, c), E.mul(v, s)))
    assert r(p) == p and r(t) == t


@pytest.mark.parametrize("axis", "xyz")
def test_rotation_preserves_speed(axis):
    r = finite_rotation(axis)
    assert same(r(parse("u^2+v^2+w^2")), parse("u^2+v^2+w^2"))
    assert same(r(parse("x^2+y^2+z^2")), parse("x^2+y^2+z^2"))


@pytest.mark.parametrize("axis", "xyz")
def test_rotation_slope_matches_generator(axis):
    th = E.declare("theta_s", "parameter")
    r = finite_rotation(axis, parse("1 - theta_s^2/2"), th)
    g = generator("R" + axis)
    for s in VARS:
        slope = E.substitute(E.diff(r.image(s), th), {th: E.ZERO})
        assert same(slope, g.coeff(s))


def test_time_translation():
    tr = time_translation()
    assert same(tr(t), parse("t+tau")) and tr(u) == u
    a = time_translation(E.declare("tau_a", "parameter"))
    b = time_translation(E.declare("tau_b", "parameter"))
    assert same(a.then(b).image(t), parse("t + tau_a + tau_b"))


def test_parse_transform_specs():
    assert parse_transform("scale:ax=1,at=2").exponents == (1, 2)
    assert parse_transform("rot:z").name == "rot:z"
    assert parse_transform("tshift").name == "tshift"
    for bad in ("scale:ax=1", "rot:q", "bogus"):
        with pytest.raises(ValueError):
            parse_transform(bad)


# covariance -----------------------------------------------------------------------

def test_covariance_examples():
    r = covariance_factor(u, finite_scaling(Fraction(3), Fraction(5)))
    assert r.verdict == "covariant" and r.exponent == -2 and r.weight == (1, -1)
    for ax, at in ((1, 2), (1, 0), (0, 1), (2, 5)):
        assert covariance_factor(parse("p/(u^2+v^2+w^2)"), finite_scaling(ax, at)).verdict == "invariant"
    bad = covariance_factor(parse("x+t"), finite_scaling(1, 2), rng=0)
    assert bad.verdict == "not-covariant" and bad.witness


def test_covariance_zero_errors():
    with pytest.raises(ValueError, match="zero expression"):
        covariance_factor(E.ZERO, finite_scaling(1, 2))


def test_covariance_through_opaque_calls():
    e = parse("x*F1(y/x, z/x)/t")
    r = covariance_factor(e, finite_scaling(1, 2), rng=0)
    assert r.verdict == "covariant" and r.exponent == -1 and r.weight == (1, -1)


@pytest.mark.parametrize("ax,at", [(1, 2), (1, 0), (0, 1), (Fraction(2, 3), -1)])
def test_generator_consistency(ax, at):
    assert generator_consistency_check(ax, at).ok


@given(st.integers(0, 2**32 - 1), rats, rats)
def test_weight_bridge_to_scaling(seed, ax, at):
    from nsesym.checks import random_monomial
    m = random_monomial(np.random.default_rng(seed))
    wgt = weight_of(m)
    img = finite_scaling(ax, at)(m)
    assert same(img, E.mul(E.power(k, wgt.at(ax, at)), m))
