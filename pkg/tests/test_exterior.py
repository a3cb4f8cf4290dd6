from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsesym import expr as E
from nsesym import ratfunc
from nsesym.checks import random_form
from nsesym.exterior import (KForm, d, dvar, interior_product, lie_derivative,
                             pullback, wedge, zero_form)
from nsesym.parser import parse, parse_form
from nsesym.symmetry import (COS, SIN, finite_rotation, finite_scaling, generator,
                             time_translation)

x, y, z, t, u, v, w, p = (E.symbol(n) for n in "xyztuvwp")
dx, dy, dt, du, dv, dp = (dvar(n) for n in "xytuvp")
seeds = st.integers(0, 2**32 - 1)


def form_zero(f: KForm) -> bool:
    return all(ratfunc.is_structural_zero(c) for c in f.terms.values())


def form_eq(a: KForm, b: KForm) -> bool:
    return a.degree == b.degree and form_zero(a - b)


# wedge ------------------------------------------------------------------------

def test_wedge_examples():
    assert wedge(dx, dy) == -wedge(dy, dx)
    assert wedge(dx, dx).is_zero_literal()
    assert form_eq(wedge(dx.scale(u), dy.scale(v)), wedge(dx, dy).scale(parse("u*v")))


def test_wedge_overflow_is_zero_top_form():
    top = parse_form("dx /\\ dy /\\ dz /\\ dt /\\ du /\\ dv /\\ dw /\\ dp")
    out = wedge(top, dx)
    assert out.degree == 8 and out.is_zero_literal()


@given(seeds, st.integers(0, 4), st.integers(0, 4))
def test_wedge_graded_commutativity(seed, a, b):
    rng = np.random.default_rng(seed)
    al, be = random_form(rng, a, 2), random_form(rng, b, 2)
    sign = -1 if (a * b) % 2 else 1
    lhs = wedge(al, be)
    rhs = wedge(be, al)
    assert form_eq(lhs, rhs if sign > 0 else -rhs)


# exterior derivative ------------------------------------------------------------

def test_d_examples():
    assert d(zero_form(p)) == dp
    assert form_eq(d(dx.scale(u)), -wedge(dx, du))
    top = parse_form("dx /\\ dy /\\ dz /\\ dt /\\ du /\\ dv /\\ dw /\\ dp")
    assert d(top.scale(u)).is_zero_literal()


@given(seeds, st.integers(0, 6))
def test_dd_is_zero(seed, k):
    f = random_form(np.random.default_rng(seed), k)
    assert form_zero(d(d(f)))


@given(seeds, st.integers(0, 3), st.integers(0, 3))
def test_d_graded_leibniz(seed, a, b):
    rng = np.random.default_rng(seed)
    al, be = random_form(rng, a, 2), random_form(rng, b, 2)
    lhs = d(wedge(al, be))
    rhs = wedge(d(al), be)
    rhs = rhs + (wedge(al, d(be)) if a % 2 == 0 else -wedge(al, d(be)))
    assert form_eq(lhs, rhs)


@given(seeds, st.integers(0, 8))
def test_term_count_bounded(seed, k):
    f = random_form(np.random.default_rng(seed), k, terms=80)
    assert len(f) <= comb(8, k)


# interior product ---------------------------------------------------------------

def test_interior_examples():
    assert interior_product(generator("T"), wedge(dt, dp)) == dp
    assert interior_product(generator("X"), dx) == zero_form(x)
    assert form_eq(interior_product(generator("Rz"), du), zero_form(E.neg(v)))


def test_interior_of_zero_form_errors():
    with pytest.raises(ValueError, match="cannot contract a 0-form"):
        interior_product(generator("T"), zero_form(p))


@given(seeds, st.integers(2, 5))
def test_interior_twice_vanishes(seed, k):
    f = random_form(np.random.default_rng(seed), k, 4)
    V = generator("Rz")
    assert form_zero(interior_product(V, interior_product(V, f)))


# Lie derivative -----------------------------------------------------------------

def test_lie_examples():
    assert lie_derivative(generator("T"), dt).is_zero_literal()
    assert form_eq(lie_derivative(generator("X"), dp), dp.scale(-2))
    b0 = zero_form(parse("p/(u^2+v^2+w^2)"))
    for g in ("T", "X", "Rx", "Ry", "Rz"):
        assert form_zero(lie_derivative(generator(g), b0))


def test_lie_on_functions_is_directional_derivative():
    f = parse("x*u + p^2/t")
    V = generator("X")
    assert ratfunc.is_structural_zero(E.sub(lie_derivative(V, zero_form(f)).coefficient(()), V(f)))


def test_lie_parameter_component_acts_on_coefficients():
    V = generator("X1")  # carries 2 nu d/dnu
    f = zero_form(parse("nu"))
    assert form_eq(lie_derivative(V, dx.scale(parse("nu"))),
                   dx.scale(parse("2*nu")) + dx.scale(parse("nu")))
    assert form_eq(lie_derivative(V, f), zero_form(parse("2*nu")))


@given(seeds, st.integers(1, 4))
def test_lie_commutes_with_d(seed, k):
    f = random_form(np.random.default_rng(seed), k, 2)
    for g in ("X", "Rx"):
        V = generator(g)
        assert form_eq(lie_derivative(V, d(f)), d(lie_derivative(V, f)))


# pullback -----------------------------------------------------------------------

def test_pullback_examples():
    kk = E.symbol("k")
    assert form_eq(pullback(finite_scaling(1, 2), dx), dx.scale(kk))
    assert pullback(time_translation(), dt) == dt
    rot = pullback(finite_rotation("z"), du)
    assert form_eq(rot, du.scale(COS) - dv.scale(SIN))


def test_rotation_pullback_slope_matches_generator():
    # d/dtheta at 0 of the pulled-back du equals L_Rz du = d(Rz u) = -dv
    theta = E.declare("theta_probe", "parameter")
    rot = finite_rotation("z", parse("1 - theta_probe^2/2"), theta)
    slope = pullback(rot, du).map(lambda c: E.substitute(E.diff(c, theta), {theta: E.ZERO}))
    assert form_eq(slope, lie_derivative(generator("Rz"), du))


def test_pullback_at_identity_is_identity():
    f = random_form(np.random.default_rng(3), 3, 4, syms=(x, y, z, t, u, v, w, p))
    for tr in (finite_scaling(1, 2), finite_rotation("x"), time_translation()):
        assert form_eq(pullback(tr.at_identity(), f), f)


@given(seeds, st.integers(0, 3))
def test_pullback_commutes_with_d(seed, k):
    f = random_form(np.random.default_rng(seed), k, 2, syms=(x, y, z, t, u, v, w, p))
    for tr in (finite_scaling(1, 2), finite_rotation("y"), time_translation()):
        assert form_eq(pullback(tr, d(f)), d(pullback(tr, f)))


@given(seeds, st.integers(0, 3), st.integers(0, 3))
def test_pullback_respects_wedge(seed, a, b):
    rng = np.random.default_rng(seed)
    al, be = random_form(rng, a, 2), random_form(rng, b, 2)
    tr = finite_rotation("z")
    assert form_eq(pullback(tr, wedge(al, be)), wedge(pullback(tr, al), pullback(tr, be)))


# textual forms ------------------------------------------------------------------

def test_parse_form_syntax():
    f = parse_form("(p/(u^2+v^2+w^2)) dt /\\ dp - u dx /\\ du")
    assert f.degree == 2 and len(f) == 2
    assert form_eq(parse_form(str(f)), f)
    assert parse_form("dy /\\ dx") == -parse_form("dx /\\ dy")


def test_kform_rejects_bad_tuples():
    with pytest.raises(ValueError):
        KForm(2, {(3, 1): E.ONE})
    with pytest.raises(ValueError):
        KForm(9)
