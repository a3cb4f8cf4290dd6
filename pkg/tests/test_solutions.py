from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nsesym import expr as E
from nsesym import ratfunc
from nsesym.parser import parse, parse_solution
from nsesym.solutions import (SolutionFields, bouton_ansatz, classical_family, euler_number,
                              initial_data, l1prime_form, nse_residual, rotate_solution,
                              stagnation_solution, translate_in_time, verify_isobaricity)
from nsesym.symmetry import covariance_factor, finite_scaling

x, y, z, t = (E.symbol(n) for n in "xyzt")


def same(a, b):
    return ratfunc.is_structural_zero(E.sub(a, b))


def all_zero(rep):
    return all(vd.is_zero for vd in rep.verdicts)


def const_fields(*vals):
    return SolutionFields(*(E.const(Fraction(q)) for q in vals))


def test_classical_exponents_give_half_power_similarity_form():
    f = bouton_ansatz((1, 2))
    assert same(f.u, parse("t^(-1/2)*F1(x*t^(-1/2), y*t^(-1/2), z*t^(-1/2))"))
    assert same(f.p, parse("t^(-1)*F4(x*t^(-1/2), y*t^(-1/2), z*t^(-1/2))"))


def test_equal_exponents_give_profile_of_x_over_t():
    f = bouton_ansatz((1, 1))
    assert same(f.v, parse("F2(x/t, y/t, z/t)"))


def test_bouton_rejects_zero_time_exponent():
    with pytest.raises(ValueError, match="undefined"):
        bouton_ansatz((1, 0))


@given(st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool),
       st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool))
def test_bouton_ansatz_is_isobaric(ax, at):
    f = bouton_ansatz((ax, at))
    assert all_zero(verify_isobaricity(f, (ax, at), rng=0))
    r = covariance_factor(f.u, finite_scaling(ax, at), rng=0)
    assert r.verdict != "not-covariant" and r.exponent == ax - at


def test_classical_family_isobaric_both_modes():
    f = classical_family()
    assert all_zero(verify_isobaricity(f, (1, 2), rng=0))
    f0 = classical_family(shift=E.ZERO)
    assert all_zero(verify_isobaricity(f0, mode="split", rng=0))


def test_non_isobaric_field_fails():
    f = SolutionFields(parse("x + t"), E.ZERO, E.ZERO, E.ZERO)
    rep = verify_isobaricity(f, (1, 2), rng=0)
    assert not rep.verdicts[0].is_zero and rep.verdicts[0].witness


def test_classical_profile_constant():
    assert same(classical_family({"F1": E.ONE}).u, parse("x/(t+tau)"))


def test_stagnation_solution():
    f = stagnation_solution()
    assert same(f.u, parse("x/(t+tau)")) and same(f.v, parse("-y/(t+tau)"))
    assert same(f.p, parse("-y^2/(t+tau)^2"))
    rep = nse_residual(f)
    assert [vd.kind for vd in rep.verdicts] == ["zero-structural"] * 4


def test_constant_fields_solve():
    assert all_zero(nse_residual(const_fields(1, 2, 3, 4)))


def test_divergent_field_has_unit_continuity_residual():
    rep = nse_residual(SolutionFields(x, E.ZERO, E.ZERO, E.ZERO))
    assert rep.residuals[3] == E.ONE and not rep.verdicts[3].is_zero


def test_solution_file_roundtrip():
    m = parse_solution("u = x/(t+tau)\nv = -y/(t+tau)\nw = 0\np = -y^2/(t+tau)^2\ntau = 2\n")
    f = SolutionFields.from_mapping(m)
    assert all_zero(nse_residual(f))
    assert same(f.bound().u, parse("x/(t+2)"))


@pytest.mark.parametrize("shift", ["0", "1/3", "5"])
def test_time_translation_closure(shift):
    f = translate_in_time(stagnation_solution(), parse(shift))
    assert all_zero(nse_residual(f, rng=0))


@pytest.mark.parametrize("a,b,c", [(3, 4, 5), (5, 12, 13), (8, 15, 17)])
def test_rotation_closure(a, b, c):
    # Pythagorean triples give exact angles
    f = rotate_solution(stagnation_solution(), "z", E.const(Fraction(a, c)), E.const(Fraction(b, c)))
    assert all_zero(nse_residual(f, rng=0))


def test_rotation_closure_symbolic():
    f = rotate_solution(stagnation_solution(), "z")
    assert all_zero(nse_residual(f, rng=0))


def test_euler_numbers():
    r = euler_number(classical_family())
    assert same(r.value, parse("F4(y/x,z/x)/(F1(y/x,z/x)^2+F2(y/x,z/x)^2+F3(y/x,z/x)^2)"))
    assert r.time_independent and r.scale_invariant
    assert ratfunc.is_structural_zero(E.diff(r.value, t))
    r = euler_number(stagnation_solution())
    assert same(r.value, parse("-y^2/(x^2+y^2)")) and r.time_independent
    c = E.declare("c_const", "parameter")
    r = euler_number(SolutionFields(E.ONE, E.ZERO, E.ZERO, c))
    assert r.value == c


def test_euler_number_zero_velocity():
    with pytest.raises(ValueError, match="undefined"):
        euler_number(const_fields(0, 0, 0, 1))


def test_initial_data():
    u0 = initial_data(classical_family())
    assert same(u0[0], parse("x/tau*F1(y/x, z/x)"))
    assert initial_data(const_fields(1, 2, 3, 4)) == (E.ONE, E.const(2), E.const(3))
    assert initial_data(bouton_ansatz((3, 1))) == (E.ZERO,) * 3
    with pytest.raises(ValueError, match="undefined at t = 0"):
        initial_data(classical_family(shift=E.ZERO))
    bound = classical_family()
    bound.params = {"tau": 0}
    with pytest.raises(ValueError, match="undefined at t = 0"):
        initial_data(bound)


def test_l1prime_constants_only():
    f = l1prime_form((3, 1), polys={f"P{i}": E.ZERO for i in range(1, 5)})
    assert same(f.u, parse("C1*t^2"))
    assert initial_data(f) == (E.ZERO,) * 3
    g = l1prime_form((3, 1), polys={"P1": E.ONE, "P2": E.ZERO, "P3": E.ZERO, "P4": E.ZERO})
    u0 = initial_data(g)[0]
    assert not ratfunc.is_structural_zero(u0)
    assert f.flags["preconditions_ok"]
    assert not l1prime_form((1, 2)).flags["preconditions_ok"]


def test_l1prime_terms_are_separately_isobaric():
    s = (3, 1)
    only_c = l1prime_form(s, polys={f"P{i}": E.ZERO for i in range(1, 5)})
    only_p = l1prime_form(s, constants=(0, 0, 0, 0), pressure="doubled")
    assert all_zero(verify_isobaricity(only_c, s, rng=0))
    assert all_zero(verify_isobaricity(only_p, s, rng=0))
    # the printed pressure exponent keeps the velocity exponent
    verbatim = l1prime_form(s, constants=(0, 0, 0, 0))
    rep = verify_isobaricity(verbatim, s, rng=0)
    assert all(vd.is_zero for vd in rep.verdicts[:3]) and not rep.verdicts[3].is_zero
