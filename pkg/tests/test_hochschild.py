import random

import pytest
from hypothesis import given, strategies as st

from cycformality.algebra import Polynomial, parse_polynomial
from cycformality.hochschild import (PolyDiffOp, braces, compose, cup, cyclic_average, cyclic_shift,
                                     format_op, gerstenhaber, hochschild_diff, ibp_normalize, iota,
                                     iota_inverse, is_cyclically_invariant, parse_op, to_dpoly)
from cycformality.selftest import random_polynomial
from conftest import operators
from oracles import apply_gaussian, gauss_moment, pairing


def P(text, dim=2):
    return parse_polynomial(text, dim)


def D(alpha, coeff=None, dim=2):
    return PolyDiffOp.derivative(dim, alpha, None if coeff is None else P(coeff, dim))


def sgn(e):
    return -1 if e % 2 else 1


m = PolyDiffOp.multiplication(2)
one = PolyDiffOp.identity(2)


def gaussian_args(seed, count, dim=2):
    rng = random.Random(seed)
    return [random_polynomial(rng, dim, max_deg=2, terms=3) + Polynomial.const(dim, rng.randint(1, 3))
            for _ in range(count)]


# -- braces, bracket, differential

def test_brace_of_derivatives_is_composition():
    assert braces(D((1, 0)), [D((0, 1))]) == D((1, 1))


def test_brace_of_multiplication_with_identity():
    # both insertion positions, each with sign (-1)^(i * 0) = +1
    assert braces(m, [one]) == m.scale(2)


def test_brace_into_function_is_empty():
    f = PolyDiffOp.function(P("x1"))
    assert braces(f, [D((1, 0))]).is_zero()


@given(operators(arity=2), operators(arity=1), st.integers(0, 1), st.integers(0, 10**6))
def test_compose_matches_direct_application(phi, psi, slot, seed):
    a, b = gaussian_args(seed, 2)
    args = [a, b]
    direct = [x for x in args]
    direct[slot] = psi.apply(args[slot])
    assert compose(phi, slot, psi).apply(*args) == phi.apply(*direct)


def test_gerstenhaber_examples():
    assert gerstenhaber(m, m).is_zero()
    assert gerstenhaber(D((1, 0)), D((0, 1))).is_zero()


def test_bracket_with_multiplication_operator():
    # [m, phi](a, b) = phi(a) b + a phi(b) - phi(ab) for 1-ary phi
    phi = PolyDiffOp.from_slots(P("x1"), [(0, 0)])
    a, b = P("x1 x2 + 1"), P("x2^2 - x1")
    want = phi.apply(a) * b + a * phi.apply(b) - phi.apply(a * b)
    assert gerstenhaber(m, phi).apply(a, b) == want
    assert hochschild_diff(phi) == gerstenhaber(m, phi)


def test_differential_examples():
    assert hochschild_diff(PolyDiffOp.function(P("x1 x2"))).is_zero()
    assert hochschild_diff(m).is_zero()
    assert hochschild_diff(D((1, 0))).is_zero()
    assert not hochschild_diff(D((2, 0))).is_zero()


@given(operators(max_order=2))
def test_differential_squares_to_zero(phi):
    assert hochschild_diff(hochschild_diff(phi)).is_zero()


@given(operators(max_order=1), operators(max_order=1))
def test_gerstenhaber_graded_antisymmetry(a, b):
    pa, pb = a.arity - 1, b.arity - 1
    assert gerstenhaber(a, b) == -gerstenhaber(b, a).scale(sgn(pa * pb))


@given(operators(arity=None, max_order=1), operators(max_order=1), operators(max_order=1))
def test_gerstenhaber_graded_jacobi(a, b, c):
    pa, pb = a.arity - 1, b.arity - 1
    lhs = gerstenhaber(a, gerstenhaber(b, c))
    rhs = gerstenhaber(gerstenhaber(a, b), c) + gerstenhaber(b, gerstenhaber(a, c)).scale(sgn(pa * pb))
    assert lhs == rhs


# -- cup product

def test_cup_of_functions():
    f, g = PolyDiffOp.function(P("x1")), PolyDiffOp.function(P("x2 + 1"))
    assert cup(f, g) == PolyDiffOp.function(P("x1 x2 + x1"))


def test_cup_with_identity_is_iota():
    phi = PolyDiffOp.from_slots(P("x1"), [(1, 0), (0, 2)])
    assert cup(one, phi) == iota(phi)


def test_cup_of_derivatives():
    a, b = P("x1^2 x2"), P("x1 x2^2")
    assert cup(D((1, 0)), D((0, 1))).apply(a, b) == a.diff(0) * b.diff(1)


@given(operators(), operators(), operators())
def test_cup_associative(a, b, c):
    assert cup(cup(a, b), c) == cup(a, cup(b, c))


@given(operators(max_order=1), operators(max_order=1))
def test_differential_is_derivation_of_cup(a, b):
    # with arity-counted brace signs, the sign sits on the first factor
    lhs = hochschild_diff(cup(a, b))
    rhs = cup(hochschild_diff(a), b).scale(sgn(b.arity)) + cup(a, hochschild_diff(b))
    assert lhs == rhs


# -- cyclic structure

def cc_integral(op, seed):
    args = gaussian_args(seed, op.arity)
    return gauss_moment(apply_gaussian(op, args), op.arity)


def test_ibp_single_derivative():
    op = PolyDiffOp.from_slots(Polynomial.const(2), [(1, 0), (0, 0)])
    assert ibp_normalize(op) == PolyDiffOp.from_slots(Polynomial.const(2), [(0, 0), (1, 0)], -1)


def test_ibp_with_coefficient():
    op = PolyDiffOp.from_slots(P("x2"), [(1, 0), (0, 0)])
    assert ibp_normalize(op) == PolyDiffOp.from_slots(P("-x2"), [(0, 0), (1, 0)])


@pytest.mark.parametrize("seed", range(5))
def test_ibp_double_derivative_preserves_integral(seed):
    op = PolyDiffOp.from_slots(P("x1 x2 + x2^2"), [(1, 1), (0, 0), (0, 1)])
    assert cc_integral(ibp_normalize(op), seed) == cc_integral(op, seed)


@given(st.integers(1, 3).flatmap(lambda a: operators(arity=a)), st.integers(0, 10**6))
def test_ibp_preserves_integral(op, seed):
    normal = ibp_normalize(op)
    assert all(d[0] == (0, 0) for _, d in normal.terms)
    assert cc_integral(normal, seed) == cc_integral(op, seed)


@given(st.integers(1, 3).flatmap(lambda a: operators(arity=a)))
def test_ibp_idempotent(op):
    once = ibp_normalize(op)
    assert ibp_normalize(once) == once


def test_iota_inverse_examples():
    rep = PolyDiffOp.from_slots(Polynomial.const(2), [(0, 0), (1, 0)])
    assert iota_inverse(rep) == D((1, 0))
    rep = PolyDiffOp.from_slots(P("x1"), [(0, 0), (1, 0), (0, 1)])
    assert iota_inverse(rep) == PolyDiffOp.from_slots(P("x1"), [(1, 0), (0, 1)])


def test_iota_inverse_rejects_slot_zero_derivatives():
    with pytest.raises(ValueError):
        iota_inverse(PolyDiffOp.from_slots(Polynomial.const(2), [(1, 0), (0, 0)]))


@given(operators())
def test_iota_round_trip(phi):
    assert to_dpoly(iota(phi)) == phi


def test_sigma_fixes_multiplication():
    assert cyclic_shift(m) == m
    assert is_cyclically_invariant(m)


def test_sigma_of_divergence_free_derivative():
    # d1 is divergence free, so rotation plus one integration by parts gives it back
    assert cyclic_shift(D((1, 0))) == D((1, 0))
    assert is_cyclically_invariant(D((1, 0)))


def test_sigma_of_euler_field():
    assert cyclic_shift(D((1, 0), "x1")) == D((1, 0), "x1") + one
    assert not is_cyclically_invariant(D((1, 0), "x1"))


def test_symmetric_first_derivatives_in_one_dimension():
    op = cup(PolyDiffOp.derivative(1, (1,)), PolyDiffOp.derivative(1, (1,)))
    want = -op - PolyDiffOp.from_slots(Polynomial.const(1), [(0,), (2,)])
    assert cyclic_shift(op) == want
    assert not is_cyclically_invariant(op)


@given(st.integers(0, 3).flatmap(lambda a: operators(arity=a)))
def test_sigma_has_order_arity_plus_one(phi):
    cur = phi
    for _ in range(phi.arity + 1):
        cur = cyclic_shift(cur)
    assert cur == phi


@given(st.integers(1, 3).flatmap(lambda a: operators(arity=a)), st.integers(0, 10**6))
def test_sigma_matches_rotated_pairing(phi, seed):
    # int a0 (sigma phi)(a1..ak) = (-1)^k int a1 phi(a2..ak, a0)
    k = phi.arity
    a = gaussian_args(seed, k + 1)
    lhs = pairing(cyclic_shift(phi), a[0], a[1:])
    rhs = pairing(phi, a[1], a[2:] + a[:1]) * sgn(k)
    assert lhs == rhs


@given(st.integers(1, 2).flatmap(lambda a: operators(arity=a, max_order=1)),
       st.integers(1, 2).flatmap(lambda a: operators(arity=a, max_order=1)))
def test_bracket_preserves_cyclic_invariance(phi, psi):
    a, b = cyclic_average(phi), cyclic_average(psi)
    assert is_cyclically_invariant(a) and is_cyclically_invariant(b)
    assert is_cyclically_invariant(gerstenhaber(a, b))


@given(st.integers(1, 2).flatmap(lambda a: operators(arity=a)))
def test_differential_preserves_cyclic_invariance(phi):
    assert is_cyclically_invariant(hochschild_diff(cyclic_average(phi)))


def test_float_tolerance_in_invariance_check():
    op = m + PolyDiffOp.from_slots(P("1"), [(1, 0), (0, 0)], 1e-12)
    assert not is_cyclically_invariant(op)
    assert is_cyclically_invariant(op, tol=1e-9)


# -- text format

@given(operators())
def test_text_round_trip(phi):
    assert parse_op(format_op(phi), 2, phi.arity) == phi


def test_text_format_line():
    assert format_op(D((1, 0), "x2")) == "1 | x2 | d^(1,0)"


def test_float_coefficients_survive_round_trip():
    op = PolyDiffOp.from_slots(P("x1"), [(0, 1)], 0.125)
    back = parse_op(format_op(op), 2, 1)
    assert back.terms == {((1, 0), ((0, 1),)): 0.125}
