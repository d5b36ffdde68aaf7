"""Independent oracles used by the tests.

Nothing here calls the symbolic machinery under test beyond plain
Polynomial arithmetic.
"""

from fractions import Fraction
from itertools import permutations, product
from math import prod

from cycformality.algebra import Polynomial


# -- Gaussian pairing
#
# Functions are p(x) exp(-|x|^2) with polynomial p.  Their derivatives stay in
# this class, products multiply the Gaussians, and integrals of
# x^a exp(-c|x|^2) divided by the integral of exp(-c|x|^2) are rational.
# This gives an exact stand-in for integration against compactly supported
# test functions, with no boundary terms.

def gauss_diff(p: Polynomial, i: int) -> Polynomial:
    """``d_i (p e^{-|x|^2}) = (d_i p - 2 x_i p) e^{-|x|^2}``."""
    return p.diff(i) - Polynomial.var(p.dim, i) * p * 2


def gauss_diff_multi(p, alpha):
    for i, a in enumerate(alpha):
        for _ in range(a):
            p = gauss_diff(p, i)
    return p


def gauss_moment(p: Polynomial, c: int) -> Fraction:
    """``int p e^{-c|x|^2} / int e^{-c|x|^2}``."""
    total = Fraction(0)
    for exp, coeff in p.terms.items():
        term = Fraction(coeff)
        for a in exp:
            if a % 2:
                term = Fraction(0)
                break
            # E[x^(2n)] for variance 1/(2c) is (2n-1)!! / (2c)^n
            n = a // 2
            term *= Fraction(prod(range(1, 2 * n, 2)), (2 * c) ** n)
        total += term
    return total


def apply_gaussian(op, args):
    """Apply a PolyDiffOp to Gaussian-weighted arguments; the result carries ``e^{-len(args)|x|^2}``."""
    out = Polynomial(op.dim)
    for (e, derivs), c in op.terms.items():
        term = Polynomial.monomial(e, c)
        for a, alpha in zip(args, derivs):
            term = term * gauss_diff_multi(a, alpha)
        out = out + term
    return out


def pairing(op, a0, args):
    """``int a0 op(args)`` up to the common Gaussian normalisation."""
    return gauss_moment(a0 * apply_gaussian(op, args), len(args) + 1)


# -- divergence through the volume form

def _perm_sign(p):
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def full_tensor(pv):
    """Dense antisymmetric tensor ``{(i1..ik): coeff}`` over all index tuples."""
    out = {}
    for key, p in pv.comps.items():
        for perm in permutations(range(len(key))):
            out[tuple(key[t] for t in perm)] = p.scale(_perm_sign(perm))
    return out


def contract_volume(pv):
    """``i_gamma omega`` for ``omega = dx_1 .. dx_d`` as a dense (d-k)-form.

    Uses ``i_gamma = i_{d_{i_k}} .. i_{d_{i_1}}`` with weight ``1/k!`` on the
    full tensor, so the form has components ``eps_{i_1..i_k j_1..j_{d-k}}``.
    """
    d, k = pv.dim, pv.degree
    T = full_tensor(pv)
    form = {}
    for rest in product(range(d), repeat=d - k):
        acc = Polynomial(d)
        for idx, p in T.items():
            full = idx + rest
            if len(set(full)) == d:
                acc = acc + p.scale(Fraction(_perm_sign(full), prod(range(1, k + 1))))
        if acc:
            form[rest] = acc
    return form


def exterior_derivative(form, d, deg):
    """Dense components of ``d alpha`` for a dense antisymmetric ``deg``-form."""
    out = {}
    for idx in product(range(d), repeat=deg + 1):
        acc = Polynomial(d)
        for pos in range(deg + 1):
            rest = idx[:pos] + idx[pos + 1:]
            if rest in form:
                acc = acc + form[rest].diff(idx[pos]).scale(-1 if pos % 2 else 1)
        if acc:
            out[idx] = acc
    return out


def oracle_divergence_form(pv):
    """``d (i_gamma omega)`` as a dense (d-k+1)-form."""
    return exterior_derivative(contract_volume(pv), pv.dim, pv.dim - pv.degree)
