"""Randomized exact identity suites for the cochain and polyvector calculus.

Each suite draws small random polynomial objects from a seeded generator and
checks an identity with exact rational arithmetic.  The CLI command
``algebra selftest`` and the test suite share these generators.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import Polynomial
from .hochschild import (PolyDiffOp, cup, cyclic_average, cyclic_shift, gerstenhaber,
                         hochschild_diff)
from .tpoly import PolyVector, divergence, schouten


# -- random objects

def random_polynomial(rng: random.Random, dim, max_deg=2, terms=3, coeffs=(-3, 3)):
    p = Polynomial(dim)
    for _ in range(rng.randint(0, terms)):
        exp = [0] * dim
        for _ in range(rng.randint(0, max_deg)):
            exp[rng.randrange(dim)] += 1
        p = p + Polynomial.monomial(tuple(exp), rng.randint(*coeffs))
    return p


def random_polyvector(rng, dim, degree, max_deg=2, terms=2):
    comps = {}
    idx = list(range(dim))
    for _ in range(terms):
        key = tuple(sorted(rng.sample(idx, degree)))
        comps[key] = random_polynomial(rng, dim, max_deg)
    return PolyVector(dim, degree, comps)


def random_op(rng, dim, arity, max_order=2, max_deg=2, terms=2):
    """Random polydifferential operator with small derivative orders."""
    op = PolyDiffOp(dim, arity)
    for _ in range(terms):
        derivs = []
        for _ in range(arity):
            a = [0] * dim
            for _ in range(rng.randint(0, max_order)):
                a[rng.randrange(dim)] += 1
            derivs.append(tuple(a))
        op = op + PolyDiffOp.from_slots(random_polynomial(rng, dim, max_deg, terms=2), derivs)
    return op


# -- identities (each returns True when it holds exactly)

def _sgn(e):
    return -1 if e % 2 else 1


def gerstenhaber_jacobi(a, b, c):
    """``[a,[b,c]] = [[a,b],c] + (-1)^{(|a|-1)(|b|-1)} [b,[a,c]]``."""
    pa, pb = a.arity - 1, b.arity - 1
    lhs = gerstenhaber(a, gerstenhaber(b, c))
    rhs = gerstenhaber(gerstenhaber(a, b), c) + gerstenhaber(b, gerstenhaber(a, c)).scale(_sgn(pa * pb))
    return (lhs - rhs).is_zero()


def schouten_antisymmetry(a, b):
    return (schouten(a, b) + schouten(b, a) * _sgn((a.degree - 1) * (b.degree - 1))).is_zero()


def schouten_jacobi(a, b, c):
    pa, pb = a.degree - 1, b.degree - 1
    lhs = schouten(a, schouten(b, c))
    rhs = schouten(schouten(a, b), c) + schouten(b, schouten(a, c)) * _sgn(pa * pb)
    return (lhs - rhs).is_zero()


def divergence_squared(a):
    return divergence(divergence(a)).is_zero()


def divergence_derivation(a, b):
    """``dv[a,b] = [dv a, b] + (-1)^{k_a - 1} [a, dv b]``."""
    lhs = divergence(schouten(a, b))
    rhs = schouten(divergence(a), b) + schouten(a, divergence(b)) * _sgn(a.degree - 1)
    return (lhs - rhs).is_zero()


def hochschild_squared(phi):
    return hochschild_diff(hochschild_diff(phi)).is_zero()


def cup_associative(a, b, c):
    return (cup(cup(a, b), c) - cup(a, cup(b, c))).is_zero()


def sigma_order(phi):
    """``sigma^{k+1} = id`` on operators with ``k`` slots."""
    cur = phi
    for _ in range(phi.arity + 1):
        cur = cyclic_shift(cur)
    return (cur - phi).is_zero()


def sigma_fixes_multiplication(dim):
    m = PolyDiffOp.multiplication(dim)
    return (cyclic_shift(m) - m).is_zero()


def bracket_preserves_invariance(phi, psi):
    a, b = cyclic_average(phi), cyclic_average(psi)
    br = gerstenhaber(a, b)
    return (cyclic_shift(br) - br).is_zero()


def differential_preserves_invariance(phi):
    a = cyclic_average(phi)
    d = hochschild_diff(a)
    return (cyclic_shift(d) - d).is_zero()


# -- suites

@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def line(self):
        status = "PASS" if self.passed else f"FAIL ({len(self.failures)} counterexamples)"
        return f"{self.name:<44} {self.instances:>5} instances  {status}"


def _run(name, count, make, check):
    res = SuiteResult(name)
    for i in range(count):
        args = make(i)
        res.instances += 1
        if not check(*args):
            res.failures.append(i)
    return res


def algebra_suites(count=200, seed=0xC0FFEE):
    """The exact identities of the Hochschild and polyvector calculus."""
    rng = random.Random(seed)
    dims = (1, 2, 3)

    def ops(*arities, max_order=2):
        d = rng.choice(dims[:2])
        return [random_op(rng, d, a, max_order=max_order) for a in arities]

    def pvs(*degs):
        d = rng.choice(dims[1:])
        return [random_polyvector(rng, d, min(k, d)) for k in degs]

    return [
        _run("d_H^2 = 0", count, lambda i: ops(rng.randint(0, 2)), hochschild_squared),
        _run("Gerstenhaber graded Jacobi", count,
             lambda i: ops(*(rng.randint(0, 2) for _ in range(3)), max_order=1), gerstenhaber_jacobi),
        _run("cup associativity", count, lambda i: ops(*(rng.randint(0, 2) for _ in range(3))),
             cup_associative),
        _run("Schouten graded antisymmetry", count, lambda i: pvs(rng.randint(0, 3), rng.randint(0, 3)),
             schouten_antisymmetry),
        _run("Schouten graded Jacobi", count, lambda i: pvs(*(rng.randint(0, 3) for _ in range(3))),
             schouten_jacobi),
        _run("dv^2 = 0", count, lambda i: pvs(rng.randint(0, 3)), divergence_squared),
        _run("dv is a derivation of [.,.]_S", count, lambda i: pvs(rng.randint(0, 3), rng.randint(0, 3)),
             divergence_derivation),
    ]


def sigma_suites(count=200, seed=0xC0FFEE):
    """Cyclic structure: order of sigma, sigma(m) = m, invariance under brackets."""
    rng = random.Random(seed + 1)
    return [
        _run("sigma^(k+1) = id, k <= 3", count,
             lambda i: [random_op(rng, rng.choice((1, 2)), rng.randint(0, 3))], sigma_order),
        _run("sigma(m) = m", 3, lambda i: [i + 1], sigma_fixes_multiplication),
        _run("[phi,psi]_G of invariant cochains is invariant", count,
             lambda i: [random_op(rng, d, rng.randint(1, 2), max_order=1) for d in [rng.choice((1, 2))] * 2],
             bracket_preserves_invariance),
        _run("d_H of an invariant cochain is invariant", count,
             lambda i: [random_op(rng, rng.choice((1, 2)), rng.randint(1, 2))],
             differential_preserves_invariance),
    ]
