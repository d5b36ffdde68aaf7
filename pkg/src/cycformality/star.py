"""Closed star products from formal unimodular Poisson structures.

A formal unimodular Poisson structure is ``pi = sum_j hbar^j (pi_j + u f_j)``
with bivectors ``pi_j`` and functions ``f_j`` solving the Maurer-Cartan
equation ``u dv pi + 1/2 [pi, pi]_S = 0``.  Pushing it through the cyclic
formality morphism gives ``f * g = fg + sum_n U_n(pi, ..., pi)(f, g) / n!``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .algebra import Polynomial
from .formality import CheckReport, Morphism, WeightSource, taylor_coefficient
from .hochschild import PolyDiffOp, compose, cyclic_shift, format_op, parse_op
from .tpoly import PolyVector, _split_top, divergence, format_polyvector, parse_polyvector, schouten

MAX_ORDER = 3


# -- unimodular Poisson structures

@dataclass
class UnimodularPoisson:
    """``pi = sum_j hbar^j (bivectors[j] + u functions[j])`` up to ``hbar^order``."""

    dim: int
    order: int
    bivectors: list = field(default_factory=list)
    functions: list = field(default_factory=list)

    def __post_init__(self):
        n = self.order + 1
        self.bivectors = list(self.bivectors)[:n]
        self.functions = list(self.functions)[:n]
        self.bivectors += [PolyVector.zero(self.dim, 2)] * (n - len(self.bivectors))
        self.functions += [PolyVector.zero(self.dim, 0)] * (n - len(self.functions))
        for b in self.bivectors:
            if b.degree != 2 or b.dim != self.dim:
                raise ValueError("bivector terms must be bivectors in the right dimension")
        for f in self.functions:
            if f.degree != 0 or f.dim != self.dim:
                raise ValueError("u terms must be functions in the right dimension")

    def inputs(self, j):
        """Non-zero ``(u-power, polyvector)`` pieces at ``hbar^j``."""
        out = []
        if not self.bivectors[j].is_zero():
            out.append((0, self.bivectors[j]))
        if not self.functions[j].is_zero():
            out.append((1, self.functions[j]))
        return out

    def __str__(self):
        return format_poisson(self)


def parse_poisson(text: str, dim: int, order: int) -> UnimodularPoisson:
    """Parse e.g. ``"hbar x3 d1^d2 + hbar^2 u (x1 + 1)"``.

    Each term may carry ``hbar`` or ``hbar^j`` (default ``hbar^0``) and a
    ``u`` marking a function term.
    """
    bis = [PolyVector.zero(dim, 2) for _ in range(order + 1)]
    fns = [PolyVector.zero(dim, 0) for _ in range(order + 1)]
    for sign, body in _split_top(text):
        j, is_u = 0, False
        rest = []
        for tok in re.findall(r"\([^()]*\)|\S+", body):
            m = re.fullmatch(r"hbar(?:\^(\d+))?", tok)
            if m:
                j += int(m.group(1) or 1)
            elif tok == "u":
                is_u = True
            else:
                rest.append(tok)
        pv = parse_polyvector(" ".join(rest) or "1", dim) * sign
        if j > order:
            continue
        if is_u:
            if pv.degree != 0:
                raise ValueError(f"u term must be a function: {body!r}")
            fns[j] = fns[j] + pv
        else:
            if pv.degree != 2:
                raise ValueError(f"term without u must be a bivector: {body!r}")
            bis[j] = bis[j] + pv
    return UnimodularPoisson(dim, order, bis, fns)


def format_poisson(p: UnimodularPoisson) -> str:
    out = ""
    for j in range(p.order + 1):
        h = "" if j == 0 else "hbar " if j == 1 else f"hbar^{j} "
        for pv, u in ((p.bivectors[j], ""), (p.functions[j], "u ")):
            if pv.is_zero():
                continue
            # one term per component so that every term carries its own prefix
            for sign, body in _split_top(format_polyvector(pv)):
                out += (" - " if sign < 0 else " + ") + h + u + body
    out = out.strip()
    if not out:
        return "0"
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


def check_maurer_cartan(p: UnimodularPoisson) -> dict:
    """Residual of ``u dv pi + 1/2 [pi, pi]_S`` keyed by ``(hbar power, u power)``; empty iff unimodular."""
    res = {}

    def add(key, pv):
        if pv.is_zero():
            return
        res[key] = res[key] + pv if key in res else pv

    for k in range(p.order + 1):
        add((k, 1), divergence(p.bivectors[k]))
        for i in range(k + 1):
            pi_i, pi_j = p.bivectors[i], p.bivectors[k - i]
            add((k, 0), schouten(pi_i, pi_j) * Fraction(1, 2))
            # u commutes with everything, so [pi_i, u f_j] = u [pi_i, f_j]
            add((k, 1), schouten(pi_i, p.functions[k - i]) * Fraction(1, 2))
            add((k, 1), schouten(p.functions[i], pi_j) * Fraction(1, 2))
    return {key: v for key, v in res.items() if not v.is_zero()}


# -- star products

@dataclass
class StarProduct:
    """``f * g = sum_j hbar^j ops[j](f, g)`` with ``ops[0]`` the multiplication."""

    dim: int
    order: int
    ops: list
    graphs: int = 0

    def __post_init__(self):
        if len(self.ops) != self.order + 1:
            raise ValueError("need one operator per hbar power")
        if self.ops[0] != PolyDiffOp.multiplication(self.dim):
            raise ValueError("the hbar^0 term must be the multiplication")
        for op in self.ops:
            if op.arity != 2:
                raise ValueError("star product terms must be bidifferential")

    @classmethod
    def trivial(cls, dim, order):
        return cls(dim, order, [PolyDiffOp.multiplication(dim)] + [PolyDiffOp(dim, 2)] * order)

    def max_std(self):
        return max(op.max_std() for op in self.ops)

    def apply(self, f: Polynomial, g: Polynomial):
        """Per-order values ``m_j(f, g)`` (only for exact coefficients)."""
        return [op.apply(f, g) for op in self.ops]

    def dumps(self):
        blocks = [f"# star product, dim {self.dim}, order {self.order}"]
        for j, op in enumerate(self.ops):
            blocks.append(f"## hbar^{j}")
            blocks.append(format_op(op))
        return "\n".join(blocks) + "\n"


def loads_star(text: str) -> StarProduct:
    head, *rest = re.split(r"^## hbar\^\d+\s*$", text, flags=re.M)
    m = re.search(r"dim (\d+), order (\d+)", head)
    if not m:
        raise ValueError("missing star product header")
    dim, order = int(m.group(1)), int(m.group(2))
    return StarProduct(dim, order, [parse_op(b.strip(), dim, 2) for b in rest])


def build_star(p: UnimodularPoisson, order=None, weights=None, max_order=MAX_ORDER,
               require_mc=True) -> StarProduct:
    """Push ``p`` through the morphism: ``m_J = sum_n (1/n!) sum U_n(...)`` over ordered inputs of total ``hbar^J``."""
    order = p.order if order is None else order
    if order > max_order:
        raise ValueError(f"order {order} exceeds the supported bound {max_order}")
    if order > p.order:
        raise ValueError("the Poisson structure is truncated below the requested order")
    if require_mc and check_maurer_cartan(p):
        raise ValueError("not a unimodular Poisson structure (Maurer-Cartan residual is non-zero)")
    weights = weights or WeightSource()
    F = Morphism(p.dim, weights)
    ops = [PolyDiffOp.multiplication(p.dim)] + [PolyDiffOp(p.dim, 2) for _ in range(order)]
    pieces = {j: p.inputs(j) for j in range(1, order + 1)}
    for n in range(1, order + 1):
        for hs in product(range(1, order + 1), repeat=n):
            J = sum(hs)
            if J > order:
                continue
            for items in product(*(pieces[h] for h in hs)):
                op = F(list(items))
                if op.arity != 2:
                    raise AssertionError("Taylor coefficient on Maurer-Cartan inputs must be bidifferential")
                ops[J] = ops[J] + op.scale(Fraction(1, math.factorial(n)))
    return StarProduct(p.dim, order, ops)


def check_associativity(s: StarProduct, tol_sigmas=3.0, sigma_ceiling=0.02) -> CheckReport:
    """``(a*b)*c - a*(b*c)`` per hbar power as a 3-ary operator."""
    rep = CheckReport(f"associativity, dim {s.dim}, order {s.order}", tol_sigmas=tol_sigmas,
                      sigma_ceiling=sigma_ceiling)
    for k in range(s.order + 1):
        res = PolyDiffOp(s.dim, 3)
        for i in range(k + 1):
            a, b = s.ops[i], s.ops[k - i]
            if a.is_zero() or b.is_zero():
                continue
            res = res + compose(a, 0, b) - compose(a, 1, b)
        rep.add_op(f"hbar^{k}", res)
        if res.is_zero():
            rep.rows.append((f"hbar^{k} (exact zero)", 0.0, 0.0))
    return rep


def check_closed(s: StarProduct, tol_sigmas=3.0, sigma_ceiling=0.02) -> CheckReport:
    """Cyclic invariance ``sigma(m_j) = m_j`` for every hbar power."""
    rep = CheckReport(f"closedness, dim {s.dim}, order {s.order}", tol_sigmas=tol_sigmas,
                      sigma_ceiling=sigma_ceiling)
    for k, op in enumerate(s.ops):
        diff = cyclic_shift(op) - op
        rep.add_op(f"hbar^{k}", diff)
        if diff.is_zero():
            rep.rows.append((f"hbar^{k} (exact zero)", 0.0, 0.0))
    return rep


# -- gauge transformations

def _series_inverse(D):
    """Inverse of ``D = 1 + hbar D_1 + ...`` as a list of 1-ary operators."""
    E = [D[0]]
    for k in range(1, len(D)):
        acc = PolyDiffOp(D[0].dim, 1)
        for i in range(1, k + 1):
            acc = acc + compose(D[i], 0, E[k - i])
        E.append(-acc)
    return E


def gauge_transform_star(s: StarProduct, D) -> StarProduct:
    """``f *' g = D(D^{-1} f * D^{-1} g)`` for ``D = [D_0 = 1, D_1, ...]``."""
    D = list(D)[: s.order + 1]
    if not D or D[0] != PolyDiffOp.identity(s.dim):
        raise ValueError("D_0 must be the identity")
    D += [PolyDiffOp(s.dim, 1)] * (s.order + 1 - len(D))
    E = _series_inverse(D)
    ops = []
    for k in range(s.order + 1):
        acc = PolyDiffOp(s.dim, 2)
        for a in range(k + 1):
            for b in range(k + 1 - a):
                if s.ops[b].is_zero() or D[a].is_zero():
                    continue
                for c in range(k + 1 - a - b):
                    d = k - a - b - c
                    if E[c].is_zero() or E[d].is_zero():
                        continue
                    inner = compose(compose(s.ops[b], 0, E[c]), 1, E[d])
                    acc = acc + compose(D[a], 0, inner)
        ops.append(acc)
    return StarProduct(s.dim, s.order, ops)


def gauge_transform_poisson(p: UnimodularPoisson, xi) -> UnimodularPoisson:
    """``pi' = exp(ad xi) pi + u (1 - exp(ad xi)) / ad xi (dv xi)`` with ``ad xi = [xi, .]_S``.

    ``xi`` lists vector fields by hbar power and must vanish at ``hbar^0``.
    """
    N = p.order
    xi = list(xi)[: N + 1]
    xi += [PolyVector.zero(p.dim, 1)] * (N + 1 - len(xi))
    if not xi[0].is_zero():
        raise ValueError("xi must start at hbar^1")

    def ad(series):
        out = [series[0] * 0 for _ in range(N + 1)]
        for i in range(1, N + 1):
            for j in range(N + 1 - i):
                if not series[j].is_zero() and not xi[i].is_zero():
                    out[i + j] = out[i + j] + schouten(xi[i], series[j])
        return out

    def exp_like(series, coeff):
        # sum_k coeff(k) ad^k(series); ad raises the hbar order, so k <= N
        total = [x * coeff(0) for x in series]
        cur = series
        for k in range(1, N + 1):
            cur = ad(cur)
            total = [t + x * coeff(k) for t, x in zip(total, cur)]
        return total

    bis = exp_like(p.bivectors, lambda k: Fraction(1, math.factorial(k)))
    fns = exp_like(p.functions, lambda k: Fraction(1, math.factorial(k)))
    dxi = [divergence(x) for x in xi]
    corr = exp_like(dxi, lambda k: Fraction(-1, math.factorial(k + 1)))
    fns = [f + c for f, c in zip(fns, corr)]
    return UnimodularPoisson(p.dim, N, bis, fns)
