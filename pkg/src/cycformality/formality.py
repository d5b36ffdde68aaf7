"""Taylor coefficients of the cyclic formality morphism and checkers for its identities.

Inputs are homogeneous elements ``u^j gamma`` of ``T_poly[u]``, written as
pairs ``(j, gamma)`` (a bare PolyVector means ``j = 0``).  The Taylor
coefficient with ``m`` inputs has the D_poly arity

    n = sum k_i + 2 sum j_i - 2 m + 2

and its cyclic-complex representative has ``n + 1`` slots.  Graph operators
``D_Gamma`` use the sorted-key tensor of each input; dividing by
``prod k_i!`` turns this into the fully antisymmetric tensor sum.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .graphs import ExtGraph, enumerate_graphs, evaluate_as_op, contract_edge, remove_tadpole, collapse_subgraph
from .hochschild import PolyDiffOp, braces, cyclic_shift, to_dpoly, format_op
from .tpoly import PolyVector, bullet, divergence, parse_polyvector
from .uncertain import Uncertain, std_of, value_of
from .weights import WeightCache, exact_weight, integrate, cache_key

DEFAULT_SAMPLES = 2_000_000
DEFAULT_SEED = 0xC0FFEE


# -- signs

def perm_sign(order, degrees):
    """Sign of the permutation sorting the odd-degree entries of ``order``."""
    odd = [i for i in order if degrees[i] % 2]
    inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
    return -1 if inv % 2 else 1


def shuffle_sign(degrees, I, J):
    """``epsilon(I, J)`` for a splitting of ``range(len(degrees))``."""
    I, J = list(I), list(J)
    if set(I) & set(J):
        raise ValueError("I and J overlap")
    if sorted(I + J) != list(range(len(degrees))):
        raise ValueError("I and J must cover all indices")
    return perm_sign(I + J, degrees)


# -- weights as uncertain numbers

class WeightSource:
    """Cache-first access to graph weights as :class:`Uncertain` leaves."""

    def __init__(self, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, cache=None):
        self.samples, self.seed = samples, seed
        self.cache = cache if cache is not None else WeightCache()
        self._memo = {}

    def __call__(self, g: ExtGraph, upows, spectator=None):
        upows = tuple(upows)
        ex = exact_weight(g, upows, spectator)
        if ex is not None:
            return Fraction(ex).limit_denominator(1)
        key = cache_key(g, upows) + (spectator,)
        if key not in self._memo:
            w = integrate(g, upows, self.samples, self.seed, cache=self.cache, spectator=spectator)
            self._memo[key] = Uncertain.leaf(key, w.value, w.stderr)
        return self._memo[key]


def _norm_inputs(inputs):
    out = []
    for x in inputs:
        if isinstance(x, PolyVector):
            out.append((0, x))
        else:
            j, g = x
            out.append((int(j), g))
    return out


def output_arity(inputs):
    inputs = _norm_inputs(inputs)
    return sum(g.degree for _, g in inputs) + 2 * sum(j for j, _ in inputs) - 2 * len(inputs) + 2


@dataclass
class TaylorCoefficient:
    inputs: list
    n: int
    cc: PolyDiffOp          # n + 1 slots, derivative free in slot 0
    graphs: int = 0

    @property
    def dpoly(self) -> PolyDiffOp:
        return to_dpoly(self.cc)

    def max_std(self):
        return self.cc.max_std()


def taylor_coefficient(inputs, weights=None, include_tadpoles=True) -> TaylorCoefficient:
    """``U_m(u^{j_1} gamma_1, ..., u^{j_m} gamma_m)`` as a sum over extended graphs."""
    inputs = _norm_inputs(inputs)
    if not inputs:
        raise ValueError("U_0 is the multiplication; pass at least one input")
    weights = weights or WeightSource()
    m = len(inputs)
    dim = inputs[0][1].dim
    n = output_arity(inputs)
    if n < 0:
        return TaylorCoefficient(inputs, n, PolyDiffOp(dim, 0))
    js = tuple(j for j, _ in inputs)
    gammas = [g for _, g in inputs]
    ks = [g.degree for g in gammas]
    norm = Fraction(1, math.prod(math.factorial(k) for k in ks))
    out = PolyDiffOp(dim, n + 1)
    used = 0
    for g in enumerate_graphs(m, n, ks, allow_tadpoles=include_tadpoles):
        if exact_weight(g, js) == 0:
            continue
        D = evaluate_as_op(g, gammas)
        if D.is_zero():
            continue
        assert g.num_edges + 2 * sum(js) == 2 * m + n - 2
        out = out + D.scale(weights(g, js) * norm)
        used += 1
    return TaylorCoefficient(inputs, n, out, used)


# -- reports

@dataclass
class CheckReport:
    name: str
    rows: list = field(default_factory=list)   # (label, value, sigma)
    tol_sigmas: float = 3.0
    sigma_ceiling: float = 0.02
    abs_floor: float = 1e-9
    notes: list = field(default_factory=list)

    def add_op(self, label, op: PolyDiffOp):
        for (e, d), c in sorted(op.terms.items(), key=lambda kv: repr(kv[0])):
            self.rows.append((f"{label} x^{e} d^{d}", value_of(c), std_of(c)))

    def row_ok(self, value, sigma):
        return abs(value) <= self.tol_sigmas * sigma + self.abs_floor

    @property
    def max_sigma(self):
        return max((s for _, _, s in self.rows), default=0.0)

    @property
    def passed(self):
        return all(self.row_ok(v, s) for _, v, s in self.rows) and self.max_sigma <= self.sigma_ceiling

    def to_text(self):
        lines = [f"# {self.name}"]
        lines += [f"# {n}" for n in self.notes]
        lines.append(f"{'coefficient':<48} {'residual':>13} {'sigma':>10} {'res/sigma':>9}  verdict")
        for label, v, s in self.rows:
            ratio = abs(v) / s if s > 0 else (0.0 if abs(v) <= self.abs_floor else math.inf)
            lines.append(f"{label:<48} {v:>13.6g} {s:>10.3g} {ratio:>9.2f}  {'ok' if self.row_ok(v, s) else 'FAIL'}")
        lines.append(f"max sigma {self.max_sigma:.3g} (ceiling {self.sigma_ceiling}), "
                     f"tolerance {self.tol_sigmas} sigma: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "max_sigma": self.max_sigma,
                "tol_sigmas": self.tol_sigmas, "sigma_ceiling": self.sigma_ceiling, "notes": self.notes,
                "rows": [{"coefficient": l, "residual": v, "sigma": s} for l, v, s in self.rows]}

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)


# -- the L-infinity relation

class Morphism:
    """Memoized D_poly values ``F_m`` of the morphism, with ``F_0 = m``."""

    def __init__(self, dim, weights=None):
        self.dim = dim
        self.weights = weights or WeightSource()
        self._memo = {}

    def __call__(self, items):
        items = _norm_inputs(items)
        if not items:
            return PolyDiffOp.multiplication(self.dim)
        key = tuple((j, g.degree, str(g)) for j, g in items)
        if key not in self._memo:
            self._memo[key] = taylor_coefficient(items, self.weights).dpoly
        return self._memo[key]


def linfty_residual(inputs, F: Morphism):
    """Return ``(lhs_dv, lhs_bullet, rhs)`` of the relation on D_poly representatives."""
    xs = _norm_inputs(inputs)
    n = len(xs)
    ks = [g.degree for _, g in xs]
    dim = xs[0][1].dim
    arity = sum(ks) + 2 * sum(j for j, _ in xs) - 2 * n + 3
    lhs1 = PolyDiffOp(dim, arity)
    for i, (j, g) in enumerate(xs):
        if g.degree == 0:
            continue
        dg = divergence(g)
        if dg.is_zero():
            continue
        sign = -1 if sum(ks[:i]) % 2 else 1
        items = xs[:i] + [(j + 1, dg)] + xs[i + 1:]
        lhs1 = lhs1 + F(items).scale(sign)
    lhs2 = PolyDiffOp(dim, arity)
    for i in range(n):
        for k in range(n):
            if i == k or ks[i] == 0:
                continue
            b = bullet(xs[i][1], xs[k][1])
            if b.is_zero():
                continue
            rest = [r for r in range(n) if r not in (i, k)]
            eps = perm_sign([i, k] + rest, ks)
            items = [(xs[i][0] + xs[k][0], b)] + [xs[r] for r in rest]
            lhs2 = lhs2 - F(items).scale(eps)
    rhs = PolyDiffOp(dim, arity)
    for size in range(n + 1):
        for I in combinations(range(n), size):
            J = [r for r in range(n) if r not in I]
            eps = perm_sign(list(I) + J, ks)
            if sum(ks[r] for r in I) % 2:
                eps = -eps
            FI = F([xs[r] for r in I])
            FJ = F([xs[r] for r in J])
            if FI.is_zero() or FJ.is_zero():
                continue
            rhs = rhs + braces(FI, [FJ]).scale(eps)
    return lhs1, lhs2, rhs


def check_linfty(inputs, weights=None, tol_sigmas=3.0, sigma_ceiling=0.02, name=None):
    xs = _norm_inputs(inputs)
    F = Morphism(xs[0][1].dim, weights)
    lhs1, lhs2, rhs = linfty_residual(xs, F)
    res = lhs1 + lhs2 - rhs
    rep = CheckReport(name or f"L-infinity relation, {len(xs)} input(s)", tol_sigmas=tol_sigmas,
                      sigma_ceiling=sigma_ceiling)
    rep.notes.append("residual = sum F(.. u dv x_i ..) - sum eps F(x_i . x_j, ..) - sum eps F_I{F_J}")
    rep.notes.append(f"terms: dv part {len(lhs1.terms)}, bullet part {len(lhs2.terms)}, composition part {len(rhs.terms)}")
    rep.add_op("res", res)
    return rep


# -- cyclic invariance

def check_cyclic_invariance(inputs, weights=None, tol_sigmas=3.0, sigma_ceiling=0.02, name=None):
    tc = taylor_coefficient(inputs, weights)
    dp = tc.dpoly
    diff = cyclic_shift(dp) - dp
    rep = CheckReport(name or "cyclic invariance", tol_sigmas=tol_sigmas, sigma_ceiling=sigma_ceiling)
    rep.notes.append(f"D_poly arity {tc.n}, {tc.graphs} contributing graphs, {len(dp.terms)} terms")
    rep.add_op("sigma U - U", diff)
    return rep


# -- quadratic weight relations

def good_subsets(g: ExtGraph):
    """Yield ``(J, l, n2)`` for all boundary strata with a type II part."""
    for n2 in range(0, g.n + 1):
        for size in range(0, g.m + 1):
            if size == 0 and n2 < 2:
                continue
            for J in combinations(range(g.m), size):
                ls = range(1, g.n + 2) if n2 == 0 else range(1, g.n - n2 + 2)
                for l in ls:
                    yield J, l, n2


def weight_relation_terms(g: ExtGraph, upows, weights):
    """The three sums of the relation, as lists of ``(label, coefficient, value)``."""
    upows = tuple(upows)
    ks = list(g.outdegrees)
    tad, contr, bdry = [], [], []
    for i in g.tadpoles():
        s, h = remove_tadpole(g, i)
        sign = -1 if (sum(ks[:i]) + s) % 2 else 1
        js = list(upows)
        js[i] += 1
        tad.append((f"tadpole i{i + 1}: {h.canon()} u={js}", -sign, weights(h, js)))
    for i, st in enumerate(g.stars):
        for t in st:
            if t[0] != "i" or t[1] == i:
                continue
            j = t[1]
            if ("i", i) in g.stars[j]:
                continue
            for sgn, h in contract_edge(g, i, j):
                rest = [r for r in range(g.m) if r not in (i, j)]
                eps = perm_sign([i, j] + rest, ks)
                js = [upows[i] + upows[j]] + [upows[r] for r in rest]
                contr.append((f"contract i{i + 1}->i{j + 1}: {h.canon()} u={js}", -sgn * eps, weights(h, js)))
    for J, l, n2 in good_subsets(g):
        c = collapse_subgraph(g, J, l, n2)
        if c is None:
            continue
        # a lone type I cluster lands between boundary points; the new vertex was
        # interior before, so it stays out of eta and varpi of the quotient
        spectator = l if n2 == 0 else None
        wq = weights(c.quotient, [upows[r] for r in c.I], spectator)
        if wq == 0:
            continue
        ws = weights(c.sub, [upows[r] for r in c.J])
        if ws == 0:
            continue
        eps = perm_sign(list(c.I) + list(c.J), ks)
        sign = -1 if ((l + 1) * (n2 + 1) + n2 + g.n) % 2 else 1
        bdry.append((f"collapse J={[r + 1 for r in J]} l={l} n2={n2}: {c.quotient.canon()} x {c.sub.canon()}",
                     sign * eps, wq * ws))
    return tad, contr, bdry


def check_weight_relation(g: ExtGraph, upows=None, weights=None, tol_sigmas=3.0, sigma_ceiling=0.02):
    upows = tuple(upows) if upows is not None else (0,) * g.m
    weights = weights or WeightSource()
    rep = CheckReport(f"weight relation for {g.canon()} u={list(upows)}", tol_sigmas=tol_sigmas,
                      sigma_ceiling=sigma_ceiling)
    if g.num_edges + 2 * sum(upows) != 2 * g.m + g.n - 3:
        rep.notes.append("form degree is not dim - 1: all terms vanish")
        rep.rows.append(("LHS - RHS", 0.0, 0.0))
        return rep
    tad, contr, bdry = weight_relation_terms(g, upows, weights)
    lhs = sum((c * w for _, c, w in tad), Fraction(0))
    rhs = sum((c * w for _, c, w in contr + bdry), Fraction(0))
    for label, c, w in tad + contr + bdry:
        rep.notes.append(f"{'+' if c > 0 else '-'} {label} = {value_of(w):.6g} +- {std_of(w):.2g}")
    res = lhs - rhs
    rep.rows.append(("LHS - RHS", value_of(res), std_of(res)))
    return rep


# graphs with m <= 2, n <= 3 whose relations mix tadpole, contraction and boundary terms
WEIGHT_RELATION_SUITE = [
    ("2 2 | i1 | b2 i1", (0, 0)),
    ("2 2 | b1 i1 | i2", (0, 0)),
    ("2 2 | - | b1 i1 i2", (0, 0)),
    ("2 3 | b1 i1 | -", (0, 1)),
    ("2 1 | i2 i1 | -", (0, 0)),
]


def parse_input(text: str, dim: int):
    """Parse ``"u^j <polyvector>"`` (the ``u`` prefix is optional) into ``(j, PolyVector)``."""
    m = re.match(r"\s*u(?:\^(\d+))?\s+(.*)$", text)
    if m:
        return int(m.group(1) or 1), parse_polyvector(m.group(2), dim)
    return 0, parse_polyvector(text, dim)
