"""Polydifferential operators on polynomial functions.

An operator of arity ``n`` acts as

    (a_1, ..., a_n) -> sum  c * x^e * d^{alpha_1} a_1 * ... * d^{alpha_n} a_n

and is stored in canonical form ``{(e, (alpha_1, ..., alpha_n)): c}`` with
zero terms dropped, so equality is coefficient comparison.  Coefficients are
Fractions for exact work, or floats / :class:`~cycformality.uncertain.Uncertain`
when weights enter.

Operators of arity ``k + 1`` whose first slot is derivative free stand for
classes in the cyclic complex (``CyclicClass``); :func:`ibp_normalize`
produces that normal form by integrating by parts against the constant
volume form.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from math import factorial

from .algebra import Polynomial, multi_leibniz, parse_polynomial, format_polynomial
from .uncertain import Uncertain, is_zero, std_of, value_of


def _mono_diff(exp, alpha):
    """``d^alpha x^exp = factor * x^new``; returns ``(factor, new)`` or None."""
    f = 1
    new = []
    for e, a in zip(exp, alpha):
        if a > e:
            return None
        for t in range(a):
            f *= e - t
        new.append(e - a)
    return f, tuple(new)


def _add_vec(a, b):
    return tuple(x + y for x, y in zip(a, b))


class PolyDiffOp:
    __slots__ = ("dim", "arity", "terms")

    def __init__(self, dim: int, arity: int, terms=None):
        self.dim = dim
        self.arity = arity
        self.terms = {}
        for key, c in (terms or {}).items():
            self._accum(key, c)

    def _accum(self, key, c):
        if is_zero(c):
            return
        old = self.terms.get(key)
        new = c if old is None else old + c
        if is_zero(new):
            del self.terms[key]
        else:
            self.terms[key] = new

    # -- constructors
    @classmethod
    def zero(cls, dim, arity):
        return cls(dim, arity)

    @classmethod
    def multiplication(cls, dim, arity=2):
        """The pointwise product of ``arity`` functions (``m`` for arity 2)."""
        z = (0,) * dim
        return cls(dim, arity, {(z, (z,) * arity): Fraction(1)})

    @classmethod
    def identity(cls, dim):
        return cls.multiplication(dim, 1)

    @classmethod
    def derivative(cls, dim, alpha, coeff=None):
        """The 1-ary operator ``coeff * d^alpha``."""
        coeff = coeff if coeff is not None else Polynomial.const(dim)
        return cls.from_slots(coeff, [tuple(alpha)])

    @classmethod
    def function(cls, f: Polynomial):
        """A function seen as an arity-0 cochain."""
        return cls.from_slots(f, [])

    @classmethod
    def from_slots(cls, coeff: Polynomial, derivs, scalar=1):
        derivs = tuple(tuple(a) for a in derivs)
        op = cls(coeff.dim, len(derivs))
        for e, c in coeff.terms.items():
            op._accum((e, derivs), c * scalar)
        return op

    # -- protocol
    def copy(self):
        op = PolyDiffOp(self.dim, self.arity)
        op.terms = dict(self.terms)
        return op

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.dim == other.dim
        return (self.dim, self.arity, self.terms) == (other.dim, other.arity, other.terms)

    def _like(self, other):
        if not isinstance(other, PolyDiffOp):
            raise TypeError("expected PolyDiffOp")
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        if self.arity != other.arity and self.terms and other.terms:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other):
        self._like(other)
        if not self.terms:
            return other.copy()
        out = self.copy()
        for k, c in other.terms.items():
            out._accum(k, c)
        return out

    def __neg__(self):
        out = PolyDiffOp(self.dim, self.arity)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        out = PolyDiffOp(self.dim, self.arity)
        for k, c in self.terms.items():
            out._accum(k, c * s)
        return out

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def mul_poly(self, p: Polynomial):
        """Multiply the coefficient of every term by ``p``."""
        out = PolyDiffOp(self.dim, self.arity)
        for (e, derivs), c in self.terms.items():
            for e2, c2 in p.terms.items():
                out._accum((_add_vec(e, e2), derivs), c * c2)
        return out

    def max_abs(self):
        return max((abs(value_of(c)) for c in self.terms.values()), default=0.0)

    def max_std(self):
        return max((std_of(c) for c in self.terms.values()), default=0.0)

    def coefficient_polys(self):
        """Group terms as ``{derivs: Polynomial}`` (exact coefficients only)."""
        out = {}
        for (e, derivs), c in self.terms.items():
            out.setdefault(derivs, {})[e] = c
        return {d: Polynomial(self.dim, t) for d, t in out.items()}

    def apply(self, *args: Polynomial) -> Polynomial:
        """Evaluate on polynomial arguments (exact coefficients only)."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        out = Polynomial(self.dim)
        cache = {}
        for (e, derivs), c in self.terms.items():
            term = Polynomial.monomial(e, c)
            for t, (a, alpha) in enumerate(zip(args, derivs)):
                key = (t, alpha)
                if key not in cache:
                    cache[key] = a.diff_multi(alpha)
                term = term * cache[key]
                if term.is_zero():
                    break
            out = out + term
        return out

    def __str__(self):
        return format_op(self)

    def __repr__(self):
        return f"PolyDiffOp(dim={self.dim}, arity={self.arity}, terms={len(self.terms)})"


def compose(phi: PolyDiffOp, slot: int, psi: PolyDiffOp) -> PolyDiffOp:
    """Insert ``psi`` into slot ``slot`` of ``phi`` (no sign)."""
    if phi.dim != psi.dim:
        raise ValueError("dimension mismatch")
    if not 0 <= slot < phi.arity:
        raise ValueError(f"slot {slot} out of range for arity {phi.arity}")
    q = psi.arity
    out = PolyDiffOp(phi.dim, phi.arity + q - 1)
    split_cache = {}
    for (e1, d1), c1 in phi.terms.items():
        alpha = d1[slot]
        if alpha not in split_cache:
            split_cache[alpha] = list(multi_leibniz(alpha, q + 1))
        splits = split_cache[alpha]
        before, after = d1[:slot], d1[slot + 1:]
        for (e2, d2), c2 in psi.terms.items():
            c12 = c1 * c2
            for mult, parts in splits:
                md = _mono_diff(e2, parts[0])
                if md is None:
                    continue
                f, e2n = md
                derivs = before + tuple(_add_vec(d2[t], parts[t + 1]) for t in range(q)) + after
                out._accum((_add_vec(e1, e2n), derivs), c12 * (mult * f))
    return out


def braces(phi: PolyDiffOp, psis) -> PolyDiffOp:
    """``phi{psi_1, ..., psi_r}`` with sign ``(-1)^(sum_k i_k (|psi_k| - 1))``.

    ``i_k`` counts the arguments standing before ``psi_k``; ``|psi|`` is the
    arity.  Returns zero when ``r`` exceeds the arity of ``phi``.
    """
    psis = list(psis)
    r = len(psis)
    arity = phi.arity + sum(p.arity for p in psis) - r
    out = PolyDiffOp(phi.dim, max(arity, 0))
    if r > phi.arity:
        return out
    if r == 0:
        return phi.copy()
    for slots in combinations(range(phi.arity), r):
        cur = phi
        shift = 0
        sign_exp = 0
        for s, psi in zip(slots, psis):
            pos = s + shift
            sign_exp += pos * (psi.arity - 1)
            cur = compose(cur, pos, psi)
            shift += psi.arity - 1
        out = out + (cur if sign_exp % 2 == 0 else -cur)
    return out


def gerstenhaber(phi: PolyDiffOp, psi: PolyDiffOp) -> PolyDiffOp:
    k, l = phi.arity - 1, psi.arity - 1
    a = braces(phi, [psi])
    b = braces(psi, [phi])
    return a - b if (k * l) % 2 == 0 else a + b


def hochschild_diff(phi: PolyDiffOp) -> PolyDiffOp:
    return gerstenhaber(PolyDiffOp.multiplication(phi.dim), phi)


def cup(phi: PolyDiffOp, psi: PolyDiffOp) -> PolyDiffOp:
    """``(phi u psi)(a, b) = phi(a) psi(b)``, the associative product.

    The brace expression ``m{phi, psi}`` equals ``(-1)^(p (q - 1))`` times
    this, with ``p, q`` the arities.
    """
    if phi.dim != psi.dim:
        raise ValueError("dimension mismatch")
    out = PolyDiffOp(phi.dim, phi.arity + psi.arity)
    for (e1, d1), c1 in phi.terms.items():
        for (e2, d2), c2 in psi.terms.items():
            out._accum((_add_vec(e1, e2), d1 + d2), c1 * c2)
    return out


# -- cyclic structure

def ibp_normalize(op: PolyDiffOp) -> PolyDiffOp:
    """Integrate by parts until slot 0 carries no derivatives."""
    if op.arity == 0:
        raise ValueError("cyclic cochains have arity >= 1")
    out = PolyDiffOp(op.dim, op.arity)
    k = op.arity - 1
    zero = (0,) * op.dim
    for (e, derivs), c in op.terms.items():
        alpha = derivs[0]
        if alpha == zero:
            out._accum((e, derivs), c)
            continue
        sign = -1 if sum(alpha) % 2 else 1
        for mult, parts in multi_leibniz(alpha, k + 1):
            md = _mono_diff(e, parts[0])
            if md is None:
                continue
            f, en = md
            nd = (zero,) + tuple(_add_vec(derivs[t + 1], parts[t + 1]) for t in range(k))
            out._accum((en, nd), c * (sign * mult * f))
    return out


def iota(phi: PolyDiffOp) -> PolyDiffOp:
    """``phi -> (a_0, ..., a_k) -> a_0 phi(a_1, ..., a_k)``."""
    zero = (0,) * phi.dim
    out = PolyDiffOp(phi.dim, phi.arity + 1)
    out.terms = {(e, (zero,) + d): c for (e, d), c in phi.terms.items()}
    return out


def iota_inverse(rep: PolyDiffOp) -> PolyDiffOp:
    zero = (0,) * rep.dim
    out = PolyDiffOp(rep.dim, rep.arity - 1)
    for (e, d), c in rep.terms.items():
        if d[0] != zero:
            raise ValueError("representative is not derivative free in slot 0")
        out._accum((e, d[1:]), c)
    return out


def to_dpoly(cc_op: PolyDiffOp) -> PolyDiffOp:
    """Cyclic-complex operator -> its polydifferential operator under iota."""
    return iota_inverse(ibp_normalize(cc_op))


def rotate_slots(op: PolyDiffOp) -> PolyDiffOp:
    """``(sigma op)(a_0, ..., a_k) = (-1)^k op(a_1, ..., a_k, a_0)``."""
    k = op.arity - 1
    out = PolyDiffOp(op.dim, op.arity)
    sign = -1 if k % 2 else 1
    for (e, d), c in op.terms.items():
        nd = (d[-1],) + d[:-1]
        out._accum((e, nd), c * sign)
    return out


def cyclic_shift_cc(op: PolyDiffOp) -> PolyDiffOp:
    """The generator sigma on the cyclic complex, result in normal form."""
    return ibp_normalize(rotate_slots(op))


def cyclic_shift(phi: PolyDiffOp) -> PolyDiffOp:
    """sigma on polydifferential operators, transported through iota."""
    return iota_inverse(ibp_normalize(rotate_slots(iota(phi))))


def cyclic_average(phi: PolyDiffOp) -> PolyDiffOp:
    n = phi.arity + 1
    acc = phi.copy()
    cur = phi
    for _ in range(n - 1):
        cur = cyclic_shift(cur)
        acc = acc + cur
    return acc.scale(Fraction(1, n))


def is_cyclically_invariant(op: PolyDiffOp, tol=0) -> bool:
    diff = cyclic_shift(op) - op
    return all(abs(value_of(c)) <= tol for c in diff.terms.values())


# -- text format: "coeff | poly | d^(a,b) | d^(c,d)"

def format_op(op: PolyDiffOp) -> str:
    lines = []
    for derivs, p in sorted(_group(op).items()):
        for e in sorted(p):
            c = p[e]
            ctxt = repr(value_of(c)) if not isinstance(c, Fraction) else str(c)
            mono = format_polynomial(Polynomial.monomial(e, 1))
            slots = " | ".join("d^(" + ",".join(map(str, a)) + ")" for a in derivs)
            lines.append(f"{ctxt} | {mono}" + (f" | {slots}" if slots else ""))
    return "\n".join(lines) if lines else f"0 # arity {op.arity}"


def _group(op):
    out = {}
    for (e, d), c in op.terms.items():
        out.setdefault(d, {})[e] = c
    return out


def parse_op(text: str, dim: int, arity: int | None = None) -> PolyDiffOp:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("0 #")]
    ops = []
    for ln in lines:
        fields = [f.strip() for f in ln.split("|")]
        if len(fields) < 2:
            raise ValueError(f"bad operator line {ln!r}")
        c = Fraction(fields[0])
        poly = parse_polynomial(fields[1], dim)
        derivs = []
        for f in fields[2:]:
            m = re.fullmatch(r"d\^\(([\d,\s]*)\)", f)
            if not m:
                raise ValueError(f"bad multi-index {f!r}")
            a = tuple(int(x) for x in m.group(1).split(",") if x.strip())
            if len(a) != dim:
                raise ValueError(f"multi-index {a} has wrong length")
            derivs.append(a)
        ops.append(PolyDiffOp.from_slots(poly, derivs, c))
    if not ops:
        return PolyDiffOp(dim, arity or 0)
    out = ops[0]
    for o in ops[1:]:
        out = out + o
    if arity is not None and out.arity != arity and out.terms:
        raise ValueError("arity mismatch")
    return out
