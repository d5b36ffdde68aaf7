"""Polyvector fields on R^d with polynomial coefficients.

A k-vector is stored by its components on strictly increasing index tuples,
``{(i1, ..., ik): Polynomial}`` with ``i1 < ... < ik`` (0-based).  All sign
bookkeeping for other index orders goes through :func:`sort_sign`.

The contraction ``insert(i, a)`` plugs ``d/dx_i`` into the first tensor
slot; ``bullet``, ``schouten`` and ``divergence`` inherit that convention.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import Polynomial, parse_polynomial, format_polynomial


def sort_sign(idx):
    """Return ``(sign, sorted_tuple)``; sign is 0 when an index repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort parity
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class PolyVector:
    __slots__ = ("dim", "degree", "comps")

    def __init__(self, dim: int, degree: int, comps=None):
        self.dim = dim
        self.degree = degree
        clean = {}
        for key, p in (comps or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"key {key} does not have length {degree}")
            if isinstance(p, (int, Fraction)):
                p = Polynomial.const(dim, p)
            if p.dim != dim:
                raise ValueError("dimension mismatch")
            s, skey = sort_sign(key)
            if s == 0 or any(not 0 <= i < dim for i in skey):
                if s == 0:
                    continue
                raise ValueError(f"index out of range in {key}")
            q = clean.get(skey, Polynomial(dim)) + (p if s > 0 else -p)
            if q:
                clean[skey] = q
            else:
                clean.pop(skey, None)
        self.comps = clean

    # -- constructors
    @classmethod
    def function(cls, f: Polynomial):
        return cls(f.dim, 0, {(): f} if f else {})

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree)

    @classmethod
    def coord(cls, dim, *idx, coeff=None):
        """``coeff * d_{idx[0]} ^ d_{idx[1]} ^ ...``."""
        c = coeff if coeff is not None else Polynomial.const(dim)
        return cls(dim, len(idx), {tuple(idx): c})

    # -- access
    def component(self, idx) -> Polynomial:
        """Full antisymmetric tensor entry for an arbitrary index tuple."""
        s, key = sort_sign(idx)
        if s == 0:
            return Polynomial(self.dim)
        p = self.comps.get(key)
        if p is None:
            return Polynomial(self.dim)
        return p if s > 0 else -p

    def as_function(self) -> Polynomial:
        if self.degree != 0:
            raise ValueError("not a function")
        return self.comps.get((), Polynomial(self.dim))

    def is_zero(self):
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def __eq__(self, other):
        if not isinstance(other, PolyVector):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.dim == other.dim
        return (self.dim, self.degree, self.comps) == (other.dim, other.degree, other.comps)

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.comps.items())))

    # -- linear structure
    def _like(self, other):
        if not isinstance(other, PolyVector):
            raise TypeError("expected PolyVector")
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._like(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        out = dict(self.comps)
        for k, p in other.comps.items():
            out[k] = out.get(k, Polynomial(self.dim)) + p
        return PolyVector(self.dim, self.degree, out)

    def __neg__(self):
        return PolyVector(self.dim, self.degree, {k: -p for k, p in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        """Multiply every component by a scalar or a Polynomial."""
        if isinstance(c, (int, Fraction)):
            return PolyVector(self.dim, self.degree, {k: p.scale(c) for k, p in self.comps.items()})
        if isinstance(c, Polynomial):
            return PolyVector(self.dim, self.degree, {k: p * c for k, p in self.comps.items()})
        return NotImplemented

    __rmul__ = __mul__

    def diff(self, i):
        """Coefficient-wise partial derivative (Lie derivative along d_i)."""
        return PolyVector(self.dim, self.degree, {k: p.diff(i) for k, p in self.comps.items()})

    def __str__(self):
        return format_polyvector(self)

    def __repr__(self):
        return f"PolyVector({self.dim}, {self.degree}, {format_polyvector(self)!r})"


def wedge(a: PolyVector, b: PolyVector) -> PolyVector:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    out = {}
    for ka, pa in a.comps.items():
        for kb, pb in b.comps.items():
            s, key = sort_sign(ka + kb)
            if s == 0:
                continue
            term = pa * pb
            out[key] = out.get(key, Polynomial(a.dim)) + (term if s > 0 else -term)
    return PolyVector(a.dim, a.degree + b.degree, out)


def insert(i: int, a: PolyVector) -> PolyVector:
    """Contract ``d/dx_i`` into the first slot."""
    if a.degree < 1:
        raise ValueError("cannot contract a function")
    out = {}
    for key, p in a.comps.items():
        if i in key:
            pos = key.index(i)
            rest = key[:pos] + key[pos + 1:]
            out[rest] = -p if pos % 2 else p
    return PolyVector(a.dim, a.degree - 1, out)


def bullet(a: PolyVector, b: PolyVector) -> PolyVector:
    """``sum_i insert(i, a) ^ d_i b``."""
    if a.degree < 1:
        raise ValueError("bullet needs degree(a) >= 1")
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    out = PolyVector.zero(a.dim, a.degree + b.degree - 1)
    for i in range(a.dim):
        out = out + wedge(insert(i, a), b.diff(i))
    return out


def schouten(a: PolyVector, b: PolyVector) -> PolyVector:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    ka, kb = a.degree, b.degree
    deg = max(ka + kb - 1, 0)
    out = PolyVector.zero(a.dim, deg)
    if ka >= 1:
        out = out + bullet(a, b)
    if kb >= 1:
        t = bullet(b, a)
        out = out + (t if (ka * kb) % 2 == 0 else -t)
    return out if (ka - 1) % 2 == 0 else -out


def divergence(a: PolyVector) -> PolyVector:
    """Divergence for the standard constant volume form, ``sum_i d_i(insert(i, a))``."""
    if a.degree == 0:
        return PolyVector.zero(a.dim, 0)
    out = PolyVector.zero(a.dim, a.degree - 1)
    for i in range(a.dim):
        out = out + insert(i, a).diff(i)
    return out


def divergence_derivation_check(a: PolyVector, b: PolyVector) -> bool:
    lhs = divergence(schouten(a, b))
    rhs = schouten(divergence(a), b)
    t = schouten(a, divergence(b))
    rhs = rhs + (t if (a.degree - 1) % 2 == 0 else -t)
    return (lhs - rhs).is_zero()


def apply_vector_field(v: PolyVector, f: Polynomial) -> Polynomial:
    if v.degree != 1:
        raise ValueError("expected a vector field")
    out = Polynomial(f.dim)
    for (i,), p in v.comps.items():
        out = out + p * f.diff(i)
    return out


# -- text syntax: "x2 d1^d2 + (x1 + 1) d3"

def _split_top(text):
    parts, depth, cur, sign = [], 0, "", 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-":
            if cur.strip():
                parts.append((sign, cur.strip()))
            elif ch == "-":
                sign = -sign
                continue
            sign = -1 if ch == "-" else 1
            cur = ""
            continue
        cur += ch
    if cur.strip():
        parts.append((sign, cur.strip()))
    return parts


def parse_polyvector(text: str, dim: int) -> PolyVector:
    terms = []
    for sign, body in _split_top(text):
        poly = Polynomial.const(dim, sign)
        idx = None
        for tok in re.findall(r"\([^()]*\)|\S+", body):
            if tok.startswith("("):
                poly = poly * parse_polynomial(tok[1:-1], dim)
            elif tok.startswith("d"):
                if idx is not None:
                    raise ValueError(f"two wedge factors in term {body!r}")
                idx = []
                for d in tok.split("^"):
                    m = re.fullmatch(r"d(\d+)", d)
                    if not m:
                        raise ValueError(f"bad wedge factor {d!r}")
                    i = int(m.group(1)) - 1
                    if not 0 <= i < dim:
                        raise ValueError(f"{d} out of range for dim {dim}")
                    idx.append(i)
            else:
                poly = poly * parse_polynomial(tok, dim)
        terms.append(PolyVector(dim, len(idx or ()), {tuple(idx or ()): poly}))
    if not terms:
        raise ValueError("empty polyvector")
    degs = {t.degree for t in terms}
    if len(degs) != 1:
        raise ValueError("polyvector text must be homogeneous in degree")
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def format_polyvector(a: PolyVector) -> str:
    if a.is_zero():
        return "0"
    pieces = []
    for key in sorted(a.comps):
        p = a.comps[key]
        wedge_txt = "^".join(f"d{i + 1}" for i in key)
        ptxt = format_polynomial(p)
        if not wedge_txt:
            pieces.append(f"({ptxt})")
        elif ptxt == "1":
            pieces.append(wedge_txt)
        else:
            pieces.append(f"({ptxt}) {wedge_txt}")
    return " + ".join(pieces)
