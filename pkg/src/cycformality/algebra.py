"""Exact polynomials over the rationals and truncated formal series.

Coordinates are numbered from 0 internally; the text syntax names them
``x1 .. xd``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from math import comb


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("Polynomial coefficients must be exact (int or Fraction)")
    return Fraction(c)


class Polynomial:
    """Immutable polynomial in ``dim`` variables with rational coefficients.

    ``terms`` maps exponent tuples (length ``dim``) to non-zero Fractions.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms=None):
        if dim < 0:
            raise ValueError("dim must be non-negative")
        self.dim = dim
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for dim {dim}")
            c = _frac(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms = clean
        self._hash = None

    # -- constructors
    @classmethod
    def const(cls, dim, c=1):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def var(cls, dim, i):
        exp = [0] * dim
        exp[i] = 1
        return cls(dim, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp, c=1):
        return cls(len(exp), {tuple(exp): c})

    # -- basic protocol
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.dim, Fraction(0))

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.dim, other)
        if not isinstance(other, Polynomial):
            raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.dim, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        out = Polynomial.const(self.dim)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c):
        c = _frac(c)
        if not c:
            return Polynomial(self.dim)
        return Polynomial._raw(self.dim, {e: c * v for e, v in self.terms.items()})

    @classmethod
    def _raw(cls, dim, terms):
        p = cls.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    # -- calculus
    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to coordinate ``i`` (0-based)."""
        if not 0 <= i < self.dim:
            raise ValueError(f"coordinate {i} out of range for dim {self.dim}")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return Polynomial._raw(self.dim, out)

    def diff_multi(self, alpha) -> "Polynomial":
        """Apply the multi-derivative ``alpha`` (exponent tuple)."""
        out = {}
        for e, c in self.terms.items():
            if any(a > b for a, b in zip(alpha, e)):
                continue
            f = c
            for a, b in zip(alpha, e):
                for t in range(a):
                    f *= b - t
            out[tuple(b - a for a, b in zip(alpha, e))] = f
        return Polynomial._raw(self.dim, out)

    def __call__(self, *point):
        total = Fraction(0) if all(isinstance(x, (int, Fraction)) for x in point) else 0.0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                t = t * x ** k
            total += t
        return total

    # -- text
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.dim}, {format_polynomial(self)!r})"


def multi_leibniz(alpha, parts):
    """Distribute the multi-derivative ``alpha`` over ``parts`` factors.

    Yields ``(coefficient, (alpha_1, ..., alpha_parts))`` with multinomial
    coefficients, coordinate by coordinate.
    """
    per_coord = []
    for a in alpha:
        splits = []
        for comp in _compositions(a, parts):
            c = 1
            rest = a
            for x in comp:
                c *= comb(rest, x)
                rest -= x
            splits.append((c, comp))
        per_coord.append(splits)
    for choice in product(*per_coord):
        c = 1
        for cc, _ in choice:
            c *= cc
        yield c, tuple(tuple(comp[p] for _, comp in choice) for p in range(parts))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_polynomial(text: str, dim: int) -> Polynomial:
    """Parse ``3/2 x1^2 x3 - x2 + 5`` style text."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    out = Polynomial(dim)
    pos = 0
    for m in _TERM_RE.finditer(text):
        if m.start() != pos:
            raise ValueError(f"cannot parse polynomial {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(sign)
        exp = [0] * dim
        for tok in m.group(2).replace("*", " ").split():
            vm = re.fullmatch(r"x(\d+)(?:\^(\d+))?", tok)
            if vm:
                i = int(vm.group(1)) - 1
                if not 0 <= i < dim:
                    raise ValueError(f"variable {tok} out of range for dim {dim}")
                exp[i] += int(vm.group(2) or 1)
            else:
                coeff *= Fraction(tok)
        out = out + Polynomial.monomial(exp, coeff)
    if pos != len(text):
        raise ValueError(f"cannot parse polynomial {text!r}")
    return out


def _monomial_text(exp):
    parts = []
    for i, e in enumerate(exp):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return " ".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for exp in sorted(p.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
        c = p.terms[exp]
        mono = _monomial_text(exp)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a} {mono}"
        else:
            body = str(a)
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


class HbarSeries:
    """Truncated power series ``sum_j coeffs[j] hbar^j`` up to ``order``."""

    def __init__(self, coeffs, order=None, zero=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        if zero is None:
            if not coeffs:
                raise ValueError("need a zero element for an empty series")
            zero = coeffs[0] * 0 if not isinstance(coeffs[0], Polynomial) else Polynomial(coeffs[0].dim)
        self.zero = zero
        self.order = order
        coeffs = coeffs[: order + 1]
        self.coeffs = coeffs + [zero] * (order + 1 - len(coeffs))

    def __getitem__(self, j):
        return self.coeffs[j] if j <= self.order else self.zero

    def _same(self, other):
        if not isinstance(other, HbarSeries):
            raise TypeError("expected HbarSeries")
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        self._same(other)
        return HbarSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order, self.zero)

    def __sub__(self, other):
        self._same(other)
        return HbarSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order, self.zero)

    def __neg__(self):
        return HbarSeries([-a for a in self.coeffs], self.order, self.zero)

    def __mul__(self, other):
        if not isinstance(other, HbarSeries):
            return HbarSeries([a * other for a in self.coeffs], self.order, self.zero)
        self._same(other)
        out = []
        for k in range(self.order + 1):
            acc = self.zero
            for i in range(k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return HbarSeries(out, self.order, self.zero)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self):
        return f"HbarSeries({self.coeffs!r}, order={self.order})"


class UPoly:
    """Polynomial in the degree-2 variable ``u`` with coefficients of any additive type."""

    def __init__(self, coeffs, is_zero=None):
        self._is_zero = is_zero or (lambda c: not c)
        coeffs = list(coeffs)
        while coeffs and self._is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = coeffs

    def __getitem__(self, j):
        return self.coeffs[j] if j < len(self.coeffs) else None

    def __len__(self):
        return len(self.coeffs)

    def terms(self):
        """Iterate ``(j, coefficient)`` over non-zero u-powers."""
        for j, c in enumerate(self.coeffs):
            if not self._is_zero(c):
                yield j, c

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for j in range(n):
            a, b = self[j], other[j]
            out.append(b if a is None else a if b is None else a + b)
        return UPoly(out, self._is_zero)

    def shift(self, k=1):
        """Multiply by ``u**k``."""
        if not self.coeffs:
            return self
        zero = self.coeffs[0] * 0
        return UPoly([zero] * k + self.coeffs, self._is_zero)

    def __repr__(self):
        return f"UPoly({self.coeffs!r})"
