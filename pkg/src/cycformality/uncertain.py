"""First-order error propagation for quantities built from graph weights.

Each weight is an independent estimate with standard error ``sigma``.  An
:class:`Uncertain` carries its value together with the sparse gradient with
respect to the weights it depends on, so sums and products of weights keep
exact track of which estimates enter (no double counting of correlated
terms).
"""

from __future__ import annotations

import math
from fractions import Fraction

_NUM = (int, float, Fraction)


class Uncertain:
    __slots__ = ("value", "grad", "sigmas")

    def __init__(self, value, grad=None, sigmas=None):
        self.value = float(value)
        self.grad = grad or {}
        self.sigmas = sigmas or {}

    @classmethod
    def leaf(cls, key, value, sigma):
        """An independent estimate identified by ``key``."""
        if sigma == 0:
            return cls(value)
        return cls(value, {key: 1.0}, {key: float(sigma)})

    def std(self) -> float:
        return math.sqrt(sum((g * self.sigmas[k]) ** 2 for k, g in self.grad.items()))

    def is_zero(self):
        return self.value == 0 and not any(self.grad.values())

    def __float__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)

    def __neg__(self):
        return Uncertain(-self.value, {k: -g for k, g in self.grad.items()}, self.sigmas)

    def __add__(self, other):
        if isinstance(other, _NUM):
            return Uncertain(self.value + float(other), self.grad, self.sigmas)
        if not isinstance(other, Uncertain):
            return NotImplemented
        grad = dict(self.grad)
        for k, g in other.grad.items():
            grad[k] = grad.get(k, 0.0) + g
        return Uncertain(self.value + other.value, grad, {**self.sigmas, **other.sigmas})

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _NUM):
            f = float(other)
            if f == 0:
                return Uncertain(0.0)
            return Uncertain(self.value * f, {k: g * f for k, g in self.grad.items()}, self.sigmas)
        if not isinstance(other, Uncertain):
            return NotImplemented
        grad = {k: g * other.value for k, g in self.grad.items()}
        for k, g in other.grad.items():
            grad[k] = grad.get(k, 0.0) + g * self.value
        return Uncertain(self.value * other.value, grad, {**self.sigmas, **other.sigmas})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _NUM):
            return self * (1.0 / float(other))
        return NotImplemented

    def __repr__(self):
        return f"Uncertain({self.value:.6g} +- {self.std():.2g})"


def value_of(c) -> float:
    return c.value if isinstance(c, Uncertain) else float(c)


def std_of(c) -> float:
    return c.std() if isinstance(c, Uncertain) else 0.0


def is_zero(c) -> bool:
    if isinstance(c, Uncertain):
        return c.is_zero()
    return c == 0
