"""Second-order truncated Taylor arithmetic.

A :class:`Jet` carries ``(f, f', f'')`` of a scalar function of one variable
and propagates all three through arithmetic and ``exp``/``log``. Building a
closed-form curve out of jets gives exact first and second derivatives with no
step-size parameter. Components may be floats or numpy arrays of equal shape.
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("v", "d", "dd")

    def __init__(self, v, d=0.0, dd=0.0):
        self.v = v
        self.d = d
        self.dd = dd

    @classmethod
    def variable(cls, x):
        """The independent variable itself: (x, 1, 0)."""
        if isinstance(x, np.ndarray):
            return cls(x, np.ones_like(x), np.zeros_like(x))
        return cls(x, 1.0, 0.0)

    @staticmethod
    def lift(x) -> "Jet":
        return x if isinstance(x, Jet) else Jet(x, 0.0, 0.0)

    def __iter__(self):
        yield self.v
        yield self.d
        yield self.dd

    def __repr__(self):
        return f"Jet({self.v!r}, {self.d!r}, {self.dd!r})"

    def __neg__(self):
        return Jet(-self.v, -self.d, -self.dd)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.v + other.v, self.d + other.d, self.dd + other.dd)
        return Jet(self.v + other, self.d, self.dd)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.v - other.v, self.d - other.d, self.dd - other.dd)
        return Jet(self.v - other, self.d, self.dd)

    def __rsub__(self, other):
        return Jet(other - self.v, -self.d, -self.dd)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(
                self.v * other.v,
                self.d * other.v + self.v * other.d,
                self.dd * other.v + 2.0 * self.d * other.d + self.v * other.dd,
            )
        return Jet(self.v * other, self.d * other, self.dd * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.v / other, self.d / other, self.dd / other)
        q = self.v / other.v
        dq = (self.d - q * other.d) / other.v
        ddq = (self.dd - 2.0 * dq * other.d - q * other.dd) / other.v
        return Jet(q, dq, ddq)

    def __rtruediv__(self, other):
        return Jet.lift(other) / self

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("Jet powers are restricted to integer exponents")
        if n == 0:
            return Jet(self.v * 0.0 + 1.0, self.d * 0.0, self.dd * 0.0)
        if n < 0:
            return 1.0 / self ** (-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def exp(self) -> "Jet":
        e = np.exp(self.v)
        return Jet(e, e * self.d, e * (self.dd + self.d * self.d))

    def expm1(self) -> "Jet":
        e = np.exp(self.v)
        return Jet(np.expm1(self.v), e * self.d, e * (self.dd + self.d * self.d))

    def log(self) -> "Jet":
        return Jet(
            np.log(self.v),
            self.d / self.v,
            (self.dd * self.v - self.d * self.d) / (self.v * self.v),
        )


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def expm1(x):
    return x.expm1() if isinstance(x, Jet) else np.expm1(x)


def log(x):
    return x.log() if isinstance(x, Jet) else np.log(x)
