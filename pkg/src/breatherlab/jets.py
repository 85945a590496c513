"""Bivariate truncated Taylor (jet) arithmetic.

Every profile in this package is a smooth function of two phase variables.
A :class:`Jet2` holds the Taylor coefficients

    c[i, j] = d^i/dy1^i  d^j/dy2^j  f / (i! j!),    i + j <= deg,

of such a function at a point, truncated at total degree ``deg``.  Sums,
products, quotients and compositions with elementary functions propagate the
coefficients exactly, so any derivative read off a composed jet is correct to
roundoff.

Coefficients live in a ``(deg+1, deg+1) + shape`` float array whose entries
with ``i + j > deg`` are kept at zero.  ``shape`` is an arbitrary trailing
broadcast shape, which lets one jet carry an entire evaluation grid; all
arithmetic is vectorised over it.

Coefficients are stored divided by factorials (true Taylor coefficients), so
composition reduces to polynomial evaluation and degree-6 entries stay well
scaled.  The degree is fixed at construction and never changes silently.
"""

from __future__ import annotations

import math

import numpy as np

DEFAULT_DEG = 6

_FACT = [math.factorial(n) for n in range(32)]


class JetSingularity(ArithmeticError):
    """An operation hit a singular point (zero constant term, sqrt at <= 0)."""


def _as_coeff_array(c):
    a = np.asarray(c, dtype=float)
    if a.ndim < 2 or a.shape[0] != a.shape[1]:
        raise ValueError("coefficient array must have shape (deg+1, deg+1, ...)")
    return a


class Jet2:
    """Truncated bivariate Taylor expansion; immutable by convention."""

    __slots__ = ("c", "deg")

    def __init__(self, c, deg=None):
        self.c = _as_coeff_array(c)
        self.deg = self.c.shape[0] - 1 if deg is None else deg
        if self.c.shape[0] - 1 != self.deg:
            raise ValueError("degree does not match coefficient array")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value, deg=DEFAULT_DEG, shape=None):
        value = np.asarray(value, dtype=float)
        shp = value.shape if shape is None else shape
        c = np.zeros((deg + 1, deg + 1) + shp)
        c[0, 0] = value
        return cls(c, deg)

    @classmethod
    def variable(cls, value, axis, deg=DEFAULT_DEG):
        """Seed jet for phase variable 0 or 1: value + h_axis."""
        if axis not in (0, 1):
            raise ValueError("axis must be 0 or 1")
        j = cls.constant(value, deg)
        if deg >= 1:
            if axis == 0:
                j.c[1, 0] = 1.0
            else:
                j.c[0, 1] = 1.0
        return j

    # -- accessors ---------------------------------------------------------

    @property
    def value(self):
        return self.c[0, 0]

    @property
    def shape(self):
        return self.c.shape[2:]

    def partial(self, i, j):
        """Derivative d^i_{y1} d^j_{y2} f  (coefficient times i! j!)."""
        if i + j > self.deg:
            raise ValueError(
                f"insufficient jet degree: requested order {i + j}, have {self.deg}"
            )
        return self.c[i, j] * (_FACT[i] * _FACT[j])

    def nilpotent(self):
        """Copy with the constant term removed."""
        c = self.c.copy()
        c[0, 0] = 0.0
        return Jet2(c, self.deg)

    def __repr__(self):
        return f"Jet2(deg={self.deg}, value={self.value!r}, shape={self.shape})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet2):
            if other.deg != self.deg:
                raise ValueError("jet degrees must match")
            return other
        return Jet2.constant(other, self.deg)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = _align_trailing(self.c, other.c)
        return Jet2(a + b, self.deg)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.c, self.deg)

    def __sub__(self, other):
        other = self._coerce(other)
        a, b = _align_trailing(self.c, other.c)
        return Jet2(a - b, self.deg)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.c * np.asarray(other, dtype=float), self.deg)
        if other.deg != self.deg:
            raise ValueError("jet degrees must match")
        return Jet2(_mul_coeffs(self.c, other.c, self.deg), self.deg)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.c / np.asarray(other, dtype=float), self.deg)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, n):
        return powi(self, n)


def _align_trailing(a, b):
    """Insert singleton grid axes so two coefficient arrays broadcast."""
    na, nb = a.ndim - 2, b.ndim - 2
    if na < nb:
        a = a.reshape(a.shape[:2] + (1,) * (nb - na) + a.shape[2:])
    elif nb < na:
        b = b.reshape(b.shape[:2] + (1,) * (na - nb) + b.shape[2:])
    return a, b


def _mul_coeffs(a, b, deg):
    shp = np.broadcast_shapes(a.shape[2:], b.shape[2:])
    out = np.zeros((deg + 1, deg + 1) + shp)
    for s in range(deg + 1):
        for i in range(s + 1):
            j = s - i
            acc = a[0, 0] * b[i, j]
            for p in range(i + 1):
                for q in range(j + 1):
                    if p == 0 and q == 0:
                        continue
                    acc = acc + a[p, q] * b[i - p, j - q]
            out[i, j] = acc
    return out


def reciprocal(a: Jet2) -> Jet2:
    """1/a via a Horner geometric series around the constant term."""
    a0 = np.asarray(a.value)
    if np.any(a0 == 0.0):
        raise JetSingularity("division by jet with zero constant term")
    u = a.nilpotent() * (1.0 / a0)
    r = Jet2.constant(np.ones(np.shape(a0)), a.deg)
    for _ in range(a.deg):
        r = 1.0 - u * r
    return r * (1.0 / a0)


def powi(a: Jet2, n: int) -> Jet2:
    """Integer power by binary exponentiation."""
    if not isinstance(n, (int, np.integer)):
        raise TypeError("powi exponent must be an integer")
    if n < 0:
        return powi(reciprocal(a), -n)
    result = Jet2.constant(np.ones(a.shape), a.deg)
    base = a
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def compose_univariate(table, a: Jet2) -> Jet2:
    """Evaluate sum_k table[k] * (a - a0)^k by Horner.

    ``table[k]`` must be the k-th Taylor coefficient (derivative over k!) of
    the outer function at the constant term of ``a``; trailing dimensions of
    the table broadcast against the jet's grid shape.
    """
    n = a.nilpotent()
    deg = a.deg
    r = Jet2.constant(np.asarray(table[deg], dtype=float), deg)
    for k in range(deg - 1, -1, -1):
        r = r * n + np.asarray(table[k], dtype=float)
    return r


# -- univariate Taylor tables at an array-valued expansion point ------------


def _cycle_table(f0, f1, deg, signs):
    """Tables for sin/cos-like functions whose derivatives cycle."""
    out = np.empty((deg + 1,) + np.shape(f0))
    cycle = signs
    for k in range(deg + 1):
        base = f0 if k % 2 == 0 else f1
        out[k] = cycle[k % len(cycle)] * base / _FACT[k]
    return out


def sin(a: Jet2) -> Jet2:
    x0 = a.value
    t = _cycle_table(np.sin(x0), np.cos(x0), a.deg, (1.0, 1.0, -1.0, -1.0))
    return compose_univariate(t, a)


def cos(a: Jet2) -> Jet2:
    x0 = a.value
    t = _cycle_table(np.cos(x0), -np.sin(x0), a.deg, (1.0, 1.0, -1.0, -1.0))
    return compose_univariate(t, a)


def sinh(a: Jet2) -> Jet2:
    x0 = a.value
    t = _cycle_table(np.sinh(x0), np.cosh(x0), a.deg, (1.0,))
    return compose_univariate(t, a)


def cosh(a: Jet2) -> Jet2:
    x0 = a.value
    t = _cycle_table(np.cosh(x0), np.sinh(x0), a.deg, (1.0,))
    return compose_univariate(t, a)


def exp(a: Jet2) -> Jet2:
    x0 = a.value
    e = np.exp(x0)
    t = np.empty((a.deg + 1,) + np.shape(x0))
    for k in range(a.deg + 1):
        t[k] = e / _FACT[k]
    return compose_univariate(t, a)


def tanh(a: Jet2) -> Jet2:
    # t' = 1 - t^2 drives the coefficient recurrence.
    x0 = np.asarray(a.value)
    deg = a.deg
    t = np.zeros((deg + 1,) + x0.shape)
    t[0] = np.tanh(x0)
    for k in range(deg):
        conv = sum(t[j] * t[k - j] for j in range(k + 1))
        src = 1.0 - conv if k == 0 else -conv
        t[k + 1] = src / (k + 1)
    return compose_univariate(t, a)


def atan(a: Jet2) -> Jet2:
    # Integrate the series of 1/(1 + (x0+h)^2) term by term.
    x0 = np.asarray(a.value)
    deg = a.deg
    d0 = 1.0 + x0 * x0
    u = np.zeros((deg,) + x0.shape)
    if deg > 0:
        u[0] = 1.0 / d0
    for k in range(1, deg):
        s = 2.0 * x0 * u[k - 1]
        if k >= 2:
            s = s + u[k - 2]
        u[k] = -s / d0
    t = np.zeros((deg + 1,) + x0.shape)
    t[0] = np.arctan(x0)
    for k in range(deg):
        t[k + 1] = u[k] / (k + 1)
    return compose_univariate(t, a)


def sqrt(a: Jet2) -> Jet2:
    x0 = np.asarray(a.value)
    if np.any(x0 <= 0.0):
        raise JetSingularity("sqrt requires positive constant term")
    deg = a.deg
    t = np.zeros((deg + 1,) + x0.shape)
    t[0] = np.sqrt(x0)
    for k in range(1, deg + 1):
        s = np.zeros(x0.shape)
        for j in range(1, k):
            s = s + t[j] * t[k - j]
        rhs = (1.0 if k == 1 else 0.0) - s
        t[k] = rhs / (2.0 * t[0])
    return compose_univariate(t, a)


_COMPOSE = {
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "atan": atan,
    "exp": exp,
    "sqrt": sqrt,
}


def compose(outer: str, a: Jet2, n: int | None = None) -> Jet2:
    """Apply a named elementary function to a jet (``powi`` takes ``n``)."""
    if outer == "powi":
        if n is None:
            raise ValueError("powi requires the exponent n")
        return powi(a, n)
    try:
        f = _COMPOSE[outer]
    except KeyError:
        raise ValueError(f"unknown outer function {outer!r}") from None
    return f(a)


def arith(a: Jet2, b: Jet2, op: str) -> Jet2:
    """Pointwise combination of two jets of matching degree."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
