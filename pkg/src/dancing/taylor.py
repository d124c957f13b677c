"""Truncated Taylor series with array-valued coefficients.

A :class:`Series` stores normalized coefficients ``c[k] = f^(k)(t0) / k!`` in an
array of shape ``(order + 1, *shape)``. Arithmetic follows the Cauchy product,
so exact derivative jets of composite expressions come out without finite
differences. Orders are truncated to the smaller operand.
"""

from __future__ import annotations

from math import factorial

import numpy as np


def _coerce(x, order, dtype=float):
    if isinstance(x, Series):
        return x
    return Series.constant(np.asarray(x, dtype=dtype), order)


class Series:
    __slots__ = ("c",)
    __array_priority__ = 1000

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)
        if self.c.ndim == 0:
            self.c = self.c.reshape(1)

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value)
        c = np.zeros((order + 1,) + value.shape, dtype=np.result_type(value, float))
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, t0, order):
        c = np.zeros(order + 1)
        c[0] = t0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs):
        d = np.asarray(derivs, dtype=float)
        scale = np.array([1.0 / factorial(k) for k in range(d.shape[0])])
        return cls(d * scale.reshape((-1,) + (1,) * (d.ndim - 1)))

    @classmethod
    def stack(cls, items, axis=-1):
        """Stack scalar-or-array series into one along a new trailing axis."""
        order = min(s.order for s in items)
        cs = [s.c[: order + 1] for s in items]
        ax = axis if axis < 0 else axis + 1
        return cls(np.stack(cs, axis=ax))

    # inspection ---------------------------------------------------------
    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def value(self):
        return self.c[0]

    def derivatives(self, n=None):
        n = self.order if n is None else min(n, self.order)
        scale = np.array([float(factorial(k)) for k in range(n + 1)])
        return self.c[: n + 1] * scale.reshape((-1,) + (1,) * len(self.shape))

    def derivative_value(self, k):
        return self.c[k] * factorial(k)

    def truncate(self, order):
        return Series(self.c[: order + 1])

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Series(self.c[(slice(None),) + idx])

    @property
    def T(self):
        axes = (0,) + tuple(range(self.c.ndim - 1, 0, -1))
        return Series(np.transpose(self.c, axes))

    def __repr__(self):
        return f"Series(order={self.order}, shape={self.shape})"

    # arithmetic ---------------------------------------------------------
    def _pair(self, other):
        other = _coerce(other, self.order)
        n = min(self.order, other.order)
        return self.c[: n + 1], other.c[: n + 1], n

    def __add__(self, other):
        a, b, _ = self._pair(other)
        return Series(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, _ = self._pair(other)
        return Series(a - b)

    def __rsub__(self, other):
        a, b, _ = self._pair(other)
        return Series(b - a)

    def __neg__(self):
        return Series(-self.c)

    def __mul__(self, other):
        if not isinstance(other, Series):
            other = np.asarray(other)
            return Series(self.c * other)
        return cauchy(self, other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series(self.c / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __matmul__(self, other):
        other = _coerce(other, self.order)
        return cauchy(self, other, np.matmul)

    def __rmatmul__(self, other):
        other = _coerce(other, self.order)
        return cauchy(other, self, np.matmul)

    def __pow__(self, alpha):
        return self.power(alpha)

    def deriv(self):
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * len(self.shape))
        if self.order == 0:
            return Series(np.zeros_like(self.c))
        return Series(self.c[1:] * k)

    def reciprocal(self):
        """Elementwise 1/f."""
        a = self.c
        b = np.zeros_like(a, dtype=np.result_type(a, float))
        b[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(b[0])
            for j in range(1, k + 1):
                acc = acc + a[j] * b[k - j]
            b[k] = -acc * b[0]
        return Series(b)

    def power(self, alpha, base=None):
        """Elementwise f**alpha for nonzero leading value.

        ``base`` may supply the leading coefficient (e.g. a real cube root of
        a negative number); otherwise ``c0**alpha`` is used.
        """
        a = self.c
        b = np.zeros_like(a, dtype=np.result_type(a, float))
        b[0] = np.power(a[0], alpha) if base is None else base
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(b[0])
            for j in range(1, k + 1):
                acc = acc + ((alpha + 1) * j - k) * a[j] * b[k - j]
            b[k] = acc / (k * a[0])
        return Series(b)

    def cbrt(self):
        """Sign-preserving real cube root."""
        return self.power(1.0 / 3.0, base=np.cbrt(self.c[0]))

    def sqrt(self):
        return self.power(0.5)

    def sum(self, axis=-1):
        ax = axis if axis < 0 else axis + 1
        return Series(self.c.sum(axis=ax))


def cauchy(a: Series, b: Series, op) -> Series:
    n = min(a.order, b.order)
    first = op(a.c[0], b.c[0])
    out = np.zeros((n + 1,) + np.shape(first), dtype=np.result_type(first, float))
    for k in range(n + 1):
        acc = op(a.c[0], b.c[k])
        for i in range(1, k + 1):
            acc = acc + op(a.c[i], b.c[k - i])
        out[k] = acc
    return Series(out)


def _as_series(x, order):
    return x if isinstance(x, Series) else Series.constant(np.asarray(x, dtype=float), order)


def _common_order(*xs):
    orders = [x.order for x in xs if isinstance(x, Series)]
    return min(orders) if orders else 0


def dot(a, b):
    """Contract the last axis (vector . vector, covector . vector)."""
    if not isinstance(a, Series) and not isinstance(b, Series):
        return np.dot(a, b)
    n = _common_order(a, b)
    return cauchy(_as_series(a, n), _as_series(b, n), lambda x, y: np.sum(x * y, axis=-1))


def cross(a, b):
    if not isinstance(a, Series) and not isinstance(b, Series):
        return np.cross(a, b)
    n = _common_order(a, b)
    return cauchy(_as_series(a, n), _as_series(b, n), np.cross)


def det3(a, b, c):
    return dot(a, cross(b, c))


def matinv(m: Series) -> Series:
    """Inverse of a square-matrix-valued series."""
    a = m.c
    b = np.zeros_like(a, dtype=np.result_type(a, float))
    b[0] = np.linalg.inv(a[0])
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(b[0])
        for j in range(1, k + 1):
            acc = acc + a[j] @ b[k - j]
        b[k] = -b[0] @ acc
    return Series(b)


def reparametrize(x: Series, speed: Series) -> Series:
    """Re-expand ``x(t)`` in a new parameter ``s`` with ``ds/dt = speed``.

    Returns the Taylor series of ``x`` in ``s`` about the same point, obtained
    by repeated application of ``(1/speed) d/dt``. The result has order
    ``min(x.order, speed.order + 1)``.
    """
    n = min(x.order, speed.order + 1)
    inv_speed = speed.reciprocal()
    coeffs = [x.c[0]]
    cur = x
    for k in range(1, n + 1):
        cur = cur.deriv() * inv_speed.truncate(cur.order - 1)
        coeffs.append(cur.c[0] / factorial(k))
    return Series(np.stack(coeffs))
