"""Sparse real polynomials and polynomial vector fields on R^n.

Enough algebra to take exact Lie brackets of the low-degree fields that live
on the quadric pq = 1: sums, products, partial derivatives and fast batched
evaluation. Coordinates on R^6 are ordered (q1, q2, q3, p1, p2, p3).
"""

from __future__ import annotations

import numpy as np


class Poly:
    __slots__ = ("nvars", "terms", "_compiled")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        self._compiled = None
        if terms:
            for mono, coef in terms.items():
                if coef != 0.0:
                    self.terms[tuple(mono)] = float(coef)

    @classmethod
    def const(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def var(cls, nvars, i):
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): 1.0})

    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        return Poly.const(self.nvars, float(other))

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0.0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            s = float(other)
            return Poly(self.nvars, {m: s * c for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0.0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, i: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = out.get(tuple(mm), 0.0) + c * m[i]
        return Poly(self.nvars, out)

    @property
    def degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def _compile(self):
        if self._compiled is None:
            if self.terms:
                exps = np.array(list(self.terms.keys()), dtype=int)
                coefs = np.array(list(self.terms.values()))
            else:
                exps = np.zeros((0, self.nvars), dtype=int)
                coefs = np.zeros(0)
            self._compiled = (exps, coefs)
        return self._compiled

    def __call__(self, x):
        """Evaluate at one point (shape (n,)) or a batch (shape (m, n))."""
        exps, coefs = self._compile()
        x = np.asarray(x, float)
        if exps.shape[0] == 0:
            return np.zeros(x.shape[:-1])
        mon = np.prod(x[..., None, :] ** exps, axis=-1)
        return mon @ coefs


def poly_cross(u, v):
    """Cross product of two length-3 sequences of polynomials (or numbers)."""
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def poly_dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


class VectorField:
    """A polynomial vector field with cached first derivatives."""

    def __init__(self, components):
        self.components = list(components)
        self.n = len(self.components)
        self._jac = None

    @property
    def jacobian_polys(self):
        if self._jac is None:
            self._jac = [[c.diff(j) for j in range(self.n)] for c in self.components]
        return self._jac

    def value(self, x):
        x = np.asarray(x, float)
        return np.stack([c(x) for c in self.components], axis=-1)

    def jacobian(self, x):
        """J[i, j] = d X^i / d x^j (batched over leading axes of x)."""
        x = np.asarray(x, float)
        rows = [np.stack([d(x) for d in row], axis=-1) for row in self.jacobian_polys]
        return np.stack(rows, axis=-2)

    def jet(self, x):
        """Value and Jacobian flattened into one vector."""
        return np.concatenate([self.value(x), self.jacobian(x).ravel()])

    def __add__(self, other):
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def scale(self, s):
        return VectorField([s * a for a in self.components])


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    n = X.n
    comps = []
    for i in range(n):
        acc = Poly.const(X.components[0].nvars, 0.0)
        for j in range(n):
            acc = acc + X.components[j] * Y.jacobian_polys[i][j] - Y.components[j] * X.jacobian_polys[i][j]
        comps.append(acc)
    return VectorField(comps)


def bracket_at(X: VectorField, Y: VectorField, x):
    """Value of [X, Y] at x using first derivatives only."""
    return Y.jacobian(x) @ X.value(x) - X.jacobian(x) @ Y.value(x)
