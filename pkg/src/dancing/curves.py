"""Parametrized curves t -> A(t) in R^3 minus the origin, with derivative jets.

Every curve answers ``series(t, order)`` with the Taylor expansion of a
homogeneous lift about ``t``. Closed-form families return exact jets of any
order; sampled curves fit a local degree-6 polynomial through the seven
nearest grid nodes (accuracy declared in :attr:`SampledCurve.accuracy_order`).
The same classes carry covector-valued curves (lines) unchanged.
"""

from __future__ import annotations

import json
from math import factorial

import numpy as np

from .core_linalg import mat_exp
from .taylor import Series, cross


class PlaneCurve:
    domain = (-np.inf, np.inf)

    def series(self, t: float, order: int) -> Series:
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, float)
        if t.ndim == 0:
            return self.series(float(t), 0).value
        return np.array([self.series(float(s), 0).value for s in t])

    def derivs(self, t: float, n: int) -> np.ndarray:
        """Array of A, A', ..., A^(n) at t."""
        return self.series(t, n).derivatives()

    def transformed(self, m) -> "PlaneCurve":
        """The curve t -> m @ A(t)."""
        return MappedCurve(self, np.asarray(m, float))

    def rescaled(self, factor) -> "PlaneCurve":
        """The curve t -> factor(t) A(t), factor a callable series(t, n) or number."""
        return RescaledCurve(self, factor)


class FunctionCurve(PlaneCurve):
    """Curve defined by a callable ``series_fn(t, order) -> Series``."""

    def __init__(self, series_fn, domain=(-np.inf, np.inf)):
        self._fn = series_fn
        self.domain = domain

    def series(self, t, order):
        return self._fn(t, order)


class PolynomialCurve(PlaneCurve):
    """A(t) = sum_k coeffs[k] t^k."""

    def __init__(self, coeffs, domain=(-np.inf, np.inf)):
        self.coeffs = np.asarray(coeffs, float)
        self.domain = domain

    def series(self, t, order):
        deg = self.coeffs.shape[0] - 1
        out = np.zeros((order + 1, 3))
        # Taylor coefficients about t: sum_k C(k, j) c_k t^(k-j)
        for j in range(min(order, deg) + 1):
            for k in range(j, deg + 1):
                out[j] += self.coeffs[k] * (factorial(k) / (factorial(j) * factorial(k - j))) * t ** (k - j)
        return Series(out)


class TrigCurve(PlaneCurve):
    """A(t) = offset + sum over (w, a, b) of a cos(w t) + b sin(w t)."""

    def __init__(self, offset, terms, domain=(-np.inf, np.inf)):
        self.offset = np.asarray(offset, float)
        self.terms = [(float(w), np.asarray(a, float), np.asarray(b, float)) for w, a, b in terms]
        self.domain = domain

    def series(self, t, order):
        out = np.zeros((order + 1, 3))
        out[0] += self.offset
        for w, a, b in self.terms:
            for k in range(order + 1):
                ph = w * t + k * np.pi / 2
                out[k] += (w ** k) * (a * np.cos(ph) + b * np.sin(ph)) / factorial(k)
        return Series(out)


class OrbitCurve(PlaneCurve):
    """exp(tY) v for a vector v, or v exp(-tY) for a covector (``covector=True``)."""

    def __init__(self, Y, v0, covector=False):
        self.Y = np.asarray(Y, float)
        self.v0 = np.asarray(v0, float)
        self.covector = covector

    def series(self, t, order):
        out = np.zeros((order + 1, 3))
        if self.covector:
            cur = self.v0 @ mat_exp(self.Y, -t)
            for k in range(order + 1):
                out[k] = cur / factorial(k)
                cur = -cur @ self.Y
        else:
            cur = mat_exp(self.Y, t) @ self.v0
            for k in range(order + 1):
                out[k] = cur / factorial(k)
                cur = self.Y @ cur
        return Series(out)


class MappedCurve(PlaneCurve):
    def __init__(self, base: PlaneCurve, m):
        self.base = base
        self.m = m
        self.domain = base.domain

    def series(self, t, order):
        s = self.base.series(t, order)
        return Series(s.c @ self.m.T)


class RescaledCurve(PlaneCurve):
    def __init__(self, base: PlaneCurve, factor):
        self.base = base
        self.factor = factor
        self.domain = base.domain

    def series(self, t, order):
        s = self.base.series(t, order)
        if callable(getattr(self.factor, "series", None)):
            f = self.factor.series(t, order)
        elif callable(self.factor):
            f = self.factor(t, order)
        else:
            return Series(s.c * float(self.factor))
        return f * s


class ReparametrizedCurve(PlaneCurve):
    """t -> A(phi(t)) for a scalar map phi given by ``phi_series(t, order)``."""

    def __init__(self, base: PlaneCurve, phi_series):
        self.base = base
        self.phi_series = phi_series

    def series(self, t, order):
        phi = self.phi_series(t, order)
        inner = self.base.series(float(phi.value), order)
        h = Series(phi.c.copy())
        h.c[0] = 0.0
        acc = Series.constant(inner.c[order], order)
        for k in range(order - 1, -1, -1):
            acc = h * acc
            acc.c[0] = acc.c[0] + inner.c[k]
        return acc


def dual_series(base: PlaneCurve, t: float, order: int) -> Series:
    s = base.series(t, order + 1)
    return cross(s, s.deriv())


class DualCurve(PlaneCurve):
    """t -> A(t) x A'(t), the tangent line (or the turning point of a line)."""

    def __init__(self, base: PlaneCurve):
        self.base = base
        self.domain = base.domain

    def series(self, t, order):
        return dual_series(self.base, t, order)


class SampledCurve(PlaneCurve):
    """Curve known on a uniform grid; jets from a local degree-6 fit.

    A 7-node fit reproduces polynomials of degree 6, so the k-th derivative
    carries an error of order h^(7-k). Orders up to 4 are the supported
    range (error at least h^3); orders 5 and 6 are returned for callers that
    need a full jet but are only first- and zeroth-order accurate.
    """

    accuracy_order = 3
    max_order = 6

    def __init__(self, t, A):
        self.t = np.asarray(t, float)
        self.A = np.asarray(A, float)
        if self.t.ndim != 1 or self.A.shape != (self.t.size, 3):
            raise ValueError("expected t of shape (n,) and A of shape (n, 3)")
        if self.t.size < 7:
            raise ValueError("need at least 7 samples")
        h = np.diff(self.t)
        if np.any(h <= 0) or np.ptp(h) > 1e-9 * abs(h.mean()):
            raise ValueError("samples must lie on a uniform increasing grid")
        self.domain = (self.t[0], self.t[-1])

    @classmethod
    def from_json(cls, text_or_path):
        if isinstance(text_or_path, str) and text_or_path.lstrip().startswith("{"):
            data = json.loads(text_or_path)
        else:
            with open(text_or_path) as fh:
                data = json.load(fh)
        return cls(data["t"], data["A"])

    def to_json(self):
        return json.dumps({"t": self.t.tolist(), "A": self.A.tolist()})

    def series(self, t, order):
        if order > self.max_order:
            raise ValueError(f"sampled curves provide derivatives up to order {self.max_order}")
        i = int(np.clip(np.searchsorted(self.t, t) - 3, 0, self.t.size - 7))
        ts = self.t[i : i + 7]
        center = ts[3]
        scale = ts[1] - ts[0]
        x = (ts - center) / scale
        V = np.vander(x, 7, increasing=True)
        coef = np.linalg.solve(V, self.A[i : i + 7])  # polynomial in x
        u = (t - center) / scale
        out = np.zeros((order + 1, 3))
        for k in range(order + 1):
            for m in range(k, 7):
                out[k] += coef[m] * (factorial(m) / (factorial(k) * factorial(m - k))) * u ** (m - k)
            out[k] /= scale ** k
        return Series(out)


# Named families -----------------------------------------------------------

def circle(radius=1.0, phase=0.0) -> TrigCurve:
    """[r cos(t + phase), r sin(t + phase), 1]."""
    c, s = np.cos(phase), np.sin(phase)
    return TrigCurve([0.0, 0.0, 1.0], [(1.0, radius * np.array([c, s, 0.0]), radius * np.array([-s, c, 0.0]))])


def conic() -> PolynomialCurve:
    """(1 + t^2, 2t, 1 - t^2): the unit circle X^2 + Y^2 = 1 in the chart (A2/A1, A3/A1)."""
    return PolynomialCurve([[1.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, -1.0]])


def straight_line(p0=(0.0, 0.0, 1.0), v=(1.0, 0.0, 0.0)) -> PolynomialCurve:
    return PolynomialCurve([p0, v])


def cubic_graph() -> PolynomialCurve:
    """(t, t^3, 1): the graph y = x^3 with an inflection at t = 0."""
    return PolynomialCurve([[0, 0, 1], [1, 0, 0], [0, 0, 0], [0, 1, 0]])
