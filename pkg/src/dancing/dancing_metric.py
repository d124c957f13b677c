"""Pairs of a point and a line not through it, and the split-signature
conformal metric they carry.

A tangent vector at ([q], [p]) is given by homogeneous representatives
``(q, p)`` and velocities ``(dq, dp)``; ``dq`` only matters modulo ``q`` and
``dp`` modulo ``p``. The metric

    g(u, u) = -2 (q x dq).(p x dp) / (pq)^2

kills those gauge directions and is independent of the representatives.
In the chart ``q = (x, y, 1)``, ``p = (a, -1, b)`` it becomes

    g = 2 (da ((y - b) dx - x dy) + db (a dx - dy)) / (y - ax - b)^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_linalg import (
    INCIDENCE_TOL,
    DISTINCT_TOL,
    GeometryError,
    ProjLine,
    ProjPoint,
    Quadruple,
    cross_cc,
    cross_ratio,
    cross_vv,
    proj_distance,
)
from .curves import DualCurve, PlaneCurve

RICHARDSON_EPS = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True, eq=False)
class M4Point:
    q: ProjPoint
    p: ProjLine

    def __init__(self, q, p):
        q = q if isinstance(q, ProjPoint) else ProjPoint(q)
        p = p if isinstance(p, ProjLine) else ProjLine(p)
        if abs(float(p.rep @ q.rep)) <= INCIDENCE_TOL:
            raise GeometryError("incident pair")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def __eq__(self, other):
        return isinstance(other, M4Point) and self.q == other.q and self.p == other.p

    def __hash__(self):
        return hash((self.q, self.p))

    @classmethod
    def from_chart(cls, cp: "ChartPoint") -> "M4Point":
        return cls(cp.q_hat, cp.p_hat)

    def lift(self):
        """Canonical representatives: unit q and p scaled so pq = 1."""
        q = self.q.rep.copy()
        return q, self.p.rep / float(self.p.rep @ q)

    def chart(self) -> "ChartPoint":
        q, p = self.q.rep, self.p.rep
        if abs(q[2]) < 1e-14 or abs(p[1]) < 1e-14:
            raise GeometryError("outside the affine chart")
        return ChartPoint(q[0] / q[2], q[1] / q[2], -p[0] / p[1], -p[2] / p[1])

    def act(self, g) -> "M4Point":
        g = np.asarray(g, float)
        return M4Point(g @ self.q.rep, self.p.rep @ np.linalg.inv(g))


@dataclass(frozen=True)
class ChartPoint:
    """The point (x, y) and the line y = a x + b."""

    x: float
    y: float
    a: float
    b: float

    def __post_init__(self):
        if abs(self.denominator) <= 1e-10:
            raise GeometryError("incident pair")

    @property
    def denominator(self) -> float:
        return self.y - self.a * self.x - self.b

    @property
    def q_hat(self):
        return np.array([self.x, self.y, 1.0])

    @property
    def p_hat(self):
        return np.array([self.a, -1.0, self.b])

    def as_array(self):
        return np.array([self.x, self.y, self.a, self.b])

    @classmethod
    def from_array(cls, v):
        return cls(*map(float, v))


@dataclass(frozen=True)
class M4Tangent:
    """Velocity (dq, dp) at representatives (q, p) of ``base``."""

    base: M4Point
    dq: np.ndarray
    dp: np.ndarray
    q: np.ndarray = None
    p: np.ndarray = None

    def __post_init__(self):
        q = self.base.q.rep if self.q is None else np.asarray(self.q, float)
        p = self.base.p.rep if self.p is None else np.asarray(self.p, float)
        if proj_distance(q, self.base.q.rep) > 1e-9 or proj_distance(p, self.base.p.rep) > 1e-9:
            raise GeometryError("representatives do not match the base point")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dq", np.asarray(self.dq, float).reshape(3))
        object.__setattr__(self, "dp", np.asarray(self.dp, float).reshape(3))

    def at_representatives(self, q, p) -> "M4Tangent":
        """The same tangent vector expressed at other representatives."""
        q = np.asarray(q, float)
        p = np.asarray(p, float)
        sq = float(q @ self.q) / float(self.q @ self.q)
        sp = float(p @ self.p) / float(self.p @ self.p)
        return M4Tangent(self.base, sq * self.dq, sp * self.dp, q, p)

    def regauged(self, s, t) -> "M4Tangent":
        """Add gauge multiples s q and t p (the same tangent vector)."""
        return M4Tangent(self.base, self.dq + s * self.q, self.dp + t * self.p, self.q, self.p)

    def to_chart(self):
        """Chart components (dx, dy, da, db)."""
        q, p, dq, dp = self.q, self.p, self.dq, self.dp
        dx = (dq[0] * q[2] - q[0] * dq[2]) / q[2] ** 2
        dy = (dq[1] * q[2] - q[1] * dq[2]) / q[2] ** 2
        da = -(dp[0] * p[1] - p[0] * dp[1]) / p[1] ** 2
        db = -(dp[2] * p[1] - p[2] * dp[1]) / p[1] ** 2
        return np.array([dx, dy, da, db])

    def act(self, g) -> "M4Tangent":
        g = np.asarray(g, float)
        gi = np.linalg.inv(g)
        return M4Tangent(self.base.act(g), g @ self.dq, self.dp @ gi, g @ self.q, self.p @ gi)


def chart_tangent(cp: ChartPoint, v) -> M4Tangent:
    dx, dy, da, db = map(float, v)
    return M4Tangent(M4Point.from_chart(cp), [dx, dy, 0.0], [da, 0.0, db], cp.q_hat, cp.p_hat)


def _aligned(u1: M4Tangent, u2: M4Tangent) -> M4Tangent:
    if not u1.base == u2.base:
        raise GeometryError("tangent vectors at different base points")
    if np.allclose(u1.q, u2.q, rtol=0, atol=0) and np.allclose(u1.p, u2.p, rtol=0, atol=0):
        return u2
    return u2.at_representatives(u1.q, u1.p)


def metric_eval(u1: M4Tangent, u2: M4Tangent) -> float:
    u2 = _aligned(u1, u2)
    q, p = u1.q, u1.p
    pq = float(p @ q)
    a = cross_vv(q, u1.dq) @ cross_cc(p, u2.dp)
    b = cross_vv(q, u2.dq) @ cross_cc(p, u1.dp)
    return float(-(a + b) / pq**2)


def metric_eval_expanded(u1: M4Tangent, u2: M4Tangent) -> float:
    """Same bilinear form written with dot products only."""
    u2 = _aligned(u1, u2)
    q, p = u1.q, u1.p
    pq = float(p @ q)
    dq1, dp1, dq2, dp2 = u1.dq, u1.dp, u2.dq, u2.dp
    num = pq * (dp1 @ dq2 + dp2 @ dq1) - (p @ dq1) * (dp2 @ q) - (p @ dq2) * (dp1 @ q)
    return float(-num / pq**2)


def metric_chart(cp: ChartPoint) -> np.ndarray:
    """Gram matrix in the coordinates (x, y, a, b)."""
    x, y, a, b = cp.x, cp.y, cp.a, cp.b
    d2 = cp.denominator**2
    g = np.zeros((4, 4))
    g[0, 2] = g[2, 0] = (y - b) / d2
    g[1, 2] = g[2, 1] = -x / d2
    g[0, 3] = g[3, 0] = a / d2
    g[1, 3] = g[3, 1] = -1.0 / d2
    return g


def metric_chart_array(pts) -> np.ndarray:
    """Vectorized :func:`metric_chart` over an (..., 4) array of chart points."""
    pts = np.asarray(pts, float)
    x, y, a, b = np.moveaxis(pts, -1, 0)
    d2 = (y - a * x - b) ** 2
    g = np.zeros(pts.shape[:-1] + (4, 4))
    g[..., 0, 2] = g[..., 2, 0] = (y - b) / d2
    g[..., 1, 2] = g[..., 2, 1] = -x / d2
    g[..., 0, 3] = g[..., 3, 0] = a / d2
    g[..., 1, 3] = g[..., 3, 1] = -1.0 / d2
    return g


def velocity(q_curve: PlaneCurve, p_curve: PlaneCurve, t: float) -> M4Tangent:
    qs = q_curve.series(t, 1)
    ps = p_curve.series(t, 1)
    base = M4Point(qs.c[0], ps.c[0])
    return M4Tangent(base, qs.c[1], ps.c[1], qs.c[0], ps.c[0])


def dancing_residual(q_curve: PlaneCurve, p_curve: PlaneCurve, t: float, tol=1e-12) -> float:
    """Normalized incidence of the tangent line of q with the turning point of p."""
    qs = q_curve.series(t, 1)
    ps = p_curve.series(t, 1)
    q, dq = qs.c
    p, dp = ps.c
    qstar = np.cross(q, dq)
    pstar = np.cross(p, dp)
    nq, np_ = np.linalg.norm(qstar), np.linalg.norm(pstar)
    if nq <= tol * np.linalg.norm(q) * np.linalg.norm(dq) or nq == 0.0 or np_ <= tol * np.linalg.norm(p) * np.linalg.norm(dp) or np_ == 0.0:
        raise GeometryError(f"degenerate at t = {t:.6g}")
    return float(abs(qstar @ pstar) / (nq * np_))


def cross_ratio_metric(pt: M4Point, v: M4Tangent, eps: float) -> float:
    """Cross-ratio [q, qbar, q_eps, qbar_eps] of the four points on the line
    through q and q_eps = q + eps dq, where qbar, qbar_eps are its meets with
    p and p_eps = p + eps dp. Approximately eps^2 g(v, v) / 2."""
    if not v.base == pt:
        raise GeometryError("tangent vector at a different base point")
    q, p = v.q, v.p
    if abs(eps) * np.linalg.norm(v.dq) > 0.2 * np.linalg.norm(q) or abs(eps) * np.linalg.norm(v.dp) > 0.2 * np.linalg.norm(p):
        raise GeometryError("eps too large")
    q_e = q + eps * v.dq
    p_e = p + eps * v.dp
    line = cross_vv(q, q_e)
    m, m_e = cross_cc(line, p), cross_cc(line, p_e)
    if np.linalg.norm(m_e) > 0 and proj_distance(m, m_e) < DISTINCT_TOL and proj_distance(q, m) > DISTINCT_TOL:
        return 0.0  # both meets coincide: the value (x4 - x2) factor vanishes
    try:
        quad = Quadruple(q, cross_cc(line, p), q_e, cross_cc(line, p_e))
    except GeometryError as exc:
        raise GeometryError(f"eps too large or degenerate direction: {exc}") from None
    return cross_ratio(quad)


def metric_from_cross_ratio(pt: M4Point, v: M4Tangent, eps=RICHARDSON_EPS) -> float:
    """g(v, v) as the Richardson limit of 2 CR(eps) / eps^2 (halving steps)."""
    e0, e1, e2 = eps
    if not (np.isclose(e1, e0 / 2) and np.isclose(e2, e1 / 2)):
        raise ValueError("expected a halving sequence of three steps")
    f = [2.0 * cross_ratio_metric(pt, v, e) / e**2 for e in eps]
    r1 = [2 * f[1] - f[0], 2 * f[2] - f[1]]
    return (4 * r1[1] - r1[0]) / 3


class Dual(DualCurve):
    """Dual curve t -> A x A' with inflection detection."""

    def __init__(self, base: PlaneCurve, probe=None):
        super().__init__(base)
        lo, hi = base.domain
        if probe is None:
            lo = max(lo, -1.0)
            hi = min(hi, 1.0)
            probe = np.linspace(lo, hi, 9)
        if all(self.singular_at(t) for t in probe):
            raise GeometryError("dual degenerates to a point")

    def singular_at(self, t: float, tol=1e-9) -> bool:
        s = self.series(t, 1)
        d, dd = s.c
        nd = np.linalg.norm(d)
        if nd == 0.0:
            raise GeometryError(f"curve not regular at t = {t:.6g}")
        return bool(np.linalg.norm(np.cross(d, dd)) <= tol * nd**2)


def dual_curve(curve: PlaneCurve, probe=None) -> Dual:
    return Dual(curve, probe)


@dataclass(frozen=True)
class ContactElement:
    """psi(v) = scale * (q x v), with q, p the canonical representatives
    (unit q, pq = 1) of ``base``."""

    base: M4Point
    scale: float

    def __post_init__(self):
        if self.scale == 0:
            raise ValueError("scale must be nonzero")

    def apply(self, v):
        q, _ = self.base.lift()
        return self.scale * cross_vv(q, np.asarray(v, float))

    def graph_vector(self, v) -> M4Tangent:
        q, p = self.base.lift()
        return M4Tangent(self.base, v, self.apply(v), q, p)

    def image_point(self, v):
        """The point where the line through q in direction v meets p."""
        _, p = self.base.lift()
        return cross_cc(p, self.apply(v))


def contact_psi(pt: M4Point, scale: float) -> ContactElement:
    return ContactElement(pt, float(scale))


def psi_apply(ce: ContactElement, v):
    return ce.apply(v)


def q5_to_contact(pt) -> ContactElement:
    """(q, p) with pq = 1 as a contact element. Writing q = mu q_unit, the
    map v -> q x v at (q, p) reads mu^3 (q_unit x v) at the canonical lift."""
    base = M4Point(pt.q, pt.p)
    qc, _ = base.lift()
    mu = float(pt.q @ qc)
    return ContactElement(base, mu**3)
