"""Osculating conics, developments and the rolling conditions for point-line curves.

Along a curve in normal form A''' + r A = 0 (parameter tbar), the frame
F = [A, A', A''] puts the osculating conic in the form y^2 = 2xz. The
developments are the curves P_c = A + (c - tbar) A' + (c - tbar)^2 / 2 A''
together with [A'']; each is tangent at every time to the line joining it
to [A], which makes the lines through [A] parallel along the curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_linalg import GeometryError, ProjLine, proj_distance
from .curves import PlaneCurve
from .projective_curves import LFCurve, LocalLF, unimodular_series
from .taylor import Series, cross, dot, reparametrize

FRAME_CONIC = np.array([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])


@dataclass(frozen=True)
class Conic:
    """Point conic x^T M x = 0 (M up to scale)."""

    M: np.ndarray

    def __call__(self, x) -> float:
        x = np.asarray(x, float)
        return float(x @ self.M @ x)

    def normalized(self):
        return self.M / np.linalg.norm(self.M)

    def contains(self, x, tol=1e-9) -> bool:
        x = np.asarray(x, float)
        return abs(self(x)) <= tol * np.linalg.norm(self.M) * (x @ x)

    def rank(self, rtol=1e-10) -> int:
        s = np.linalg.svd(self.M, compute_uv=False)
        return int(np.sum(s > rtol * s[0]))

    def distance(self, other: "Conic") -> float:
        a, b = self.normalized().ravel(), other.normalized().ravel()
        return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def _frame(lf, t, order=0):
    """Jets (in tbar) of the normal-form lift about original parameter t."""
    return lf.lift_series(t, order + 2)


def osculating_conic(lf, t: float) -> Conic:
    A = _frame(lf, t).derivatives()
    F = np.column_stack([A[0], A[1], A[2]])
    Fi = np.linalg.inv(F)
    return Conic(Fi.T @ FRAME_CONIC @ Fi)


class Development:
    """A development along a normal-form curve: ``branch`` is "A2" for [A'']
    or a real c for P_c. Parameters are the original ones of ``lf``."""

    def __init__(self, lf: LFCurve, branch):
        self.lf = lf
        self.branch = branch

    def series(self, t: float, order: int) -> Series:
        """Series in tbar of the development about original parameter t."""
        A = self.lf.lift_series(t, order + 2)
        A1 = A.deriv()
        A2 = A1.deriv()
        if self.branch == "A2":
            return A2
        tb = self.lf.param(t)
        u = Series(np.array([self.branch - tb, -1.0] + [0.0] * max(order - 1, 0))[: order + 1])
        n = order
        return A.truncate(n) + u * A1.truncate(n) + 0.5 * (u * u) * A2.truncate(n)

    def point(self, t: float):
        return self.series(t, 0).c[0]

    def horizontality_defect(self, t: float) -> float:
        """|det(A, X, X')| normalized: tangent line of X must pass through A."""
        X = self.series(t, 1)
        A = self.lf.lift_series(t, 0).c[0]
        x, dx = X.c
        nd = np.linalg.norm(dx)
        if nd < 1e-14 * np.linalg.norm(x):
            return 0.0
        return float(abs(np.linalg.det([A, x, dx])) / (np.linalg.norm(A) * np.linalg.norm(x) * nd))

    def speed(self, t: float) -> float:
        """Projective speed |X x X'| / |X|^2 (zero at the cusp)."""
        X = self.series(t, 1)
        x, dx = X.c
        return float(np.linalg.norm(np.cross(x, dx)) / (x @ x))

    def is_cusp(self, t: float, tol=1e-8) -> bool:
        return self.branch != "A2" and self.speed(t) < tol


def development(lf: LFCurve, branch) -> Development:
    if branch != "A2":
        branch = float(branch)
    return Development(lf, branch)


def development_through(lf: LFCurve, ell0, t0: float) -> Development:
    """The development meeting the line ell0 (through q(t0)) a second time."""
    L = ell0.rep if isinstance(ell0, ProjLine) else np.asarray(ell0, float)
    A = lf.lift_series(t0, 2).derivatives()
    coords = L @ np.column_stack([A[0], A[1], A[2]])
    scale = np.linalg.norm(L) * np.linalg.norm(A[0])
    if abs(coords[0]) > 1e-9 * scale:
        raise GeometryError("line does not pass through the curve point")
    beta, gamma = coords[1], coords[2]
    if abs(gamma) <= 1e-12 * max(abs(beta), 1e-300):
        return Development(lf, "A2")
    return Development(lf, lf.param(t0) - 2.0 * beta / gamma)


def parallel_transport_line(lf: LFCurve, ell0, t0: float, t1: float) -> ProjLine:
    dev = development_through(lf, ell0, t0)
    A1 = lf.lift_series(t1, 1)
    a = A1.c[0]
    x = dev.point(t1)
    if proj_distance(a, x) < 1e-10:
        # at the cusp the development touches the curve; use the tangent line
        return ProjLine(np.cross(a, A1.c[1]))
    return ProjLine(np.cross(a, x))


def normal_acceleration(q_curve: PlaneCurve, t: float, chart: int = None):
    """Chart acceleration modulo the velocity, as a 2-vector orthogonal to it."""
    s = q_curve.series(t, 2)
    q, dq, ddq = s.derivatives()
    k = int(np.argmax(np.abs(q))) if chart is None else chart
    idx = [i for i in range(3) if i != k]
    # chart coordinates x_i = q_i / q_k and their derivatives
    w = Series(s.c[:, k])
    x = Series(s.c[:, idx]) * Series(w.reciprocal().c[:, None])
    d = x.derivatives()
    v, acc = d[1], d[2]
    nv = np.linalg.norm(v)
    if nv < 1e-14 * max(1.0, np.linalg.norm(d[0])):
        raise GeometryError(f"vanishing velocity at t = {t:.6g}")
    u = v / nv
    return acc - (acc @ u) * u


def _normalized_pair(q_curve, p_curve, t, order):
    qs = q_curve.series(t, order)
    ps = p_curve.series(t, order)
    pq = dot(ps, qs)
    return qs, ps * Series(pq.reciprocal().c[:, None])


def induced_psi_scale(q_curve, p_curve, t: float) -> float:
    """The scale s with p' = s (q x q') modulo p (least squares), for
    representatives with pq = 1."""
    qs, ps = _normalized_pair(q_curve, p_curve, t, 1)
    q, dq = qs.c
    p, dp = ps.c
    w = np.cross(q, dq)
    proj = lambda v: v - (v @ q) * p  # covectors modulo p, killing the q-pairing
    a, b = proj(w), proj(dp)
    return float(a @ b / (a @ a))


def no_slip_residual(q_curve, p_curve, t: float, scale=1.0) -> float:
    """|psi(q') - p'| modulo p, relative, for psi(v) = scale (q x v) at
    representatives with pq = 1. ``scale`` may be a callable of t."""
    s = scale(t) if callable(scale) else float(scale)
    qs, ps = _normalized_pair(q_curve, p_curve, t, 1)
    q, dq = qs.c
    p, dp = ps.c
    diff = s * np.cross(q, dq) - dp
    diff = diff - (diff @ q) * p
    den = max(np.linalg.norm(dp - (dp @ q) * p), abs(s) * np.linalg.norm(np.cross(q, dq)), 1e-300)
    return float(np.linalg.norm(diff) / den)


def psi_acceleration_residual(q_curve, p_curve, t: float, scale=1.0) -> float:
    """|psi(q'') - p''| modulo p and modulo the velocity relation, relative."""
    s = float(scale)
    qs, ps = _normalized_pair(q_curve, p_curve, t, 2)
    q, dq, ddq = qs.derivatives()
    p, dp, ddp = ps.derivatives()
    diff = s * np.cross(q, ddq) - ddp
    # remove the p direction and the tangent (q x q') direction
    basis = np.column_stack([p, np.cross(q, dq)])
    coef, *_ = np.linalg.lstsq(basis, diff, rcond=None)
    r = diff - basis @ coef
    return float(np.linalg.norm(r) / max(np.linalg.norm(ddp), np.linalg.norm(np.cross(q, ddq)), 1e-300))


def no_twist_residual(q_curve, p_curve, t: float) -> float:
    """Distance between l ^ p for the parallel line l = A x A'' and the
    parallel point P x P'' on p, in the normal-form parameter of q."""
    lf = LocalLF(q_curve, t)
    A = lf.lift_series(t, 2).derivatives()
    speed = lf.speed_series(t, 4)
    P = unimodular_series(reparametrize(p_curve.series(t, 4), speed))
    Pd = P.derivatives()
    ell = np.cross(A[0], A[2])
    x = np.cross(ell, Pd[0])
    y = np.cross(Pd[0], Pd[2])
    if np.linalg.norm(x) < 1e-12 * np.linalg.norm(ell) * np.linalg.norm(Pd[0]):
        raise GeometryError("degenerate intersection")
    return proj_distance(x, y)


def contact_value(conic: Conic, curve_pt) -> float:
    x = np.asarray(curve_pt, float)
    return conic(x) / (np.linalg.norm(conic.M) * (x @ x))


def contact_exponent(lf: LFCurve, t: float, steps=(1e-2, 5e-3, 2e-3, 1e-3)) -> float:
    """Log-log slope of |C(q(t + h))| against h for the osculating conic C at t."""
    C = osculating_conic(lf, t)
    tb = lf.param(t)
    hs = np.asarray(steps, float)
    vals = [abs(contact_value(C, lf.series(tb + h, 0).c[0])) for h in hs]
    return float(np.polyfit(np.log(hs), np.log(vals), 1)[0])


def concurrency_defect(lines) -> float:
    """Smallest singular value of the stacked unit line covectors (0 when all
    lines pass through one point)."""
    L = np.array([l.rep if isinstance(l, ProjLine) else np.asarray(l, float) / np.linalg.norm(l) for l in lines])
    return float(np.linalg.svd(L, compute_uv=False)[-1])
