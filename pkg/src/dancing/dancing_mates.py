"""Involutes, dancing mates and the orbit curves of constant projective curvature.

Along a curve in normal form A''' + r A = 0, a scalar y(t) defines the point
B = (C - y') A + y A' on the tangent line of A. The line through B and B'
traces a curve whose turning points are B exactly when

    y'''' + 2 y''' (y' - C) / y + 3 r y' + r' y = 0,

and the pair ([A], [B x B']) dances when moreover C = 0 (a mate). Around a
conic (r = 0) the mate equation integrates once to y''' y^2 = const.

The conic is parametrized by t with A(t) = (1 + t^2, 2t, 1 - t^2); the chart
s = 1/t with A~(s) = diag(-1, -1, 1) A(s) and y~(s) = -s^2 y(1/s) covers the
point t = infinity. A global angle theta with t = tan(theta / 2) orders the
pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.integrate import solve_ivp

from .core_linalg import GeometryError, mat_exp
from .curves import FunctionCurve, MappedCurve, OrbitCurve, PlaneCurve, conic
from .taylor import Series, cross

CHART_FLIP = np.diag([-1.0, -1.0, 1.0])
KAPPA0 = -3.0 * 32.0 ** (-1.0 / 3.0)


class SingularMate(GeometryError):
    pass


def _r_series(r, dr, t, order):
    if isinstance(r, (int, float)):
        return Series.constant(float(r), order)
    if hasattr(r, "series"):
        return r.series(t, order)
    if order > 1:
        raise NotImplementedError("r needs a series method for higher jets")
    c = [float(r(t))]
    if order >= 1:
        if dr is None:
            raise ValueError("dr is required when r is a plain callable")
        c.append(float(dr(t)))
    return Series(np.array(c))


class ConstantSeries:
    def __init__(self, value):
        self.value = float(value)

    def series(self, t, order):
        return Series.constant(self.value, order)


def involute_jets(state, r_ser_fn, C, t, order):
    """Taylor series of y about t from (y, y', y'', y''') by the ODE."""
    c = np.zeros(max(order, 3) + 1)
    for k in range(4):
        c[k] = state[k] / factorial(k)
    for m in range(0, max(order - 3, 0)):
        y = Series(c[: m + 4].copy())
        d1 = y.deriv()
        d3 = d1.deriv().deriv()
        r = r_ser_fn(t, m + 1)
        rs = Series(r.c[: m + 1])
        drs = r.deriv()
        ym = y.truncate(m)
        rhs = -(2 * (d3 * (d1.truncate(m) - C)) * ym.reciprocal() + 3 * (rs * d1.truncate(m)) + drs * ym)
        c[m + 4] = rhs.c[m] * factorial(m) / factorial(m + 4)
    return Series(c[: order + 1])


def mate_jets(state, t, order, const=1.0):
    """Series of y about t for y''' = const / y^2 from (y, y', y'')."""
    c = np.zeros(max(order, 2) + 1)
    for k in range(3):
        c[k] = state[k] / factorial(k)
    for m in range(0, max(order - 2, 0)):
        y = Series(c[: m + 1].copy())
        rhs = const * (y * y).reciprocal()
        c[m + 3] = rhs.c[m] * factorial(m) / factorial(m + 3)
    return Series(c[: order + 1])


@dataclass
class MateSegment:
    """One chart of a mate or involute: y known along ``param`` in [lo, hi]."""

    chart: str
    lo: float
    hi: float
    base: PlaneCurve  # the normal-form lift A in this chart's parameter
    C: float
    y_series: object  # (u, order) -> Series
    state: object  # u -> state vector
    theta: object = None  # u -> global angle, circle case only

    @property
    def domain(self):
        return (min(self.lo, self.hi), max(self.lo, self.hi))

    def B_series(self, u, order):
        y = self.y_series(u, order + 1)
        A = self.base.series(u, order + 1)
        yd = y.deriv()
        return A.truncate(order) * (self.C - yd) + A.deriv() * y.truncate(order)

    def B_curve(self) -> FunctionCurve:
        return FunctionCurve(self.B_series, self.domain)

    def q_curve(self) -> PlaneCurve:
        return self.base

    def p_curve(self) -> FunctionCurve:
        """The line through B and B'."""

        def fn(u, order):
            B = self.B_series(u, order + 1)
            return cross(B.truncate(order), B.deriv())

        return FunctionCurve(fn, self.domain)

    def sample_times(self, n=20, margin=0.02):
        a, b = self.domain
        pad = margin * (b - a)
        return np.linspace(a + pad, b - pad, n)


@dataclass
class MateSolution:
    C: float
    segments: list
    const_factor: float = 1.0
    terminated: str = ""
    family: str = "involute"

    @property
    def y_min(self):
        return min(abs(seg.state(u)[0]) for seg in self.segments for u in seg.sample_times(50, 0.0))

    def drawing(self, n=200):
        """Affine chart points (B2/B1, B3/B1) of the turning points, per segment."""
        out = []
        for seg in self.segments:
            us = np.linspace(seg.lo, seg.hi, n)
            B = np.array([seg.B_series(u, 0).c[0] for u in us])
            with np.errstate(divide="ignore", invalid="ignore"):
                out.append(np.column_stack([B[:, 1] / B[:, 0], B[:, 2] / B[:, 0]]))
        return out

    def table(self, n=50):
        """Rows (theta or param, y, y', y'') along all segments."""
        rows = []
        for seg in self.segments:
            for u in np.linspace(seg.lo, seg.hi, n):
                s = seg.state(u)
                x = seg.theta(u) if seg.theta is not None else u
                rows.append((float(x), float(s[0]), float(s[1]), float(s[2])))
        return rows


def _collapsed(sol, rel=1e-8):
    """The stepper gave up because y reached 0 before the sign change registered."""
    y = sol.y[0]
    return abs(y[-1]) < rel * np.abs(y).max()


def _zero_event(y_index=0):
    def ev(t, y):
        return y[y_index]

    ev.terminal = True
    return ev


def involute_solve(r, C, init, span, dr=None, base: PlaneCurve = None, rtol=1e-12, on_zero="raise") -> MateSolution:
    """Integrate the involute equation from ``init = (y, y', y'', y''')`` at span[0]."""
    t0, t1 = map(float, span)
    init = np.asarray(init, float)
    if init[0] == 0:
        raise SingularMate("singular: y vanishes at the initial point")
    rfun = lambda t, n: _r_series(r, dr, t, n)

    def rhs(t, Y):
        y, y1, y2, y3 = Y
        rr = rfun(t, 1).c
        return [y1, y2, y3, -(2 * y3 * (y1 - C) / y + 3 * rr[0] * y1 + rr[1] * y)]

    sol = solve_ivp(rhs, (t0, t1), init, method="DOP853", rtol=rtol, atol=rtol * 1e-2, dense_output=True,
                    events=_zero_event())
    if sol.status == -1 and not _collapsed(sol):
        raise SingularMate(f"integration failed: {sol.message}")
    end = float(sol.t[-1])
    terminated = ""
    if sol.status != 0:
        if on_zero == "raise":
            raise SingularMate(f"singular: y vanishes at t = {end:.6g}")
        terminated = f"y vanishes at t = {end:.6g}"
        end = t0 + (end - t0) * (1 - 1e-6)
    state = lambda u: sol.sol(u)
    yser = lambda u, n: involute_jets(sol.sol(u), rfun, C, u, n)
    base = base if base is not None else (conic() if r == 0 else None)
    seg = MateSegment("t", t0, end, base, float(C), yser, state)
    return MateSolution(float(C), [seg], 1.0, terminated, "involute")


def _switch(u, state):
    """(y, y', y'') at parameter u to the reciprocal chart."""
    y, y1, y2 = state[:3]
    return np.array([-y / u**2, -2 * y / u + y1, -2 * y + 2 * u * y1 - u**2 * y2])


def _theta_t(t):
    return 2 * np.arctan(t)


def _theta_s(s):
    return np.pi - 2 * np.arctan(s)


def circle_mates(init, span=(0.0, 4 * np.pi), const=1.0, rtol=1e-12, on_zero="raise") -> MateSolution:
    """Mates of the conic: y''' y^2 = const from (y, y', y'') at angle span[0].

    ``const`` is scaled to 1 by y -> const^(-1/3) y (recorded as
    ``const_factor``); const = 0 is the quadratic branch, whose mates
    degenerate to straight lines, and is rejected.
    """
    if const == 0:
        raise ValueError("quadratic branch: y''' = 0 gives turning points on a fixed line")
    factor = np.cbrt(float(const))
    y0 = np.asarray(init, float) / factor
    if y0[0] == 0:
        raise SingularMate("singular: y vanishes at the initial point")
    th0, th1 = map(float, span)
    if not th1 > th0:
        raise ValueError("span must increase")
    base_t = MappedCurve(conic(), np.eye(3))
    base_s = MappedCurve(conic(), CHART_FLIP)

    def rhs(u, Y):
        return [Y[1], Y[2], 1.0 / Y[0] ** 2]

    segments = []
    # locate the starting chart and parameter
    turns = np.floor((th0 + np.pi) / (2 * np.pi))
    local = th0 - 2 * np.pi * turns  # in [-pi, pi)
    if abs(local) <= np.pi / 2:
        chart, u = "t", np.tan(local / 2)
        offset = 2 * np.pi * turns
    else:
        chart, u = "s", 1.0 / np.tan(local / 2)
        offset = 2 * np.pi * turns if local > 0 else 2 * np.pi * (turns - 1)
    state = y0.copy()
    theta = th0
    terminated = ""
    while theta < th1 - 1e-14:
        if chart == "t":
            th_of = lambda v, o=offset: _theta_t(v) + o
            end_u = min(1.0, np.tan((th1 - offset) / 2)) if th1 - offset < np.pi / 2 else 1.0
            direction = 1.0
        else:
            th_of = lambda v, o=offset: _theta_s(v) + o
            rem = th1 - offset
            end_u = max(-1.0, np.tan((np.pi - rem) / 2)) if rem < 3 * np.pi / 2 else -1.0
            direction = -1.0
        if (end_u - u) * direction <= 0:
            end_u = u
        sol = solve_ivp(rhs, (u, end_u), state, method="DOP853", rtol=rtol, atol=rtol * 1e-2,
                        dense_output=True, events=_zero_event())
        if sol.status == -1 and not _collapsed(sol):
            raise SingularMate(f"integration failed: {sol.message}")
        stop = float(sol.t[-1])
        if sol.status != 0:
            if on_zero == "raise":
                raise SingularMate(f"singular: y vanishes at angle {th_of(stop):.6g}")
            terminated = f"y vanishes at angle {th_of(stop):.6g}"
            stop = u + (stop - u) * (1 - 1e-6)
        dense = sol.sol
        yser = lambda v, n, d=dense: mate_jets(d(v), v, n)
        base = base_t if chart == "t" else base_s
        if stop != u:
            segments.append(MateSegment(chart, u, stop, base, 0.0, yser, dense, th_of))
        if terminated:
            break
        theta = th_of(stop)
        if theta >= th1 - 1e-14:
            break
        state = _switch(stop, dense(stop))
        u = 1.0 / stop
        if chart == "t":
            chart = "s"
            # t = 1 is theta = pi/2 = pi - 2 arctan(1); t = -1 is theta = -pi/2 + offset
            offset = offset if stop > 0 else offset - 2 * np.pi
        else:
            chart = "t"
            offset = offset + 2 * np.pi if stop < 0 else offset
    ms = MateSolution(0.0, segments, float(factor), terminated, "circle")
    return ms


def quadratic_mate_plane(a, b, c):
    """Plane (a + c) x + b y + (c - a) z = 0 containing B for y = a t^2 + b t + c."""
    return np.array([a + c, b, c - a], float)


# Orbit curves of constant projective curvature --------------------------------

@dataclass(frozen=True)
class WCurveSpec:
    family: str
    param: float
    Y: np.ndarray = field(repr=False)
    charpoly: tuple  # (a1, a0) in lambda^3 + a1 lambda + a0
    kappa: float


def _charpoly(Y):
    c = np.poly(Y)  # [1, -tr, ., -det]
    return float(c[2]), float(c[3])


def wcurve_make(family: str, param: float = None) -> WCurveSpec:
    family = family.upper()
    if family == "Y1":
        a = 1.0 if param is None else float(param)
        if not a > 0:
            raise ValueError("Y1 needs a > 0")
        Y = np.array([[1.0, 0.0, 1.0], [0.0, -1.0, a], [a, -1.0, 0.0]])
        p = a
    elif family == "Y2":
        b = 1.0 if param is None else float(param)
        if not b > 0:
            raise ValueError("Y2 needs b > 0")
        Y = np.array([[0.0, 1.0, b], [-1.0, 0.0, 0.0], [0.0, -b, 0.0]])
        p = b
    elif family == "Y3":
        if param is not None:
            raise ValueError("Y3 takes no parameter")
        Y = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        p = float("nan")
    else:
        raise ValueError(f"unknown family {family!r}")
    a1, a0 = _charpoly(Y)
    a1 = 0.0 if abs(a1) < 1e-14 else a1
    kappa = 0.5 * a1 * np.cbrt(a0) ** -2 if a0 != 0 else float("nan")
    return WCurveSpec(family, p, Y, (a1, a0), float(kappa))


def wcurve_kappa_closed_form(spec: WCurveSpec) -> float:
    if spec.family == "Y1":
        return -((32 * spec.param**2) ** (-1.0 / 3.0))
    if spec.family == "Y2":
        return spec.param ** (-4.0 / 3.0) / 2
    return 0.0


def horizontal_block_defect(Y) -> float:
    """Distance of Y from the shape [[A, v], [v*, 0]] with v* = (v2, -v1)."""
    Y = np.asarray(Y, float)
    return float(max(abs(Y[2, 0] - Y[1, 2]), abs(Y[2, 1] + Y[0, 2]), abs(Y[2, 2]), abs(np.trace(Y))))


def wcurve_pair(spec: WCurveSpec, span=(-1.0, 1.0)):
    """(q, p) = (exp(tY) e3, e^3 exp(-tY)) as curves on ``span``."""
    e3 = np.array([0.0, 0.0, 1.0])
    q = OrbitCurve(spec.Y, e3)
    p = OrbitCurve(spec.Y, e3, covector=True)
    q.domain = p.domain = tuple(map(float, span))
    return q, p


def wcurve_trajectory(spec: WCurveSpec, span=(-1.0, 1.0), n=101):
    from .cartan_engel import orbit_trajectory

    e3 = np.array([0.0, 0.0, 1.0])
    return orbit_trajectory(spec.Y, e3, e3, np.linspace(span[0], span[1], n))


# Verification ------------------------------------------------------------------

class NormalFormView:
    """An already normalized lift (A''' + r A = 0 up to a constant factor),
    exposed with the interface of an LF curve in its own parameter."""

    def __init__(self, base: PlaneCurve):
        self.base = base

    def lift_series(self, t, order):
        from .projective_curves import unimodular_series

        return unimodular_series(self.base.series(t, order + 2))

    def speed_series(self, t, order):
        return Series.constant(1.0, order)


def mate_verify(ms: MateSolution, n=12) -> dict:
    """Max residuals over sample points of every segment.

    dancing: incidence of the dancing condition; involute: x + y' (equals C);
    shared_a1: difference of the projective potentials; parallel_sd: the
    adapted-lift residual; taut_B: |B''' x B| relative; torsion: |J/I^2 + 1|
    of the lifted point curve.
    """
    from .curvature_lab import NullCurve, parallel_sd_residual, q5_curve_from_null
    from .dancing_metric import dancing_residual
    from .projective_curves import centro_affine_torsion, involute_defect, shared_potential_residual

    rep = {"dancing": 0.0, "involute": 0.0, "shared_a1": 0.0, "parallel_sd": 0.0, "taut_B": 0.0, "torsion": 0.0}
    for seg in ms.segments:
        q, p = seg.q_curve(), seg.p_curve()
        nc = NullCurve(q, p, seg.domain)
        psd = parallel_sd_residual(nc)
        lifted_q, _ = q5_curve_from_null(nc)
        view = NormalFormView(q)
        for u in seg.sample_times(n):
            rep["dancing"] = max(rep["dancing"], dancing_residual(q, p, u))
            rep["involute"] = max(rep["involute"], abs(involute_defect(view, p, u)))
            rep["shared_a1"] = max(rep["shared_a1"], shared_potential_residual(q, p, u))
            try:
                rep["parallel_sd"] = max(rep["parallel_sd"], psd(u))
            except GeometryError:
                rep["parallel_sd"] = float("inf")
            B = seg.B_series(u, 3).derivatives()
            rep["taut_B"] = max(rep["taut_B"], float(np.linalg.norm(np.cross(B[3], B[0])) / (np.linalg.norm(B[3]) * np.linalg.norm(B[0]) + 1e-300)))
            try:
                rep["torsion"] = max(rep["torsion"], abs(centro_affine_torsion(lifted_q, u) + 1.0))
            except GeometryError:
                rep["torsion"] = float("inf")
    return rep
