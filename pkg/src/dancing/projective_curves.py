"""Projective differential geometry of locally convex plane curves.

A lift A(t) of a plane curve satisfies A''' + a2 A'' + a1 A' + a0 A = 0 with
coefficients built from I = det(A, A', A''), J = det(A', A'', A''') and
K = det(A, A'', A'''). Rescaling to I = 1 kills a2; a further change of
parameter with Schwarzian a1/4 kills a1, leaving the normal form
A''' + r A = 0. Schwarzians here use the half convention
S(f) = f'''/(2 f') - 3/4 (f''/f')^2.

Projective curvature is calibrated so that for arc length sigma with
d sigma / d tbar = r^(1/3) one has kappa = -2 S(sigma) / (d sigma/d tbar)^2,
which gives 0, b^(-4/3)/2 and -(32 a^2)^(-1/3) on the three families of
orbit curves of constant curvature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .core_linalg import GeometryError
from .curves import FunctionCurve, PlaneCurve
from .taylor import Series, cross, det3, reparametrize

INFLECTION_TOL = 1e-10


@dataclass(frozen=True)
class TautCoeffs:
    a0: float
    a1: float
    a2: float
    I: float
    J: float
    K: float

    def residual(self, derivs) -> float:
        """Relative defect of A''' + a2 A'' + a1 A' + a0 A = 0."""
        A, A1, A2, A3 = derivs[:4]
        r = A3 + self.a2 * A2 + self.a1 * A1 + self.a0 * A
        return float(np.linalg.norm(r) / max(np.linalg.norm(A3), np.linalg.norm(A) * abs(self.a0), 1e-300))


def _check_inflection(I, A, A1, A2, t):
    scale = np.linalg.norm(A) * np.linalg.norm(A1) * np.linalg.norm(A2)
    if abs(I) < INFLECTION_TOL * max(scale, 1e-300):
        raise GeometryError(f"inflection point at t = {t:.6g}")


def taut_coeffs(c: PlaneCurve, t: float) -> TautCoeffs:
    A, A1, A2, A3 = c.derivs(t, 3)
    I = float(np.linalg.det([A, A1, A2]))
    _check_inflection(I, A, A1, A2, t)
    J = float(np.linalg.det([A1, A2, A3]))
    K = float(np.linalg.det([A, A2, A3]))
    dI = float(np.linalg.det([A, A1, A3]))
    return TautCoeffs(-J / I, K / I, -dI / I, I, J, K)


def taut_series(A: Series):
    """(I, J, K, a0, a1, a2) as series; order drops by 3 (by 2 for I)."""
    A1 = A.deriv()
    A2 = A1.deriv()
    A3 = A2.deriv()
    I = det3(A, A1, A2)
    J = det3(A1, A2, A3)
    K = det3(A, A2, A3)
    inv = I.truncate(J.order).reciprocal()
    a2 = -(I.deriv() * inv.truncate(I.order - 1))
    return I, J, K, -(J * inv), K * inv, a2


def unimodular_series(A: Series) -> Series:
    """A I^(-1/3): the rescaling with I = 1 (order drops by 2)."""
    A1 = A.deriv()
    I = det3(A, A1, A1.deriv())
    return A.truncate(I.order) * I.cbrt().reciprocal()


def projective_potential(c: PlaneCurve, t: float, order: int = 0) -> Series:
    """a1 of the I = 1 rescaling, as a series of the given order."""
    A = c.series(t, order + 5)
    if abs(det3(A.c[0], A.c[1], 2 * A.c[2])) < INFLECTION_TOL * np.linalg.norm(A.c[0]) * np.linalg.norm(A.c[1]) * np.linalg.norm(2 * A.c[2]):
        raise GeometryError(f"inflection point at t = {t:.6g}")
    return taut_series(unimodular_series(A))[4]


def schwarzian(f, t: float, h: float = 1e-3) -> float:
    """Half-convention Schwarzian of a scalar function at t.

    ``f`` may expose ``series(t, order)`` for exact jets; a plain callable is
    differentiated with 5-point central differences of step ``h``.
    """
    if hasattr(f, "series"):
        s = f.series(t, 3)
        d1, d2, d3 = (float(np.squeeze(x)) for x in s.derivatives()[1:4])
    else:
        y = np.array([f(t + k * h) for k in (-3, -2, -1, 0, 1, 2, 3)], float)
        d1 = (y[1] - 8 * y[2] + 8 * y[4] - y[5]) / (12 * h)
        d2 = (-y[1] + 16 * y[2] - 30 * y[3] + 16 * y[4] - y[5]) / (12 * h**2)
        d3 = (y[0] - 8 * y[1] + 13 * y[2] - 13 * y[4] + 8 * y[5] - y[6]) / (8 * h**3)
    if d1 == 0.0:
        raise ZeroDivisionError("f' vanishes")
    return 0.5 * d3 / d1 - 0.75 * (d2 / d1) ** 2


def schwarzian_series(f: Series) -> Series:
    d1 = f.deriv()
    d2 = d1.deriv()
    d3 = d2.deriv()
    inv = d1.truncate(d3.order).reciprocal()
    ratio = d2.truncate(d3.order) * inv
    return 0.5 * (d3 * inv) - 0.75 * (ratio * ratio)


class LFCurve(PlaneCurve):
    """Normal form Abar(tbar) = f'(t) A(t) I(t)^(-1/3) with Abar''' + r Abar = 0.

    ``f = u1 / u2`` for solutions of u'' + (a1 / 4) u = 0 with Wronskian 1,
    where a1 belongs to the I = 1 rescaling. The solution pair is rotated
    so that u2 stays away from zero on the window; if no rotation does,
    the window must be split.
    """

    def __init__(self, base: PlaneCurve, t0: float, t1: float, rtol: float = 1e-12, grid: int = 400):
        if not t1 > t0:
            raise ValueError("need t0 < t1")
        self.base = base
        self.window = (float(t0), float(t1))
        ts = np.linspace(t0, t1, grid)
        for t in ts[:: max(1, grid // 40)]:
            taut_coeffs(base, float(t))

        def rhs(t, y):
            a1 = float(projective_potential(base, t, 0).c[0])
            return [y[1], -0.25 * a1 * y[0], y[3], -0.25 * a1 * y[2]]

        sol = solve_ivp(rhs, self.window, [0.0, 1.0, 1.0, 0.0], method="DOP853", rtol=rtol, atol=rtol,
                        dense_output=True)
        if not sol.success:
            raise GeometryError(f"normalization ODE failed: {sol.message}")
        Y = sol.sol(ts)
        best, theta = -1.0, 0.0
        for th in np.linspace(0.0, np.pi, 181, endpoint=False):
            v = np.cos(th) * Y[2] + np.sin(th) * Y[0]
            m = np.min(np.abs(v)) / np.max(np.abs(v))
            if m > best:
                best, theta = m, th
        if best < 1e-3:
            raise GeometryError("projective parameter leaves the chart; split the window")
        c, s = np.cos(theta), np.sin(theta)
        # (u1, u2) -> (c u1 - s u2, s u1 + c u2) keeps the Wronskian
        self._rot = np.array([[c, -s], [s, c]])
        self._sol = sol
        self.domain = (self.param(t0), self.param(t1))

    def _u(self, t):
        y = self._sol.sol(t)
        u = self._rot @ np.array([y[0], y[2]])
        du = self._rot @ np.array([y[1], y[3]])
        return u, du

    def param(self, t: float) -> float:
        """tbar = f(t)."""
        u, _ = self._u(t)
        return float(u[0] / u[1])

    def inverse(self, tbar: float) -> float:
        lo, hi = self.window
        flo, fhi = self.param(lo) - tbar, self.param(hi) - tbar
        if abs(flo) < 1e-15:
            return lo
        if abs(fhi) < 1e-15:
            return hi
        if flo * fhi > 0:
            raise ValueError(f"tbar = {tbar:.6g} outside the normalized window")
        return brentq(lambda s: self.param(s) - tbar, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)

    def speed_series(self, t: float, order: int) -> Series:
        """f'(t) = 1 / u2^2 as a series in t."""
        a1 = projective_potential(self.base, t, max(order - 2, 0))
        u, du = self._u(t)
        c = np.zeros((order + 1,))
        c[0] = u[1]
        if order >= 1:
            c[1] = du[1]
        for k in range(order - 1):
            acc = sum(a1.c[j] * c[k - j] for j in range(k + 1))
            c[k + 2] = -0.25 * acc / ((k + 1) * (k + 2))
        u2 = Series(c)
        return (u2 * u2).reciprocal()

    def lift_series(self, t: float, order: int) -> Series:
        """Series in tbar of Abar about the point with original parameter t."""
        Ahat = unimodular_series(self.base.series(t, order + 2))
        speed = self.speed_series(t, order)
        return reparametrize(Ahat * speed, speed)

    def series(self, tbar, order):
        return self.lift_series(self.inverse(tbar), order)

    def r_series(self, t: float, order: int = 0) -> Series:
        """r = -J(Abar) as a series in tbar."""
        Ab = self.lift_series(t, order + 3)
        return -taut_series(Ab)[1]

    def r(self, t: float) -> float:
        return float(self.r_series(t, 0).c[0])

    def certificate(self, n: int = 40):
        """(max |Abar''' + r Abar| / (|Abar'''| + |Abar|), max |I - 1|, max |a2|) on a grid."""
        worst = [0.0, 0.0, 0.0]
        for t in np.linspace(*self.window, n):
            d = self.lift_series(float(t), 4).derivatives()
            I, J, K, a0, a1, a2 = taut_series(self.lift_series(float(t), 4))
            r = -float(J.c[0])
            res = np.linalg.norm(d[3] + r * d[0]) / (np.linalg.norm(d[3]) + np.linalg.norm(d[0]))
            worst = [max(worst[0], float(res)), max(worst[1], abs(float(I.c[0]) - 1)), max(worst[2], abs(float(a2.c[0])))]
        return tuple(worst)


class LocalLF:
    """Normal form about a single point t0, from the series solution of
    u'' + (a1/4) u = 0 with u1 = 0, u1' = 1, u2 = 1, u2' = 0 at t0 (so
    tbar = t0 + (t - t0) + ...). Only jets at t0 are available."""

    def __init__(self, base: PlaneCurve, t0: float):
        self.base = base
        self.t0 = float(t0)

    def _check(self, t):
        if t != self.t0:
            raise ValueError("LocalLF only provides jets at its center")

    def speed_series(self, t: float, order: int) -> Series:
        self._check(t)
        a1 = projective_potential(self.base, t, max(order - 2, 0))
        c = np.zeros(order + 1)
        c[0] = 1.0
        for k in range(order - 1):
            acc = sum(a1.c[j] * c[k - j] for j in range(k + 1))
            c[k + 2] = -0.25 * acc / ((k + 1) * (k + 2))
        u2 = Series(c)
        return (u2 * u2).reciprocal()

    def lift_series(self, t: float, order: int) -> Series:
        Ahat = unimodular_series(self.base.series(t, order + 2))
        speed = self.speed_series(t, order)
        return reparametrize(Ahat * speed, speed)

    def r_series(self, t: float, order: int = 0) -> Series:
        return -taut_series(self.lift_series(t, order + 3))[1]


def lf_normalize(c: PlaneCurve, t0: float, t1: float, **kw) -> LFCurve:
    return LFCurve(c, t0, t1, **kw)


def proj_arclength(lf: LFCurve):
    """Density d sigma / d tbar = r^(1/3) (real, sign-preserving), as a function
    of the original parameter."""
    return lambda t: float(np.cbrt(lf.r(t)))


def proj_curvature(lf: LFCurve, t: float, tol: float = 1e-10) -> float:
    rs = lf.r_series(t, 2)
    if abs(rs.c[0]) < tol:
        raise GeometryError(f"sextactic point at t = {t:.6g}: projective curvature undefined")
    rho = rs.cbrt()
    d1 = rho.deriv()
    d2 = d1.deriv()
    r0, r1, r2 = float(rho.c[0]), float(d1.c[0]), float(d2.c[0])
    s_half = 0.5 * r2 / r0 - 0.75 * (r1 / r0) ** 2
    return -2.0 * s_half / r0**2


def centro_affine_torsion(c: PlaneCurve, t: float) -> float:
    """J / I^2 with J = det(A', A'', A''')."""
    tc = taut_coeffs(c, t)
    return tc.J / tc.I**2


def frame_dual(c: PlaneCurve, t: float) -> np.ndarray:
    """The covector p with pA = 1, pA' = 0, pA'' = 0."""
    A, A1, A2 = c.derivs(t, 2)
    M = np.array([A, A1, A2])
    if abs(np.linalg.det(M)) < INFLECTION_TOL * np.prod(np.linalg.norm(M, axis=1)):
        raise GeometryError(f"singular frame at t = {t:.6g}")
    return np.linalg.solve(M, np.array([1.0, 0.0, 0.0]))


def frame_dual_curve(c: PlaneCurve) -> FunctionCurve:
    """t -> (A' x A'') / I as a curve with exact jets."""

    def fn(t, order):
        A = c.series(t, order + 2)
        A1 = A.deriv()
        A2 = A1.deriv()
        return cross(A1, A2) * det3(A.truncate(order), A1.truncate(order), A2).reciprocal()

    return FunctionCurve(fn, c.domain)


def _frame_dets(s: Series):
    d = s.derivatives()
    I = np.linalg.det([d[0], d[1], d[2]])
    J = np.linalg.det([d[1], d[2], d[3]])
    K = np.linalg.det([d[0], d[2], d[3]])
    dI = np.linalg.det([d[0], d[1], d[3]])
    return d, I, J, K, dI


def mucho_check(sol, times=None) -> dict:
    """Residuals of the identities satisfied by q and p along an integral curve.

    Items: 1 orthogonality relations; 2 I p = q' x q'' and Ibar q = p' x p'';
    3 q' = -p x p'; 4 I^2 + J = Ibar^2 - Jbar = 0; 5 Ibar = I, Jbar = -J,
    Kbar = K; 6 abar0 = -a0, abar1 = a1, abar2 = a2.
    Relations are normalized by the sizes of the quantities involved.
    """
    if times is None:
        lo, hi = sol.t_span
        times = np.linspace(lo, hi, 25)[1:-1]
    out = {f"item{k}": 0.0 for k in range(1, 7)}
    for t in times:
        qs, ps = sol.series(float(t), 3)
        dq, I, J, K, dI = _frame_dets(qs)
        dp, Ib, Jb, Kb, dIb = _frame_dets(ps)
        if abs(I) < INFLECTION_TOL or abs(Ib) < INFLECTION_TOL:
            raise GeometryError(f"degenerate trajectory at t = {t:.6g}")
        nq = [np.linalg.norm(x) for x in dq]
        npp = [np.linalg.norm(x) for x in dp]
        item1 = max(abs(dp[1] @ dq[0]) / (npp[1] * nq[0]), abs(dp[0] @ dq[1]) / (npp[0] * nq[1]),
                    abs(dp[1] @ dq[1]) / (npp[1] * nq[1]), abs(dp[0] @ dq[2]) / (npp[0] * nq[2]),
                    abs(dp[2] @ dq[0]) / (npp[2] * nq[0]))
        item2 = max(np.linalg.norm(I * dp[0] - np.cross(dq[1], dq[2])) / (nq[1] * nq[2]),
                    np.linalg.norm(Ib * dq[0] - np.cross(dp[1], dp[2])) / (npp[1] * npp[2]))
        item3 = np.linalg.norm(dq[1] + np.cross(dp[0], dp[1])) / max(nq[1], npp[0] * npp[1])
        item4 = max(abs(I**2 + J), abs(Ib**2 - Jb)) / max(I**2, abs(J), Ib**2, abs(Jb))
        item5 = max(abs(Ib - I) / abs(I), abs(Jb + J) / max(abs(J), I**2), abs(Kb - K) / max(abs(K), abs(I)))
        a = np.array([-J / I, K / I, -dI / I])
        ab = np.array([-Jb / Ib, Kb / Ib, -dIb / Ib])
        scale = max(1.0, np.abs(a).max())
        item6 = max(abs(ab[0] + a[0]), abs(ab[1] - a[1]), abs(ab[2] - a[2])) / scale
        for k, v in enumerate((item1, item2, item3, item4, item5, item6), 1):
            out[f"item{k}"] = max(out[f"item{k}"], float(v))
    out["max"] = max(out.values())
    return out


def shared_potential_residual(q_curve: PlaneCurve, p_curve: PlaneCurve, t: float) -> float:
    """|a1(q) - a1(p)| after rescaling each member to I = 1 in the common parameter."""
    a = float(projective_potential(q_curve, t).c[0])
    b = float(projective_potential(p_curve, t).c[0])
    return abs(a - b) / max(1.0, abs(a))


def involute_coefficients(lf: LFCurve, p_curve: PlaneCurve, t: float, order: int = 1):
    """Write the turning point B of p, rescaled to I(B) = 1 in tbar, as
    B = x Abar + y Abar' + z Abar''; returns series (x, y, z) in tbar."""
    Ab = lf.lift_series(t, order + 2)
    speed = lf.speed_series(t, order + 3)
    P = reparametrize(p_curve.series(t, order + 4), speed)
    B = cross(P, P.deriv())
    Bh = unimodular_series(B)
    A1 = Ab.deriv()
    A2 = A1.deriv()
    n = Bh.order
    Ab, A1, A2 = Ab.truncate(n), A1.truncate(n), A2.truncate(n)
    return det3(Bh, A1, A2), det3(Ab, Bh, A2), det3(Ab, A1, Bh)


def involute_defect(lf: LFCurve, p_curve: PlaneCurve, t: float) -> float:
    """x + y' for the decomposition of :func:`involute_coefficients`; zero
    exactly for dancing mates, equal to the involute constant otherwise."""
    x, y, z = involute_coefficients(lf, p_curve, t, 1)
    return float(x.c[0] + y.c[1])
