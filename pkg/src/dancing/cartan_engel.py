"""The quadric pq = 1 in R^3 x R^3*, its rank-2 distribution and symmetries.

Points are pairs ``(q, p)`` of a vector and a covector with ``pq = 1``. The
distribution is the kernel of ``dp - q x dq`` (equivalently of
``dq + p x dp``); its integral curves solve ``p' = q x q'``.

Frame fields ``F_w(q, p) = (p x w, q x (p x w))`` are polynomial on all of
R^6 and tangent to every level set of ``pq``, so brackets taken in R^6 and
evaluated on the quadric are the intrinsic ones. Brackets use
``[X, Y] = X(Y) - Y(X)``; with this convention the map from derivation
parameters to symmetry fields reverses brackets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import DOP853

from .core_linalg import RANK_RTOL, cross_cc, cross_vv, mat_exp
from .curves import FunctionCurve
from .polyfields import Poly, VectorField, bracket_at, lie_bracket, poly_cross, poly_dot
from .split_octonions import G2Param, g2_basis, g2_bracket
from .taylor import Series

Q5_TOL = 1e-10


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Q5Point:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, float).reshape(3)
        p = np.asarray(self.p, float).reshape(3)
        if not abs(float(p @ q) - 1.0) < Q5_TOL:
            raise ValueError(f"not on the quadric: pq - 1 = {float(p @ q) - 1.0:.3e}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @classmethod
    def normalized(cls, q, p):
        """Rescale p so that pq = 1."""
        q = np.asarray(q, float)
        p = np.asarray(p, float)
        return cls(q, p / float(p @ q))

    @classmethod
    def base(cls):
        return cls(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0]))

    def as_vector(self):
        return np.concatenate([self.q, self.p])

    def fiber(self, lam):
        """The R* action (q, p) -> (lam q, p / lam)."""
        return Q5Point(lam * self.q, self.p / lam)

    def act(self, g):
        return Q5Point(g @ self.q, self.p @ np.linalg.inv(g))


@dataclass(frozen=True)
class Q5Tangent:
    base: Q5Point
    dq: np.ndarray
    dp: np.ndarray

    def __post_init__(self):
        dq = np.asarray(self.dq, float).reshape(3)
        dp = np.asarray(self.dp, float).reshape(3)
        scale = 1.0 + np.linalg.norm(dq) * np.linalg.norm(self.base.p) + np.linalg.norm(dp) * np.linalg.norm(self.base.q)
        if abs(float(dp @ self.base.q + self.base.p @ dq)) > Q5_TOL * scale:
            raise ValueError("vector is not tangent to the quadric")
        object.__setattr__(self, "dq", dq)
        object.__setattr__(self, "dp", dp)

    @property
    def q(self):
        return self.base.q

    @property
    def p(self):
        return self.base.p

    def as_vector(self):
        return np.concatenate([self.dq, self.dp])


def random_q5_point(rng, spread=1.0) -> Q5Point:
    while True:
        q = spread * rng.standard_normal(3)
        p = spread * rng.standard_normal(3)
        s = float(p @ q)
        if abs(s) > 0.3 * np.linalg.norm(p) * np.linalg.norm(q):
            return Q5Point.normalized(q, p)


def omega(pt: Q5Point, v) -> np.ndarray:
    """The covector-valued form dp - q x dq on v."""
    return np.asarray(v.dp) - cross_vv(pt.q, v.dq)


def omega_dual(pt: Q5Point, v) -> np.ndarray:
    """The vector-valued form dq + p x dp on v."""
    return np.asarray(v.dq) + cross_cc(pt.p, v.dp)


def _frame_choice(p):
    """Pick the two basis covectors w for which the vectors p x w are most independent."""
    e = np.eye(3)
    vs = [np.cross(p, e[i]) for i in range(3)]
    best, pick = -1.0, (0, 1)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        s = np.linalg.norm(np.cross(vs[i], vs[j]))
        if s > best:
            best, pick = s, (i, j)
    return pick, best


def dist_frame(pt: Q5Point):
    """Two tangents (v, q x v), v = p x w, spanning the distribution."""
    (i, j), size = _frame_choice(pt.p)
    if size < 1e-14:
        raise ArithmeticError("frame degenerate")
    out = []
    for k in (i, j):
        w = np.eye(3)[k]
        v = cross_cc(pt.p, w)
        out.append(Q5Tangent(pt, v, cross_vv(pt.q, v)))
    return tuple(out)


# Polynomial fields ------------------------------------------------------------

def _coords():
    x = [Poly.var(6, i) for i in range(6)]
    return x[:3], x[3:]


@lru_cache(maxsize=None)
def frame_field(k: int) -> VectorField:
    """F_w for w = e^k: dq = p x w, dp = q x (p x w)."""
    q, p = _coords()
    w = [0.0, 0.0, 0.0]
    w[k] = 1.0
    v = poly_cross(p, w)
    return VectorField(v + poly_cross(q, v))


@lru_cache(maxsize=None)
def _frame_brackets(i: int, j: int):
    f1, f2 = frame_field(i), frame_field(j)
    f3 = lie_bracket(f1, f2)
    return f1, f2, f3, lie_bracket(f1, f3), lie_bracket(f2, f3)


def _rank(vectors, rtol=RANK_RTOL):
    s = np.linalg.svd(np.atleast_2d(vectors), compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


def growth_vector(pt: Q5Point, rtol=RANK_RTOL):
    """Ranks of D, D + [D, D], D + [D, [D, D]] at pt."""
    if not isinstance(pt, Q5Point):
        raise TypeError("expected a Q5Point")
    (i, j), _ = _frame_choice(pt.p)
    x = pt.as_vector()
    vals = np.array([f.value(x) for f in _frame_brackets(i, j)])
    return (_rank(vals[:2], rtol), _rank(vals[:3], rtol), _rank(vals, rtol))


def symmetry_vector_field(g: G2Param) -> VectorField:
    """X_g: dq = 2b + Aq + p x c - (pb + cq) q, dp = 2c - pA + b x q - (pb + cq) p."""
    q, p = _coords()
    A, b, c = g.A, g.b, g.c
    s = poly_dot(p, list(b)) + poly_dot(list(c), q)
    Aq = [sum((A[i, j] * q[j] for j in range(3)), Poly.const(6, 0.0)) for i in range(3)]
    pA = [sum((p[i] * A[i, j] for i in range(3)), Poly.const(6, 0.0)) for j in range(3)]
    pc = poly_cross(p, list(c))
    bq = [-x for x in poly_cross(q, list(b))]
    dq = [2 * b[i] + Aq[i] + pc[i] - s * q[i] for i in range(3)]
    dp = [2 * c[i] - pA[i] + bq[i] - s * p[i] for i in range(3)]
    return VectorField(dq + dp)


def symmetry_field(g: G2Param, pt: Q5Point) -> Q5Tangent:
    q, p = pt.q, pt.p
    s = float(p @ g.b + g.c @ q)
    dq = 2 * g.b + g.A @ q + cross_cc(p, g.c) - s * q
    dp = 2 * g.c - p @ g.A + cross_vv(g.b, q) - s * p
    return Q5Tangent(pt, dq, dp)


def default_points(n, seed=20240501):
    rng = np.random.default_rng(seed)
    return [random_q5_point(rng) for _ in range(n)]


def field_symmetry_residual(field: VectorField, points) -> float:
    """Max distance of [X, F_i] from the distribution, over the sample points."""
    worst = 0.0
    for pt in points:
        x = pt.as_vector()
        (i, j), _ = _frame_choice(pt.p)
        frame = [frame_field(i), frame_field(j)]
        basis = np.array([f.value(x) for f in frame]).T
        qmat, _ = np.linalg.qr(basis)
        for f in frame:
            v = bracket_at(field, f, x)
            r = v - qmat @ (qmat.T @ v)
            worst = max(worst, float(np.linalg.norm(r)))
    return worst


def symmetry_residual(g: G2Param, points=None) -> float:
    points = default_points(50) if points is None else points
    return field_symmetry_residual(symmetry_vector_field(g), points)


def algebra_dimension(params=None, points=None, rtol=RANK_RTOL) -> int:
    """Dimension of the span of the fields X_g and their pairwise brackets,
    measured on (value, Jacobian) jets at a few generic points."""
    params = g2_basis() if params is None else list(params)
    points = default_points(3, seed=7) if points is None else points
    fields = [symmetry_vector_field(g) for g in params]
    allf = list(fields)
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            allf.append(lie_bracket(fields[a], fields[b]))
    xs = [pt.as_vector() for pt in points]
    jets = np.array([np.concatenate([f.jet(x) for x in xs]) for f in allf])
    return _rank(jets, rtol)


def bracket_consistency(g1: G2Param, g2: G2Param, points=None) -> float:
    """Jet distance between [X_g1, X_g2] and X_h with h = [g2, g1]."""
    points = default_points(20, seed=11) if points is None else points
    lhs = lie_bracket(symmetry_vector_field(g1), symmetry_vector_field(g2))
    rhs = symmetry_vector_field(g2_bracket(g2, g1))
    return max(float(np.abs(lhs.jet(pt.as_vector()) - rhs.jet(pt.as_vector())).max()) for pt in points)


# Controls ---------------------------------------------------------------------

class TrigControl:
    """u(t) = offset + sum_m a_m cos(w_m t) + b_m sin(w_m t), with exact jets."""

    def __init__(self, offset, freqs, cos_amps, sin_amps):
        self.offset = np.asarray(offset, float)
        self.freqs = np.asarray(freqs, float)
        self.cos_amps = np.asarray(cos_amps, float).reshape(-1, 3)
        self.sin_amps = np.asarray(sin_amps, float).reshape(-1, 3)

    def __call__(self, t):
        ph = self.freqs * t
        return self.offset + np.cos(ph) @ self.cos_amps + np.sin(ph) @ self.sin_amps

    def series(self, t, order):
        from math import factorial

        out = np.zeros((order + 1, 3))
        out[0] += self.offset
        for k in range(order + 1):
            ph = self.freqs * t + k * np.pi / 2
            w = self.freqs ** k / factorial(k)
            out[k] += (w * np.cos(ph)) @ self.cos_amps + (w * np.sin(ph)) @ self.sin_amps
        return Series(out)


def random_control(rng, modes=3, max_freq=2.0, amplitude=0.05) -> TrigControl:
    """Random trigonometric control. Large amplitudes often drive q to
    infinity in finite time, which is a property of the equations."""
    freqs = rng.uniform(0.2, max_freq, modes)
    a = amplitude
    return TrigControl(a * rng.standard_normal(3), freqs, a * rng.standard_normal((modes, 3)),
                       a * rng.standard_normal((modes, 3)))


class OrbitControl:
    """u(t) = Y exp(tY) q0, the velocity of a one-parameter orbit."""

    def __init__(self, Y, q0):
        self.Y = np.asarray(Y, float)
        self.q0 = np.asarray(q0, float)

    def __call__(self, t):
        return self.Y @ mat_exp(self.Y, t) @ self.q0

    def series(self, t, order):
        from math import factorial

        cur = self.Y @ mat_exp(self.Y, t) @ self.q0
        out = np.zeros((order + 1, 3))
        for k in range(order + 1):
            out[k] = cur / factorial(k)
            cur = self.Y @ cur
        return Series(out)


class ZeroControl:
    def __call__(self, t):
        return np.zeros(3)

    def series(self, t, order):
        return Series(np.zeros((order + 1, 3)))


def rhs(t, y, control):
    q, p = y[:3], y[3:]
    u = control(t)
    qd = u - float(p @ u) * q
    return np.concatenate([qd, np.cross(q, qd)])


def solution_series(q0, p0, u: Series, order: int):
    """Taylor jets of the solution through (q0, p0) for control jets u."""
    qc = np.zeros((order + 1, 3))
    pc = np.zeros((order + 1, 3))
    qc[0], pc[0] = q0, p0
    qd = []
    pu = []
    for k in range(order):
        pu.append(sum(pc[i] @ u.c[k - i] for i in range(k + 1)))
        qd_k = u.c[k] - sum(pu[j] * qc[k - j] for j in range(k + 1))
        qd.append(qd_k)
        qc[k + 1] = qd_k / (k + 1)
        pd_k = sum(np.cross(qc[i], qd[k - i]) for i in range(k + 1))
        pc[k + 1] = pd_k / (k + 1)
    return Series(qc), Series(pc)


# Trajectories -----------------------------------------------------------------

class Q5Trajectory:
    """Samples of a curve on the quadric with optional continuous access.

    ``state_fn(t) -> (q, p)`` gives positions, ``series_fn(t, order)`` exact
    jets, and ``velocity_fn(t) -> (q, p, q', p')`` a velocity estimate that
    does not assume the curve solves the equations (used for residuals).
    """

    def __init__(self, t, Q, P, state_fn=None, series_fn=None, velocity_fn=None, control=None,
                 check_times=None, drift=None):
        self.t = np.asarray(t, float)
        self.Q = np.asarray(Q, float)
        self.P = np.asarray(P, float)
        self._state_fn = state_fn
        self._series_fn = series_fn
        self._velocity_fn = velocity_fn
        self.control = control
        self.check_times = self.t if check_times is None else np.asarray(check_times, float)
        self._drift = drift

    @property
    def t_span(self):
        return float(self.t[0]), float(self.t[-1])

    def state(self, t):
        if self._state_fn is not None:
            return self._state_fn(t)
        s = self.series(t, 0)
        return s[0].value, s[1].value

    def series(self, t, order):
        if self._series_fn is None:
            raise NotImplementedError("this trajectory has no jet access")
        return self._series_fn(t, order)

    def velocity(self, t):
        if self._velocity_fn is not None:
            return self._velocity_fn(t)
        qs, ps = self.series(t, 1)
        return qs.c[0], ps.c[0], qs.c[1], ps.c[1]

    def constraint_residual(self) -> float:
        """max |pq - 1| over samples (and pre-projection drift, if recorded)."""
        r = float(np.max(np.abs(np.einsum("ij,ij->i", self.P, self.Q) - 1.0)))
        return max(r, self._drift or 0.0)

    def integral_residual(self, times=None) -> float:
        """max |p' - q x q'| at the check times."""
        times = self.check_times if times is None else times
        worst = 0.0
        for t in times:
            q, p, dq, dp = self.velocity(t)
            worst = max(worst, float(np.linalg.norm(dp - np.cross(q, dq))))
        return worst

    def q_curve(self) -> FunctionCurve:
        return FunctionCurve(lambda t, n: self.series(t, n)[0], self.t_span)

    def p_curve(self) -> FunctionCurve:
        return FunctionCurve(lambda t, n: self.series(t, n)[1], self.t_span)

    def resample(self, times):
        qs, ps = zip(*(self.state(t) for t in times))
        return Q5Trajectory(times, np.array(qs), np.array(ps), self._state_fn, self._series_fn,
                            self._velocity_fn, self.control)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "q1", "q2", "q3", "p1", "p2", "p3"])
            for t, q, p in zip(self.t, self.Q, self.P):
                w.writerow([repr(float(t))] + [repr(float(x)) for x in q] + [repr(float(x)) for x in p])


def _fd_velocity(dense, t, h):
    y = [dense(t + k * h) for k in (-2, -1, 1, 2)]
    return (y[0] - 8 * y[1] + 8 * y[2] - y[3]) / (12 * h)


def integrate(pt0: Q5Point, control, t_span, tol=1e-9, step_tol=1e-13, max_step=np.inf,
              max_steps=100_000, blowup=1e8) -> Q5Trajectory:
    """Integrate q' = u - (p.u) q, p' = q x q' with projection onto pq = 1.

    Uses an embedded Runge-Kutta 8(5,3) pair; after every accepted step p is
    replaced by p / (p.q). Raises :class:`IntegrationError` when the step size
    underflows, the state escapes past ``blowup``, the step budget runs out,
    or the pre-projection drift exceeds ``tol``.
    """
    t0, t1 = map(float, t_span)
    y0 = np.concatenate([pt0.q, pt0.p])
    fun = lambda t, y: rhs(t, y, control)
    ts, ys, segments = [t0], [y0], []
    drift = 0.0
    if t1 != t0:
        solver = DOP853(fun, t0, y0, t1, rtol=step_tol, atol=step_tol, max_step=max_step)
        while solver.status == "running":
            t_old = solver.t
            msg = solver.step()
            if solver.status == "failed":
                raise IntegrationError(f"stiff/singular control: {msg}")
            dense = solver.dense_output()
            y = solver.y.copy()
            q, p = y[:3], y[3:]
            drift = max(drift, abs(float(p @ q) - 1.0))
            if drift > tol or not np.all(np.isfinite(y)) or np.abs(y).max() > blowup:
                raise IntegrationError(f"stiff/singular control: solution escapes near t = {solver.t:.6g}")
            if len(segments) >= max_steps:
                raise IntegrationError(f"stiff/singular control: step budget exhausted at t = {solver.t:.6g}")
            y[3:] = p / float(p @ q)
            solver.y = y
            solver.f = fun(solver.t, y)
            segments.append((t_old, solver.t, dense))
            ts.append(solver.t)
            ys.append(y)
    ts = np.array(ts)
    ys = np.array(ys)
    seg_lo = np.array([min(a, b) for a, b, _ in segments]) if segments else np.zeros(0)

    def locate(t):
        k = int(np.clip(np.searchsorted(seg_lo, t, side="right") - 1, 0, len(segments) - 1))
        return segments[k]

    def state(t):
        if not segments:
            return y0[:3].copy(), y0[3:].copy()
        a, b, dense = locate(t)
        y = dense(t)
        q, p = y[:3], y[3:]
        return q, p / float(p @ q)

    def series_fn(t, order):
        q, p = state(t)
        if hasattr(control, "series"):
            u = control.series(t, max(order - 1, 0))
        elif order <= 1:
            u = Series(np.asarray(control(t), float).reshape(1, 3))
        else:
            raise NotImplementedError("control does not provide derivatives")
        return solution_series(q, p, u, order)

    def velocity_fn(t):
        if not segments:
            q, p = state(t)
            return q, p, np.zeros(3), np.zeros(3)
        a, b, dense = locate(t)
        h = 1e-2 * (b - a)
        tc = min(max(t, a + 2 * abs(h)), b - 2 * abs(h)) if a < b else t
        y = dense(tc)
        dy = _fd_velocity(dense, tc, h)
        return y[:3], y[3:], dy[:3], dy[3:]

    mids = np.array([0.5 * (a + b) for a, b, _ in segments]) if segments else ts
    for a, b, dense in segments:
        m = dense(0.5 * (a + b))
        drift = max(drift, abs(float(m[:3] @ m[3:]) - 1.0))
    traj = Q5Trajectory(ts, ys[:, :3], ys[:, 3:], state, series_fn, velocity_fn, control, mids, drift)
    return traj


def orbit_trajectory(Y, q0, p0, times) -> Q5Trajectory:
    """Closed-form orbit (exp(tY) q0, p0 exp(-tY))."""
    Y = np.asarray(Y, float)
    q0 = np.asarray(q0, float)
    p0 = np.asarray(p0, float)

    def series_fn(t, order):
        from .curves import OrbitCurve

        return OrbitCurve(Y, q0).series(t, order), OrbitCurve(Y, p0, covector=True).series(t, order)

    times = np.asarray(times, float)
    Q = np.array([mat_exp(Y, t) @ q0 for t in times])
    P = np.array([p0 @ mat_exp(Y, -t) for t in times])
    return Q5Trajectory(times, Q, P, series_fn=series_fn)


def horizontality_defect(Y, pt: Q5Point) -> float:
    """How far the infinitesimal action (Yq, -pY) is from the distribution."""
    Y = np.asarray(Y, float)
    dq = Y @ pt.q
    dp = -pt.p @ Y
    return float(np.linalg.norm(np.concatenate([[pt.p @ dq], dp - np.cross(pt.q, dq)])))
