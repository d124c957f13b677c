"""Fixed-size linear algebra on R^3 and its dual.

Vectors (points, columns) and covectors (lines, rows) are both plain length-3
``numpy`` arrays; the role is carried by the function that produces them and
by the names :data:`Vec3` and :data:`Covec3`. The two cross products use the
standard volume form on R^3 and its dual, so ``cross_vv`` returns a covector
and ``cross_cc`` returns a vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NewType

import numpy as np
import scipy.linalg

Vec3 = NewType("Vec3", np.ndarray)
Covec3 = NewType("Covec3", np.ndarray)
Mat3 = NewType("Mat3", np.ndarray)

INCIDENCE_TOL = 1e-10
DISTINCT_TOL = 1e-12
RANK_RTOL = 1e-8


class GeometryError(ValueError):
    """Raised when projective input is degenerate or inconsistent."""


def _levi_civita():
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return eps


LEVI_CIVITA = _levi_civita()


def cross_vv(v, w) -> Covec3:
    """vol(v, w, .) as a covector: (v x w)_i = eps_ijk v^j w^k."""
    return Covec3(np.cross(np.asarray(v, float), np.asarray(w, float)))


def cross_cc(p, r) -> Vec3:
    """vol*(p, r, .) as a vector: (p x r)^i = eps^ijk p_j r_k."""
    return Vec3(np.cross(np.asarray(p, float), np.asarray(r, float)))


def pair(p, v) -> float:
    """Natural pairing of a covector with a vector."""
    return float(np.dot(p, v))


def det3(a, b, c) -> float:
    return float(np.dot(a, np.cross(b, c)))


def commutator(a, b):
    return a @ b - b @ a


def mat_exp(y, t: float = 1.0) -> Mat3:
    """exp(t Y) by Pade(13) scaling and squaring."""
    return Mat3(scipy.linalg.expm(t * np.asarray(y, float)))


def rank(vectors, rtol: float = RANK_RTOL) -> int:
    """Numeric rank with singular values below rtol * largest counted as zero."""
    m = np.atleast_2d(np.asarray(vectors, float))
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def random_sl3(rng, scale: float = 1.0):
    """A random unimodular matrix (LU-free: rescale a Gaussian matrix)."""
    while True:
        g = np.eye(3) + scale * rng.standard_normal((3, 3))
        d = np.linalg.det(g)
        if abs(d) > 1e-2:
            g = g / np.cbrt(d)
            return g


def _canonical(v):
    v = np.asarray(v, float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise GeometryError("zero vector has no projective class")
    u = v / n
    for x in u:
        if abs(x) > 1e-14:
            return u if x > 0 else -u
    return u


def proj_distance(a, b) -> float:
    """Sine of the angle between two projective representatives."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(np.linalg.norm(np.cross(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of RP^2 stored by its unit representative."""

    rep: np.ndarray

    def __init__(self, v):
        object.__setattr__(self, "rep", _canonical(v))
        self.rep.setflags(write=False)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and proj_distance(self.rep, other.rep) < 1e-12

    def __hash__(self):
        return hash(tuple(np.round(self.rep, 10)))

    def on(self, line: "ProjLine", tol: float = INCIDENCE_TOL) -> bool:
        return abs(float(np.dot(line.rep, self.rep))) < tol


@dataclass(frozen=True, eq=False)
class ProjLine:
    """A line of RP^2 (a point of the dual plane) stored by a unit covector."""

    rep: np.ndarray

    def __init__(self, p):
        object.__setattr__(self, "rep", _canonical(p))
        self.rep.setflags(write=False)

    def __eq__(self, other):
        return isinstance(other, ProjLine) and proj_distance(self.rep, other.rep) < 1e-12

    def __hash__(self):
        return hash(tuple(np.round(self.rep, 10)))

    @classmethod
    def through(cls, a: ProjPoint, b: ProjPoint) -> "ProjLine":
        return cls(cross_vv(a.rep, b.rep))

    def meet(self, other: "ProjLine") -> ProjPoint:
        return ProjPoint(cross_cc(self.rep, other.rep))


@dataclass(frozen=True)
class Quadruple:
    """Four distinct collinear points."""

    points: tuple

    def __init__(self, a1, a2, a3, a4):
        pts = tuple(p if isinstance(p, ProjPoint) else ProjPoint(p) for p in (a1, a2, a3, a4))
        reps = np.array([p.rep for p in pts])
        for i in range(4):
            for j in range(i + 1, 4):
                if proj_distance(reps[i], reps[j]) < DISTINCT_TOL:
                    raise GeometryError("degenerate quadruple")
        _, _, vt = np.linalg.svd(reps)
        line = vt[-1]
        if np.max(np.abs(reps @ line)) > INCIDENCE_TOL:
            raise GeometryError("not collinear")
        object.__setattr__(self, "points", pts)

    @property
    def line(self) -> ProjLine:
        reps = np.array([p.rep for p in self.points])
        return ProjLine(np.linalg.svd(reps)[2][-1])


def cross_ratio(qd: Quadruple) -> float:
    """[a1, a2, a3, a4] = (x1 - x3)/(x1 - x4) * (x4 - x2)/(x3 - x2).

    Computed without a chart: write a3 = al1 a1 + al2 a2 and
    a4 = be1 a1 + be2 a2, then the value is be1 al2 / (al1 be2).
    """
    a1, a2, a3, a4 = (p.rep for p in qd.points)
    basis = np.column_stack([a1, a2])
    (al1, al2), *_ = np.linalg.lstsq(basis, a3, rcond=None)
    (be1, be2), *_ = np.linalg.lstsq(basis, a4, rcond=None)
    return float(be1 * al2 / (al1 * be2))
