"""Split octonions as Zorn vector matrices and the derivation algebra g2.

An octonion is a 2x2 array ``(x, q; p, y)`` with scalar diagonal, a vector
``q`` and a covector ``p``. Multiplication uses Zorn's original sign
convention (``p x p'`` in the upper right, ``q x q'`` in the lower left);
conventions that negate ``p`` describe the same algebra.

Derivations are parametrized by ``(A, b, c)`` with ``A`` trace-free. On the
imaginary part, in the ordered basis ``(q, p, x)``, a derivation acts by the
7x7 matrix returned by :func:`rho_matrix`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_linalg import RANK_RTOL, cross_cc, cross_vv

SL3_TRACE_TOL = 1e-12
IMAGE_TOL = 1e-8


class NotInImageError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ZornOctonion:
    x: float
    q: np.ndarray
    p: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "q", np.asarray(self.q, float).reshape(3))
        object.__setattr__(self, "p", np.asarray(self.p, float).reshape(3))

    @classmethod
    def unit(cls):
        return cls(1.0, np.zeros(3), np.zeros(3), 1.0)

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, float)
        return cls(a[0], a[1:4], a[4:7], a[7])

    def to_array(self):
        return np.concatenate([[self.x], self.q, self.p, [self.y]])

    def __add__(self, other):
        return ZornOctonion.from_array(self.to_array() + other.to_array())

    def __sub__(self, other):
        return ZornOctonion.from_array(self.to_array() - other.to_array())

    def scale(self, s):
        return ZornOctonion.from_array(s * self.to_array())

    def __mul__(self, other):
        return zorn_mul(self, other)

    def real_part(self):
        return 0.5 * (self.x + self.y)

    def imaginary(self) -> "ImOctonion":
        h = 0.5 * (self.x - self.y)
        return ImOctonion(h, self.q, self.p)

    def allclose(self, other, atol=1e-12):
        return np.allclose(self.to_array(), other.to_array(), atol=atol, rtol=0)


@dataclass(frozen=True)
class ImOctonion:
    """Imaginary octonion ``(x, q; p, -x)``."""

    x: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "q", np.asarray(self.q, float).reshape(3))
        object.__setattr__(self, "p", np.asarray(self.p, float).reshape(3))

    def as_zorn(self) -> ZornOctonion:
        return ZornOctonion(self.x, self.q, self.p, -self.x)

    def to_vector(self):
        """Coordinates in the ordered basis (q, p, x)."""
        return np.concatenate([self.q, self.p, [self.x]])

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, float)
        return cls(v[6], v[:3], v[3:6])

    def quadratic_form(self):
        """x^2 - pq; null imaginary octonions form the cone x^2 = pq."""
        return self.x ** 2 - float(self.p @ self.q)


@dataclass(frozen=True)
class G2Param:
    A: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    c: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        A = np.asarray(self.A, float).reshape(3, 3)
        if abs(np.trace(A)) > SL3_TRACE_TOL * max(1.0, np.abs(A).max()):
            raise ValueError("A must be trace-free")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", np.asarray(self.b, float).reshape(3))
        object.__setattr__(self, "c", np.asarray(self.c, float).reshape(3))

    @classmethod
    def zero(cls):
        return cls(np.zeros((3, 3)))

    def to_vector(self):
        return np.concatenate([self.A.ravel(), self.b, self.c])

    def __add__(self, other):
        return G2Param(self.A + other.A, self.b + other.b, self.c + other.c)

    def scale(self, s):
        return G2Param(s * self.A, s * self.b, s * self.c)


def zorn_mul(z1: ZornOctonion, z2: ZornOctonion) -> ZornOctonion:
    x, q, p, y = z1.x, z1.q, z1.p, z1.y
    x2, q2, p2, y2 = z2.x, z2.q, z2.p, z2.y
    return ZornOctonion(
        x * x2 - p2 @ q,
        x * q2 + y2 * q + cross_cc(p, p2),
        x2 * p + y * p2 + cross_vv(q, q2),
        y * y2 - p @ q2,
    )


def zorn_conj(z: ZornOctonion) -> ZornOctonion:
    return ZornOctonion(z.y, -z.q, -z.p, z.x)


def zorn_norm(z: ZornOctonion) -> float:
    return z.x * z.y + float(z.p @ z.q)


def act_sl3(g, z: ZornOctonion) -> ZornOctonion:
    """The embedding SL3 -> Aut: (x, q; p, y) -> (x, gq; p g^-1, y)."""
    return ZornOctonion(z.x, g @ z.q, z.p @ np.linalg.inv(g), z.y)


def derivation_apply(g: G2Param, z: ZornOctonion) -> ZornOctonion:
    A, b, c = g.A, g.b, g.c
    x, q, p, y = z.x, z.q, z.p, z.y
    d = float(p @ b + c @ q)
    return ZornOctonion(
        d,
        A @ q + (x - y) * b + cross_cc(p, c),
        -p @ A + cross_vv(b, q) + (x - y) * c,
        -d,
    )


def _cross_matrix(w):
    """Matrix M with M @ v = w x v."""
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def rho_matrix(g: G2Param) -> np.ndarray:
    """7x7 matrix of the derivation on Im in the basis (q, p, x)."""
    m = np.zeros((7, 7))
    m[:3, :3] = g.A
    m[:3, 3:6] = -_cross_matrix(g.c)  # p -> p x c
    m[:3, 6] = 2 * g.b
    m[3:6, :3] = _cross_matrix(g.b)  # q -> b x q
    m[3:6, 3:6] = -g.A.T
    m[3:6, 6] = 2 * g.c
    m[6, :3] = g.c
    m[6, 3:6] = g.b
    return m


IM_FORM = np.block(
    [
        [np.zeros((3, 3)), -0.5 * np.eye(3), np.zeros((3, 1))],
        [-0.5 * np.eye(3), np.zeros((3, 3)), np.zeros((3, 1))],
        [np.zeros((1, 3)), np.zeros((1, 3)), np.ones((1, 1))],
    ]
)
"""Gram matrix of x^2 - pq on Im in the basis (q, p, x)."""


def decompose_rho(m: np.ndarray):
    """Read (A, b, c) back from a 7x7 matrix; return (param, residual)."""
    A = m[:3, :3].copy()
    A -= np.trace(A) / 3.0 * np.eye(3)
    g = G2Param(A, 0.5 * m[:3, 6], 0.5 * m[3:6, 6])
    resid = float(np.abs(rho_matrix(g) - m).max())
    return g, resid


def g2_bracket(g1: G2Param, g2: G2Param) -> G2Param:
    r1, r2 = rho_matrix(g1), rho_matrix(g2)
    comm = r1 @ r2 - r2 @ r1
    g, resid = decompose_rho(comm)
    scale = max(1.0, np.abs(comm).max())
    if resid > IMAGE_TOL * scale:
        raise NotInImageError(f"not in image (residual {resid:.3e})")
    return g


def g2_basis():
    """A basis of the 14-dimensional parameter space: sl3, then b, then c."""
    out = []
    for i in range(3):
        for j in range(3):
            if i != j:
                A = np.zeros((3, 3))
                A[i, j] = 1.0
                out.append(G2Param(A))
    out.append(G2Param(np.diag([1.0, -1.0, 0.0])))
    out.append(G2Param(np.diag([0.0, 1.0, -1.0])))
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        out.append(G2Param(np.zeros((3, 3)), b=e))
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        out.append(G2Param(np.zeros((3, 3)), c=e))
    return out


def random_g2(rng, scale=1.0):
    A = scale * rng.standard_normal((3, 3))
    A -= np.trace(A) / 3 * np.eye(3)
    return G2Param(A, scale * rng.standard_normal(3), scale * rng.standard_normal(3))


def span_dimension(params, rtol=RANK_RTOL) -> int:
    """Dimension of the span of derivations, measured on their 7x7 matrices."""
    mats = np.array([rho_matrix(g).ravel() for g in params])
    s = np.linalg.svd(mats, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0


def omega_at(z: ImOctonion, dz: ImOctonion) -> ZornOctonion:
    """The octonion-valued one-form zeta * d(zeta) evaluated on dz at z."""
    return zorn_mul(z.as_zorn(), dz.as_zorn())


def omega_components(z: ImOctonion, dz: ImOctonion) -> ZornOctonion:
    """Explicit component formula for zeta * d(zeta), used as a cross-check."""
    x, q, p = z.x, z.q, z.p
    dx, dq, dp = dz.x, dz.q, dz.p
    return ZornOctonion(
        x * dx - float(q @ dp),
        x * dq - q * dx + cross_cc(p, dp),
        p * dx - x * dp + cross_vv(q, dq),
        x * dx - float(p @ dq),
    )


def omega_matrix(z: ImOctonion) -> np.ndarray:
    """8x7 matrix of dz -> Omega(dz), columns in the basis (q, p, x)."""
    cols = []
    for k in range(7):
        e = np.zeros(7)
        e[k] = 1.0
        cols.append(omega_at(z, ImOctonion.from_vector(e)).to_array())
    return np.column_stack(cols)


def omega_kernel_rank(z: ImOctonion, rtol=RANK_RTOL) -> int:
    s = np.linalg.svd(omega_matrix(z), compute_uv=False)
    return 7 - int(np.sum(s > rtol * s[0]))


def iota(q, p) -> ImOctonion:
    """Embedding of the quadric pq = 1 into the null cone, x = 1."""
    return ImOctonion(1.0, q, p)


def iota_pullback(q, p, dq, dp) -> ZornOctonion:
    """Components of the pulled-back form on a tangent (dq, dp) at (q, p)."""
    return ZornOctonion(
        -float(q @ dp),
        np.asarray(dq, float) + cross_cc(p, dp),
        -np.asarray(dp, float) + cross_vv(q, dq),
        -float(p @ dq),
    )


def iota_pullback_check(pt, v) -> float:
    """Norm of the pulled-back form on tangent ``v`` at ``pt``.

    ``pt`` has attributes ``q, p``; ``v`` has ``dq, dp``. Zero exactly on
    the rank-2 distribution.
    """
    w = iota_pullback(pt.q, pt.p, v.dq, v.dp)
    return float(np.linalg.norm(w.to_array()))


def random_cone_point(rng) -> ImOctonion:
    """A random nonzero imaginary octonion with x^2 = pq."""
    while True:
        q = rng.standard_normal(3)
        p = rng.standard_normal(3)
        s = float(p @ q)
        if s > 0.1:
            return ImOctonion(np.sqrt(s) * (1 if rng.random() < 0.5 else -1), q, p)
