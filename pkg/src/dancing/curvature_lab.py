"""Curvature of the point-line metric, null frames, and adapted lifts.

Christoffel symbols and the Riemann tensor come from central differences of
the rational chart metric (step 1e-4, one Richardson level). Everything is
then rewritten in the null coframe (eta^1, eta^2, eta_1, eta_2) read off the
Maurer-Cartan form of a group section, where the metric is the constant
matrix ``NULL_FORM`` and the orientation is eta^1 ^ eta^2 ^ eta_1 ^ eta_2.

Conventions: R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj,
Ric_jl = R^i_jil, and the curvature operator on 2-forms is
(R beta)_ab = 1/2 R_ab^cd beta_cd, so a space form of curvature K has
R = K Id and scalar curvature 12 K.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np

from .core_linalg import GeometryError
from .curves import FunctionCurve, PlaneCurve
from .dancing_metric import ChartPoint, M4Point, M4Tangent, chart_tangent, metric_chart, metric_chart_array
from .taylor import Series, cross, dot, matinv

FD_STEP = 1e-4

# eta^1, eta^2, eta_1, eta_2: the metric is eta_1 eta^1 + eta^1 eta_1 + (same for 2)
NULL_FORM = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]], float)

_PAIRS = list(itertools.combinations(range(4), 2))


def _levi_civita4():
    eps = np.zeros((4,) * 4)
    for perm in itertools.permutations(range(4)):
        m = np.eye(4)[list(perm)]
        eps[perm] = np.linalg.det(m)
    return eps


LEVI_CIVITA4 = _levi_civita4()


# Group sections -----------------------------------------------------------

def _completion_axes(q):
    order = np.argsort(np.abs(np.asarray(q, float)))
    return tuple(sorted(order[:2]))


def group_section(q, p, axes=None):
    """g in SL3 whose third column is q and whose inverse has third row p / (pq).

    Accepts arrays or :class:`Series`; ``axes`` fixes the two standard basis
    vectors used for the completion (chosen from the smallest components of
    q when omitted, so nearby points use the same rule).
    """
    series = isinstance(q, Series) or isinstance(p, Series)
    q0 = q.c[0] if isinstance(q, Series) else np.asarray(q, float)
    if axes is None:
        axes = _completion_axes(q0)
    pq = dot(p, q)
    if not series:
        pt = np.asarray(p, float) / pq
        cols = []
        for i in axes:
            e = np.eye(3)[i]
            cols.append(e - pt[i] * np.asarray(q, float))
        g = np.column_stack([cols[0], cols[1], q])
        d = np.linalg.det(g)
        g[:, 1] /= d
        return g
    n = min(x.order for x in (q, p) if isinstance(x, Series))
    q = q if isinstance(q, Series) else Series.constant(q, n)
    p = p if isinstance(p, Series) else Series.constant(p, n)
    pt = p * Series(pq.reciprocal().c[:, None])
    cols = []
    for i in axes:
        e = Series.constant(np.eye(3)[i], n)
        cols.append(e - Series(pt.c[:, i : i + 1]) * q)
    d = dot(cols[0], cross(cols[1], q))
    c1 = cols[1] * Series(d.reciprocal().c[:, None])
    return Series(np.stack([cols[0].c, c1.c, q.c], axis=-1))


def section_at(pt: M4Point):
    q, p = pt.lift()
    return group_section(q, p)


def section_chart(cp: ChartPoint, axes=None):
    return group_section(cp.q_hat, cp.p_hat, axes)


# Coframes -----------------------------------------------------------------

@dataclass
class Frame4:
    base: ChartPoint
    coframe: np.ndarray  # rows eta^1, eta^2, eta_1, eta_2 in chart components (dx, dy, da, db)

    @property
    def frame(self):
        """Columns: the dual frame vectors in chart components."""
        return np.linalg.inv(self.coframe)

    def gram(self):
        """Chart metric induced by 2 eta_a eta^a."""
        return self.coframe.T @ NULL_FORM @ self.coframe

    @property
    def orientation_sign(self) -> int:
        return int(np.sign(np.linalg.det(self.coframe)))


def maurer_cartan_chart(cp: ChartPoint, h=1e-5):
    """g^{-1} dg along the four chart directions (4-point central differences)."""
    x = cp.as_array()
    axes = _completion_axes(cp.q_hat)
    g = section_chart(cp, axes)
    gi = np.linalg.inv(g)
    out = []
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        vals = [section_chart(ChartPoint.from_array(x + m * e), axes) for m in (-2, -1, 1, 2)]
        dg = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        out.append(gi @ dg)
    return np.array(out)


def coframe(cp) -> Frame4:
    if isinstance(cp, M4Point):
        cp = cp.chart()
    try:
        om = maurer_cartan_chart(cp)
    except GeometryError as exc:
        raise GeometryError(f"finite differences left the chart: {exc}") from None
    E = np.array([om[:, 0, 2], om[:, 1, 2], om[:, 2, 0], om[:, 2, 1]])
    return Frame4(cp, E)


def paracomplex_orientation(cp: ChartPoint) -> int:
    """Sign of (v1, v2, w1, w2) against dx^dy^da^db, where v span the point
    factor and w in the line factor satisfy g(v_i, w_j) = delta_ij."""
    G = metric_chart(cp)
    return int(np.sign(np.linalg.det(G[:2, 2:])))


# Curvature ----------------------------------------------------------------

def _metric_derivatives(x, h=FD_STEP):
    """(g, dg[k], ddg[k, l]) by central differences with one Richardson level."""

    def raw(step):
        pts = [x]
        idx = {}
        for k in range(4):
            for s in (-1, 1):
                e = np.zeros(4)
                e[k] = s * step
                idx[(k, s)] = len(pts)
                pts.append(x + e)
        for k, l in itertools.combinations(range(4), 2):
            for s in (-1, 1):
                for t in (-1, 1):
                    e = np.zeros(4)
                    e[k] += s * step
                    e[l] += t * step
                    idx[(k, l, s, t)] = len(pts)
                    pts.append(x + e)
        G = metric_chart_array(np.array(pts))
        g0 = G[0]
        dg = np.zeros((4, 4, 4))
        ddg = np.zeros((4, 4, 4, 4))
        for k in range(4):
            gp, gm = G[idx[(k, 1)]], G[idx[(k, -1)]]
            dg[k] = (gp - gm) / (2 * step)
            ddg[k, k] = (gp - 2 * g0 + gm) / step**2
        for k, l in itertools.combinations(range(4), 2):
            v = (G[idx[(k, l, 1, 1)]] - G[idx[(k, l, 1, -1)]] - G[idx[(k, l, -1, 1)]] + G[idx[(k, l, -1, -1)]]) / (4 * step**2)
            ddg[k, l] = ddg[l, k] = v
        return g0, dg, ddg

    g0, d1, dd1 = raw(h)
    _, d2, dd2 = raw(h / 2)
    return g0, (4 * d2 - d1) / 3, (4 * dd2 - dd1) / 3


def christoffel(x, h=FD_STEP):
    """(g, Gamma[i, j, k], dGamma[m, i, j, k]) at chart coordinates x."""
    g, dg, ddg = _metric_derivatives(np.asarray(x, float), h)
    gi = np.linalg.inv(g)
    # T_ljk = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk); dg[k, a, b] = d_k g_ab
    T = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
    Gam = np.einsum("il,ljk->ijk", gi, T)
    dT = 0.5 * (np.einsum("mjlk->mljk", ddg) + np.einsum("mklj->mljk", ddg) - ddg)
    dgi = -np.einsum("ia,mab,bl->mil", gi, dg, gi)
    dGam = np.einsum("mil,ljk->mijk", dgi, T) + np.einsum("il,mljk->mijk", gi, dT)
    return g, Gam, dGam


def riemann(x, h=FD_STEP):
    """(g, R^i_jkl) in chart coordinates."""
    g, G, dG = christoffel(x, h)
    R = (np.einsum("kilj->ijkl", dG) - np.einsum("likj->ijkl", dG)
         + np.einsum("ikm,mlj->ijkl", G, G) - np.einsum("ilm,mkj->ijkl", G, G))
    return g, R


def _to_frame(R_up, g, F):
    """Lower the first index and express R_abcd in the frame F (columns)."""
    R = np.einsum("ai,ijkl->ajkl", g, R_up)
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", R, F, F, F, F)


def _two_form_index():
    """Basis of 2-forms e^i ^ e^j (i < j) as antisymmetric matrices."""
    B = []
    for i, j in _PAIRS:
        m = np.zeros((4, 4))
        m[i, j], m[j, i] = 1.0, -1.0
        B.append(m)
    return np.array(B)


TWO_FORMS = _two_form_index()


def _vec(beta):
    return np.array([beta[i, j] for i, j in _PAIRS])


def hodge_star(beta, metric=NULL_FORM, orientation=1.0):
    """(*beta)_ab = 1/2 sqrt|g| eps_abcd beta^cd."""
    gi = np.linalg.inv(metric)
    up = gi @ beta @ gi.T
    vol = np.sqrt(abs(np.linalg.det(metric))) * orientation
    return 0.5 * vol * np.einsum("abcd,cd->ab", LEVI_CIVITA4, up)


def star_matrix(metric=NULL_FORM, orientation=1.0):
    return np.array([_vec(hodge_star(b, metric, orientation)) for b in TWO_FORMS]).T


def operator_matrix(Rlow, metric=NULL_FORM):
    """Matrix of beta -> 1/2 R_ab^cd beta_cd on the basis TWO_FORMS."""
    gi = np.linalg.inv(metric)
    Rmix = np.einsum("abef,ec,fd->abcd", Rlow, gi, gi)
    return np.array([_vec(0.5 * np.einsum("abcd,cd->ab", Rmix, b)) for b in TWO_FORMS]).T


def weyl_tensor(Rlow, g):
    n = 4
    gi = np.linalg.inv(g)
    ric = np.einsum("acbd,cd->ab", Rlow, gi)
    s = float(np.einsum("ab,ab->", gi, ric))
    S = ric - s / n * g
    KN = (np.einsum("ac,bd->abcd", S, g) + np.einsum("bd,ac->abcd", S, g)
          - np.einsum("ad,bc->abcd", S, g) - np.einsum("bc,ad->abcd", S, g))
    GG = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    return Rlow - KN / (n - 2) - s / (n * (n - 1)) * GG, ric, s


# Self-dual basis in the null frame: eta_1^eta^1 + eta_2^eta^2, eta^1^eta^2, eta_1^eta_2
def _wedge(i, j):
    m = np.zeros((4, 4))
    m[i, j], m[j, i] = 1.0, -1.0
    return m


SD_BASIS = [_wedge(2, 0) + _wedge(3, 1), _wedge(0, 1), _wedge(2, 3)]
ASD_BASIS = [_wedge(2, 0) - _wedge(3, 1), _wedge(0, 3), _wedge(2, 1)]


def _restrict(op6, basis):
    """Matrix of op on span(basis) (assumed invariant)."""
    B = np.array([_vec(b) for b in basis]).T
    sol, *_ = np.linalg.lstsq(B, op6 @ B, rcond=None)
    return sol


def pfaffian(beta):
    return beta[0, 1] * beta[2, 3] - beta[0, 2] * beta[1, 3] + beta[0, 3] * beta[1, 2]


def petrov_type(M, tol=1e-3) -> str:
    """Type of a traceless 3x3 operator on self-dual 2-forms."""
    scale = np.linalg.norm(M)
    if scale < tol:
        return "O"
    Mn = M / scale
    ev = np.linalg.eigvals(Mn)
    if np.all(np.abs(ev) < tol):
        return "N" if np.linalg.norm(Mn @ Mn) < tol else "III"
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if abs(ev[i] - ev[j]) < tol:
            lam = 0.5 * (ev[i] + ev[j]).real
            s = np.linalg.svd(Mn - lam * np.eye(3), compute_uv=False)
            return "D" if s[1] < tol else "II"
    return "I"


def _plane_distance(U, V):
    """Largest principal-angle sine between column spans."""
    qu, _ = np.linalg.qr(U)
    qv, _ = np.linalg.qr(V)
    s = np.linalg.svd(qu.T @ qv, compute_uv=False)
    return float(np.sqrt(max(0.0, 1 - s.min() ** 2)))


@dataclass
class CurvatureReport:
    scalar: float
    ricci0_norm: float
    weyl_minus_norm: float
    weyl_plus_norm: float
    weyl_plus_eigs: tuple
    petrov: str
    principal_planes: tuple  # two 4x2 bases in chart components
    self_adjoint_defect: float
    metric_parallel_defect: float
    orientation_sign: int

    def eigen_ratios(self):
        """W+ eigenvalues sorted and scaled so the simple one is -2."""
        ev = np.sort(np.real(self.weyl_plus_eigs))
        simple = ev[0] if abs(ev[1] - ev[2]) < abs(ev[0] - ev[1]) else ev[2]
        return tuple(sorted(-2 * ev / simple))

    def to_json(self):
        d = asdict(self)
        d["weyl_plus_eigs"] = [float(np.real(x)) for x in self.weyl_plus_eigs]
        d["principal_planes"] = [np.asarray(p).tolist() for p in self.principal_planes]
        return json.dumps(d, sort_keys=True)


def _principal_planes(Wp, F, tol=1e-6):
    ev, vecs = np.linalg.eig(Wp)
    ev = np.real(ev)
    pairs = [(abs(ev[i] - ev[j]), i, j) for i, j in ((0, 1), (0, 2), (1, 2))]
    _, i, j = min(pairs)
    lam = 0.5 * (ev[i] + ev[j])
    _, s, vt = np.linalg.svd(Wp - lam * np.eye(3))
    span = vt[1:]  # two coefficient vectors spanning the double eigenspace
    b1 = sum(c * b for c, b in zip(span[0], SD_BASIS))
    b2 = sum(c * b for c, b in zip(span[1], SD_BASIS))
    # pf(b1 + s b2) = 0 is quadratic in s
    c0 = pfaffian(b1)
    c2 = pfaffian(b2)
    c1 = pfaffian(b1 + b2) - c0 - c2
    roots = np.roots([c2, c1, c0]) if abs(c2) > tol * (abs(c0) + abs(c1)) else np.array([-c0 / c1])
    planes = []
    for r in np.real(roots):
        beta = b1 + r * b2
        _, sv, vt = np.linalg.svd(beta)
        ker = vt[2:].T  # frame components of the kernel
        planes.append(F @ ker)
    if abs(c2) <= tol * (abs(c0) + abs(c1)):
        beta = b2
        _, sv, vt = np.linalg.svd(beta)
        planes.append(F @ vt[2:].T)
    return tuple(planes)


def curvature_report(cp: ChartPoint, h=FD_STEP) -> CurvatureReport:
    x = cp.as_array()
    g, R = riemann(x, h)
    fr = coframe(cp)
    F = fr.frame
    N = F.T @ g @ F  # should equal NULL_FORM
    Rlow = _to_frame(R, g, F)
    W, ric, s = weyl_tensor(Rlow, N)
    ric0 = ric - s / 4 * N
    Wop = operator_matrix(W, N)
    Rop = operator_matrix(Rlow, N)
    star = star_matrix(N, 1.0)
    Wp = _restrict(Wop @ (np.eye(6) + star) / 2, SD_BASIS)
    Wm = _restrict(Wop @ (np.eye(6) - star) / 2, ASD_BASIS)
    # self-adjointness of R on 2-forms w.r.t. the induced pairing <a, b> = 1/2 a_ab b^ab
    gram2 = np.array([[0.5 * np.einsum("ab,ab->", a, np.linalg.inv(N) @ b @ np.linalg.inv(N).T) for b in TWO_FORMS] for a in TWO_FORMS])
    sa = np.linalg.norm(gram2 @ Rop - (gram2 @ Rop).T) / np.linalg.norm(gram2 @ Rop)
    # metric compatibility of the finite-difference connection: d_k g_ij - G^m_ki g_mj - G^m_kj g_im
    _, dg, _ = _metric_derivatives(x, h)
    _, Gam, _ = christoffel(x, h)
    nab = dg - np.einsum("mki,mj->kij", Gam, g) - np.einsum("mkj,im->kij", Gam, g)
    return CurvatureReport(
        scalar=float(s),
        ricci0_norm=float(np.linalg.norm(ric0)),
        weyl_minus_norm=float(np.linalg.norm(Wm)),
        weyl_plus_norm=float(np.linalg.norm(Wp)),
        weyl_plus_eigs=tuple(np.sort(np.real(np.linalg.eigvals(Wp)))),
        petrov=petrov_type(Wp),
        principal_planes=_principal_planes(Wp, F),
        self_adjoint_defect=float(sa),
        metric_parallel_defect=float(np.abs(nab).max() / np.abs(dg).max()),
        orientation_sign=fr.orientation_sign,
    )


FACTOR_POINT_PLANE = np.array([[1, 0], [0, 1], [0, 0], [0, 0]], float)
FACTOR_LINE_PLANE = np.array([[0, 0], [0, 0], [1, 0], [0, 1]], float)


def principal_plane_defect(report: CurvatureReport) -> float:
    """Distance of the reported principal planes from the two factor planes."""
    a, b = report.principal_planes
    d1 = max(_plane_distance(a, FACTOR_POINT_PLANE), _plane_distance(b, FACTOR_LINE_PLANE))
    d2 = max(_plane_distance(a, FACTOR_LINE_PLANE), _plane_distance(b, FACTOR_POINT_PLANE))
    return min(d1, d2)


def sd_classify(pt, plane, tol=1e-9) -> str:
    """'SD', 'ASD' or 'not-null' for the plane spanned by two tangents."""
    u1, u2 = plane
    cp = pt.chart() if isinstance(pt, M4Point) else pt
    fr = coframe(cp)
    v1 = fr.coframe @ (u1.to_chart() if isinstance(u1, M4Tangent) else np.asarray(u1, float))
    v2 = fr.coframe @ (u2.to_chart() if isinstance(u2, M4Tangent) else np.asarray(u2, float))
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if np.linalg.matrix_rank(np.array([v1, v2]), 1e-12 * max(n1, n2)) < 2:
        raise GeometryError("dependent tangents")
    N = NULL_FORM
    gram = np.array([[v1 @ N @ v1, v1 @ N @ v2], [v2 @ N @ v1, v2 @ N @ v2]])
    if np.abs(gram).max() > tol * n1 * n2:
        return "not-null"
    l1, l2 = N @ v1, N @ v2
    beta = np.outer(l1, l2) - np.outer(l2, l1)
    sb = hodge_star(beta)
    nb = np.linalg.norm(beta)
    if np.linalg.norm(sb - beta) < 1e-8 * nb:
        return "SD"
    if np.linalg.norm(sb + beta) < 1e-8 * nb:
        return "ASD"
    return "not-null"


def is_principal(pt, plane, tol=1e-6) -> bool:
    """beta ^ W beta = 0 for the plane's 2-form (W from the curvature report)."""
    cp = pt.chart() if isinstance(pt, M4Point) else pt
    fr = coframe(cp)
    u1, u2 = plane
    v1 = fr.coframe @ u1.to_chart()
    v2 = fr.coframe @ u2.to_chart()
    l1, l2 = NULL_FORM @ v1, NULL_FORM @ v2
    beta = np.outer(l1, l2) - np.outer(l2, l1)
    x = cp.as_array()
    g, R = riemann(x)
    F = fr.frame
    W, _, _ = weyl_tensor(_to_frame(R, g, F), F.T @ g @ F)
    Wbeta = 0.5 * np.einsum("abcd,cd->ab", np.einsum("abef,ec,fd->abcd", W, NULL_FORM, NULL_FORM), beta)
    wedge = np.einsum("abcd,ab,cd->", LEVI_CIVITA4, beta, Wbeta) / 4
    return abs(wedge) < tol * np.linalg.norm(beta) ** 2 * max(1.0, np.linalg.norm(W))


# Null curves and adapted lifts ---------------------------------------------

class NullCurve:
    """t -> ([q(t)], [p(t)]) given by two lifted curves with exact jets."""

    def __init__(self, q_curve: PlaneCurve, p_curve: PlaneCurve, domain=None):
        self.q_curve = q_curve
        self.p_curve = p_curve
        self.domain = domain if domain is not None else q_curve.domain

    def jets(self, t, order):
        return self.q_curve.series(t, order), self.p_curve.series(t, order)

    def velocity(self, t) -> M4Tangent:
        qs, ps = self.jets(t, 1)
        return M4Tangent(M4Point(qs.c[0], ps.c[0]), qs.c[1], ps.c[1], qs.c[0], ps.c[0])

    def null_defect(self, t) -> float:
        qs, ps = self.jets(t, 1)
        q, dq = qs.c
        p, dp = ps.c
        a, b = np.cross(q, dq), np.cross(p, dp)
        return float(abs(a @ b) / max(np.linalg.norm(a) * np.linalg.norm(b), 1e-300))

    @classmethod
    def from_trajectory(cls, traj):
        return cls(traj.q_curve(), traj.p_curve(), traj.t_span)


@dataclass
class AdaptedLift:
    section: Series  # sigma(t) about t, 3x3
    form: Series  # sigma^{-1} sigma'
    scale: Series  # a(t): the lift is (q~/a, a p~)
    phi: Series  # parallel-SD residual (phi of the adapted form)
    q: Series
    p: Series


def _adapted(curve: NullCurve, t: float, order: int, null_tol=1e-8, degen_tol=1e-10) -> AdaptedLift:
    qs, ps = curve.jets(t, order + 2)
    axes = _completion_axes(qs.c[0] / np.linalg.norm(qs.c[0]))
    s0 = group_section(qs, ps, axes)
    s0i = matinv(s0)
    om = _matmul(s0i.truncate(order + 1), s0.deriv())
    s_col = Series(om.c[:, 0:2, 2])
    s_row = Series(om.c[:, 2, 0:2])
    nr = np.linalg.norm(s_row.c[0])
    nc = np.linalg.norm(s_col.c[0])
    scale = max(np.linalg.norm(om.c[0]), 1e-300)
    if nr < degen_tol * scale or nc < degen_tol * scale:
        raise GeometryError(f"null curve is not non-degenerate at t = {t:.6g}")
    if abs(s_row.c[0] @ s_col.c[0]) > null_tol * nr * nc:
        raise GeometryError(f"adapted gauge equation unsolvable at t = {t:.6g}: velocity is not null")
    rr = (s_row * s_row).sum()
    kappa = (s_row[..., 0] * s_col[..., 1] - s_row[..., 1] * s_col[..., 0]) * rr.reciprocal()
    a = kappa.cbrt()
    ai = a.reciprocal()
    A1 = s_row * Series((ai * rr.reciprocal()).c[:, None])
    A2 = s_col * Series(ai.c[:, None])
    n = om.order
    hc = np.zeros((n + 1, 3, 3))
    hc[:, :2, 0] = A1.c
    hc[:, :2, 1] = A2.c
    hc[:, 2, 2] = ai.c
    h = Series(hc)
    hi = matinv(h)
    sig = _matmul(s0.truncate(n), h)
    form = _matmul(_matmul(hi.truncate(n - 1), om.truncate(n - 1)), h.truncate(n - 1)) + _matmul(hi.truncate(n - 1), h.deriv())
    phi = Series(-form.c[:, 2, 2])
    qt = Series(s0.c[:, :, 2])
    pt = ps.truncate(n) * Series(dot(ps.truncate(n), qs.truncate(n)).reciprocal().c[:, None])
    lq = qt.truncate(n) * Series(ai.c[:, None])
    lp = pt * Series(a.c[:, None])
    return AdaptedLift(sig.truncate(order), form, a.truncate(order), phi, lq.truncate(order), lp.truncate(order))


def _matmul(a: Series, b: Series) -> Series:
    from .taylor import cauchy

    return cauchy(a, b, np.matmul)


def adapted_lift(curve: NullCurve, t: float, order: int = 2) -> AdaptedLift:
    """Adapted lift about t: the pulled-back Maurer-Cartan form has third
    column (0, 1, -phi) and third row (1, 0, -phi)."""
    return _adapted(curve, t, order)


def adapted_pattern_defect(lift: AdaptedLift) -> float:
    f = lift.form.c[0]
    phi = lift.phi.c[0]
    target_col = np.array([0.0, 1.0, -phi])
    target_row = np.array([1.0, 0.0, -phi])
    return float(max(np.abs(f[:, 2] - target_col).max(), np.abs(f[2, :] - target_row).max()))


def parallel_sd_residual(curve: NullCurve):
    """t -> |phi(t)| of the adapted lift."""
    return lambda t: abs(float(adapted_lift(curve, float(t), 1).phi.c[0]))


def lift_to_q5(curve: NullCurve, times=None, tol=1e-7):
    """The unique integral curve of the quadric above a half-geodesic null curve."""
    from .cartan_engel import Q5Trajectory

    lo, hi = curve.domain
    if times is None:
        times = np.linspace(lo, hi, 41)
    times = np.asarray(times, float)
    worst = max(parallel_sd_residual(curve)(t) for t in times)
    if worst > tol:
        raise GeometryError(f"not half-geodesic: parallel-SD residual {worst:.3e}")

    def series_fn(t, order):
        lift = adapted_lift(curve, t, order)
        return lift.q, lift.p

    def velocity_fn(t):
        lift = adapted_lift(curve, t, 1)
        return lift.q.c[0], lift.p.c[0], lift.q.c[1], lift.p.c[1]

    Q, P = [], []
    for t in times:
        lift = adapted_lift(curve, t, 0)
        Q.append(lift.q.c[0])
        P.append(lift.p.c[0])
    return Q5Trajectory(times, np.array(Q), np.array(P), series_fn=series_fn, velocity_fn=velocity_fn)


def rescaled_lift_defect(curve: NullCurve, t: float, mu: float) -> float:
    """Integral-curve defect of (mu q, p / mu) for the adapted lift (q, p)."""
    lift = adapted_lift(curve, t, 1)
    q, dq = mu * lift.q.c[0], mu * lift.q.c[1]
    dp = lift.p.c[1] / mu
    return float(np.linalg.norm(dp - np.cross(q, dq)) / (np.linalg.norm(q) * np.linalg.norm(dq)))


def q5_curve_from_null(curve: NullCurve):
    """(q(t), p(t)) curves of the adapted lift with exact jets."""
    qc = FunctionCurve(lambda t, n: adapted_lift(curve, t, n).q, curve.domain)
    pc = FunctionCurve(lambda t, n: adapted_lift(curve, t, n).p, curve.domain)
    return qc, pc
