import numpy as np
import pytest
from scipy.linalg import expm, null_space

from dancing import cartan_engel as ce
from dancing.core_linalg import GeometryError, proj_distance
from dancing.curvature_lab import (ASD_BASIS, NULL_FORM, SD_BASIS, NullCurve, adapted_lift, adapted_pattern_defect,
                                   coframe, curvature_report, group_section, hodge_star, is_principal, lift_to_q5,
                                   paracomplex_orientation, parallel_sd_residual, principal_plane_defect,
                                   rescaled_lift_defect, section_chart, star_matrix, sd_classify)
from dancing.curves import DualCurve, ReparametrizedCurve, TrigCurve, circle
from dancing.dancing_mates import wcurve_make, wcurve_pair
from dancing.dancing_metric import ChartPoint, M4Point, chart_tangent, contact_psi, metric_chart
from dancing.taylor import Series

E = np.eye(3)


def random_chart_point(rng):
    while True:
        x = rng.uniform(-2, 2, 4)
        if abs(x[1] - x[2] * x[0] - x[3]) > 0.3:
            return ChartPoint(*x)


def short_trajectory(rng):
    for _ in range(20):
        try:
            return ce.integrate(ce.random_q5_point(rng), ce.random_control(rng), (0.0, 3.0))
        except ce.IntegrationError:
            continue
    raise AssertionError("no regular trajectory")


def test_section_at_base_point():
    g = group_section(E[2], E[2])
    np.testing.assert_allclose(g[:, 2], E[2])
    np.testing.assert_allclose(np.linalg.inv(g)[2], E[2])
    assert np.linalg.det(g) == pytest.approx(1.0, abs=1e-15)


def test_section_properties(rng):
    for _ in range(100):
        q, p = rng.standard_normal((2, 3))
        if abs(p @ q) < 0.1:
            continue
        g = group_section(q, p)
        assert abs(np.linalg.det(g) - 1) < 1e-12
        np.testing.assert_allclose(g[:, 2], q, atol=1e-12)
        np.testing.assert_allclose(np.linalg.inv(g)[2], p / (p @ q), atol=1e-10)


def test_section_series_matches_pointwise(rng):
    q = Series(rng.standard_normal((3, 3)))
    p = Series(rng.standard_normal((3, 3)) + np.array([q.c[0], 0 * q.c[0], 0 * q.c[0]]))
    gs = group_section(q, p, (0, 1))
    np.testing.assert_allclose(gs.c[0], group_section(q.c[0], p.c[0], (0, 1)), atol=1e-12)
    h = 1e-5

    def at(s, u):
        return sum(c * u**k for k, c in enumerate(s.c))

    fd = (group_section(at(q, h), at(p, h), (0, 1)) - group_section(at(q, -h), at(p, -h), (0, 1))) / (2 * h)
    np.testing.assert_allclose(gs.c[1], fd, atol=1e-7)


def test_coframe_reproduces_metric(rng):
    worst = 0.0
    for _ in range(50):
        cp = random_chart_point(rng)
        G = metric_chart(cp)
        worst = max(worst, np.abs(coframe(cp).gram() - G).max() / np.abs(G).max())
    assert worst < 1e-6


def test_coframe_orientation_matches_paracomplex_rule(rng):
    for _ in range(20):
        cp = random_chart_point(rng)
        assert coframe(cp).orientation_sign == paracomplex_orientation(cp)


def test_point_factor_plane_kills_line_forms(rng):
    for _ in range(10):
        fr = coframe(random_chart_point(rng))
        rows = fr.coframe
        assert np.abs(rows[2:, :2]).max() < 1e-8 * np.abs(rows).max()
        assert np.abs(rows[:2, 2:]).max() < 1e-8 * np.abs(rows).max()


def test_curvature_report_constants(rng):
    for _ in range(5):
        rep = curvature_report(random_chart_point(rng))
        assert abs(rep.scalar + 12) < 1e-3
        assert rep.ricci0_norm < 1e-3
        assert rep.weyl_minus_norm < 1e-3 * rep.weyl_plus_norm
        np.testing.assert_allclose(rep.eigen_ratios(), [-2, 1, 1], atol=1e-3)
        assert abs(sum(rep.weyl_plus_eigs)) < 1e-3 * rep.weyl_plus_norm
        assert rep.petrov == "D"
        assert principal_plane_defect(rep) < 1e-6
        assert rep.metric_parallel_defect < 1e-5
        assert rep.self_adjoint_defect < 1e-4


def test_star_involution_and_split():
    S = star_matrix(NULL_FORM)
    np.testing.assert_allclose(S @ S, np.eye(6), atol=1e-10)
    ev = np.sort(np.linalg.eigvals(S).real)
    np.testing.assert_allclose(ev, [-1, -1, -1, 1, 1, 1], atol=1e-10)
    for b in SD_BASIS:
        np.testing.assert_allclose(hodge_star(b), b, atol=1e-12)
    for b in ASD_BASIS:
        np.testing.assert_allclose(hodge_star(b), -b, atol=1e-12)


def test_classify_planes(rng):
    for _ in range(5):
        cp = random_chart_point(rng)
        pt = M4Point.from_chart(cp)
        ce_ = contact_psi(pt, rng.uniform(0.5, 2))
        v1, v2 = rng.standard_normal((2, 3))
        graph = (ce_.graph_vector(v1), ce_.graph_vector(v2))
        assert sd_classify(pt, graph) == "SD"
        assert not is_principal(pt, graph)
        factor = (chart_tangent(cp, [1, 0, 0, 0]), chart_tangent(cp, [0, 1, 0, 0]))
        assert sd_classify(pt, factor) == "SD"
        assert is_principal(pt, factor)
        generic = (chart_tangent(cp, rng.standard_normal(4)), chart_tangent(cp, rng.standard_normal(4)))
        assert sd_classify(pt, generic) == "not-null"
    with pytest.raises(GeometryError, match="dependent"):
        u = chart_tangent(cp, [1, 2, 3, 4])
        sd_classify(pt, (u, chart_tangent(cp, [2, 4, 6, 8])))


def _null_planes_through(v):
    """The two totally null planes containing a null vector (frame components)."""
    N = NULL_FORM
    perp = null_space((N @ v)[None, :])  # v-perp, contains v
    # a 2-dim complement of v inside v-perp carries the quotient form
    c = null_space((perp.T @ v)[None, :])
    B = perp @ c
    M = B.T @ N @ B
    # null lines of the 2x2 form M
    a, b, d = M[0, 0], M[0, 1], M[1, 1]
    disc = np.sqrt(b * b - a * d)
    if abs(a) > 1e-12:
        dirs = [np.array([-b + s * disc, a]) for s in (1, -1)]
    else:
        dirs = [np.array([1.0, 0.0]), np.array([-d, 2 * b])]
    return [B @ w for w in dirs]


def test_null_direction_meets_one_sd_and_one_asd_plane(rng):
    N = NULL_FORM
    for _ in range(20):
        x = rng.standard_normal(4)
        v = np.array([x[0], x[1], -x[1] * x[3] / x[0], x[3]])  # v^1 v_1 + v^2 v_2 = 0
        assert abs(v @ N @ v) < 1e-12
        labels = []
        for w in _null_planes_through(v):
            assert abs(w @ N @ w) < 1e-9 and abs(v @ N @ w) < 1e-9
            l1, l2 = N @ v, N @ w
            beta = np.outer(l1, l2) - np.outer(l2, l1)
            sb = hodge_star(beta)
            labels.append("SD" if np.allclose(sb, beta, atol=1e-9 * np.abs(beta).max()) else
                          "ASD" if np.allclose(sb, -beta, atol=1e-9 * np.abs(beta).max()) else "?")
        assert sorted(labels) == ["ASD", "SD"]


@pytest.mark.parametrize("fam", ["Y1", "Y2"])
def test_adapted_lift_pattern_on_orbit(fam):
    q, p = wcurve_pair(wcurve_make(fam, 1.0), (-1, 1))
    nc = NullCurve(q, p)
    for t in (-0.5, 0.0, 0.4):
        assert adapted_pattern_defect(adapted_lift(nc, t)) < 1e-8


def test_adapted_lift_rejects_degenerate_and_non_null(rng):
    line = np.array([0.0, 0.0, 1.0])
    frozen = TrigCurve(line, [])
    with pytest.raises(GeometryError, match="not non-degenerate"):
        adapted_lift(NullCurve(TrigCurve([0, 0, 3.0], [(1.0, E[0], E[1])]), frozen), 0.3)
    a = TrigCurve(rng.standard_normal(3), [(1.0, rng.standard_normal(3), rng.standard_normal(3))])
    b = TrigCurve(rng.standard_normal(3), [(1.0, rng.standard_normal(3), rng.standard_normal(3))])
    with pytest.raises(GeometryError, match="not null"):
        adapted_lift(NullCurve(a, b), 0.2)


def test_adapted_lift_reparametrization():
    q, p = wcurve_pair(wcurve_make("Y2", 1.0), (-1, 1))

    def phi(t, n):
        s = Series.variable(t, n)
        return s + 0.2 * s * s * s

    nc_r = NullCurve(ReparametrizedCurve(q, phi), ReparametrizedCurve(p, phi))
    nc = NullCurve(q, p)
    for t in (-0.4, 0.1, 0.5):
        lr = adapted_lift(nc_r, t)
        lo = adapted_lift(nc, t + 0.2 * t**3)
        assert adapted_pattern_defect(lr) < 1e-8
        assert proj_distance(lr.q.c[0], lo.q.c[0]) < 1e-10
        assert proj_distance(lr.p.c[0], lo.p.c[0]) < 1e-10


def test_parallel_sd_on_integral_curve(rng):
    traj = short_trajectory(rng)
    psd = parallel_sd_residual(NullCurve.from_trajectory(traj))
    assert max(psd(t) for t in np.linspace(0.1, 2.9, 15)) < 1e-7


def test_counterexample_is_not_half_geodesic():
    nc = NullCurve(circle(), DualCurve(circle(np.sqrt(2), np.pi / 4)), (0.0, 2 * np.pi))
    times = np.linspace(0.1, 6.0, 12)
    assert min(parallel_sd_residual(nc)(t) for t in times) > 1e-2
    with pytest.raises(GeometryError, match="not half-geodesic"):
        lift_to_q5(nc, times)


def test_round_trip(rng):
    traj = short_trajectory(rng)
    nc = NullCurve(traj.q_curve().rescaled(lambda t, n: 2.0 + Series.variable(t, n)),
                   traj.p_curve().rescaled(0.3), traj.t_span)
    times = np.linspace(0.2, 2.8, 9)
    lifted = lift_to_q5(nc, times)
    for i, t in enumerate(times):
        q, p = traj.state(t)
        assert np.abs(lifted.Q[i] - q).max() < 1e-7
        assert np.abs(lifted.P[i] - p).max() < 1e-7
    assert min(rescaled_lift_defect(nc, t, mu) for t in times[::3] for mu in (0.5, 2.0, -1.0)) > 1e-9


@pytest.mark.parametrize("fam", ["Y1", "Y2", "Y3"])
def test_orbit_lift_matches_matrix_exponential(fam):
    spec = wcurve_make(fam, None)
    q, p = wcurve_pair(spec, (-1, 1))
    nc = NullCurve(q.rescaled(lambda t, n: 1.7 + 0.2 * Series.variable(t, n)), p, (-1.0, 1.0))
    times = np.linspace(-0.8, 0.8, 5)
    lifted = lift_to_q5(nc, times)
    for i, t in enumerate(times):
        np.testing.assert_allclose(lifted.Q[i], expm(t * spec.Y) @ E[2], atol=1e-8)
        np.testing.assert_allclose(lifted.P[i], E[2] @ expm(-t * spec.Y), atol=1e-8)
