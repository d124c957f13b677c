import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dancing import cartan_engel as ce
from dancing.core_linalg import GeometryError, proj_distance
from dancing.curves import ReparametrizedCurve, SampledCurve, TrigCurve, circle, conic, straight_line
from dancing.dancing_mates import wcurve_kappa_closed_form, wcurve_make, wcurve_pair, wcurve_trajectory
from dancing.projective_curves import (centro_affine_torsion, frame_dual, frame_dual_curve, lf_normalize, mucho_check,
                                       proj_arclength, proj_curvature, schwarzian, taut_coeffs, taut_series,
                                       unimodular_series)
from dancing.taylor import Series, cross


def wobbly_curve():
    """A locally convex closed curve without sextactic points near t = 0.5."""
    return TrigCurve([0, 0, 1.0], [(1.0, [1.0, 0, 0], [0, 0.7, 0]), (2.0, [0.05, 0.02, 0], [0, 0.04, 0])])


def trajectory(rng):
    for _ in range(20):
        try:
            return ce.integrate(ce.random_q5_point(rng), ce.random_control(rng), (0.0, 3.0))
        except ce.IntegrationError:
            continue
    raise AssertionError("no regular trajectory")


def test_circle_coefficients():
    tc = taut_coeffs(circle(), 0.7)
    assert (tc.I, tc.J, tc.K) == pytest.approx((1.0, 0.0, 1.0), abs=1e-15)
    assert (tc.a0, tc.a1, tc.a2) == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)


def test_conic_coefficients():
    tc = taut_coeffs(conic(), 0.4)
    assert (tc.a0, tc.a1, tc.a2) == (0.0, 0.0, 0.0)


def test_straight_line_is_an_inflection():
    with pytest.raises(GeometryError, match="inflection point"):
        taut_coeffs(straight_line(), 0.0)


def test_coefficients_solve_the_ode_and_a2_is_log_derivative():
    c = wobbly_curve()
    for t in (0.1, 1.3, 2.9):
        tc = taut_coeffs(c, t)
        assert tc.residual(c.derivs(t, 3)) < 1e-13
        h = 1e-5
        dI = (taut_coeffs(c, t + h).I - taut_coeffs(c, t - h).I) / (2 * h)
        assert tc.a2 == pytest.approx(-dI / tc.I, abs=1e-8)


def test_sampled_circle_coefficients():
    t = np.linspace(-1, 1, 201)
    A = np.column_stack([np.cos(t), np.sin(t), np.ones_like(t)])
    tc = taut_coeffs(SampledCurve(t, A), 0.1)
    assert tc.a1 == pytest.approx(1.0, abs=1e-5)
    assert abs(tc.a0) < 1e-5 and abs(tc.a2) < 1e-5


def test_schwarzian_kernel_and_tan():
    for t in (-0.5, 0.2, 1.0):
        assert abs(schwarzian(lambda s: (2 * s + 1) / (s + 3), t)) < 1e-6
        assert schwarzian(lambda s: np.tan(s / 2), t) == pytest.approx(0.25, abs=1e-6)
    with pytest.raises(ZeroDivisionError):
        schwarzian(lambda s: 1.0, 0.0)


def test_schwarzian_chain_rule():
    f, g = np.sinh, lambda s: s + 0.3 * s**3
    dg = lambda s: 1 + 0.9 * s**2
    for t in (-0.4, 0.3):
        lhs = schwarzian(lambda s: f(g(s)), t)
        rhs = schwarzian(f, g(t)) * dg(t) ** 2 + schwarzian(g, t)
        assert lhs == pytest.approx(rhs, abs=1e-5)


def test_circle_normal_form():
    lf = lf_normalize(circle(), -1.0, 1.0)
    res, dI, a2 = lf.certificate()
    assert res < 1e-7 and dI < 1e-7 and a2 < 1e-7
    for t in (-0.6, 0.0, 0.5):
        assert schwarzian(lf.param, t) == pytest.approx(0.25, abs=1e-6)


def test_normal_form_of_normal_form_is_mobius():
    lf = lf_normalize(conic(), -1.0, 1.0)
    for t in (-0.5, 0.1, 0.7):
        assert abs(schwarzian(lf.param, t)) < 1e-6
        assert proj_distance(lf(lf.param(t)), conic()(t)) < 1e-10
    assert max(lf.certificate()) < 1e-7


def test_conic_has_zero_arclength():
    lf = lf_normalize(conic(), -1.0, 1.0)
    ds = proj_arclength(lf)
    assert max(abs(ds(t)) for t in np.linspace(-0.9, 0.9, 7)) < 1e-6


def test_y3_density_is_constant():
    q, _ = wcurve_pair(wcurve_make("Y3"), (-1, 1))
    ds = proj_arclength(lf_normalize(q, -1.0, 1.0))
    vals = [ds(t) for t in np.linspace(-0.8, 0.8, 5)]
    assert np.ptp(vals) < 1e-9
    assert abs(vals[0]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("fam,par,expected", [("Y1", 1.0, -(32.0 ** (-1 / 3))), ("Y2", 1.0, 0.5), ("Y3", None, 0.0)])
def test_wcurve_curvature(fam, par, expected):
    spec = wcurve_make(fam, par)
    assert spec.kappa == pytest.approx(expected, abs=1e-14)
    assert wcurve_kappa_closed_form(spec) == pytest.approx(expected, abs=1e-14)
    q, _ = wcurve_pair(spec, (-1, 1))
    lf = lf_normalize(q, -1.0, 1.0)
    for t in (-0.7, 0.0, 0.6):
        assert proj_curvature(lf, t) == pytest.approx(expected, abs=1e-8)


def kappa_without_normal_form(c, t):
    """Curvature from the I = 1 rescaling in the original parameter.

    With A''' + a1 A' + a0 A = 0 the cubic density is theta = a0 - a1'/2 and
    kappa = -2 (S(sigma) - a1/4) / sigma'^2 with sigma' = theta^(1/3).
    """
    Ah = unimodular_series(c.series(t, 8))
    _, _, _, a0, a1, _ = taut_series(Ah)
    theta = a0.truncate(2) - 0.5 * a1.deriv().truncate(2)
    rho = theta.cbrt()
    r0, r1, r2 = rho.c[0], rho.c[1], 2 * rho.c[2]
    s = 0.5 * r2 / r0 - 0.75 * (r1 / r0) ** 2
    return float(-2 * (s - a1.c[0] / 4) / r0**2)


def test_curvature_matches_direct_formula():
    c = wobbly_curve()
    lf = lf_normalize(c, 0.2, 1.0)
    for t in (0.3, 0.6, 0.9):
        assert proj_curvature(lf, t) == pytest.approx(kappa_without_normal_form(c, t), rel=1e-6)


def test_sextactic_point_rejected():
    lf = lf_normalize(conic(), -1.0, 1.0)
    with pytest.raises(GeometryError, match="curvature undefined"):
        proj_curvature(lf, 0.0)


def test_torsion_values(rng):
    traj = trajectory(rng)
    q = traj.q_curve()
    for t in np.linspace(0.2, 2.8, 6):
        assert centro_affine_torsion(q, t) == pytest.approx(-1.0, abs=1e-6)
    assert centro_affine_torsion(conic(), 0.3) == 0.0
    assert abs(centro_affine_torsion(circle(), 0.3)) < 1e-15


def test_frame_dual_reconstructs_line_curve(rng):
    traj = trajectory(rng)
    q = traj.q_curve()
    for t in np.linspace(0.2, 2.8, 6):
        p = frame_dual(q, t)
        assert p @ q(t) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(p - traj.state(t)[1]).max() < 1e-7


def test_frame_dual_negative_control():
    c = wobbly_curve()
    pc = frame_dual_curve(c)
    for t in (0.3, 1.1):
        p = pc.series(t, 1)
        A = c.series(t, 1)
        assert np.linalg.norm(p.c[1] - np.cross(A.c[0], A.c[1])) > 1e-3


def test_frame_identities_on_orbit():
    traj = wcurve_trajectory(wcurve_make("Y2", 1.0), (-1, 1))
    rep = mucho_check(traj)
    assert rep["max"] < 1e-8


def test_frame_orthogonality_on_integrated_curve(rng):
    rep = mucho_check(trajectory(rng))
    assert rep["item1"] < 1e-9
    assert rep["max"] < 1e-6


def test_rescaling_and_reparametrization_covariance():
    c = wobbly_curve()
    t = 0.4
    I = taut_coeffs(c, t).I
    assert taut_coeffs(c.rescaled(2.0), t).I == pytest.approx(8 * I, rel=1e-12)

    def phi(s, n):
        x = Series.variable(s, n)
        return x + 0.1 * x * x * x

    cr = ReparametrizedCurve(c, phi)
    s = 0.5
    assert taut_coeffs(cr, s).I == pytest.approx((1 + 0.3 * s**2) ** 3 * taut_coeffs(c, s + 0.1 * s**3).I, rel=1e-12)


def test_duality_flips_r():
    q, _ = wcurve_pair(wcurve_make("Y2", 1.0), (-1, 1))
    lf = lf_normalize(q, -1.0, 1.0)
    for t in (-0.4, 0.3):
        A = lf.lift_series(t, 7)
        a = cross(A, A.deriv())
        I, J, K, a0, a1, a2 = taut_series(a)
        assert float(I.c[0]) == pytest.approx(1.0, abs=1e-9)
        assert abs(a1.c[0]) < 1e-8 and abs(a2.c[0]) < 1e-8
        assert -float(J.c[0]) == pytest.approx(-lf.r(t), rel=1e-8)


@given(st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 0.1), st.floats(0.0, 6.0))
def test_constant_rescaling_cubes_the_determinant(lam, t):
    c = wobbly_curve()
    assert taut_coeffs(c.rescaled(lam), t).I == pytest.approx(lam**3 * taut_coeffs(c, t).I, rel=1e-12)
