import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dancing.core_linalg import (GeometryError, ProjLine, ProjPoint, Quadruple, cross_cc, cross_ratio, cross_vv,
                                 det3, mat_exp, random_sl3, rank)
from dancing.dancing_mates import wcurve_make

E = np.eye(3)
vec = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False))


def cofactor_cross(v, w):
    # first-row cofactors of det([e; v; w])
    return np.array([v[1] * w[2] - v[2] * w[1], -(v[0] * w[2] - v[2] * w[0]), v[0] * w[1] - v[1] * w[0]])


def test_cross_vv_basis_and_self():
    assert np.array_equal(cross_vv(E[0], E[1]), E[2])
    assert np.array_equal(cross_vv([1.0, 2, 3], [1.0, 2, 3]), np.zeros(3))


def test_cross_vv_cofactor_value():
    np.testing.assert_allclose(cross_vv([1, 2, 3], [4, 5, 6]), [-3, 6, -3])
    np.testing.assert_allclose(cofactor_cross([1, 2, 3], [4, 5, 6]), [-3, 6, -3])


def test_cross_cc_values():
    assert np.array_equal(cross_cc(E[0], E[1]), E[2])
    assert np.array_equal(cross_cc([0.0, 3, 1], [0.0, 3, 1]), np.zeros(3))
    np.testing.assert_allclose(cross_cc([1, 0, 2], [0, 3, 1]), [-6, -1, 3])
    np.testing.assert_allclose(cofactor_cross([1, 0, 2], [0, 3, 1]), [-6, -1, 3])


@given(vec, vec)
def test_cross_orthogonal(v, w):
    c = cross_vv(v, w)
    scale = 1 + np.linalg.norm(v) * np.linalg.norm(w) * (np.linalg.norm(v) + np.linalg.norm(w))
    assert abs(c @ v) < 1e-12 * scale and abs(c @ w) < 1e-12 * scale


def test_cross_equivariance(rng):
    worst = 0.0
    for _ in range(200):
        g = random_sl3(rng)
        v, w = rng.standard_normal((2, 3))
        lhs = cross_vv(g @ v, g @ w)
        rhs = cross_vv(v, w) @ np.linalg.inv(g)
        worst = max(worst, np.abs(lhs - rhs).max() / (1 + np.abs(rhs).max()))
    assert worst < 1e-10


def test_mat_exp_zero_and_nilpotent():
    Y = np.array([[0.0, 1, 2], [0, 0, 3], [0, 0, 0]])
    np.testing.assert_array_equal(mat_exp(Y, 0.0), np.eye(3))
    t = 0.7
    np.testing.assert_allclose(mat_exp(Y, t), np.eye(3) + t * Y + t**2 * Y @ Y / 2, atol=1e-14)


def test_mat_exp_eigen_oracle():
    Y = wcurve_make("Y1", 1.0).Y
    lam, V = np.linalg.eig(Y)
    oracle = np.real(V @ np.diag(np.exp(0.3 * lam)) @ np.linalg.inv(V))
    np.testing.assert_allclose(mat_exp(Y, 0.3), oracle, atol=1e-12)


def test_mat_exp_group_law(rng):
    Y = rng.standard_normal((3, 3))
    np.testing.assert_allclose(mat_exp(Y, 0.4 + 0.9), mat_exp(Y, 0.4) @ mat_exp(Y, 0.9), atol=1e-10)


def test_cross_ratio_representatives():
    a1, a2 = np.array([1.0, 0, 1]), np.array([0.0, 1, 1])
    assert cross_ratio(Quadruple(a1, a2, a1 + a2, 2 * a1 + a2)) == pytest.approx(2.0, abs=1e-12)


def test_cross_ratio_affine_coordinates():
    # x1..x4 = 0, 1, 2, 3 on the x-axis: (x1 - x3)/(x1 - x4) * (x4 - x2)/(x3 - x2) = 4/3
    pts = [np.array([x, 0.0, 1.0]) for x in (0, 1, 2, 3)]
    assert cross_ratio(Quadruple(*pts)) == pytest.approx(4 / 3, abs=1e-12)


def test_cross_ratio_degenerate():
    a = np.array([1.0, 0, 1])
    with pytest.raises(GeometryError):
        Quadruple(a, [0, 1, 1], [2, 0, 2], a)


def test_cross_ratio_sl3_invariant(rng):
    a1, a2 = rng.standard_normal((2, 3))
    pts = [a1, a2, a1 + 0.5 * a2, a1 - 2 * a2]
    base = cross_ratio(Quadruple(*pts))
    for _ in range(20):
        g = random_sl3(rng)
        assert abs(cross_ratio(Quadruple(*[g @ p for p in pts])) - base) < 1e-9


def test_projective_classes():
    assert ProjPoint([1, 2, 3]) == ProjPoint([-2, -4, -6])
    line = ProjLine.through(ProjPoint([1, 0, 1]), ProjPoint([0, 1, 1]))
    assert ProjPoint([1, 0, 1]).on(line)
    with pytest.raises(GeometryError):
        ProjPoint([0, 0, 0])


def test_rank_threshold():
    assert rank(np.diag([1.0, 1e-9, 0.0])) == 1
    assert rank(np.diag([1.0, 1e-7, 0.0])) == 2
    assert det3(E[0], E[1], E[2]) == 1.0
