"""Acceptance criteria, one test each.

Every test prints a single line ``[PASS] n name: detail`` or ``[FAIL] ...``
so the run doubles as a checklist. Run directly (``python3
tests/test_acceptance.py``) for the lines alone.
"""

import time

import numpy as np
import pytest

from dancing import cartan_engel as ce
from dancing import split_octonions as so
from dancing.core_linalg import GeometryError, ProjLine
from dancing.curvature_lab import NullCurve, curvature_report, lift_to_q5, parallel_sd_residual, rescaled_lift_defect
from dancing.curves import DualCurve, circle, conic
from dancing.dancing_mates import circle_mates, mate_verify, wcurve_kappa_closed_form, wcurve_make, wcurve_pair, \
    wcurve_trajectory
from dancing.dancing_metric import ChartPoint, M4Point, M4Tangent, dancing_residual, metric_eval, \
    metric_from_cross_ratio
from dancing.projective_curves import involute_defect, lf_normalize, mucho_check, proj_curvature
from dancing.projective_rolling import (concurrency_defect, contact_exponent, no_twist_residual,
                                        parallel_transport_line, psi_acceleration_residual)
from dancing.taylor import Series

SEED = 20261016


def integrate_random(rng, span=(0.0, 10.0)):
    for _ in range(20):
        try:
            start = time.perf_counter()
            traj = ce.integrate(ce.random_q5_point(rng), ce.random_control(rng), span)
            return traj, time.perf_counter() - start
        except ce.IntegrationError:
            continue
    raise ce.IntegrationError("no regular trajectory")


def crit_conserved_quantity(rng):
    drift, slow = [], []
    for _ in range(5):
        traj, dt = integrate_random(rng)
        drift.append(traj.constraint_residual())
        slow.append(dt)
    ok = max(drift) < 1e-9 and max(slow) < 1.0
    return ok, f"max |pq-1| {max(drift):.2e}, slowest {max(slow):.3f} s"


def crit_growth_vector(rng):
    pts = [ce.Q5Point.base()] + [ce.random_q5_point(rng) for _ in range(100)]
    bad = [pt for pt in pts if ce.growth_vector(pt) != (2, 3, 5)]
    return not bad, f"{len(pts) - len(bad)}/{len(pts)} points with (2, 3, 5)"


def crit_symmetry(rng):
    pts = [ce.random_q5_point(rng) for _ in range(50)]
    worst = max(ce.symmetry_residual(g, pts) for g in so.g2_basis())
    dim = ce.algebra_dimension()
    basis = so.g2_basis()
    pairs = [(basis[i], basis[j]) for i in range(0, 14, 3) for j in range(1, 14, 4) if i != j]
    cons = max(ce.bracket_consistency(a, b, pts[:5]) for a, b in pairs)
    ok = worst < 1e-9 and dim == 14 and cons < 1e-8
    return ok, f"field residual {worst:.2e}, dimension {dim}, bracket consistency {cons:.2e}"


def crit_octonions(rng):
    def rz():
        return so.ZornOctonion(rng.standard_normal(), rng.standard_normal(3), rng.standard_normal(3),
                               rng.standard_normal())

    leib = 0.0
    for _ in range(100):
        g = so.random_g2(rng)
        z1, z2 = rz(), rz()
        lhs = so.derivation_apply(g, so.zorn_mul(z1, z2))
        rhs = so.zorn_mul(so.derivation_apply(g, z1), z2) + so.zorn_mul(z1, so.derivation_apply(g, z2))
        leib = max(leib, np.abs((lhs - rhs).to_array()).max())
    ranks = {so.omega_kernel_rank(so.random_cone_point(rng)) for _ in range(100)}
    pull = 0.0
    for _ in range(100):
        pt = ce.random_q5_point(rng)
        v1, v2 = ce.dist_frame(pt)
        a, b = rng.standard_normal(2)
        v = ce.Q5Tangent(pt, a * v1.dq + b * v2.dq, a * v1.dp + b * v2.dp)
        n = np.linalg.norm(v.as_vector())
        v = ce.Q5Tangent(pt, v.dq / n, v.dp / n)
        pull = max(pull, so.iota_pullback_check(pt, v))
    ok = leib < 1e-11 and ranks == {3} and pull < 1e-12
    return ok, f"Leibniz {leib:.2e}, kernel ranks {sorted(ranks)}, pullback on unit vectors {pull:.2e}"


def random_chart_point(rng):
    while True:
        x, y, a, b = rng.uniform(-1.5, 1.5, 4)
        if abs(y - a * x - b) > 0.3:
            return ChartPoint(x, y, a, b)


def crit_curvature(rng):
    start = time.perf_counter()
    reps = [curvature_report(random_chart_point(rng)) for _ in range(20)]
    elapsed = time.perf_counter() - start
    scal = max(abs(r.scalar + 12) for r in reps)
    ric = max(r.ricci0_norm for r in reps)
    wm = max(r.weyl_minus_norm / r.weyl_plus_norm for r in reps)
    ratio = max(np.abs(np.array(r.eigen_ratios()) - [-2, 1, 1]).max() for r in reps)
    labels = {r.petrov for r in reps}
    ok = scal < 1e-3 and ric < 1e-3 and wm < 1e-3 and ratio < 1e-3 and labels == {"D"} and elapsed < 5.0
    return ok, (f"|s+12| {scal:.1e}, |Ric0| {ric:.1e}, W-/W+ {wm:.1e}, ratios {ratio:.1e}, "
                f"types {sorted(labels)}, {elapsed:.2f} s")


def crit_cross_ratio(rng):
    worst, n = 0.0, 0
    while n < 20:
        q, p, dq, dp = rng.standard_normal((4, 3))
        if abs(p @ q) < 0.3 * np.linalg.norm(p) * np.linalg.norm(q):
            continue
        dq *= 0.5 * np.linalg.norm(q) / np.linalg.norm(dq)
        dp *= 0.5 * np.linalg.norm(p) / np.linalg.norm(dp)
        pt = M4Point(q, p)
        v = M4Tangent(pt, dq, dp, q, p)
        g = metric_eval(v, v)
        if abs(g) < 0.05 * np.linalg.norm(dq) * np.linalg.norm(dp) / abs(p @ q):
            continue
        n += 1
        worst = max(worst, abs(metric_from_cross_ratio(pt, v) - g) / abs(g))
    return worst < 1e-5, f"max relative error {worst:.2e} over 20 tangents"


def crit_circle_mates(rng):
    worst = {"dancing": 0.0, "parallel_sd": 0.0, "shared_a1": 0.0, "torsion": 0.0}
    for _ in range(3):
        init = (1.0, rng.uniform(-0.3, 0.3), rng.uniform(0.5, 1.5))
        rep = mate_verify(circle_mates(init, (0.0, 2 * np.pi)), n=8)
        worst = {k: max(v, rep[k]) for k, v in worst.items()}
    ok = worst["dancing"] < 1e-7 and worst["parallel_sd"] < 1e-6 and worst["shared_a1"] < 1e-6 \
        and worst["torsion"] < 1e-6
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def crit_counterexample(rng):
    q, p = circle(), DualCurve(circle(np.sqrt(2.0), np.pi / 4))
    times = np.linspace(0.1, 6.0, 12)
    null = max(dancing_residual(q, p, t) for t in times)
    lf = lf_normalize(q, 0.0, 1.0)
    inv = min(abs(involute_defect(lf, p, t)) for t in (0.2, 0.5, 0.8))
    psd = min(parallel_sd_residual(NullCurve(q, p))(t) for t in times)
    try:
        lift_to_q5(NullCurve(q, p, (0.0, 2 * np.pi)), times)
        rejected = ""
    except GeometryError as exc:
        rejected = str(exc)
    ok = null < 1e-12 and inv > 1e-2 and psd > 1e-2 and "not half-geodesic" in rejected
    return ok, f"null {null:.1e}, x+y' {inv:.3f}, parallel-SD {psd:.3f}, lift rejected: {bool(rejected)}"


def crit_wcurves(rng):
    exact = {"Y1": -(32.0 ** (-1.0 / 3.0)), "Y2": 0.5, "Y3": 0.0}
    parts, ok = [], True
    for fam, par in (("Y1", 1.0), ("Y2", 1.0), ("Y3", None)):
        spec = wcurve_make(fam, par)
        res = wcurve_trajectory(spec, (-1.0, 1.0)).integral_residual()
        q, _ = wcurve_pair(spec, (-1.0, 1.0))
        lf = lf_normalize(q, -1.0, 1.0)
        ks = np.array([proj_curvature(lf, t) for t in np.linspace(-0.8, 0.8, 9)])
        closed = spec.kappa == exact[fam] or abs(spec.kappa - exact[fam]) <= 4 * np.finfo(float).eps
        good = res < 1e-9 and closed and wcurve_kappa_closed_form(spec) == pytest.approx(exact[fam], abs=1e-15) \
            and np.abs(ks - exact[fam]).max() < 1e-4 and np.ptp(ks) < 1e-4
        ok &= bool(good)
        parts.append(f"{fam} kappa {spec.kappa:.6f} (numeric spread {np.ptp(ks):.0e}, orbit {res:.0e})")
    return ok, "; ".join(parts)


def crit_round_trip(rng):
    traj, _ = integrate_random(rng, (0.0, 3.0))
    nc = NullCurve(traj.q_curve().rescaled(lambda t, n: 1.5 + 0.3 * Series.variable(t, n)),
                   traj.p_curve().rescaled(0.7), traj.t_span)
    times = np.linspace(0.15, 2.85, 15)
    lifted = lift_to_q5(nc, times)
    dist = max(np.abs(np.concatenate(traj.state(t)) - np.concatenate([lifted.Q[i], lifted.P[i]])).max()
               for i, t in enumerate(times))
    perturbed = min(rescaled_lift_defect(nc, t, mu) for t in times[::4] for mu in (0.5, 2.0, -1.0))
    return dist < 1e-7 and perturbed > 1e-9, f"sup distance {dist:.1e}, smallest perturbed defect {perturbed:.1e}"


def crit_rolling(rng):
    q, _ = wcurve_pair(wcurve_make("Y2", 1.0), (-1.0, 1.0))
    lf = lf_normalize(q, -1.0, 1.0)
    slope = min(contact_exponent(lf, t) for t in (-0.5, 0.0, 0.4))
    lfc = lf_normalize(conic(), -1.0, 1.0)
    A = lfc.lift_series(0.0, 0).c[0]
    conc = max(concurrency_defect([parallel_transport_line(lfc, ProjLine(np.cross(A, v)), 0.0, t)
                                   for t in np.linspace(-0.8, 0.8, 7)]) for v in rng.standard_normal((4, 3)))
    twist = 0.0
    for seg in circle_mates((1.0, 0.1, 0.9), (0.0, 2 * np.pi)).segments:
        for u in seg.sample_times(6):
            twist = max(twist, no_twist_residual(seg.q_curve(), seg.p_curve(), u))
    traj, _ = integrate_random(rng, (0.0, 3.0))
    accel = max(psi_acceleration_residual(traj.q_curve(), traj.p_curve(), t) for t in np.linspace(0.3, 2.7, 9))
    ok = slope >= 4.8 and conc < 1e-8 and twist < 1e-6 and accel < 1e-6
    return ok, f"contact exponent {slope:.2f}, concurrency {conc:.1e}, no-twist {twist:.1e}, acceleration {accel:.1e}"


def crit_frame_identities(rng):
    worst = {f"item{k}": 0.0 for k in range(1, 7)}
    for _ in range(3):
        traj, _ = integrate_random(rng, (0.0, 3.0))
        rep = mucho_check(traj)
        worst = {k: max(v, rep[k]) for k, v in worst.items()}
    return max(worst.values()) < 1e-6, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


CRITERIA = [
    (1, "conserved quantity", crit_conserved_quantity),
    (2, "growth vector", crit_growth_vector),
    (3, "g2 symmetry", crit_symmetry),
    (4, "octonion layer", crit_octonions),
    (5, "curvature constants", crit_curvature),
    (6, "cross-ratio metric", crit_cross_ratio),
    (7, "circle mates", crit_circle_mates),
    (8, "counterexample discrimination", crit_counterexample),
    (9, "constant-curvature orbit curves", crit_wcurves),
    (10, "null-curve round trip", crit_round_trip),
    (11, "rolling", crit_rolling),
    (12, "frame identities", crit_frame_identities),
]


def evaluate(num, name, fn):
    try:
        ok, detail = fn(np.random.default_rng([SEED, num]))
    except Exception as exc:  # a crash is a failure with a reason
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return ok, f"[{'PASS' if ok else 'FAIL'}] {num:2d} {name}: {detail}"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    ok, line = evaluate(num, name, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
