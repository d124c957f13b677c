"""Invariant checks grouped into suites, with a deterministic JSON report.

Each suite draws its randomness from ``numpy.random.default_rng([seed, k])``
with a fixed per-suite index ``k``, so the report for a given seed does not
depend on which suites run or in which order. Timings never enter the report.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cartan_engel as ce
from . import split_octonions as so
from .core_linalg import GeometryError, ProjLine, Quadruple, cross_ratio, random_sl3
from .curves import DualCurve, circle, conic

SCHEMA = 1


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    threshold: float
    above: bool = False  # pass when residual > threshold (discrimination checks)

    @property
    def passed(self) -> bool:
        r = self.residual
        if not np.isfinite(r):
            return False
        return r > self.threshold if self.above else r <= self.threshold

    def as_dict(self):
        return {
            "name": self.name,
            "residual": float(self.residual),
            "threshold": float(self.threshold),
            "expect": "above" if self.above else "below",
            "pass": self.passed,
        }


def _max(values):
    return float(max(values))


# Suites ----------------------------------------------------------------------

def octonion_suite(rng, tol):
    def rz():
        return so.ZornOctonion(rng.standard_normal(), rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal())

    leib, anti, norm, equi, antisym = [], [], [], [], []
    for _ in range(100):
        g = so.random_g2(rng)
        z1, z2 = rz(), rz()
        lhs = so.derivation_apply(g, so.zorn_mul(z1, z2))
        rhs = so.zorn_mul(so.derivation_apply(g, z1), z2) + so.zorn_mul(z1, so.derivation_apply(g, z2))
        leib.append(np.abs((lhs - rhs).to_array()).max())
        a = so.zorn_conj(so.zorn_mul(z1, z2))
        b = so.zorn_mul(so.zorn_conj(z2), so.zorn_conj(z1))
        anti.append(np.abs((a - b).to_array()).max())
        n = so.zorn_mul(z1, so.zorn_conj(z1))
        norm.append(np.abs((n - so.ZornOctonion.unit().scale(so.zorn_norm(z1))).to_array()).max())
        m = random_sl3(rng, 0.5)
        e1 = so.act_sl3(m, so.zorn_mul(z1, z2))
        e2 = so.zorn_mul(so.act_sl3(m, z1), so.act_sl3(m, z2))
        equi.append(np.abs((e1 - e2).to_array()).max())
        r = so.rho_matrix(g)
        antisym.append(np.abs(r.T @ so.IM_FORM + so.IM_FORM @ r).max())
    ranks = [so.omega_kernel_rank(so.random_cone_point(rng)) for _ in range(100)]
    pull = []
    for _ in range(100):
        pt = ce.random_q5_point(rng)
        v1, v2 = ce.dist_frame(pt)
        a, b = rng.standard_normal(2)
        v = ce.Q5Tangent(pt, a * v1.dq + b * v2.dq, a * v1.dp + b * v2.dp)
        pull.append(so.iota_pullback_check(pt, v) / (1.0 + np.linalg.norm(v.as_vector())))
    basis = so.g2_basis()
    brackets = [so.g2_bracket(x, y) for i, x in enumerate(basis) for y in basis[i + 1:]]
    return [
        Check("octonion.leibniz", _max(leib), 1e-11),
        Check("octonion.conj_antihomomorphism", _max(anti), 1e-12),
        Check("octonion.norm_identity", _max(norm), 1e-12),
        Check("octonion.sl3_equivariance", _max(equi), 1e-11),
        Check("octonion.rho_antisymmetric", _max(antisym), 1e-12),
        Check("octonion.omega_kernel_rank3", float(max(abs(k - 3) for k in ranks)), 0.0),
        Check("octonion.iota_pullback_on_distribution", _max(pull), 1e-12),
        Check("octonion.g2_span_dimension14", float(abs(so.span_dimension(basis + brackets) - 14)), 0.0),
    ]


def distribution_suite(rng, tol):
    pts = [ce.Q5Point.base()] + [ce.random_q5_point(rng) for _ in range(100)]
    bad = sum(ce.growth_vector(pt) != (2, 3, 5) for pt in pts)
    drift, integral = [], []
    for _ in range(3):
        traj = ce.integrate(ce.random_q5_point(rng), ce.random_control(rng), (0.0, 10.0), tol=tol)
        drift.append(traj.constraint_residual())
        integral.append(traj.integral_residual())
    return [
        Check("distribution.growth_235", float(bad), 0.0),
        Check("distribution.conserved_pq", _max(drift), tol),
        Check("distribution.integral_curve_residual", _max(integral), 1e-9),
    ]


def symmetry_suite(rng, tol):
    from .dancing_mates import wcurve_make, wcurve_trajectory

    pts = ce.default_points(50, seed=int(rng.integers(2**31)))
    worst = _max(ce.symmetry_residual(g, pts) for g in so.g2_basis())
    basis = so.g2_basis()
    pairs = [(basis[i], basis[j]) for i, j in ((0, 1), (6, 8), (8, 11), (9, 12), (10, 13), (2, 9))]
    pairs += [(so.random_g2(rng), so.random_g2(rng)) for _ in range(2)]
    few = pts[:10]
    cons = _max(ce.bracket_consistency(a, b, few) for a, b in pairs)
    orbit = []
    for fam, par in (("Y1", 1.0), ("Y2", 1.0), ("Y3", None)):
        orbit.append(wcurve_trajectory(wcurve_make(fam, par)).integral_residual())
    return [
        Check("symmetry.basis_fields_preserve_distribution", worst, 1e-9),
        Check("symmetry.algebra_dimension14", float(abs(ce.algebra_dimension() - 14)), 0.0),
        Check("symmetry.bracket_consistency", cons, 1e-8),
        Check("symmetry.orbit_integral_residual", _max(orbit), 1e-9),
    ]


def _random_chart_point(rng):
    from .dancing_metric import ChartPoint

    while True:
        x, y, a, b = rng.uniform(-1.5, 1.5, 4)
        if abs(y - a * x - b) > 0.3:
            return ChartPoint(x, y, a, b)


def metric_suite(rng, tol):
    from .dancing_metric import M4Point, M4Tangent, metric_chart, metric_eval, metric_eval_expanded, \
        metric_from_cross_ratio

    cr, inv, expd, chart = [], [], [], []
    count = 0
    while count < 20:
        q = rng.standard_normal(3)
        p = rng.standard_normal(3)
        if abs(p @ q) < 0.3 * np.linalg.norm(p) * np.linalg.norm(q):
            continue
        pt = M4Point(q, p)
        dq = rng.standard_normal(3)
        dp = rng.standard_normal(3)
        dq *= 0.5 * np.linalg.norm(q) / np.linalg.norm(dq)
        dp *= 0.5 * np.linalg.norm(p) / np.linalg.norm(dp)
        v = M4Tangent(pt, dq, dp, q, p)
        gvv = metric_eval(v, v)
        scale = np.linalg.norm(dq) * np.linalg.norm(dp) / abs(p @ q)
        if abs(gvv) < 0.05 * scale:
            continue  # nearly null: relative comparison is meaningless
        count += 1
        cr.append(abs(metric_from_cross_ratio(pt, v) - gvv) / abs(gvv))
        expd.append(abs(metric_eval_expanded(v, v) - gvv) / scale)
        g = random_sl3(rng, 0.5)
        inv.append(abs(metric_eval(v.act(g), v.act(g)) - gvv) / scale)
    for _ in range(20):
        cp = _random_chart_point(rng)
        from .dancing_metric import chart_tangent

        u, w = rng.standard_normal(4), rng.standard_normal(4)
        G = metric_chart(cp)
        val = metric_eval(chart_tangent(cp, u), chart_tangent(cp, w))
        chart.append(abs(u @ G @ w - val) / (np.abs(G).max() * np.linalg.norm(u) * np.linalg.norm(w)))
    return [
        Check("metric.cross_ratio_limit", _max(cr), 1e-5),
        Check("metric.expanded_formula", _max(expd), 1e-12),
        Check("metric.sl3_invariance", _max(inv), 1e-10),
        Check("metric.chart_formula", _max(chart), 1e-12),
    ]


def curvature_suite(rng, tol):
    from .curvature_lab import curvature_report, principal_plane_defect

    scal, ric, wm, ratio, petrov, planes = [], [], [], [], [], []
    for _ in range(20):
        rep = curvature_report(_random_chart_point(rng))
        scal.append(abs(rep.scalar + 12.0))
        ric.append(rep.ricci0_norm)
        wm.append(rep.weyl_minus_norm / rep.weyl_plus_norm)
        ratio.append(np.abs(np.array(rep.eigen_ratios()) - np.array([-2.0, 1.0, 1.0])).max())
        petrov.append(0.0 if rep.petrov == "D" else 1.0)
        planes.append(principal_plane_defect(rep))
    return [
        Check("curvature.scalar_minus12", _max(scal), 1e-3),
        Check("curvature.traceless_ricci", _max(ric), 1e-3),
        Check("curvature.weyl_minus_relative", _max(wm), 1e-3),
        Check("curvature.weyl_plus_ratios", _max(ratio), 1e-3),
        Check("curvature.petrov_D", _max(petrov), 0.0),
        Check("curvature.principal_planes_are_factors", _max(planes), 1e-6),
    ]


def counterexample_pair():
    """Unit circle with the tangent lines of the concentric circle of radius sqrt 2."""
    return circle(), DualCurve(circle(np.sqrt(2.0), np.pi / 4))


def mates_suite(rng, tol):
    from .curvature_lab import NullCurve, lift_to_q5, parallel_sd_residual, rescaled_lift_defect
    from .dancing_mates import circle_mates, mate_verify, wcurve_kappa_closed_form, wcurve_make, wcurve_pair
    from .dancing_metric import dancing_residual
    from .projective_curves import involute_defect, lf_normalize, mucho_check, proj_curvature

    checks = []
    init = (1.0, rng.uniform(-0.3, 0.3), rng.uniform(0.5, 1.5))
    rep = mate_verify(circle_mates(init, (0.0, 2 * np.pi)), n=8)
    checks += [
        Check("mates.circle_dancing", rep["dancing"], 1e-7),
        Check("mates.circle_parallel_sd", rep["parallel_sd"], 1e-6),
        Check("mates.circle_shared_a1", rep["shared_a1"], 1e-6),
        Check("mates.circle_torsion", rep["torsion"], 1e-6),
    ]

    qc, pc = counterexample_pair()
    times = np.linspace(0.1, 6.0, 12)
    lf = lf_normalize(qc, 0.0, 1.0)
    try:
        lift_to_q5(NullCurve(qc, pc, (0.0, 2 * np.pi)), times)
        rejected = 0.0
    except GeometryError:
        rejected = 1.0
    checks += [
        Check("mates.counterexample_null", _max(dancing_residual(qc, pc, t) for t in times), 1e-12),
        Check("mates.counterexample_involute_defect", min(abs(involute_defect(lf, pc, t)) for t in (0.2, 0.5, 0.8)), 1e-2, above=True),
        Check("mates.counterexample_parallel_sd", min(parallel_sd_residual(NullCurve(qc, pc))(t) for t in times), 1e-2, above=True),
        Check("mates.counterexample_rejected", rejected, 0.5, above=True),
    ]

    for fam, par in (("Y1", 1.0), ("Y2", 1.0), ("Y3", None)):
        spec = wcurve_make(fam, par)
        q, _ = wcurve_pair(spec, (-1.0, 1.0))
        lfw = lf_normalize(q, -1.0, 1.0)
        ks = [proj_curvature(lfw, t) for t in np.linspace(-0.8, 0.8, 5)]
        checks.append(Check(f"mates.wcurve_{fam}_closed_form", abs(spec.kappa - wcurve_kappa_closed_form(spec)), 1e-12))
        checks.append(Check(f"mates.wcurve_{fam}_numeric_kappa", _max(abs(k - spec.kappa) for k in ks), 1e-4))
        checks.append(Check(f"mates.wcurve_{fam}_kappa_constant", float(np.ptp(ks)), 1e-4))

    traj = _short_trajectory(rng, tol)
    lo, hi = traj.t_span
    inner = np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 15)
    nc = NullCurve(traj.q_curve().rescaled(lambda t, n: 1.5 + 0.3 * _var(t, n)),
                   traj.p_curve().rescaled(lambda t, n: 2.0 - 0.1 * _var(t, n) * _var(t, n)), traj.t_span)
    lifted = lift_to_q5(nc, inner)
    dist = _max(np.abs(np.concatenate(traj.state(t)) - np.concatenate([lifted.Q[i], lifted.P[i]])).max()
                for i, t in enumerate(lifted.t))
    perturbed = min(rescaled_lift_defect(nc, t, mu) for t in inner[::5] for mu in (0.5, 2.0, -1.0))
    items = mucho_check(traj)
    checks += [
        Check("mates.round_trip_distance", dist, 1e-7),
        Check("mates.perturbed_rescaling_fails", perturbed, 1e-9, above=True),
    ]
    checks += [Check(f"mates.frame_identity_{k}", v, 1e-6) for k, v in items.items() if k != "max"]
    return checks


def _var(t, n):
    from .taylor import Series

    return Series.variable(t, n)


def _short_trajectory(rng, tol):
    """An integral curve on [0, 3] from a random start and control."""
    for _ in range(20):
        try:
            return ce.integrate(ce.random_q5_point(rng), ce.random_control(rng), (0.0, 3.0), tol=tol)
        except ce.IntegrationError:
            continue
    raise ce.IntegrationError("no regular trajectory found")


def rolling_suite(rng, tol):
    from .dancing_mates import circle_mates, wcurve_make, wcurve_pair
    from .projective_curves import lf_normalize
    from .projective_rolling import (concurrency_defect, contact_exponent, no_twist_residual,
                                     parallel_transport_line, psi_acceleration_residual)

    q, _ = wcurve_pair(wcurve_make("Y2", 1.0), (-1.0, 1.0))
    lf = lf_normalize(q, -1.0, 1.0)
    slope = min(contact_exponent(lf, t) for t in (-0.5, 0.0, 0.4))

    lfc = lf_normalize(conic(), -1.0, 1.0)
    A = lfc.lift_series(0.0, 0).c[0]
    lines = [ProjLine(np.cross(A, v)) for v in rng.standard_normal((4, 3))]
    conc = _max(concurrency_defect([parallel_transport_line(lfc, l, 0.0, t1) for t1 in np.linspace(-0.8, 0.8, 7)])
                for l in lines)

    A = lf.lift_series(0.0, 0).c[0]
    lines = [ProjLine(np.cross(A, v)) for v in rng.standard_normal((4, 3))]
    cr0 = cross_ratio(Quadruple(*[l.rep for l in lines]))
    crs = [cross_ratio(Quadruple(*[parallel_transport_line(lf, l, 0.0, t1).rep for l in lines])) for t1 in (-0.6, 0.3, 0.7)]
    crd = _max(abs(c - cr0) for c in crs)

    ms = circle_mates((1.0, 0.0, 1.0), (0.0, 2 * np.pi))
    twist, accel = [], []
    for seg in ms.segments:
        for u in seg.sample_times(6):
            twist.append(no_twist_residual(seg.q_curve(), seg.p_curve(), u))
    traj = _short_trajectory(rng, tol)
    for t in np.linspace(0.3, 2.7, 9):
        accel.append(psi_acceleration_residual(traj.q_curve(), traj.p_curve(), t))
        twist.append(no_twist_residual(traj.q_curve(), traj.p_curve(), t))
    return [
        Check("rolling.contact_exponent", slope, 4.8, above=True),
        Check("rolling.conic_transport_concurrent", conc, 1e-8),
        Check("rolling.transport_cross_ratio", crd, 1e-8),
        Check("rolling.no_twist", _max(twist), 1e-6),
        Check("rolling.psi_acceleration", _max(accel), 1e-6),
    ]


SUITES = {
    "octonion": (0, octonion_suite),
    "distribution": (1, distribution_suite),
    "symmetry": (2, symmetry_suite),
    "metric": (3, metric_suite),
    "curvature": (4, curvature_suite),
    "mates": (5, mates_suite),
    "rolling": (6, rolling_suite),
}


def _threads():
    try:
        n = int(os.environ.get("DANCING_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(4, os.cpu_count() or 1)


def run_suite(name: str, seed: int = 0, tol: float = 1e-9):
    """Checks of one suite (or of every suite for ``"all"``), sorted by name."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}")

    def job(n):
        idx, fn = SUITES[n]
        return fn(np.random.default_rng([int(seed), idx]), tol)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(job, names))
    return sorted((c for r in results for c in r), key=lambda c: c.name)


def report_json(checks, suite: str, seed: int) -> str:
    data = {
        "schema": SCHEMA,
        "suite": suite,
        "seed": int(seed),
        "all_pass": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
    }
    return json.dumps(data, indent=2, sort_keys=True)
