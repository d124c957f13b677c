"""Command-line front end.

Exit codes: 0 when everything passes, 1 when a check fails or a computation
hits a singularity, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .core_linalg import GeometryError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="")


def _close(fh):
    if fh is not sys.stdout:
        fh.close()


def cmd_verify(args) -> int:
    from .suites import run_suite, report_json

    checks = run_suite(args.suite, args.seed, args.tol)
    fh = _open_out(args.out)
    fh.write(report_json(checks, args.suite, args.seed) + "\n")
    _close(fh)
    failed = [c.name for c in checks if not c.passed]
    for name in failed:
        print(f"FAIL {name}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_integrate(args) -> int:
    from .cartan_engel import integrate, random_control, random_q5_point

    rng = np.random.default_rng(args.seed)
    pt = random_q5_point(rng)
    control = random_control(rng, amplitude=args.amplitude)
    traj = integrate(pt, control, (args.t0, args.t1), tol=args.tol, step_tol=args.step_tol)
    if args.out in (None, "-"):
        w = csv.writer(sys.stdout)
        w.writerow(["t", "q1", "q2", "q3", "p1", "p2", "p3"])
        for t, q, p in zip(traj.t, traj.Q, traj.P):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in q] + [repr(float(x)) for x in p])
    else:
        traj.to_csv(args.out)
    drift = traj.constraint_residual()
    print(f"steps {len(traj.t) - 1}  max|pq-1| {drift:.3e}  integral residual {traj.integral_residual():.3e}",
          file=sys.stderr)
    return EXIT_OK if drift < args.tol else EXIT_FAIL


MATE_HEADER = ["theta", "y", "dy", "ddy", "q1", "q2", "q3", "p1", "p2", "p3", "dancing_residual"]


def mate_rows(ms, n=50):
    from .dancing_metric import dancing_residual

    rows = []
    for seg in ms.segments:
        q, p = seg.q_curve(), seg.p_curve()
        for u in seg.sample_times(n, 0.0):
            s = seg.state(u)
            qq = q.series(u, 0).c[0]
            pp = p.series(u, 0).c[0]
            pp = pp / float(pp @ qq)
            rows.append([float(seg.theta(u)), *map(float, s[:3]), *map(float, qq), *map(float, pp),
                         dancing_residual(q, p, u)])
    rows.sort(key=lambda r: r[0])
    return rows


def cmd_mates(args) -> int:
    from .dancing_mates import circle_mates
    from .svg import Figure

    t0 = 0.0 if args.t0 is None else args.t0
    t1 = 4 * np.pi if args.t1 is None else args.t1
    try:
        ms = circle_mates((args.y0, args.y1, args.y2), (t0, t1), const=args.const,
                          on_zero="stop" if args.stop_at_zero else "raise")
    except GeometryError:  # singular mates subclass ValueError; they are not usage errors
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = mate_rows(ms, args.samples)
    fh = _open_out(args.out)
    w = csv.writer(fh)
    w.writerow(MATE_HEADER)
    for r in rows:
        w.writerow([repr(x) for x in r])
    _close(fh)
    if args.svg:
        fig = Figure((-4, 4, -4, 4), title="mate of the unit circle")
        th = np.linspace(0, 2 * np.pi, 400)
        fig.curve(np.column_stack([np.cos(th), np.sin(th)]), "#000000", 2.0, "base")
        for xy in ms.drawing(400):
            fig.curve(xy, "#d62728", 1.2, "mate")
        fig.save(args.svg)
    worst = max(r[-1] for r in rows)
    if ms.terminated:
        print(f"stopped: {ms.terminated}", file=sys.stderr)
    print(f"segments {len(ms.segments)}  max dancing residual {worst:.3e}", file=sys.stderr)
    return EXIT_OK if worst < 1e-7 else EXIT_FAIL


def cmd_wcurve(args) -> int:
    from .dancing_mates import wcurve_kappa_closed_form, wcurve_make, wcurve_pair, wcurve_trajectory
    from .projective_curves import lf_normalize, proj_curvature

    try:
        spec = wcurve_make(args.family, args.param)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t0 = -1.0 if args.t0 is None else args.t0
    t1 = 1.0 if args.t1 is None else args.t1
    q, _ = wcurve_pair(spec, (t0, t1))
    lf = lf_normalize(q, t0, t1)
    ks = [proj_curvature(lf, t) for t in np.linspace(t0, t1, 7)[1:-1]]
    a1, a0 = spec.charpoly
    print(f"family {spec.family}  char poly l^3 + ({a1:.12g}) l + ({a0:.12g})")
    print(f"kappa {spec.kappa:.15g}")
    print(f"kappa closed form {wcurve_kappa_closed_form(spec):.15g}")
    print(f"kappa numeric {np.mean(ks):.15g}  spread {np.ptp(ks):.3e}")
    if args.out:
        wcurve_trajectory(spec, (t0, t1), args.samples).to_csv(args.out)
    if args.svg:
        from .svg import wcurve_figure

        wcurve_figure(spec.family, args.param).save(args.svg)
    ok = abs(np.mean(ks) - spec.kappa) < 1e-4 and np.ptp(ks) < 1e-4
    return EXIT_OK if ok else EXIT_FAIL


def cmd_figure(args) -> int:
    from . import svg

    if args.name == "circle-mates":
        fig = svg.circle_mates_figure()
    elif args.name == "wcurve":
        fig = svg.wcurve_figure(args.family or "Y1", args.param)
    else:
        fig = svg.rolling_figure(args.family or "Y2", 1.0 if args.param is None else args.param)
    path = args.svg or args.out
    fh = _open_out(path)
    fh.write(fig.to_string())
    _close(fh)
    return EXIT_OK


def cmd_curvature(args) -> int:
    from .curvature_lab import curvature_report
    from .dancing_metric import ChartPoint
    from .suites import _random_chart_point

    if args.point is not None:
        cp = ChartPoint(*args.point)
    else:
        cp = _random_chart_point(np.random.default_rng(args.seed))
    rep = curvature_report(cp)
    data = json.loads(rep.to_json())
    data["point"] = [cp.x, cp.y, cp.a, cp.b]
    fh = _open_out(args.out)
    fh.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _close(fh)
    ok = abs(rep.scalar + 12) < 1e-3 and rep.petrov == "D"
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dancing", description="Point-line pair geometry toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run invariant suites and emit a JSON report")
    p.add_argument("--suite", default="all",
                   choices=["octonion", "distribution", "symmetry", "metric", "curvature", "mates", "rolling", "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive, default=1e-9, help="integrator drift bound (default 1e-9)")
    p.add_argument("--out", help="report path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integrate a random control on the quadric")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=10.0)
    p.add_argument("--tol", type=_positive, default=1e-9)
    p.add_argument("--step-tol", type=_positive, default=1e-13)
    p.add_argument("--amplitude", type=_positive, default=0.05)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("mates", help="solve for mates of the unit circle")
    p.add_argument("--circle", action="store_true", help="base curve is the unit circle (the only one supported)")
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--y1", type=float, default=0.0)
    p.add_argument("--y2", type=float, default=1.0)
    p.add_argument("--const", type=float, default=1.0, help="right-hand side of y''' y^2 = const")
    p.add_argument("--t0", type=float, help="start angle (default 0)")
    p.add_argument("--t1", type=float, help="end angle (default 4 pi)")
    p.add_argument("--samples", type=int, default=50, help="rows per chart segment")
    p.add_argument("--stop-at-zero", action="store_true", help="truncate instead of failing when y reaches 0")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--svg", help="also write a figure")
    p.set_defaults(func=cmd_mates)

    p = sub.add_parser("wcurve", help="orbit curve of constant projective curvature")
    p.add_argument("--family", default="Y1", type=str.upper, choices=["Y1", "Y2", "Y3"])
    p.add_argument("--param", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out", help="trajectory CSV path")
    p.add_argument("--svg", help="figure path")
    p.set_defaults(func=cmd_wcurve)

    p = sub.add_parser("figure", help="write an SVG figure")
    p.add_argument("name", choices=["circle-mates", "wcurve", "rolling"])
    p.add_argument("--family", type=str.upper, choices=["Y1", "Y2", "Y3"])
    p.add_argument("--param", type=float)
    p.add_argument("--out", help="SVG path (default stdout)")
    p.add_argument("--svg", help="alias of --out")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("curvature", help="curvature report at a chart point (x, y, a, b)")
    p.add_argument("--point", type=float, nargs=4, metavar=("X", "Y", "A", "B"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON path (default stdout)")
    p.set_defaults(func=cmd_curvature)
    return ap


def main(argv=None) -> int:
    from .cartan_engel import IntegrationError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, IntegrationError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
