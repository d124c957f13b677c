"""Small hand-written SVG emitter for curve figures.

Coordinates are affine-chart points; the figure flips y so the picture reads
with y upward. Polylines are broken wherever a point leaves the clip box or
jumps by more than a fraction of the box, which keeps curves through the
line at infinity from drawing spurious chords.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22"]


def chart_xy(points, axes=(1, 2), denom=0):
    """Affine chart (P[axes[0]] / P[denom], P[axes[1]] / P[denom]) of homogeneous rows."""
    P = np.atleast_2d(np.asarray(points, float))
    w = P[:, denom]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.column_stack([P[:, axes[0]] / w, P[:, axes[1]] / w])


def split_polyline(xy, box, jump=0.25):
    """Pieces of a sampled curve that stay in ``box = (xmin, xmax, ymin, ymax)``."""
    xmin, xmax, ymin, ymax = box
    limit = jump * max(xmax - xmin, ymax - ymin)
    pieces, cur = [], []
    prev = None
    for x, y in np.asarray(xy, float):
        inside = np.isfinite(x) and np.isfinite(y) and xmin <= x <= xmax and ymin <= y <= ymax
        if not inside or (prev is not None and np.hypot(x - prev[0], y - prev[1]) > limit):
            if len(cur) > 1:
                pieces.append(np.array(cur))
            cur = []
        if inside:
            cur.append((x, y))
            prev = (x, y)
        else:
            prev = None
    if len(cur) > 1:
        pieces.append(np.array(cur))
    return pieces


class Figure:
    def __init__(self, box=(-3.0, 3.0, -3.0, 3.0), size=600, title=""):
        self.box = tuple(map(float, box))
        self.size = int(size)
        self.title = title
        self.items = []

    def _map(self, xy):
        xmin, xmax, ymin, ymax = self.box
        s = self.size / max(xmax - xmin, ymax - ymin)
        xy = np.asarray(xy, float)
        return np.column_stack([(xy[:, 0] - xmin) * s, (ymax - xy[:, 1]) * s])

    def curve(self, xy, color="#000000", width=1.0, cls="curve", dash=None):
        """Add a sampled curve; returns the number of drawn pieces."""
        pieces = split_polyline(xy, self.box)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        for piece in pieces:
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in self._map(piece))
            self.items.append(f'<polyline class="{cls}" fill="none" stroke="{color}" '
                              f'stroke-width="{width}"{extra} points="{pts}"/>')
        return len(pieces)

    def segment(self, a, b, color="#555555", width=0.8, cls="line"):
        (x1, y1), (x2, y2) = self._map(np.array([a, b], float))
        self.items.append(f'<line class="{cls}" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                          f'stroke="{color}" stroke-width="{width}"/>')

    def dot(self, xy, r=3.0, color="#000000", cls="point"):
        (x, y), = self._map(np.array([xy], float))
        self.items.append(f'<circle class="{cls}" cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>')

    def line_through(self, a, b, color="#555555", width=0.8, cls="line"):
        """Draw the full chord of the box along the line through a and b."""
        a, b = np.asarray(a, float), np.asarray(b, float)
        d = b - a
        if np.linalg.norm(d) == 0:
            return
        xmin, xmax, ymin, ymax = self.box
        big = 4 * max(xmax - xmin, ymax - ymin)
        d = d / np.linalg.norm(d)
        self.curve(np.array([a - big * d, a, a + big * d]), color, width, cls)

    def to_string(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">')
        body = [head, f'<rect width="{self.size}" height="{self.size}" fill="white"/>']
        if self.title:
            body.append(f'<title>{escape(self.title)}</title>')
        body.extend(self.items)
        body.append("</svg>")
        return "\n".join(body) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_string())


# Figures ----------------------------------------------------------------------

def circle_mates_figure(inits=None, span=(0.0, 4 * np.pi), box=(-4.0, 4.0, -4.0, 4.0)) -> Figure:
    """Unit circle with the turning-point curves of several mates."""
    from .dancing_mates import circle_mates

    if inits is None:
        inits = [(1.0, s, 1.0) for s in np.linspace(-1.0, 1.0, 10)]
    fig = Figure(box, title="mates of the unit circle")
    th = np.linspace(0, 2 * np.pi, 400)
    fig.curve(np.column_stack([np.cos(th), np.sin(th)]), "#000000", 2.0, "base")
    for k, init in enumerate(inits):
        ms = circle_mates(init, span, on_zero="stop")
        for xy in ms.drawing(300):
            fig.curve(xy, PALETTE[k % len(PALETTE)], 1.0, "mate")
    return fig


def wcurve_figure(family="Y1", param=None, span=(-3.0, 3.0), n=600) -> Figure:
    """The orbit point curve and the turning points of its partner line curve."""
    from .dancing_mates import wcurve_make, wcurve_pair

    spec = wcurve_make(family, param)
    q, p = wcurve_pair(spec, span)
    ts = np.linspace(span[0], span[1], n)
    Q = np.array([q.series(t, 0).c[0] for t in ts])
    B = []
    for t in ts:
        s = p.series(t, 1).c
        B.append(np.cross(s[0], s[1]))
    # chart: divide by the third coordinate, as for the base point e3
    xq = chart_xy(Q, (0, 1), 2)
    xb = chart_xy(np.array(B), (0, 1), 2)
    finite = np.vstack([xq, xb])
    finite = finite[np.all(np.isfinite(finite), axis=1)]
    r = float(min(np.percentile(np.abs(finite), 90) * 1.3, 50.0)) if finite.size else 3.0
    fig = Figure((-r, r, -r, r), title=f"{spec.family} orbit pair, kappa = {spec.kappa:.6g}")
    fig.curve(xq, PALETTE[0], 1.6, "point-curve")
    fig.curve(xb, PALETTE[1], 1.6, "line-turning-points")
    return fig


def rolling_figure(family="Y2", param=1.0, times=(-0.6, 0.0, 0.6), span=(-1.0, 1.0)) -> Figure:
    """Curve, osculating conic at t = 0 (traced as F (1, s, s^2/2) in the frame
    F = [A, A', A'']), one development and the lines it carries."""
    from .dancing_mates import wcurve_make, wcurve_pair
    from .projective_curves import lf_normalize
    from .projective_rolling import development_through

    spec = wcurve_make(family, param)
    q, _ = wcurve_pair(spec, span)
    lf = lf_normalize(q, *span)
    ts = np.linspace(span[0], span[1], 300)
    xq = chart_xy([q.series(t, 0).c[0] for t in ts], (0, 1), 2)
    fig = Figure((-3, 3, -3, 3), title="osculating conic, development and parallel lines")
    fig.curve(xq, "#000000", 2.0, "base")
    t0 = 0.0
    F = np.column_stack(lf.lift_series(t0, 2).derivatives())
    s = np.tan(np.linspace(-np.pi / 2 + 1e-3, np.pi / 2 - 1e-3, 600))
    conic_pts = (F @ np.vstack([np.ones_like(s), s, s**2 / 2])).T
    fig.curve(chart_xy(conic_pts, (0, 1), 2), PALETTE[0], 1.2, "conic")
    A0 = F[:, 0]
    ell0 = np.cross(A0, A0 + 0.3 * F[:, 1] + 0.8 * F[:, 2])
    dev = development_through(lf, ell0, t0)
    xd = chart_xy([dev.point(t) for t in ts], (0, 1), 2)
    fig.curve(xd, PALETTE[1], 1.2, "development", dash="4,3")
    for t1 in times:
        a = q.series(t1, 0).c[0]
        b = dev.point(t1)
        pa, pb = chart_xy([a, b], (0, 1), 2)
        if np.linalg.norm(pa - pb) > 1e-9 and np.all(np.isfinite([pa, pb])):
            fig.line_through(pa, pb, PALETTE[2], 0.9, "transported")
        fig.dot(pa, 3.0, "#000000")
    return fig
