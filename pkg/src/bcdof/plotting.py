"""Figure rendering for the report-producing CLI commands.

Figures are written next to the delimited outputs; consumers who prefer
their own styling can plot the CSV files instead.
"""

from __future__ import annotations

from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def apply_style():
    plt.rcParams.update({
        "font.size": 9,
        "axes.labelsize": 10,
        "legend.fontsize": 8,
        "figure.figsize": (4.5, 3.2),
        "figure.dpi": 120,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "grid.linestyle": "--",
        "lines.linewidth": 1.2,
        "lines.markersize": 4,
        "savefig.dpi": 200,
        "savefig.bbox": "tight",
    })


def save_figure(fig, path) -> None:
    fig.savefig(path)
    plt.close(fig)


def curve_figure(points, path) -> None:
    """Normalized sum-DoF versus M/N, one line per (K, mode)."""
    apply_style()
    fig, ax = plt.subplots()
    series = {}
    for p in points:
        series.setdefault((p["K"], p["mode"]), []).append(
            (float(Fraction(p["ratio"])), float(Fraction(p["value"])))
        )
    for (k, mode), pts in sorted(series.items()):
        pts.sort()
        xs = [x for x, _ in pts]
        ys = [y for _, y in pts]
        style = "-" if mode == "delayed" else "--"
        ax.plot(xs, ys, style, marker="o" if mode == "delayed" else "s",
                label=f"K={k}, {mode}")
    ax.set_xlabel("M/N")
    ax.set_ylabel("sum-DoF / N")
    ax.legend()
    save_figure(fig, path)


def region_figure_2d(named_regions, vertex_sets, path) -> None:
    """Filled polygon of each two-user region (vertex hull in the plane)."""
    apply_style()
    fig, ax = plt.subplots()
    for (name, _region), verts in zip(named_regions, vertex_sets):
        pts = sorted((float(v[0]), float(v[1])) for v in verts)
        if not pts:
            continue
        # order polygon corners by angle around the centroid
        cx = sum(x for x, _ in pts) / len(pts)
        cy = sum(y for _, y in pts) / len(pts)
        import math

        ordered = sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        xs = [p[0] for p in ordered] + [ordered[0][0]]
        ys = [p[1] for p in ordered] + [ordered[0][1]]
        ax.plot(xs, ys, marker="o", label=name)
        ax.fill(xs, ys, alpha=0.15)
    ax.set_xlabel("d[-1]")
    ax.set_ylabel("d[-2]")
    ax.legend()
    save_figure(fig, path)


def residual_figure(reports, path) -> None:
    """Per-trial worst residual on a log axis, colored by outcome."""
    apply_style()
    fig, ax = plt.subplots()
    xs = list(range(len(reports)))
    ys = [max((rx.residual for rx in r.receivers), default=0.0) for r in reports]
    ok = [r.success for r in reports]
    floor = 1e-18
    ax.scatter([x for x, o in zip(xs, ok) if o],
               [max(y, floor) for y, o in zip(ys, ok) if o],
               s=12, label="success")
    if not all(ok):
        ax.scatter([x for x, o in zip(xs, ok) if not o],
                   [max(y, floor) for y, o in zip(ys, ok) if not o],
                   s=12, marker="x", label="failure")
    ax.set_yscale("log")
    ax.set_xlabel("trial")
    ax.set_ylabel("max relative residual")
    ax.legend()
    save_figure(fig, path)
