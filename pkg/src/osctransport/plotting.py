"""CSV samples and SVG drawings of maps and strips."""
from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

from .measure import Interval
from .piecewise import PiecewiseMap
from .stepcalc import StepFn
from .strip import Strip

FILL = 64


def map_rows(T: PiecewiseMap, fill: int = FILL) -> list[list[tuple[Fraction, Fraction]]]:
    """One polyline per segment: its end limits plus evenly spaced interior samples."""
    lines = []
    for s in T.segments():
        I = s.interval
        if I.is_point:
            lines.append([(I.lo, s.y_lo)])
            continue
        xs = [I.lo + I.length * k / fill for k in range(fill + 1)]
        lines.append([(x, s(x, limit=True)) for x in xs])
    return lines


def _cells(*fns: StepFn) -> list[Interval]:
    """Common refinement of the piece structure of step functions on one domain."""
    cuts = sorted({I.lo for f in fns for I, _ in f.pieces} | {I.hi for f in fns for I, _ in f.pieces})
    out = []
    for comp in fns[0].domain.components:
        pts = [c for c in cuts if comp.lo <= c <= comp.hi]
        if comp.is_point:
            out.append(comp)
            continue
        for a, b in zip(pts, pts[1:]):
            out.append(Interval.point(a))
            out.append(Interval.open(a, b))
        out.append(Interval.point(pts[-1]))
    return out


def strip_rows(strip: Strip) -> list[tuple[Fraction, Fraction, Fraction]]:
    """(x, lower, upper) at both ends of every cell of the common refinement."""
    rows = []
    for I in _cells(strip.lower, strip.upper):
        x = I.mid
        lo, up = strip.lower(x), strip.upper(x)
        rows.append((I.lo, lo, up))
        if not I.is_point:
            rows.append((I.hi, lo, up))
    return rows


def write_map_csv(T: PiecewiseMap, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "T"])
        for line in map_rows(T):
            for x, y in line:
                w.writerow([str(x), str(y)])


def write_strip_csv(strip: Strip, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "lower", "upper"])
        for x, lo, up in strip_rows(strip):
            w.writerow([str(x), str(lo), str(up)])


def _figure(title: str):
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.set_xlabel("x")
    ax.set_title(title, fontsize=10)
    ax.grid(True, linewidth=0.3)
    return plt, fig, ax


def plot_map(T: PiecewiseMap, path, delta=None, K=None) -> None:
    label = "T(x)"
    notes = [f"{k} = {v}" for k, v in (("delta", delta), ("K", K)) if v is not None]
    plt, fig, ax = _figure(", ".join(notes) or label)
    for line in map_rows(T):
        xs, ys = [float(x) for x, _ in line], [float(y) for _, y in line]
        if len(line) == 1:
            ax.plot(xs, ys, "o", color="C0", markersize=3)
        else:
            ax.plot(xs, ys, color="C0", linewidth=1.5)
    ax.set_ylabel(label)
    fig.savefig(Path(path), format="svg")
    plt.close(fig)


def plot_strip(strip: Strip, path, delta=None, K=None) -> None:
    notes = [f"{k} = {v}" for k, v in (("delta", delta), ("K", K)) if v is not None]
    plt, fig, ax = _figure(", ".join(notes) or "strip")
    rows = strip_rows(strip)
    xs = [float(x) for x, _, _ in rows]
    ax.plot(xs, [float(v) for _, v, _ in rows], color="C0", label="lower")
    ax.plot(xs, [float(v) for _, _, v in rows], color="C3", label="upper")
    ax.legend(fontsize=8)
    fig.savefig(Path(path), format="svg")
    plt.close(fig)
