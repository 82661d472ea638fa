"""Strips [lower, upper] between two step functions and the optimality test."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import ContractError, ValidationError
from .measure import AtomicMeasure, Domain, Interval, Measure1D, to_rat
from .stepcalc import StepFn, down_transform, leq, sample_points, up_transform


@dataclass(frozen=True)
class SupportSet:
    """Finite support; a coordinate may be an Interval (a segment of the support)."""

    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValidationError("support must be nonempty")
        object.__setattr__(self, "points", pts)

    def __iter__(self):
        return iter(self.points)

    @property
    def x_grid(self) -> list[Fraction]:
        return sorted({x for x, _ in self.points if not isinstance(x, Interval)})


@dataclass(frozen=True)
class Strip:
    lower: StepFn
    upper: StepFn

    def __post_init__(self):
        if self.lower.domain != self.upper.domain:
            raise ValidationError("strip bounds live on different domains")
        if not leq(self.lower, self.upper):
            raise ValidationError("strip lower bound exceeds upper bound")

    @property
    def domain(self) -> Domain:
        return self.lower.domain


def extract_strip(support: SupportSet | Iterable, domain: Domain) -> Strip:
    """Fiber min / max of a point support, extended to ``domain`` by Voronoi cells.

    The midpoint between two grid points belongs to the left cell.
    """
    pts = list(support)
    if not pts:
        raise ContractError("empty support")
    fibers: dict[Fraction, list[Fraction]] = {}
    for x, y in pts:
        x, y = to_rat(x), to_rat(y)
        if not domain.contains(x):
            raise ContractError(f"support point x={x} lies outside the domain")
        fibers.setdefault(x, []).append(y)
    grid = sorted(fibers)
    lo_pieces, hi_pieces = [], []
    for i, x in enumerate(grid):
        a = domain.lo if i == 0 else (grid[i - 1] + x) / 2
        b = domain.hi if i == len(grid) - 1 else (x + grid[i + 1]) / 2
        cell = Interval(a, b, i > 0, False)
        lo_pieces.append((cell, min(fibers[x])))
        hi_pieces.append((cell, max(fibers[x])))
    return Strip(StepFn.from_pieces(domain, lo_pieces), StepFn.from_pieces(domain, hi_pieces))


def is_optimal(strip: Strip, delta, K) -> bool:
    """Pair condition ``|x - x'| < delta => |y - y'| <= K`` on the whole strip.

    Equivalent to ``down_transform(upper) <= lower + K`` pointwise.
    """
    return leq(down_transform(strip.upper, delta), strip.lower + to_rat(K))


def enlarge(strip: Strip, delta, K) -> Strip:
    """Replace [f, g] by the maximal optimal strip [f^up-down, f^up + K]."""
    if not is_optimal(strip, delta, K):
        raise ContractError("enlarge needs an optimal strip")
    up = up_transform(strip.lower, delta)
    return Strip(down_transform(up, delta), up + to_rat(K))


def _bounds_on(fn: StepFn, X: Interval) -> list[Fraction]:
    """Values of ``fn`` on X; for a segment only the open interior counts."""
    if X.is_point:
        return [fn(X.lo)]
    inner = Interval(X.lo, X.hi, True, True)
    return fn.restricted_values(inner)


def contains_support(strip: Strip, support: SupportSet | Iterable) -> bool:
    """Every support point satisfies lower(x) <= y <= upper(x).

    Segment items X x Y are checked on the interior of X, the rest being a
    null set for an atomless first marginal.
    """
    for x, y in support:
        X = x if isinstance(x, Interval) else Interval.point(to_rat(x))
        Y = y if isinstance(y, Interval) else Interval.point(to_rat(y))
        if X.is_point and not strip.domain.contains(X.lo):
            return False
        if not X.is_point and not strip.domain.trace(X):
            return False
        lows, highs = _bounds_on(strip.lower, X), _bounds_on(strip.upper, X)
        if not lows or Y.lo < max(lows) or Y.hi > min(highs):
            return False
    return True


def contains_graph(strip: Strip, T, m: Measure1D) -> bool:
    """The set {x : T(x) outside [lower(x), upper(x)]} is m-null."""
    if isinstance(m, AtomicMeasure):
        for x, _ in m.atoms:
            y = T(x)
            if not strip.domain.contains(x) or not (strip.lower(x) <= y <= strip.upper(x)):
                return False
        return True
    cuts = set(strip.lower.breakpoints()) | set(strip.upper.breakpoints())
    cuts |= set(T.breakpoints()) | {p for I, _ in m.pieces for p in (I.lo, I.hi)}
    segs = list(T.segments())
    pts = sorted(cuts)
    for a, b in zip(pts, pts[1:]):
        mid = (a + b) / 2
        dens = sum((d for I, d in m.pieces if I.lo < mid < I.hi), Fraction(0))
        if dens == 0:
            continue
        if not strip.domain.contains(mid):
            return False
        seg = next((s for s in segs if s.interval.contains(mid)), None)
        if seg is None:
            return False
        lo, hi = strip.lower(mid), strip.upper(mid)
        y0, y1 = seg(a, limit=True), seg(b, limit=True)
        # T is affine on (a, b): it leaves [lo, hi] on a set of positive length
        # iff one of its end limits does
        if min(y0, y1) < lo or max(y0, y1) > hi:
            return False
    return True


def grid_points(strip: Strip, delta) -> list[Fraction]:
    """Sample points refining every breakpoint and its +-delta shifts."""
    bps = strip.lower.breakpoints() + strip.upper.breakpoints()
    delta = to_rat(delta)
    return sample_points(strip.domain, bps + [p + s for p in bps for s in (delta, -delta)])
