"""Brute-force references written independently of the package algorithms."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction as F

import networkx as nx


def dist_to(x, I):
    """Distance from x to the closure of interval I."""
    return max(I.lo - x, x - I.hi, F(0))


def window_inf(phi, x, delta):
    """inf of phi over the open delta-ball around x, read off the pieces directly."""
    return min(v for I, v in phi.pieces if dist_to(x, I) < delta)


def window_sup(phi, x, delta):
    return max(v for I, v in phi.pieces if dist_to(x, I) < delta)


def probe_points(domain, cuts, delta):
    """Cut points, their +-delta shifts and all midpoints, kept inside ``domain``."""
    base = set(cuts) | {c.lo for c in domain.components} | {c.hi for c in domain.components}
    pts = sorted(base | {p + s for p in base for s in (delta, -delta)})
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return [p for p in sorted(set(pts) | set(mids)) if domain.contains(p)]


def osc_plan_pairs(points, delta):
    """max |y - y'| over point pairs with |x - x'| < delta."""
    return max(abs(y - yp) for x, y in points for xp, yp in points if abs(x - xp) < delta)


def osc_map_grid(T, lo, hi, delta, N):
    """Lower estimate of the oscillation of T from the grid lo + k (hi - lo) / N."""
    xs = [lo + (hi - lo) * F(k, N) for k in range(N + 1)]
    ys = [T(x) for x in xs]
    best = F(0)
    for i in range(len(xs)):
        for j in range(i, len(xs)):
            if xs[j] - xs[i] >= delta:
                break
            best = max(best, abs(ys[i] - ys[j]))
    return best


def _scale(values):
    den = math.lcm(*(F(v).denominator for v in values))
    return den


def transport_feasible(mu_atoms, nu_atoms, allowed_pairs) -> bool:
    """Max-flow check that mu can be shipped to nu using only ``allowed_pairs`` (i, k)."""
    den = _scale([w for _, w in mu_atoms] + [w for _, w in nu_atoms])
    G = nx.DiGraph()
    for i, (_, w) in enumerate(mu_atoms):
        G.add_edge("s", ("x", i), capacity=int(w * den))
    for k, (_, w) in enumerate(nu_atoms):
        G.add_edge(("y", k), "t", capacity=int(w * den))
    for i, k in allowed_pairs:
        G.add_edge(("x", i), ("y", k), capacity=den)
    need = sum(int(w * den) for _, w in mu_atoms)
    if "t" not in G or "s" not in G:
        return False
    return nx.maximum_flow_value(G, "s", "t") == need


def min_cost_by_supports(mu_atoms, nu_atoms, delta):
    """Least plan oscillation by enumerating, for each source atom, its set of targets."""
    m, r = len(mu_atoms), len(nu_atoms)
    xs = [x for x, _ in mu_atoms]
    ys = [y for y, _ in nu_atoms]
    subsets = [s for k in range(1, r + 1) for s in itertools.combinations(range(r), k)]
    best = None
    for choice in itertools.product(subsets, repeat=m):
        pts = [(xs[i], ys[k]) for i in range(m) for k in choice[i]]
        cost = osc_plan_pairs(pts, delta)
        if best is not None and cost >= best:
            continue
        pairs = [(i, k) for i in range(m) for k in choice[i]]
        if transport_feasible(mu_atoms, nu_atoms, pairs):
            best = cost
    return best


def bisect_quantile(cdf, p, lo, hi, steps=60):
    """Float bisection for the least x with cdf(x) >= p."""
    lo, hi = float(lo), float(hi)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if cdf(F(mid)) >= p:
            hi = mid
        else:
            lo = mid
    return hi
