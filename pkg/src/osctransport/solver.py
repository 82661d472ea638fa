"""Exact minimization of the plan oscillation cost for finite instances.

The optimum is one of finitely many y-gaps, so ``solve`` binary-searches the
sorted candidate thresholds between a combinatorial lower bound and the cost
of the increasing coupling.  Feasibility at a level K is decided exactly by
one of two depth-first searches:

* ``StripSearch`` (general masses) enumerates lower envelopes ``f`` of the
  support.  A plan of cost <= K exists iff for some ``f`` the cells allowed
  by the strip ``[f, f^up + K]`` admit a coupling, which is an interval
  transportation problem decided by Hall's condition.
* ``PermutationSearch`` (all cells of equal mass, e.g. quantized measures)
  enumerates assignments directly: by Birkhoff's theorem any plan of cost
  <= K contains a permutation of cost <= K in its support.

Two discretizations are supported for non-atomic measures.  In ``atoms``
mode both measures are replaced by midpoint-quantile atoms and the cost is
the plain discrete one.  In ``cells`` mode each atom keeps its quantile cell;
two x-cells interact when their distance is < delta and the y-gap is taken
between whole y-cells, so the value is the cost of a genuine continuous
plan that spreads each x-cell uniformly over the y-cells it is sent to.
"""
from __future__ import annotations

import heapq
import itertools
import math
from bisect import bisect_left, bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ContractError, RefusalError, ValidationError
from .measure import (AtomicMeasure, Domain, Interval, Measure1D, quantile_cells,
                      quantize, support_domain, to_rat)
from .osceval import osc_plan
from .stepcalc import StepFn, up_transform
from .strip import Strip, SupportSet, contains_support, is_optimal

ORACLE_MAX_N = 8
MODES = ("atoms", "cells")


@dataclass(frozen=True)
class Instance:
    domain: Domain
    target_domain: Domain
    delta: Fraction
    mu: Measure1D
    nu: Measure1D

    def __post_init__(self):
        object.__setattr__(self, "delta", to_rat(self.delta))
        if self.delta <= 0:
            raise ValidationError("delta must be positive")
        self.mu.validate_probability(self.domain)
        self.nu.validate_probability(self.target_domain)

    @property
    def is_atomic(self) -> bool:
        return self.mu.is_atomic and self.nu.is_atomic


@dataclass(frozen=True)
class Plan:
    entries: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        entries = tuple(sorted((to_rat(x), to_rat(y), to_rat(m)) for x, y, m in self.entries))
        if any(m <= 0 for _, _, m in entries):
            raise ValidationError("plan masses must be positive")
        object.__setattr__(self, "entries", entries)

    def marginals(self) -> tuple[AtomicMeasure, AtomicMeasure]:
        return (AtomicMeasure.from_pairs((x, m) for x, _, m in self.entries),
                AtomicMeasure.from_pairs((y, m) for _, y, m in self.entries))

    def support(self) -> SupportSet:
        return SupportSet(tuple((x, y) for x, y, _ in self.entries))

    @property
    def total(self) -> Fraction:
        return sum((m for _, _, m in self.entries), Fraction(0))


@dataclass(frozen=True)
class SolveResult:
    K: Fraction
    plan: Plan
    strip: Strip
    delta: Fraction
    mode: str
    mu_d: AtomicMeasure
    nu_d: AtomicMeasure
    x_cells: tuple[Interval, ...]
    y_cells: tuple[Interval, ...]
    stats: dict = field(default_factory=dict, compare=False)

    def x_cell(self, x) -> Interval:
        return self.x_cells[self.mu_d.positions.index(x)]

    def y_cell(self, y) -> Interval:
        return self.y_cells[self.nu_d.positions.index(y)]

    def support(self) -> SupportSet:
        """Support items; in cells mode each entry stands for x-cell x y-cell."""
        if self.mode == "atoms":
            return self.plan.support()
        return SupportSet(tuple((self.x_cell(x), self.y_cell(y)) for x, y, _ in self.plan.entries))


@dataclass
class SolveConfig:
    """Keyword bundle for :func:`solve`."""

    n: int | None = None
    mode: str = "atoms"
    threads: int = 1
    self_check: bool = True


# ---------------------------------------------------------------------------
# Discretized problem
# ---------------------------------------------------------------------------

@dataclass
class Discrete:
    """Sorted x-cells / y-cells with integer masses (``mass = count * unit``).

    ``wlo[i]..whi[i]`` is the window of x-cells interacting with cell i.
    """

    delta: Fraction
    xs: list[Fraction]
    xcells: list[Interval]
    a: list[int]
    ys: list[Fraction]
    ycells: list[Interval]
    b: list[int]
    unit: Fraction
    mode: str
    wlo: list[int] = field(init=False)
    whi: list[int] = field(init=False)

    def __post_init__(self):
        m = len(self.xcells)
        self.wlo, self.whi = [], []
        lo = 0
        for i in range(m):
            while self.xcells[lo].gap(self.xcells[i]) >= self.delta:
                lo += 1
            self.wlo.append(lo)
        hi = m - 1
        for i in range(m - 1, -1, -1):
            while self.xcells[i].gap(self.xcells[hi]) >= self.delta:
                hi -= 1
            self.whi.append(hi)
        self.whi.reverse()

    @property
    def mu_d(self) -> AtomicMeasure:
        return AtomicMeasure(tuple((x, w * self.unit) for x, w in zip(self.xs, self.a)))

    @property
    def nu_d(self) -> AtomicMeasure:
        return AtomicMeasure(tuple((y, w * self.unit) for y, w in zip(self.ys, self.b)))

    @property
    def equal_masses(self) -> bool:
        return len(set(self.a) | set(self.b)) == 1


def _cells_of(m: Measure1D, n: int | None, mode: str):
    if m.is_atomic:
        return quantile_cells(m, 1)
    if n is None:
        raise ContractError("non-atomic input needs a quantization count")
    if mode == "cells":
        return quantile_cells(m, n)
    return [(Interval.point(x), x, w) for x, w in quantize(m, n).atoms]


def discretize(inst: Instance, n: int | None = None, mode: str = "atoms") -> Discrete:
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}")
    if n is not None and n < 1:
        raise ValidationError("quantization count must be positive")
    xc = _cells_of(inst.mu, n, mode)
    yc = _cells_of(inst.nu, n, mode)
    masses = [w for _, _, w in xc] + [w for _, _, w in yc]
    den = math.lcm(*(w.denominator for w in masses))
    return Discrete(
        delta=inst.delta,
        xs=[x for _, x, _ in xc], xcells=[c for c, _, _ in xc], a=[int(w * den) for _, _, w in xc],
        ys=[y for _, y, _ in yc], ycells=[c for c, _, _ in yc], b=[int(w * den) for _, _, w in yc],
        unit=Fraction(1, den), mode=mode,
    )


def _thresholds(disc: Discrete) -> list[Fraction]:
    vals = {Fraction(0)}
    for D in disc.ycells:
        for E in disc.ycells:
            vals.add(max(Fraction(0), E.hi - D.lo))
    return sorted(vals)


def candidate_thresholds(inst: Instance) -> list[Fraction]:
    """{0} and every pairwise gap between atoms of nu; the optimum is among them."""
    if not inst.nu.is_atomic:
        raise ContractError("candidate_thresholds needs an atomic target")
    ys = inst.nu.positions
    return sorted({Fraction(0)} | {abs(p - q) for p in ys for q in ys})


# ---------------------------------------------------------------------------
# Interval transportation: Hall's condition and earliest-deadline greedy
# ---------------------------------------------------------------------------

def supply_table(ranges: Sequence[tuple[int, int]], supply: Sequence, r: int) -> list[list]:
    """table[s][t] = total supply of the ranges contained in [s, t]."""
    table = [[0] * r for _ in range(r)]
    for (L, R), q in zip(ranges, supply):
        table[L][R] += q
    for s in range(r - 1, -1, -1):
        row = table[s]
        for t in range(1, r):
            row[t] += row[t - 1]
        if s + 1 < r:
            nxt = table[s + 1]
            for t in range(r):
                row[t] += nxt[t]
    return table


def hall_violation(ranges: Sequence[tuple[int, int]], supply: Sequence, demand: Sequence):
    """First y-index range [s, t] with supply({i: range_i in [s, t]}) > demand([s, t]).

    Empty ranges (lo > hi) violate on their own and are reported as (lo, hi).
    """
    r = len(demand)
    for (L, R) in ranges:
        if L > R:
            return (L, R)
    table = supply_table(ranges, supply, r)
    pre = [0]
    for d in demand:
        pre.append(pre[-1] + d)
    for s in range(r):
        row = table[s]
        for t in range(s, r):
            if row[t] > pre[t + 1] - pre[s]:
                return (s, t)
    return None


def edf_plan(ranges: Sequence[tuple[int, int]], supply: Sequence, demand: Sequence):
    """Fill y-cells left to right, serving the x with the earliest range end first.

    Returns ``{(i, k): mass}`` or None when some supply cannot be placed.
    """
    order = sorted(range(len(ranges)), key=lambda i: ranges[i][0])
    rem = list(supply)
    heap: list[tuple[int, int]] = []
    flows: dict[tuple[int, int], object] = {}
    p = 0
    for k, cap in enumerate(demand):
        while p < len(order) and ranges[order[p]][0] <= k:
            i = order[p]
            if rem[i] > 0:
                heapq.heappush(heap, (ranges[i][1], i))
            p += 1
        if heap and heap[0][0] < k:
            return None
        while cap > 0 and heap:
            _, i = heap[0]
            q = min(rem[i], cap)
            flows[(i, k)] = flows.get((i, k), 0) + q
            rem[i] -= q
            cap -= q
            if rem[i] == 0:
                heapq.heappop(heap)
        if cap > 0:
            return None
    if any(rem) or heap:
        return None
    return flows


def flow_feasible(mu_atoms, nu_atoms, allowed: Sequence[Interval]) -> Plan | None:
    """Plan from ``mu_atoms`` to ``nu_atoms`` with x_i sent only into ``allowed[i]``."""
    mu_atoms = [(to_rat(x), to_rat(m)) for x, m in mu_atoms]
    nu_atoms = sorted((to_rat(y), to_rat(m)) for y, m in nu_atoms)
    if len(allowed) != len(mu_atoms):
        raise ValidationError("one allowed interval per source atom is required")
    ys = [y for y, _ in nu_atoms]
    ranges = []
    for J in allowed:
        L = bisect_left(ys, J.lo) + (1 if J.lo_open and J.lo in ys else 0)
        R = bisect_right(ys, J.hi) - 1 - (1 if J.hi_open and J.hi in ys else 0)
        ranges.append((L, R))
    supply = [m for _, m in mu_atoms]
    demand = [m for _, m in nu_atoms]
    if sum(supply) != sum(demand) or hall_violation(ranges, supply, demand) is not None:
        return None
    flows = edf_plan(ranges, supply, demand)
    if flows is None:
        raise ContractError("greedy construction failed although Hall's condition holds")
    return Plan(tuple((mu_atoms[i][0], nu_atoms[k][0], m) for (i, k), m in flows.items() if m))


# ---------------------------------------------------------------------------
# Exact feasibility searches
# ---------------------------------------------------------------------------

class StripSearch:
    """Search f: x-cells -> y-lower-ends with allowed(i) = [f_i, min_{W(i)} f + K].

    f is stored as indices into ``V``, the sorted distinct lower ends of the
    y-cells.  Candidate values are tried in ascending order, or by distance
    to ``hint`` when one is given (probes only need a yes/no answer).
    Failed states are memoized on the window profile of f together with the
    Hall slack left by the cells whose range is final; a state is skipped
    when a failed one with the same profile had at least as much slack.
    """

    def __init__(self, disc: Discrete, K, hint: Sequence[int] | None = None):
        self.disc = disc
        self.K = K = to_rat(K)
        yc = disc.ycells
        self.m, self.r = len(disc.xcells), len(yc)
        self.wlo, self.whi = disc.wlo, disc.whi
        lows = [c.lo for c in yc]
        highs = self.highs = [c.hi for c in yc]
        if lows != sorted(lows) or highs != sorted(highs):
            raise ContractError("y-cells must be sorted with nondecreasing ends")
        V = self.V = sorted(set(lows))
        self.nv = len(V)
        self.Lidx = [bisect_left(lows, v) for v in V]
        self.Ridx = [bisect_right(highs, v + K) - 1 for v in V]
        # least v with Ridx[v] >= L
        self.minv = [bisect_left(self.Ridx, L) for L in range(self.r + 1)]
        # value brackets of a window neighbour: |f_j - f_j'| <= K
        self.downK = [bisect_left(V, v - K) for v in V]
        self.upK = [bisect_right(V, v + K) - 1 for v in V]
        self.pre = [0]
        for d in disc.b:
            self.pre.append(self.pre[-1] + d)
        self.hint = hint
        self.failed: dict = {}
        self.nodes = 0
        self.memo_hits = 0

    def ranges(self, f: Sequence[int]) -> list[tuple[int, int]]:
        out = []
        for i in range(self.m):
            u = min(f[self.wlo[i]:self.whi[i] + 1])
            out.append((self.Lidx[f[i]], self.Ridx[u]))
        return out

    def run(self):
        """``(values, flows)`` for a witness, or None."""
        self.f = [-1] * self.m
        f = self._dfs(0)
        if f is None:
            return None
        flows = edf_plan(self.ranges(f), self.disc.a, self.disc.b)
        if flows is None:
            raise ContractError("greedy construction failed although Hall's condition holds")
        return [self.V[v] for v in f], flows

    def _candidates(self, i: int) -> list[int]:
        f = self.f
        vlo, vhi = 0, self.nv - 1
        for j in range(self.wlo[i], i):
            vlo = max(vlo, self.minv[self.Lidx[f[j]]], self.downK[f[j]])
            vhi = min(vhi, self.upK[f[j]])
        cands = [v for v in range(vlo, vhi + 1) if self.Lidx[v] < self.r]
        if self.hint is not None:
            h = self.hint[i]
            cands.sort(key=lambda v: (abs(v - h), v))
        return cands

    def _dfs(self, i: int):
        if i == self.m:
            return list(self.f)
        for v in self._candidates(i):
            self.nodes += 1
            self.f[i] = v
            pending = self._opening_pending(i)
            state = self._relaxed_state(i) if pending is not None else None
            if state is None:
                continue
            key, slack = state
            key = key + (pending,)
            if self._dominated(key, slack):
                self.memo_hits += 1
                continue
            res = self._dfs(i + 1)
            if res is not None:
                return res
            self._record_failure(key, slack)
        self.f[i] = -1
        return None

    def _opening_pending(self, i: int):
        """Check that f can still be an opening: f_j <= max_{z in W(j)} min_{W(z)} f.

        Replacing f by its opening keeps the erosion and lowers f, so allowed
        ranges only grow; restricting the search to open f loses nothing.
        Returns None when some j can no longer be covered, otherwise the
        unresolved requirements as ``(f_j, first z, last z)`` triples.
        """
        f, wlo, whi = self.f, self.wlo, self.whi
        nxt = wlo[i + 1] if i + 1 < self.m else i + 1
        pending = []
        for j in range(wlo[wlo[i]], i + 1):
            need, alive, done = f[j], False, False
            for z in range(wlo[j], whi[j] + 1):
                if min(f[wlo[z]:min(whi[z], i) + 1]) >= need:
                    alive = True
                    if whi[z] <= i:
                        done = True
                        break
            if not alive:
                return None
            if not done:
                pending.append((need, max(wlo[j], nxt), whi[j]))
        return tuple(sorted(set(pending)))

    def _dominated(self, key, slack) -> bool:
        old = self.failed.get(key)
        return old is not None and bool((old >= slack).all(axis=1).any())

    def _record_failure(self, key, slack) -> None:
        old = self.failed.get(key)
        if old is None:
            self.failed[key] = slack[None, :]
        else:
            # keep an antichain: drop the failures the new one dominates
            keep = ~(old <= slack).all(axis=1)
            self.failed[key] = np.vstack([old[keep], slack[None, :]])

    def _relaxed_state(self, i: int):
        """Check Hall's condition on a relaxation of every completion of f[0..i].

        Unassigned cells get value brackets propagated from the assigned
        prefix through window neighbours; their y-ranges are widened to the
        bracket.  Assigned ranges can only shrink later, so pruning is sound.
        Returns None when pruned, else the memo key (window profile) and the
        Hall slack left by the cells whose range is already final.
        """
        m, f = self.m, self.f
        fmin = f[:i + 1]
        fmax = f[:i + 1]
        for j in range(i + 1, m):
            lo, hi = 0, self.nv - 1
            for jp in range(self.wlo[j], j):
                lo = max(lo, self.downK[fmin[jp]])
                hi = min(hi, self.upK[fmax[jp]])
            if lo > hi:
                return None
            fmin.append(lo)
            fmax.append(hi)
        ranges = []
        for j in range(m):
            u = min(fmax[self.wlo[j]:self.whi[j] + 1])
            L, R = self.Lidx[fmin[j]], self.Ridx[u]
            if L > R:
                return None
            ranges.append((L, R))
        if hall_violation(ranges, self.disc.a, self.disc.b) is not None:
            return None
        closed = [j for j in range(i + 1) if self.whi[j] <= i]
        table = supply_table([ranges[j] for j in closed], [self.disc.a[j] for j in closed], self.r)
        pre, r = self.pre, self.r
        slack = np.array([pre[t + 1] - pre[s] - table[s][t] for s in range(r) for t in range(s, r)],
                         dtype=np.int64)
        start = self.wlo[i + 1] if i + 1 < m else i + 1
        key = (i, tuple((f[j], min(f[self.wlo[j]:i + 1])) for j in range(start, i + 1)))
        return key, slack


class PermutationSearch:
    """Assign x-cell i to a distinct y-cell sigma(i), equal masses on both sides.

    Cost <= K means every interacting pair uses y-cells whose joint span is
    <= K.  y-cells are tried in ascending order, so the first witness is the
    lexicographically smallest assignment.  Failed states are memoized on the
    used y-cells and the extreme y-cells of each window suffix, which is all
    the future cells can see.
    """

    def __init__(self, disc: Discrete, K):
        if not disc.equal_masses or len(disc.xcells) != len(disc.ycells):
            raise ContractError("permutation search needs equal masses")
        self.disc = disc
        self.K = K = to_rat(K)
        yc = disc.ycells
        n = self.n = len(yc)
        self.compatible = [
            [l for l in range(n) if max(yc[k].hi, yc[l].hi) - min(yc[k].lo, yc[l].lo) <= K]
            for k in range(n)
        ]
        self.compat_mask = [sum(1 << l for l in row) for row in self.compatible]
        self.usable = [k for k in range(n) if yc[k].length <= K]
        # span_mask[s]: y-cells s..e with the longest span from s still <= K
        self.span_mask = []
        for s in range(n):
            e = s
            while e < n and yc[e].hi - yc[s].lo <= K:
                e += 1
            self.span_mask.append(((1 << e) - 1) & ~((1 << s) - 1))
        self.full = (1 << n) - 1
        self.failed: set = set()
        self.nodes = 0
        self.memo_hits = 0

    def run(self):
        self.sigma = [-1] * self.n
        if not self._dfs(0, 0):
            return None
        values = [self.disc.ycells[k].lo for k in self.sigma]
        return values, {(i, k): self.disc.a[i] for i, k in enumerate(self.sigma)}

    def _dfs(self, i: int, used: int) -> bool:
        if i == self.n:
            return True
        window = self.sigma[self.disc.wlo[i]:i]
        # a future cell sees a suffix of the window, and only its extreme
        # y-cells constrain it (y-cells are sorted)
        profile, lo, hi = [], self.n, -1
        for k in reversed(window):
            lo, hi = min(lo, k), max(hi, k)
            profile.append((lo, hi))
        key = (used, tuple(profile))
        if key in self.failed:
            self.memo_hits += 1
            return False
        if not self._cliques_fit(i, used, profile):
            self.failed.add(key)
            return False
        mask = self.full & ~used
        for k in window:
            mask &= self.compat_mask[k]
        for k in self.usable:
            if mask >> k & 1:
                self.nodes += 1
                self.sigma[i] = k
                if self._dfs(i + 1, used | 1 << k):
                    return True
        self.sigma[i] = -1
        self.failed.add(key)
        return False

    def _cliques_fit(self, i: int, used: int, profile) -> bool:
        """Each run of x-cells interacting with cell p must land in one span-K block.

        For the run p..whi[p] the cells already placed occupy y-cells lo..hi,
        so some block containing them needs enough free cells for the rest.
        """
        free, whi = self.full & ~used, self.disc.whi
        checks = [(i - 1 - t, lo, hi) for t, (lo, hi) in enumerate(profile)]
        checks.append((i, self.n, -1))
        for p, lo, hi in checks:
            need = whi[p] - i + 1
            if need <= 0:
                continue
            hull = 0 if hi < 0 else ((1 << (hi + 1)) - 1) & ~((1 << lo) - 1)
            if not any(sm & hull == hull and (sm & free).bit_count() >= need
                       for sm in self.span_mask[:min(lo, self.n - 1) + 1]):
                return False
        return True


def _search(disc: Discrete, K: Fraction, hint=None):
    search = PermutationSearch(disc, K) if disc.equal_masses else StripSearch(disc, K, hint)
    res = search.run()
    stats = {"nodes": search.nodes, "memo_hits": search.memo_hits,
             "search": type(search).__name__}
    if res is not None:
        stats["cost"] = _plan_cost(disc, res[1])
    return res, stats


# ---------------------------------------------------------------------------
# Bounds and witnesses
# ---------------------------------------------------------------------------

def _plan_of(disc: Discrete, flows) -> Plan:
    return Plan(tuple((disc.xs[i], disc.ys[k], q * disc.unit) for (i, k), q in flows.items() if q))


def _plan_cost(disc: Discrete, flows) -> Fraction:
    items = [(disc.xcells[i], disc.ycells[k]) for (i, k), q in flows.items() if q]
    return osc_plan(items, disc.delta)


def monotone_start(disc: Discrete) -> tuple[list[int], Fraction]:
    """Envelope indices and cost of the increasing coupling, used to seed the search."""
    m, r = len(disc.xs), len(disc.ys)
    flows = edf_plan([(0, r - 1)] * m, disc.a, disc.b)
    V = sorted({c.lo for c in disc.ycells})
    first: dict[int, int] = {}
    for (i, k), q in sorted(flows.items()):
        if q:
            first.setdefault(i, k)
    hint = [bisect_left(V, disc.ycells[first[i]].lo) for i in range(m)]
    return hint, _plan_cost(disc, flows)


def window_cliques(disc: Discrete) -> list[tuple[int, int]]:
    """Maximal runs [p, q] of x-cells that pairwise interact."""
    out: list[tuple[int, int]] = []
    for p, q in zip(range(len(disc.xs)), disc.whi):
        if not out or out[-1][1] < q:
            out.append((p, q))
    return out


def lower_bound(disc: Discrete) -> Fraction:
    """Cheap lower bound on the optimal cost.

    A clique of interacting x-cells must place its mass in y-cells whose
    overall span is at most K.  Moreover each y-cell is used by some x-cell,
    and every clique through that x-cell needs a y-window containing it.
    """
    yc, b = disc.ycells, disc.b
    r = len(b)
    pre = [0]
    for w in b:
        pre.append(pre[-1] + w)

    def minspan(A, k=None):
        best = None
        for s in range(r if k is None else k + 1):
            e = bisect_left(pre, pre[s] + A) - 1
            if k is not None:
                e = max(e, k)
            if e < r:
                sp = max(Fraction(0), yc[e].hi - yc[s].lo)
                if best is None or sp < best:
                    best = sp
        return best

    cl = window_cliques(disc)
    mass = [sum(disc.a[p:q + 1]) for p, q in cl]
    bound = max(minspan(A) for A in mass)
    member = [[c for c, (p, q) in enumerate(cl) if p <= i <= q] for i in range(len(disc.xs))]
    for k in range(r):
        bound = max(bound, min(max(minspan(mass[c], k) for c in cs) for cs in member))
    return bound


def strip_domain(inst: Instance, disc: Discrete) -> Domain:
    if disc.mode == "atoms" or inst.mu.is_atomic:
        return Domain.points(disc.xs)
    return support_domain(inst.mu)


def lower_envelope(inst: Instance, disc: Discrete, values: Sequence[Fraction]) -> StepFn:
    """Step function equal to ``values[i]`` on x-cell i (cells half-open on the left)."""
    dom = strip_domain(inst, disc)
    if all(c.is_point for c in disc.xcells):
        return StepFn(dom, tuple((Interval.point(x), v) for x, v in zip(disc.xs, values)))
    pieces = [(Interval(c.lo, c.hi, i > 0, False), v) for i, (c, v) in enumerate(zip(disc.xcells, values))]
    return StepFn.from_pieces(dom, pieces)


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def feasible(inst: Instance, K, n: int | None = None, mode: str = "atoms"):
    """``(f, plan)`` when some plan has cost <= K, else None."""
    K = to_rat(K)
    if K < 0:
        raise ValidationError("K must be nonnegative")
    disc = discretize(inst, n, mode)
    res, _ = _search(disc, K)
    if res is None:
        return None
    values, flows = res
    return lower_envelope(inst, disc, values), _plan_of(disc, flows)


def _probe(args):
    disc, K, hint = args
    res, stats = _search(disc, K, hint)
    return res is not None, stats


def solve(inst: Instance, n: int | None = None, mode: str = "atoms", threads: int = 1,
          self_check: bool = True) -> SolveResult:
    """Least K with a plan of cost K, with a certified witness.

    Probes only narrow the candidate range (a feasible probe also caps it at
    the cost of the plan it found), and the returned witness always comes
    from the ascending-order search at the final K, so the output does not
    depend on ``threads``.
    """
    if threads < 1:
        raise ValidationError("threads must be positive")
    disc = discretize(inst, n, mode)
    cands = _thresholds(disc)
    hint, start_cost = monotone_start(disc)
    bound = lower_bound(disc)
    stats = {"probes": 0, "nodes": 0, "memo_hits": 0, "mode": mode, "n": n,
             "x_cells": len(disc.xs), "y_cells": len(disc.ys),
             "max_x_cell": max(c.length for c in disc.xcells),
             "max_y_cell": max(c.length for c in disc.ycells),
             "monotone_cost": start_cost, "lower_bound": bound}
    lo, hi = bisect_left(cands, bound), cands.index(start_cost)
    pool = ProcessPoolExecutor(threads) if threads > 1 else None
    try:
        while lo < hi:
            if pool is None:
                mids = [(lo + hi) // 2]
                outs = [_probe((disc, cands[mids[0]], hint))]
            else:
                step = (hi - lo) / (threads + 1)
                mids = sorted({min(hi - 1, lo + int(step * (t + 1))) for t in range(threads)})
                outs = list(pool.map(_probe, [(disc, cands[k], hint) for k in mids]))
            new_lo, new_hi = lo, hi
            for k, (ok, st) in zip(mids, outs):
                stats["probes"] += 1
                stats["nodes"] += st["nodes"]
                stats["memo_hits"] += st["memo_hits"]
                if ok:
                    new_hi = min(new_hi, cands.index(st["cost"]))
                else:
                    new_lo = max(new_lo, k + 1)
            lo, hi = new_lo, new_hi
    finally:
        if pool is not None:
            pool.shutdown()
    K = cands[lo]
    res, st = _search(disc, K)
    stats["nodes"] += st["nodes"]
    stats["memo_hits"] += st["memo_hits"]
    stats["search"] = st["search"]
    if res is None:
        raise ContractError(f"no witness at K = {K}")
    values, flows = res
    fn = lower_envelope(inst, disc, values)
    strip = Strip(fn, up_transform(fn, inst.delta) + K)
    result = SolveResult(K=K, plan=_plan_of(disc, flows), strip=strip, delta=inst.delta, mode=mode,
                         mu_d=disc.mu_d, nu_d=disc.nu_d,
                         x_cells=tuple(disc.xcells), y_cells=tuple(disc.ycells), stats=stats)
    if self_check:
        check_certificate(result)
    return result


def check_certificate(result: SolveResult) -> None:
    """Raise ContractError unless the result certifies itself."""
    mu_p, nu_p = result.plan.marginals()
    if mu_p != result.mu_d or nu_p != result.nu_d:
        raise ContractError("plan marginals differ from the discretized measures")
    supp = result.support()
    if osc_plan(supp, result.delta) != result.K:
        raise ContractError("plan cost differs from K")
    if not is_optimal(result.strip, result.delta, result.K):
        raise ContractError("certificate strip is not optimal")
    if not contains_support(result.strip, supp):
        raise ContractError("certificate strip misses part of the support")


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def oracle_solve(inst: Instance) -> Fraction:
    """Minimum cost over all assignments of n equal-mass atoms (n <= 8)."""
    if not inst.is_atomic:
        raise ContractError("oracle needs atomic measures")
    xs, ys = inst.mu.positions, inst.nu.positions
    n = len(xs)
    if n != len(ys) or len({m for _, m in inst.mu.atoms} | {m for _, m in inst.nu.atoms}) != 1:
        raise ContractError("oracle needs n equal-mass atoms on each side")
    if n > ORACLE_MAX_N:
        raise RefusalError(f"oracle refuses n = {n} > {ORACLE_MAX_N}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if abs(xs[i] - xs[j]) < inst.delta]
    best = None
    for perm in itertools.permutations(range(n)):
        cost = max((abs(ys[perm[i]] - ys[perm[j]]) for i, j in pairs), default=Fraction(0))
        if best is None or cost < best:
            best = cost
    return best
