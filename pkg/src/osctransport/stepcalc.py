"""Step functions on a compact domain and their window inf / sup transforms.

``up_transform`` is the infimum of a step function over open balls
``|y - x| < delta`` restricted to the domain (a flat erosion);
``down_transform`` is the matching supremum (a flat dilation).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .errors import ContractError, DomainError, ValidationError
from .measure import Domain, Interval, set_difference, set_union, to_rat


class Direction(str, Enum):
    INC = "inc"
    DEC = "dec"


@dataclass(frozen=True)
class StepFn:
    """Finitely many (interval, value) pieces partitioning ``domain`` exactly.

    Construction canonicalizes: adjacent pieces of the same component with
    equal values are merged, so ``==`` is equality of functions.
    """

    domain: Domain
    pieces: tuple[tuple[Interval, Fraction], ...]

    def __post_init__(self):
        pieces = tuple(sorted(((I, to_rat(v)) for I, v in self.pieces),
                              key=lambda p: (p[0].lo, p[0].lo_open)))
        _check_partition(self.domain, pieces)
        object.__setattr__(self, "pieces", _merge_equal(pieces))

    @classmethod
    def constant(cls, domain: Domain, c) -> StepFn:
        return cls(domain, tuple((comp, to_rat(c)) for comp in domain.components))

    @classmethod
    def from_pieces(cls, domain: Domain, pieces: Iterable[tuple[Interval, Fraction]]) -> StepFn:
        """Accept real intervals; each is cut down to its trace on ``domain``."""
        out = []
        for I, v in pieces:
            for J in domain.trace(I):
                out.append((J, v))
        return cls(domain, tuple(out))

    def __call__(self, x) -> Fraction:
        for I, v in self.pieces:
            if I.contains(x):
                return v
        raise DomainError(f"{x} is outside the domain {self.domain}")

    def __neg__(self) -> StepFn:
        return StepFn(self.domain, tuple((I, -v) for I, v in self.pieces))

    def __add__(self, c) -> StepFn:
        c = to_rat(c)
        return StepFn(self.domain, tuple((I, v + c) for I, v in self.pieces))

    def __sub__(self, c) -> StepFn:
        return self + (-to_rat(c))

    def map_values(self, fn) -> StepFn:
        return StepFn(self.domain, tuple((I, fn(v)) for I, v in self.pieces))

    @property
    def values(self) -> list[Fraction]:
        return [v for _, v in self.pieces]

    def breakpoints(self) -> list[Fraction]:
        return sorted({p for I, _ in self.pieces for p in (I.lo, I.hi)})

    def restricted_values(self, interval: Interval) -> list[Fraction]:
        """Values met on ``interval`` in left-to-right order."""
        return [v for I, v in self.pieces if I.intersect(interval) is not None]


def _check_partition(domain: Domain, pieces) -> None:
    k = 0
    for comp in domain.components:
        expected_lo, expected_open = comp.lo, False
        while True:
            if k >= len(pieces):
                raise ValidationError(f"component {comp} is not covered")
            I = pieces[k][0]
            if comp.intersect(I) != I:
                raise ValidationError(f"piece {I} is not inside component {comp}")
            if I.lo != expected_lo or I.lo_open != expected_open:
                raise ValidationError(f"piece {I} does not continue the partition at {expected_lo}")
            k += 1
            if I.hi == comp.hi and not I.hi_open:
                break
            expected_lo, expected_open = I.hi, not I.hi_open
    if k != len(pieces):
        raise ValidationError("pieces outside the domain")


def _merge_equal(pieces):
    out: list[tuple[Interval, Fraction]] = []
    for I, v in pieces:
        if out:
            J, w = out[-1]
            same_comp = J.hi == I.lo and (J.hi_open != I.lo_open)
            if same_comp and w == v:
                out[-1] = (Interval(J.lo, I.hi, J.lo_open, I.hi_open), v)
                continue
        out.append((I, v))
    return tuple(out)


# ---------------------------------------------------------------------------
# Pointwise comparisons
# ---------------------------------------------------------------------------

def sample_points(domain: Domain, breakpoints: Iterable[Fraction]) -> list[Fraction]:
    """One point per elementary cell of the refinement of ``domain`` by ``breakpoints``."""
    pts = sorted(set(breakpoints) | {p for c in domain.components for p in (c.lo, c.hi)})
    out = []
    for i, p in enumerate(pts):
        if domain.contains(p):
            out.append(p)
        if i + 1 < len(pts):
            m = (p + pts[i + 1]) / 2
            if domain.contains(m):
                out.append(m)
    return out


def leq(f: StepFn, g: StepFn) -> bool:
    """``f <= g`` everywhere on the common domain."""
    if f.domain != g.domain:
        raise ContractError("step functions live on different domains")
    return all(f(x) <= g(x) for x in sample_points(f.domain, f.breakpoints() + g.breakpoints()))


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def up_transform(phi: StepFn, delta) -> StepFn:
    """``x -> inf{phi(y) : y in domain, |y - x| < delta}``.

    Levels are processed in increasing order: the set where the result
    equals the k-th value is the open delta-dilation of that level set minus
    the dilations of all lower levels, traced on the domain.
    """
    delta = to_rat(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    covered: list[Interval] = []
    out: list[tuple[Interval, Fraction]] = []
    for level in sorted(set(phi.values)):
        dil = set_union([Interval.open(I.lo - delta, I.hi + delta)
                         for I, v in phi.pieces if v == level])
        fresh = set_difference(dil, covered)
        for J in fresh:
            for K in phi.domain.trace(J):
                out.append((K, level))
        covered = set_union(covered, dil)
    return StepFn(phi.domain, tuple(out))


def down_transform(phi: StepFn, delta) -> StepFn:
    """``x -> sup{phi(y) : y in domain, |y - x| < delta}``."""
    return -up_transform(-phi, delta)


@dataclass(frozen=True)
class ConjugatePair:
    phi: StepFn
    psi: StepFn
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", to_rat(self.delta))
        if not is_conjugate_pair(self.phi, self.psi, self.delta):
            raise ContractError("(phi, psi) is not a conjugate pair")


def conjugate_closure(phi: StepFn, delta) -> ConjugatePair:
    """``(phi^up-down, phi^up)``, always a conjugate pair."""
    up = up_transform(phi, delta)
    return ConjugatePair(down_transform(up, delta), up, delta)


def is_conjugate_pair(phi: StepFn, psi: StepFn, delta) -> bool:
    return up_transform(phi, delta) == psi and down_transform(psi, delta) == phi


# ---------------------------------------------------------------------------
# Floors and the monotone decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Run:
    """Maximal stretch of consecutive pieces sharing a value (may span gaps)."""

    value: Fraction
    pieces: tuple[Interval, ...]

    @property
    def hull(self) -> Interval:
        a, b = self.pieces[0], self.pieces[-1]
        return Interval(a.lo, b.hi, a.lo_open, b.hi_open)


def runs(fn: StepFn) -> list[Run]:
    out: list[Run] = []
    for I, v in fn.pieces:
        if out and out[-1].value == v:
            out[-1] = Run(v, out[-1].pieces + (I,))
        else:
            out.append(Run(v, (I,)))
    return out


def _floor_indices(rs: list[Run]) -> list[int]:
    return [k for k in range(1, len(rs) - 1)
            if rs[k - 1].value > rs[k].value < rs[k + 1].value]


def find_floors(psi: StepFn) -> list[Interval]:
    """Runs strictly below both neighbours."""
    rs = runs(psi)
    return [rs[k].hull for k in _floor_indices(rs)]


def find_ceilings(phi: StepFn) -> list[Interval]:
    return find_floors(-phi)


def floor_separations(psi: StepFn) -> list[Fraction]:
    """``inf I_{k+1} - sup I_{k-1}`` for every floor ``I_k``."""
    rs = runs(psi)
    return [rs[k + 1].hull.lo - rs[k - 1].hull.hi for k in _floor_indices(rs)]


def max_floors(domain: Domain, delta) -> int:
    return int(domain.diameter // (2 * to_rat(delta)))


def is_monotone_on(fn: StepFn, interval: Interval, direction: Direction) -> bool:
    vals = fn.restricted_values(interval)
    if direction is Direction.INC:
        return all(a <= b for a, b in zip(vals, vals[1:]))
    return all(a >= b for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True)
class MonotoneDecomposition:
    floors: tuple[Interval, ...]
    rises: tuple[Interval | None, ...]
    falls: tuple[Interval | None, ...]
    merged: tuple[tuple[Interval, Direction], ...]
    delta: Fraction
    split_points: tuple[Fraction, ...] = field(default=())

    @property
    def structural(self) -> list[Interval | None]:
        """G_1, H_1, F_1, G_2, ..., F_N, G_{N+1}, H_{N+1} (None for empty)."""
        out: list[Interval | None] = []
        for i in range(len(self.rises)):
            out += [self.rises[i], self.falls[i]]
            if i < len(self.floors):
                out.append(self.floors[i])
        return out


def _hull(intervals: list[Interval]) -> Interval | None:
    if not intervals:
        return None
    a, b = intervals[0], intervals[-1]
    return Interval(a.lo, b.hi, a.lo_open, b.hi_open)


def monotone_decomposition(pair: ConjugatePair) -> MonotoneDecomposition:
    """Cut the domain into intervals on which phi and psi share a monotonicity.

    Between two floors of psi the runs rise to a single peak then fall; the
    rise (peak included) is G, the fall is H.  Each floor is split at the
    midpoint of its neighbours; its right half joins the next rise and its
    left half joins the preceding fall.
    """
    if not isinstance(pair, ConjugatePair):
        raise ContractError("monotone_decomposition needs a ConjugatePair")
    phi, psi, delta = pair.phi, pair.psi, pair.delta
    rs = runs(psi)
    fl = _floor_indices(rs)
    bounds = [-1] + fl + [len(rs)]
    rises: list[list[Interval]] = []
    falls: list[list[Interval]] = []
    for a, b in zip(bounds, bounds[1:]):
        seg = list(range(a + 1, b))
        peak = max(seg, key=lambda k: rs[k].value)
        rises.append([I for k in seg if k <= peak for I in rs[k].pieces])
        falls.append([I for k in seg if k > peak for I in rs[k].pieces])
    split_points = []
    floor_left: list[list[Interval]] = []
    floor_right: list[list[Interval]] = []
    for k in fl:
        m = (rs[k + 1].hull.lo + rs[k - 1].hull.hi) / 2
        split_points.append(m)
        left, right = [], []
        for I in rs[k].pieces:
            L = I.intersect(Interval(I.lo, m)) if m >= I.lo else None
            R = I.intersect(Interval(m, I.hi, True, False)) if m < I.hi else None
            if L is not None:
                left.append(L)
            if R is not None:
                right.append(R)
        floor_left.append(left)
        floor_right.append(right)
    merged_parts: list[tuple[list[Interval], Direction]] = []
    for i in range(len(rises)):
        inc = (floor_right[i - 1] if i > 0 else []) + rises[i]
        dec = falls[i] + (floor_left[i] if i < len(fl) else [])
        merged_parts.append((inc, Direction.INC))
        merged_parts.append((dec, Direction.DEC))
    merged = tuple((_hull(parts), d) for parts, d in merged_parts if parts)
    dec_obj = MonotoneDecomposition(
        floors=tuple(rs[k].hull for k in fl),
        rises=tuple(_hull(g) for g in rises),
        falls=tuple(_hull(h) for h in falls),
        merged=merged,
        delta=delta,
        split_points=tuple(split_points),
    )
    _verify_decomposition(phi, psi, dec_obj)
    return dec_obj


def _verify_decomposition(phi: StepFn, psi: StepFn, dec: MonotoneDecomposition) -> None:
    for I, d in dec.merged:
        if not (is_monotone_on(psi, I, d) and is_monotone_on(phi, I, d)):
            raise ContractError(f"functions are not {d.value} on {I}")
    # every point of the domain lies in exactly one merged interval
    cuts = [p for I, _ in dec.merged for p in (I.lo, I.hi)]
    for x in sample_points(psi.domain, cuts + psi.breakpoints()):
        hits = sum(1 for I, _ in dec.merged if I.contains(x))
        if hits != 1:
            raise ContractError(f"merged intervals cover {x} {hits} times")
