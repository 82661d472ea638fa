"""Exact evaluation of the oscillation cost of maps and of plan supports."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .errors import ContractError, DomainError
from .measure import Domain, Interval, to_rat


def _pair_sup(s, t, delta) -> Fraction | None:
    """sup |s(x) - t(x')| over x in s, x' in t, |x - x'| < delta (None if no such pair).

    The feasible set is convex, so the supremum of the affine objective is its
    maximum over the vertices of the closed polygon box-cap-band.
    """
    I, J = s.interval, t.interval
    if I.gap(J) >= delta:
        return None
    cands = []
    for x in (I.lo, I.hi):
        for xp in (J.lo, J.hi):
            if abs(x - xp) <= delta:
                cands.append((x, xp))
        for xp in (x - delta, x + delta):
            if J.lo <= xp <= J.hi:
                cands.append((x, xp))
    for xp in (J.lo, J.hi):
        for x in (xp - delta, xp + delta):
            if I.lo <= x <= I.hi:
                cands.append((x, xp))
    return max(abs(s(x, limit=True) - t(xp, limit=True)) for x, xp in cands)


def osc_map(T, supp_mu: Domain, delta) -> Fraction:
    """sup |T(x) - T(x')| over x, x' in ``supp_mu`` with |x - x'| < delta.

    The value is the true supremum: at open segment ends one-sided limits are
    used, so it may not be attained.
    """
    delta = to_rat(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    segs = []
    for s in T.segments():
        for comp in supp_mu.components:
            c = s.clip(comp)
            if c is not None:
                segs.append(c)
    segs.sort(key=lambda s: (s.interval.lo, s.interval.hi))
    best = Fraction(0)
    for i, s in enumerate(segs):
        for t in segs[i:]:
            v = _pair_sup(s, t, delta)
            if v is not None and v > best:
                best = v
    return best


def _as_interval(v) -> Interval:
    return v if isinstance(v, Interval) else Interval.point(to_rat(v))


def osc_plan(support: Iterable, delta) -> Fraction:
    """Oscillation of a finite support, possibly made of rectangles.

    Items are ``(x, y)`` where each coordinate is a rational or an
    :class:`Interval`; an item stands for the closed set X x Y.  Two items
    interact when their x-parts are at distance < delta; they then
    contribute the largest y-gap between them.
    """
    delta = to_rat(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    items = [(_as_interval(x), _as_interval(y)) for x, y in support]
    if not items:
        raise ContractError("empty support")
    items.sort(key=lambda it: it[0].lo)
    best = Fraction(0)
    for i, (X, Y) in enumerate(items):
        best = max(best, Y.length)
        for Xp, Yp in items[i + 1:]:
            if Xp.lo - X.hi >= delta:
                break
            if X.gap(Xp) < delta:
                best = max(best, Yp.hi - Y.lo, Y.hi - Yp.lo)
    return best
