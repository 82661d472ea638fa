"""Piecewise-affine transport maps glued from monotone pieces."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ValidationError
from .measure import Interval, to_rat
from .stepcalc import Direction


@dataclass(frozen=True)
class Segment:
    """Affine map on ``interval`` with (limit) values ``y_lo`` and ``y_hi`` at its ends."""

    interval: Interval
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "y_lo", to_rat(self.y_lo))
        object.__setattr__(self, "y_hi", to_rat(self.y_hi))
        if self.interval.is_point and self.y_lo != self.y_hi:
            raise ValidationError("a point segment carries a single value")

    @property
    def slope(self) -> Fraction:
        if self.interval.is_point:
            return Fraction(0)
        return (self.y_hi - self.y_lo) / self.interval.length

    def __call__(self, x, limit: bool = False) -> Fraction:
        x = to_rat(x)
        if not limit and not self.interval.contains(x):
            raise DomainError(f"{x} outside segment {self.interval}")
        if self.interval.is_point:
            return self.y_lo
        return self.y_lo + self.slope * (x - self.interval.lo)

    def clip(self, interval: Interval) -> Segment | None:
        J = self.interval.intersect(interval)
        if J is None:
            return None
        return Segment(J, self(J.lo, limit=True), self(J.hi, limit=True))

    def transformed(self, lam=1, c=0) -> Segment:
        """Post-compose with ``y -> lam * y + c``."""
        return Segment(self.interval, lam * self.y_lo + c, lam * self.y_hi + c)


@dataclass(frozen=True)
class MapPiece:
    interval: Interval
    direction: Direction
    segments: tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        segs = tuple(self.segments)
        sign = 1 if self.direction is Direction.INC else -1
        for s in segs:
            if self.interval.intersect(s.interval) != s.interval:
                raise ValidationError(f"segment {s.interval} leaves piece {self.interval}")
            if sign * s.slope < 0:
                raise ValidationError(f"segment {s.interval} is not {self.direction.value}")
        for s, t in zip(segs, segs[1:]):
            if s.interval.hi > t.interval.lo or (
                s.interval.hi == t.interval.lo and not (s.interval.hi_open or t.interval.lo_open)
            ):
                raise ValidationError("segments overlap or are unsorted")
            if sign * (t.y_lo - s.y_hi) < 0:
                raise ValidationError(f"piece {self.interval} is not {self.direction.value} across segments")
        object.__setattr__(self, "segments", segs)


@dataclass(frozen=True)
class PiecewiseMap:
    pieces: tuple[MapPiece, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        for p, q in zip(pieces, pieces[1:]):
            if p.interval.intersect(q.interval) is not None or p.interval.lo > q.interval.lo:
                raise ValidationError("map pieces overlap or are unsorted")
        object.__setattr__(self, "pieces", pieces)

    def segments(self):
        for p in self.pieces:
            yield from p.segments

    def __call__(self, x) -> Fraction:
        x = to_rat(x)
        for s in self.segments():
            if s.interval.contains(x):
                return s(x)
        raise DomainError(f"map undefined at {x}")

    def breakpoints(self) -> list[Fraction]:
        return sorted({p for s in self.segments() for p in (s.interval.lo, s.interval.hi)})

    def transformed(self, lam=1, c=0) -> PiecewiseMap:
        lam, c = to_rat(lam), to_rat(c)
        flip = lam < 0
        out = []
        for p in self.pieces:
            d = p.direction
            if flip:
                d = Direction.DEC if d is Direction.INC else Direction.INC
            out.append(MapPiece(p.interval, d, tuple(s.transformed(lam, c) for s in p.segments)))
        return PiecewiseMap(tuple(out))

    @classmethod
    def affine_chain(cls, knots, direction=None) -> PiecewiseMap:
        """Continuous map through ``[(x0, y0), (x1, y1), ...]``; one piece per monotone run."""
        knots = [(to_rat(x), to_rat(y)) for x, y in knots]
        segs = []
        for i, ((x0, y0), (x1, y1)) in enumerate(zip(knots, knots[1:])):
            segs.append(Segment(Interval(x0, x1, i > 0, False), y0, y1))
        pieces: list[list[Segment]] = []
        dirs: list[Direction] = []
        for s in segs:
            d = Direction.INC if s.slope >= 0 else Direction.DEC
            if direction is not None:
                d = Direction(direction)
            if pieces and (dirs[-1] is d or s.slope == 0):
                pieces[-1].append(s)
            else:
                pieces.append([s])
                dirs.append(d)
        return cls(tuple(
            MapPiece(Interval(ss[0].interval.lo, ss[-1].interval.hi, ss[0].interval.lo_open, False), d, tuple(ss))
            for ss, d in zip(pieces, dirs)
        ))


def canonical_segments(segs: list[Segment]) -> list[Segment]:
    """Merge adjacent segments that continue the same affine function."""
    out: list[Segment] = []
    for s in segs:
        if out:
            t = out[-1]
            touching = t.interval.hi == s.interval.lo and t.interval.hi_open != s.interval.lo_open
            if (touching and not t.interval.is_point and not s.interval.is_point
                    and t.slope == s.slope and t.y_hi == s.y_lo):
                out[-1] = Segment(Interval(t.interval.lo, s.interval.hi, t.interval.lo_open, s.interval.hi_open),
                                  t.y_lo, s.y_hi)
                continue
        out.append(s)
    return out
