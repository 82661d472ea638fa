"""Exact rationals, intervals, compact domains and one-dimensional measures.

Every scalar is a :class:`fractions.Fraction`.  Intervals carry endpoint
openness flags so that strict inequalities such as ``|x - y| < delta`` can be
represented without any tolerance.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CoverageError, DomainError, ParseError, ValidationError

Rat = Fraction


def to_rat(value) -> Fraction:
    """Convert ints, Fractions and strings ("3", "-1/4", "0.125") exactly."""
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise ParseError(f"not a rational: {value!r} ({type(value).__name__})")


def fmt_rat(q: Fraction) -> str:
    return str(q)


# ---------------------------------------------------------------------------
# Intervals and finite unions of intervals
# ---------------------------------------------------------------------------

_INTERVAL_RE = re.compile(r"^\s*([\[(])\s*([^,\s]+)\s*,\s*([^,\s]+)\s*([\])])\s*$")


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", to_rat(self.lo))
        object.__setattr__(self, "hi", to_rat(self.hi))
        if self.lo > self.hi:
            raise ValidationError(f"empty interval: lo={self.lo} > hi={self.hi}")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise ValidationError(f"degenerate interval at {self.lo} must be closed")

    @classmethod
    def closed(cls, lo, hi) -> Interval:
        return cls(lo, hi, False, False)

    @classmethod
    def open(cls, lo, hi) -> Interval:
        return cls(lo, hi, True, True)

    @classmethod
    def point(cls, x) -> Interval:
        return cls(x, x, False, False)

    @classmethod
    def parse(cls, text: str) -> Interval:
        m = _INTERVAL_RE.match(text)
        if not m:
            raise ParseError(f"malformed interval: {text!r}")
        left, lo, hi, right = m.groups()
        return cls(to_rat(lo), to_rat(hi), left == "(", right == ")")

    def __str__(self) -> str:
        return f"{'(' if self.lo_open else '['}{self.lo},{self.hi}{')' if self.hi_open else ']'}"

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def closure(self) -> Interval:
        return Interval(self.lo, self.hi)

    def contains(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and self.lo_open:
            return False
        if x == self.hi and self.hi_open:
            return False
        return True

    __contains__ = contains

    def intersect(self, other: Interval) -> Interval | None:
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif self.lo < other.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif self.hi > other.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            return None
        return Interval(lo, hi, lo_open, hi_open)

    def gap(self, other: Interval) -> Fraction:
        """Distance between the closures of two intervals."""
        if other.lo > self.hi:
            return other.lo - self.hi
        if self.lo > other.hi:
            return self.lo - other.hi
        return Fraction(0)

    def shift(self, c) -> Interval:
        return Interval(self.lo + c, self.hi + c, self.lo_open, self.hi_open)

    def scale(self, lam) -> Interval:
        if lam <= 0:
            raise DomainError("scale factor must be positive")
        return Interval(self.lo * lam, self.hi * lam, self.lo_open, self.hi_open)


def _in_any(x, sets: Sequence[Interval]) -> bool:
    return any(I.contains(x) for I in sets)


def combine(operands: Sequence[Sequence[Interval]], keep) -> list[Interval]:
    """Boolean combination of finite unions of bounded intervals.

    ``keep`` receives one membership flag per operand and decides whether a
    point belongs to the result.  Elementary cells (breakpoints and the open
    gaps between them) are classified one at a time and then re-merged.
    """
    pts = sorted({p for ops in operands for I in ops for p in (I.lo, I.hi)})
    if not pts:
        return []
    # (kind, a, b): kind 0 = point a, kind 1 = open gap (a, b)
    cells: list[tuple[int, Fraction, Fraction]] = []
    for i, p in enumerate(pts):
        cells.append((0, p, p))
        if i + 1 < len(pts):
            cells.append((1, p, pts[i + 1]))
    out: list[Interval] = []
    run_start = None
    prev = None
    for cell in cells:
        kind, a, b = cell
        rep = a if kind == 0 else (a + b) / 2
        member = keep(*[_in_any(rep, ops) for ops in operands])
        if member and run_start is None:
            run_start = cell
        if not member and run_start is not None:
            out.append(_run_interval(run_start, prev))
            run_start = None
        prev = cell
    if run_start is not None:
        out.append(_run_interval(run_start, prev))
    return out


def _run_interval(first, last) -> Interval:
    lo, lo_open = (first[1], False) if first[0] == 0 else (first[1], True)
    hi, hi_open = (last[1], False) if last[0] == 0 else (last[2], True)
    return Interval(lo, hi, lo_open, hi_open)


def set_union(*sets: Sequence[Interval]) -> list[Interval]:
    return combine(list(sets), lambda *f: any(f))


def set_intersection(a: Sequence[Interval], b: Sequence[Interval]) -> list[Interval]:
    return combine([a, b], lambda x, y: x and y)


def set_difference(a: Sequence[Interval], b: Sequence[Interval]) -> list[Interval]:
    return combine([a, b], lambda x, y: x and not y)


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """A compact subset of the line: finitely many disjoint closed intervals."""

    components: tuple[Interval, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValidationError("domain must be nonempty")
        for c in comps:
            if c.lo_open or c.hi_open:
                raise ValidationError(f"domain component {c} must be closed")
        for a, b in zip(comps, comps[1:]):
            if not a.hi < b.lo:
                raise ValidationError(f"domain components {a} and {b} overlap or are unsorted")
        object.__setattr__(self, "components", comps)

    @classmethod
    def interval(cls, lo, hi) -> Domain:
        return cls((Interval.closed(lo, hi),))

    @classmethod
    def points(cls, xs: Iterable) -> Domain:
        return cls(tuple(Interval.point(x) for x in sorted(set(to_rat(x) for x in xs))))

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> Domain:
        """Closed hull-merge of arbitrary intervals (touching ones are joined)."""
        ivs = sorted((I.closure() for I in intervals), key=lambda I: (I.lo, I.hi))
        merged: list[list[Fraction]] = []
        for I in ivs:
            if merged and I.lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], I.hi)
            else:
                merged.append([I.lo, I.hi])
        return cls(tuple(Interval.closed(a, b) for a, b in merged))

    @property
    def lo(self) -> Fraction:
        return self.components[0].lo

    @property
    def hi(self) -> Fraction:
        return self.components[-1].hi

    @property
    def diameter(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return any(c.contains(x) for c in self.components)

    __contains__ = contains

    def trace(self, interval: Interval) -> list[Interval]:
        out = []
        for c in self.components:
            J = c.intersect(interval)
            if J is not None:
                out.append(J)
        return out

    def contains_interval(self, interval: Interval) -> bool:
        return any(c.intersect(interval) == interval for c in self.components)

    def shift(self, c) -> Domain:
        return Domain(tuple(I.shift(c) for I in self.components))

    def scale(self, lam) -> Domain:
        return Domain(tuple(I.scale(lam) for I in self.components))

    def __str__(self) -> str:
        return " u ".join(str(c) for c in self.components)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

class Measure1D:
    """Common base of :class:`AtomicMeasure` and :class:`DensityMeasure`."""

    domain: Domain | None

    @property
    def total(self) -> Fraction:  # pragma: no cover - overridden
        raise NotImplementedError

    @property
    def is_atomic(self) -> bool:
        return isinstance(self, AtomicMeasure)

    def validate_probability(self, domain: Domain | None = None) -> None:
        if self.total != 1:
            raise ValidationError(f"total mass is {self.total}, expected 1")
        dom = domain or self.domain
        if dom is not None:
            for I in _support_intervals(self):
                if not dom.contains_interval(I):
                    raise ValidationError(f"support piece {I} lies outside domain {dom}")


@dataclass(frozen=True)
class AtomicMeasure(Measure1D):
    atoms: tuple[tuple[Fraction, Fraction], ...]
    domain: Domain | None = None

    def __post_init__(self):
        atoms = tuple((to_rat(x), to_rat(m)) for x, m in self.atoms)
        for _, m in atoms:
            if m <= 0:
                raise ValidationError("atom masses must be positive")
        for (a, _), (b, _) in zip(atoms, atoms[1:]):
            if not a < b:
                raise ValidationError("atoms must be sorted with distinct positions")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_pairs(cls, pairs, domain: Domain | None = None) -> AtomicMeasure:
        """Sort and merge co-located atoms."""
        acc: dict[Fraction, Fraction] = {}
        for x, m in pairs:
            x, m = to_rat(x), to_rat(m)
            acc[x] = acc.get(x, Fraction(0)) + m
        return cls(tuple(sorted((x, m) for x, m in acc.items() if m != 0)), domain)

    @classmethod
    def uniform(cls, xs, domain: Domain | None = None) -> AtomicMeasure:
        xs = list(xs)
        return cls.from_pairs([(x, Fraction(1, len(xs))) for x in xs], domain)

    @property
    def total(self) -> Fraction:
        return sum((m for _, m in self.atoms), Fraction(0))

    @property
    def positions(self) -> list[Fraction]:
        return [x for x, _ in self.atoms]


@dataclass(frozen=True)
class DensityMeasure(Measure1D):
    """Piecewise-constant density; pieces are closed, sorted, non-overlapping."""

    pieces: tuple[tuple[Interval, Fraction], ...]
    domain: Domain | None = None

    def __post_init__(self):
        pieces = tuple((I.closure(), to_rat(d)) for I, d in self.pieces)
        for I, d in pieces:
            if d <= 0:
                raise ValidationError("densities must be positive")
            if I.is_point:
                raise ValidationError("density pieces need positive length")
        for (I, _), (J, _) in zip(pieces, pieces[1:]):
            if I.hi > J.lo:
                raise ValidationError("density pieces overlap or are unsorted")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def from_pairs(cls, pairs, domain: Domain | None = None) -> DensityMeasure:
        return cls(tuple((Interval.closed(a, b), to_rat(d)) for (a, b), d in pairs), domain)

    @classmethod
    def uniform(cls, lo, hi) -> DensityMeasure:
        lo, hi = to_rat(lo), to_rat(hi)
        return cls(((Interval.closed(lo, hi), 1 / (hi - lo)),), Domain.interval(lo, hi))

    @property
    def total(self) -> Fraction:
        return sum((I.length * d for I, d in self.pieces), Fraction(0))


def _support_intervals(m: Measure1D) -> list[Interval]:
    if isinstance(m, AtomicMeasure):
        return [Interval.point(x) for x, _ in m.atoms]
    return [I for I, _ in m.pieces]


def support_domain(m: Measure1D) -> Domain:
    """Closed support of ``m`` as a :class:`Domain`."""
    if isinstance(m, AtomicMeasure):
        return Domain.points(m.positions)
    return Domain.from_intervals(I for I, _ in m.pieces)


def cdf(m: Measure1D, x) -> Fraction:
    """``m((-inf, x])``."""
    x = to_rat(x)
    if isinstance(m, AtomicMeasure):
        return sum((w for p, w in m.atoms if p <= x), Fraction(0))
    acc = Fraction(0)
    for I, d in m.pieces:
        if x >= I.hi:
            acc += I.length * d
        elif x > I.lo:
            acc += (x - I.lo) * d
    return acc


def quantile(m: Measure1D, p) -> Fraction:
    """Generalized inverse ``inf{x : cdf(m, x) >= p}`` for ``0 <= p <= total``.

    ``p = 0`` returns the left end of the support.
    """
    p = to_rat(p)
    total = m.total
    if p < 0 or p > total:
        raise DomainError(f"quantile level {p} outside [0, {total}]")
    if isinstance(m, AtomicMeasure):
        if not m.atoms:
            raise DomainError("quantile of an empty measure")
        acc = Fraction(0)
        for x, w in m.atoms:
            acc += w
            if acc >= p:
                return x
        return m.atoms[-1][0]
    if not m.pieces:
        raise DomainError("quantile of an empty measure")
    if p == 0:
        return m.pieces[0][0].lo
    acc = Fraction(0)
    for I, d in m.pieces:
        mass = I.length * d
        if acc + mass >= p:
            return I.lo + (p - acc) / d
        acc += mass
    return m.pieces[-1][0].hi


def quantize(m: Measure1D, n: int) -> AtomicMeasure:
    """``n`` atoms of mass ``total/n`` at the midpoint quantiles (2i-1)/(2n)."""
    if n < 1:
        raise DomainError("quantization count must be >= 1")
    total = m.total
    return AtomicMeasure.from_pairs(
        [(quantile(m, total * (2 * i - 1) / (2 * n)), total / n) for i in range(1, n + 1)],
        m.domain,
    )


def quantile_cells(m: Measure1D, n: int) -> list[tuple[Interval, Fraction, Fraction]]:
    """Quantization with cells: ``(cell, atom position, mass)`` per atom.

    Atomic measures return their own atoms with degenerate cells.  For a
    density the i-th cell is the hull of the mass slice ((i-1)/n, i/n].
    """
    if isinstance(m, AtomicMeasure):
        return [(Interval.point(x), x, w) for x, w in m.atoms]
    if n < 1:
        raise DomainError("quantization count must be >= 1")
    total = m.total
    out = []
    for i in range(1, n + 1):
        a = quantile(m, total * (i - 1) / n)
        b = quantile(m, total * i / n)
        x = quantile(m, total * (2 * i - 1) / (2 * n))
        out.append((Interval.closed(a, b), x, total / n))
    return out


def restrict(m: Measure1D, interval: Interval) -> tuple[Measure1D, Fraction]:
    """Restriction of ``m`` to ``interval`` (unnormalized) and its mass."""
    if isinstance(m, AtomicMeasure):
        atoms = tuple((x, w) for x, w in m.atoms if interval.contains(x))
        r = AtomicMeasure(atoms, m.domain)
    else:
        pieces = []
        for I, d in m.pieces:
            J = I.intersect(interval.closure())
            if J is not None and not J.is_point:
                pieces.append((J.closure(), d))
        r = DensityMeasure(tuple(pieces), m.domain)
    return r, r.total


def scale_measure(m: Measure1D, w) -> Measure1D:
    """Multiply all masses by ``w > 0``."""
    w = to_rat(w)
    if w <= 0:
        raise DomainError("weight must be positive")
    if isinstance(m, AtomicMeasure):
        return AtomicMeasure(tuple((x, a * w) for x, a in m.atoms), m.domain)
    return DensityMeasure(tuple((I, d * w) for I, d in m.pieces), m.domain)


def _sum_densities(pieces: Iterable[tuple[Interval, Fraction]]) -> tuple[tuple[Interval, Fraction], ...]:
    pieces = [(I, d) for I, d in pieces if d != 0 and not I.is_point]
    pts = sorted({p for I, _ in pieces for p in (I.lo, I.hi)})
    cells = []
    for a, b in zip(pts, pts[1:]):
        mid = (a + b) / 2
        d = sum((dd for I, dd in pieces if I.lo < mid < I.hi), Fraction(0))
        if d != 0:
            if d < 0:
                raise ValidationError("negative density in sum")
            if cells and cells[-1][1] == d and cells[-1][0].hi == a:
                cells[-1] = (Interval.closed(cells[-1][0].lo, b), d)
            else:
                cells.append((Interval.closed(a, b), d))
    return tuple(cells)


def mixture(parts: Iterable[tuple[Fraction, Measure1D]], domain: Domain | None = None) -> Measure1D:
    """Exact weighted sum of measures of the same kind."""
    parts = [(to_rat(w), m) for w, m in parts if to_rat(w) != 0]
    kinds = {m.is_atomic for _, m in parts if m.total != 0}
    if len(kinds) > 1:
        raise ValidationError("cannot mix atomic and density measures")
    if kinds == {True}:
        return AtomicMeasure.from_pairs(
            [(x, a * w) for w, m in parts if m.is_atomic for x, a in m.atoms], domain
        )
    return DensityMeasure(
        _sum_densities((I, d * w) for w, m in parts if not m.is_atomic for I, d in m.pieces),
        domain,
    )


def canonical(m: Measure1D) -> Measure1D:
    """Merged co-located atoms / merged adjacent equal-density pieces; no domain."""
    if isinstance(m, AtomicMeasure):
        return AtomicMeasure.from_pairs(m.atoms)
    return DensityMeasure(_sum_densities(m.pieces))


def measures_equal(a: Measure1D, b: Measure1D) -> bool:
    ca, cb = canonical(a), canonical(b)
    if ca.total == 0 and cb.total == 0:
        return True
    return type(ca) is type(cb) and ca == cb


def pushforward(m: Measure1D, T) -> Measure1D:
    """Exact image measure of ``m`` under a piecewise-affine map ``T``.

    ``T`` needs a ``segments()`` method yielding objects with ``interval``,
    ``y_lo`` and ``y_hi`` (affine interpolation between the two ends).
    """
    segs = list(T.segments())
    if isinstance(m, AtomicMeasure):
        out = []
        for x, w in m.atoms:
            for s in segs:
                if s.interval.contains(x):
                    out.append((s(x), w))
                    break
            else:
                raise CoverageError(f"map undefined at atom {x}")
        return AtomicMeasure.from_pairs(out)
    atoms: list[tuple[Fraction, Fraction]] = []
    dens: list[tuple[Interval, Fraction]] = []
    covered = Fraction(0)
    for I, d in m.pieces:
        for s in segs:
            J = I.intersect(s.interval)
            if J is None or J.is_point:
                continue
            covered += J.length * d
            y0, y1 = s(J.lo, limit=True), s(J.hi, limit=True)
            slope = (y1 - y0) / J.length
            if slope == 0:
                atoms.append((y0, J.length * d))
            else:
                dens.append((Interval.closed(min(y0, y1), max(y0, y1)), d / abs(slope)))
    if covered != m.total:
        raise CoverageError(f"map covers mass {covered} of {m.total}")
    if atoms and dens:
        raise ValidationError("image measure mixes atoms and density")
    if atoms:
        return AtomicMeasure.from_pairs(atoms)
    return DensityMeasure(_sum_densities(dens))
