"""Optimal piecewise-monotone transport maps from a solved instance.

``build_map`` enlarges the certified strip to the conjugate pair it
generates, cuts the domain where both bounds share a monotonicity, and on
each part transports the restricted source onto the matching part of the
target with the monotone rearrangement of that direction.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ContractError, ValidationError
from .measure import (AtomicMeasure, DensityMeasure, Interval, Measure1D, measures_equal, mixture,
                      pushforward, restrict, support_domain, to_rat)
from .osceval import osc_map
from .piecewise import MapPiece, PiecewiseMap, Segment, canonical_segments
from .solver import Instance, SolveResult
from .stepcalc import ConjugatePair, Direction, monotone_decomposition
from .strip import Strip, contains_graph, enlarge

__all__ = ["PiecewiseMap", "MapReport", "monotone_map", "build_map", "verify_map", "piece_bound"]


def _mass_breaks(m: Measure1D) -> list[tuple[Fraction, Interval, Fraction | None, Fraction]]:
    """(mass before piece, piece, density, mass of piece) per density piece or atom.

    Atoms appear as point pieces with density None.
    """
    out, acc = [], Fraction(0)
    if isinstance(m, AtomicMeasure):
        for x, w in m.atoms:
            out.append((acc, Interval.point(x), None, w))
            acc += w
        return out
    for I, d in m.pieces:
        if d > 0 and not I.is_point:
            out.append((acc, I, d, d * I.length))
            acc += d * I.length
    return out


def _locate(breaks, p: Fraction, right: bool):
    """Position carrying cumulative mass ``p``; ``right`` picks the piece just after p."""
    for acc, I, d, w in breaks:
        if (acc <= p < acc + w) if right else (acc < p <= acc + w):
            return I.lo if d is None else I.lo + (p - acc) / d
    raise ContractError(f"mass level {p} outside the measure")


def monotone_map(mu_j: Measure1D, nu_j: Measure1D, direction=Direction.INC) -> PiecewiseMap:
    """The monotone rearrangement of ``mu_j`` onto ``nu_j`` as an exact piecewise-affine map.

    Increasing: quantile(nu_j) o cdf(mu_j).  Decreasing: quantile(nu_j) o
    (total - cdf(mu_j)).  Both measures must have the same (positive) mass.
    An atomic target gives a step map (zero-slope segments).
    """
    direction = Direction(direction)
    if mu_j.is_atomic:
        raise ContractError("monotone map needs an atomless source")
    total = mu_j.total
    if total <= 0 or nu_j.total != total:
        raise ValidationError("source and target masses must agree")
    mb, nb = _mass_breaks(mu_j), _mass_breaks(nu_j)
    levels = {Fraction(0), total} | {acc for acc, *_ in mb} | {acc + w for acc, _, _, w in mb}
    nu_levels = {acc for acc, *_ in nb} | {acc + w for acc, _, _, w in nb}
    if direction is Direction.INC:
        levels |= nu_levels
    else:
        levels |= {total - p for p in nu_levels}
    levels = sorted(levels)
    segs: list[Segment] = []
    for p0, p1 in zip(levels, levels[1:]):
        x0, x1 = _locate(mb, p0, True), _locate(mb, p1, False)
        if direction is Direction.INC:
            y0, y1 = _locate(nb, p0, True), _locate(nb, p1, False)
        else:
            y0, y1 = _locate(nb, total - p0, False), _locate(nb, total - p1, True)
        lo_open = bool(segs) and segs[-1].interval.hi == x0
        segs.append(Segment(Interval(x0, x1, lo_open, False), y0, y1))
    segs = canonical_segments(segs)
    hull = Interval(segs[0].interval.lo, segs[-1].interval.hi)
    return PiecewiseMap((MapPiece(hull, direction, tuple(segs)),))


def piece_bound(domain_length, delta) -> int:
    """Upper bound 3 * floor(L / (2 delta)) + 2 on the number of monotone pieces."""
    return 3 * int(to_rat(domain_length) // (2 * to_rat(delta))) + 2


def _lifted_target(inst: Instance, result: SolveResult, part: Interval) -> DensityMeasure:
    """Target mass shipped from ``part`` by the lifted plan.

    In cells mode an entry (x, y, q) spreads q over x-cell X x y-cell Y in
    proportion to the continuous measures, so the share leaving ``part`` is
    q * mu(X cap part) / mu(X), landing on nu restricted to Y.
    """
    weights: dict[Fraction, Fraction] = {}
    for x, y, q in result.plan.entries:
        X = result.x_cell(x)
        J = X.intersect(part)
        share = restrict(inst.mu, J)[1] if J is not None else 0
        if share:
            mX = restrict(inst.mu, X)[1]
            weights[y] = weights.get(y, Fraction(0)) + q * share / mX
    parts = []
    for y, w in sorted(weights.items()):
        nY, mass = restrict(inst.nu, result.y_cell(y))
        parts.append((w / mass, nY))
    return mixture(parts, inst.target_domain)


def build_map(inst: Instance, result: SolveResult, check: bool = True) -> PiecewiseMap:
    """Glue monotone rearrangements over the monotone decomposition of the enlarged strip."""
    if inst.mu.is_atomic:
        raise ContractError("map construction needs an atomless source")
    if result.mode != "cells":
        raise ContractError("map construction needs a cells-mode solution")
    strip = enlarge(result.strip, inst.delta, result.K)
    pair = ConjugatePair(strip.lower, strip.upper - result.K, inst.delta)
    dec = monotone_decomposition(pair)
    pieces = []
    for part, direction in dec.merged:
        mu_j, mass = restrict(inst.mu, part)
        if mass == 0:
            continue
        nu_j = _lifted_target(inst, result, part)
        body = monotone_map(mu_j, nu_j, direction)
        segs = tuple(c for s in body.segments() if (c := s.clip(part)) is not None)
        hull = Interval(segs[0].interval.lo, segs[-1].interval.hi, segs[0].interval.lo_open, False)
        pieces.append(MapPiece(hull, direction, segs))
    T = PiecewiseMap(tuple(pieces))
    if check:
        if not measures_equal(pushforward(inst.mu, T), inst.nu):
            raise ContractError("glued map does not push mu onto nu")
        if not contains_graph(strip, T, inst.mu):
            raise ContractError("glued map leaves the enlarged strip")
    return T


@dataclass(frozen=True)
class MapReport:
    pushforward_ok: bool
    graph_ok: bool | None  # None when no strip was given
    osc: Fraction
    osc_ok: bool
    pieces: int

    @property
    def passed(self) -> bool:
        return self.pushforward_ok and self.graph_ok is not False and self.osc_ok


def verify_map(inst: Instance, T: PiecewiseMap, K, strip: Strip | None = None) -> MapReport:
    """Exact verdicts: T pushes mu to nu; graph inside ``strip`` mu-a.e.; osc(T) <= K."""
    K = to_rat(K)
    try:
        push_ok = measures_equal(pushforward(inst.mu, T), inst.nu)
    except ContractError:
        push_ok = False
    graph_ok = None if strip is None else contains_graph(strip, T, inst.mu)
    osc = osc_map(T, support_domain(inst.mu), inst.delta)
    return MapReport(push_ok, graph_ok, osc, osc <= K, len(T.pieces))

