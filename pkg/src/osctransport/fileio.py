"""JSON records for instances, results, maps and step functions.

Every rational is written as a string ("p/q" or an integer) and every
interval as "[a,b]", "(a,b]" etc., so files round-trip exactly.  On input,
JSON numbers are read through their literal text: ``0.1`` means 1/10.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .measure import AtomicMeasure, DensityMeasure, Domain, Interval, Measure1D, to_rat
from .piecewise import MapPiece, PiecewiseMap, Segment
from .solver import Instance, Plan, SolveResult, check_certificate
from .stepcalc import ConjugatePair, StepFn, conjugate_closure
from .strip import Strip

__all__ = [
    "dumps", "loads", "read_json", "write_json",
    "instance_to_json", "instance_from_json", "result_to_json", "result_from_json",
    "map_to_json", "map_from_json", "stepfn_to_json", "stepfn_from_json",
    "read_instance", "read_result", "read_map", "read_stepfn", "read_pair",
]


def dumps(record) -> str:
    return json.dumps(record, indent=2, sort_keys=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text, parse_float=str, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc


def _reject_constant(name):
    raise ParseError(f"{name} is not a rational")


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def write_json(path, record) -> None:
    Path(path).write_text(dumps(record))


def _rat(v) -> Fraction:
    if isinstance(v, float):
        raise ParseError("write rationals as strings or integers")
    return to_rat(v)


def _field(rec, key):
    if not isinstance(rec, dict):
        raise ParseError(f"expected an object, got {type(rec).__name__}")
    if key not in rec:
        raise ParseError(f"missing field {key!r}")
    return rec[key]


def _list(v, what):
    if not isinstance(v, list):
        raise ParseError(f"{what} must be a list")
    return v


def _interval(v) -> Interval:
    if not isinstance(v, str):
        raise ParseError(f"interval must be a string, got {v!r}")
    return Interval.parse(v)


def _pair(v, what):
    v = _list(v, what)
    if len(v) != 2:
        raise ParseError(f"{what} entries must have two fields")
    return v


def _kind(rec, *kinds):
    k = _field(rec, "kind")
    if k not in kinds:
        raise ParseError(f"expected a {' or '.join(kinds)} record, got {k!r}")
    return k


# -- domains and measures ----------------------------------------------------

def domain_to_json(d: Domain) -> list[str]:
    return [str(c) for c in d.components]


def domain_from_json(v) -> Domain:
    return Domain(tuple(_interval(c) for c in _list(v, "domain")))


def measure_to_json(m: Measure1D) -> dict:
    if isinstance(m, AtomicMeasure):
        return {"type": "atoms", "atoms": [[str(x), str(w)] for x, w in m.atoms]}
    return {"type": "density", "pieces": [[str(I), str(d)] for I, d in m.pieces]}


def measure_from_json(rec) -> Measure1D:
    t = _field(rec, "type")
    if t == "atoms":
        pairs = [_pair(a, "atoms") for a in _list(_field(rec, "atoms"), "atoms")]
        return AtomicMeasure(tuple((_rat(x), _rat(w)) for x, w in pairs))
    if t == "density":
        pairs = [_pair(p, "pieces") for p in _list(_field(rec, "pieces"), "pieces")]
        return DensityMeasure(tuple((_interval(I), _rat(d)) for I, d in pairs))
    raise ParseError(f"unknown measure type {t!r}")


def instance_to_json(inst: Instance) -> dict:
    return {"kind": "instance", "delta": str(inst.delta),
            "domain": domain_to_json(inst.domain), "target_domain": domain_to_json(inst.target_domain),
            "mu": measure_to_json(inst.mu), "nu": measure_to_json(inst.nu)}


def instance_from_json(rec) -> Instance:
    _kind(rec, "instance")
    return Instance(domain_from_json(_field(rec, "domain")),
                    domain_from_json(_field(rec, "target_domain")),
                    _rat(_field(rec, "delta")),
                    measure_from_json(_field(rec, "mu")),
                    measure_from_json(_field(rec, "nu")))


# -- step functions -----------------------------------------------------------

def stepfn_to_json(fn: StepFn) -> dict:
    return {"kind": "stepfn", "domain": domain_to_json(fn.domain),
            "pieces": [[str(I), str(v)] for I, v in fn.pieces]}


def stepfn_from_json(rec) -> StepFn:
    _kind(rec, "stepfn")
    pairs = [_pair(p, "pieces") for p in _list(_field(rec, "pieces"), "pieces")]
    return StepFn(domain_from_json(_field(rec, "domain")),
                  tuple((_interval(I), _rat(v)) for I, v in pairs))


def pair_to_json(pair: ConjugatePair) -> dict:
    return {"kind": "pair", "delta": str(pair.delta),
            "phi": stepfn_to_json(pair.phi), "psi": stepfn_to_json(pair.psi)}


def pair_from_json(rec, delta) -> ConjugatePair:
    """A pair record, or a single step function whose conjugate closure is taken."""
    if _kind(rec, "pair", "stepfn") == "stepfn":
        return conjugate_closure(stepfn_from_json(rec), delta)
    return ConjugatePair(stepfn_from_json(_field(rec, "phi")), stepfn_from_json(_field(rec, "psi")), delta)


# -- maps -----------------------------------------------------------------------

def map_to_json(T: PiecewiseMap) -> dict:
    return {"kind": "map", "pieces": [
        {"interval": str(p.interval), "direction": p.direction.value,
         "segments": [[str(s.interval), str(s.y_lo), str(s.y_hi)] for s in p.segments]}
        for p in T.pieces]}


def map_from_json(rec) -> PiecewiseMap:
    _kind(rec, "map")
    pieces = []
    for p in _list(_field(rec, "pieces"), "pieces"):
        segs = []
        for s in _list(_field(p, "segments"), "segments"):
            s = _list(s, "segment")
            if len(s) != 3:
                raise ParseError("segments are [interval, y_lo, y_hi]")
            segs.append(Segment(_interval(s[0]), _rat(s[1]), _rat(s[2])))
        direction = _field(p, "direction")
        if direction not in ("inc", "dec"):
            raise ParseError(f"unknown direction {direction!r}")
        pieces.append(MapPiece(_interval(_field(p, "interval")), direction, tuple(segs)))
    return PiecewiseMap(tuple(pieces))


# -- solve results ------------------------------------------------------------------

def _stat(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def result_to_json(res: SolveResult) -> dict:
    return {
        "kind": "result", "K": str(res.K), "delta": str(res.delta), "mode": res.mode,
        "plan": [[str(x), str(y), str(m)] for x, y, m in res.plan.entries],
        "strip": {"lower": stepfn_to_json(res.strip.lower), "upper": stepfn_to_json(res.strip.upper)},
        "mu_d": measure_to_json(res.mu_d), "nu_d": measure_to_json(res.nu_d),
        "x_cells": [str(c) for c in res.x_cells], "y_cells": [str(c) for c in res.y_cells],
        "stats": {k: _stat(v) for k, v in res.stats.items()},
    }


def result_from_json(rec, verify: bool = True) -> SolveResult:
    """Parse a result; by default its certificate is re-checked."""
    _kind(rec, "result")
    entries = []
    for e in _list(_field(rec, "plan"), "plan"):
        e = _list(e, "plan entry")
        if len(e) != 3:
            raise ParseError("plan entries are [x, y, mass]")
        entries.append(tuple(_rat(v) for v in e))
    strip = _field(rec, "strip")
    mu_d, nu_d = measure_from_json(_field(rec, "mu_d")), measure_from_json(_field(rec, "nu_d"))
    if not (isinstance(mu_d, AtomicMeasure) and isinstance(nu_d, AtomicMeasure)):
        raise ParseError("discretized marginals must be atomic")
    mode = _field(rec, "mode")
    if mode not in ("atoms", "cells"):
        raise ParseError(f"unknown mode {mode!r}")
    stats = _field(rec, "stats") if "stats" in rec else {}
    res = SolveResult(
        K=_rat(_field(rec, "K")), plan=Plan(tuple(entries)),
        strip=Strip(stepfn_from_json(_field(strip, "lower")), stepfn_from_json(_field(strip, "upper"))),
        delta=_rat(_field(rec, "delta")), mode=mode, mu_d=mu_d, nu_d=nu_d,
        x_cells=tuple(_interval(c) for c in _list(_field(rec, "x_cells"), "x_cells")),
        y_cells=tuple(_interval(c) for c in _list(_field(rec, "y_cells"), "y_cells")),
        stats=dict(stats) if isinstance(stats, dict) else {},
    )
    if len(res.x_cells) != len(mu_d.atoms) or len(res.y_cells) != len(nu_d.atoms):
        raise ParseError("cell lists must match the discretized marginals")
    if verify:
        check_certificate(res)
    return res


# -- path helpers ---------------------------------------------------------------------

def read_instance(path) -> Instance:
    return instance_from_json(read_json(path))


def read_result(path, verify: bool = True) -> SolveResult:
    return result_from_json(read_json(path), verify)


def read_map(path) -> PiecewiseMap:
    return map_from_json(read_json(path))


def read_stepfn(path) -> StepFn:
    return stepfn_from_json(read_json(path))


def read_pair(path, delta) -> ConjugatePair:
    return pair_from_json(read_json(path), delta)
