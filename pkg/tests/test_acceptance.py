"""The eight acceptance criteria, each timed against its budget.

Every criterion records one PASS/FAIL line; conftest prints them in the
terminal summary.  Run directly (``python tests/test_acceptance.py``) to
print the lines without pytest.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import gen  # noqa: E402
from oracles import probe_points, window_inf, window_sup  # noqa: E402
from osctransport.fixtures import fold_instance, fold_map, fold_mu, fold_nu  # noqa: E402
from osctransport.mapbuild import build_map, monotone_map, piece_bound  # noqa: E402
from osctransport.measure import DensityMeasure, Domain, measures_equal, pushforward, support_domain  # noqa: E402
from osctransport.osceval import osc_map  # noqa: E402
from osctransport.solver import Instance, check_certificate, oracle_solve, solve  # noqa: E402
from osctransport.stepcalc import (Direction, StepFn, conjugate_closure, down_transform, find_floors,  # noqa: E402
                                   floor_separations, leq, max_floors, monotone_decomposition, up_transform)
from osctransport.strip import contains_graph, enlarge  # noqa: E402

TENTH = F(1, 10)
UNIT = Domain.interval(0, 1)
RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, seconds: float, budget: float, detail: str = "") -> bool:
    passed = ok and seconds < budget
    why = "" if ok else " (check failed)"
    if ok and not seconds < budget:
        why = " (over budget)"
    RESULTS.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  "
                   f"[{seconds:.2f}s / {budget:g}s]{why}{'  ' + detail if detail else ''}")
    return passed


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# -- criterion bodies: each returns (ok, detail) --------------------------------------

def fold_values():
    u = osc_map(fold_map(), UNIT, TENTH)
    t = osc_map(monotone_map(fold_mu(), fold_nu(), Direction.INC), UNIT, TENTH)
    return u == F(1, 5) and t == F(2, 5), f"osc(U)={u} osc(T)={t}"


def fold_rearrangement():
    segs = list(monotone_map(fold_mu(), fold_nu(), Direction.INC).segments())
    want = [(F(0), F(1, 4), F(0), F(1, 4)), (F(1, 4), F(3, 4), F(1, 4), F(3, 8)),
            (F(3, 4), F(7, 8), F(3, 8), F(1, 2)), (F(7, 8), F(1), F(1, 2), F(1))]
    got = [(s.interval.lo, s.interval.hi, s.y_lo, s.y_hi) for s in segs]
    slopes = [s.slope for s in segs]
    return got == want and slopes == [1, F(1, 4), 1, 4], f"slopes {[str(s) for s in slopes]}"


def fold_gap():
    res = solve(fold_instance(), n=16)
    check_certificate(res)
    return res.K < F(2, 5), f"K_16={res.K}"


def oracle_equivalence(count=200):
    rng = random.Random(2024)
    bad = 0
    for _ in range(count):
        inst = gen.atomic_instance(rng)
        bad += solve(inst).K != oracle_solve(inst)
    return bad == 0, f"{count} instances, {bad} mismatches"


def transform_calculus(count=1000):
    rng = random.Random(7)
    for _ in range(count):
        phi, d = gen.step_fn(rng, max_pieces=12), gen.delta(rng)
        up, down = up_transform(phi, d), down_transform(phi, d)
        c = F(rng.randint(-9, 9), 7)
        moved = StepFn(phi.domain.shift(c), tuple((I.shift(c), v) for I, v in phi.pieces))
        moved_up = StepFn(up.domain.shift(c), tuple((I.shift(c), v) for I, v in up.pieces))
        checks = (up_transform(down_transform(up, d), d) == up,
                  down_transform(up_transform(down, d), d) == down,
                  leq(up, phi) and leq(phi, down),
                  down == -up_transform(-phi, d),
                  up_transform(moved, d) == moved_up,
                  all(up(x) == window_inf(phi, x, d) and down(x) == window_sup(phi, x, d)
                      for x in probe_points(phi.domain, phi.breakpoints(), d)))
        if not all(checks):
            return False, f"law {checks.index(False)} fails for {phi} at delta={d}"
    return True, f"{count} step functions"


def floor_bounds(count=500):
    rng = random.Random(11)
    for _ in range(count):
        phi, d = gen.step_fn(rng), gen.delta(rng)
        pair = conjugate_closure(phi, d)
        dom = phi.domain
        if any(s < 2 * d for s in floor_separations(pair.psi)):
            return False, "floor neighbours closer than 2 delta"
        if len(find_floors(pair.psi)) > max_floors(dom, d):
            return False, "too many floors"
        dec = monotone_decomposition(pair)
        if len(dec.merged) > piece_bound(dom.diameter, d):
            return False, "too many monotone intervals"
        cuts = pair.psi.breakpoints() + pair.phi.breakpoints()
        for I, direction in dec.merged:
            pts = [x for x in probe_points(dom, cuts + [I.lo, I.hi], d) if I.contains(x)]
            for fn in (pair.phi, pair.psi):
                vals = [fn(x) for x in pts]
                if vals != sorted(vals, reverse=direction is Direction.DEC):
                    return False, f"not {direction.value} on {I}"
    return True, f"{count} conjugate pairs"


def pipeline(count=100, n=12):
    rng = random.Random(5)
    multi = 0
    for k in range(count):
        inst = gen.density_instance(rng, gapped=k % 3 == 2)
        res = solve(inst, n=n, mode="cells")
        T = build_map(inst, res)
        slack = max(c.length for c in res.y_cells)
        if not measures_equal(pushforward(inst.mu, T), inst.nu):
            return False, f"instance {k}: pushforward differs"
        if not contains_graph(enlarge(res.strip, inst.delta, res.K), T, inst.mu):
            return False, f"instance {k}: graph leaves the enlarged strip"
        if osc_map(T, support_domain(inst.mu), inst.delta) > res.K + slack:
            return False, f"instance {k}: oscillation above K + cell slack"
        if len(T.pieces) > piece_bound(support_domain(inst.mu).diameter, inst.delta):
            return False, f"instance {k}: too many pieces"
        multi += len(T.pieces) > 1
    return True, f"{count} instances, {multi} with several monotone pieces"


def _scaled(m: DensityMeasure, lam, c=0) -> DensityMeasure:
    return DensityMeasure(tuple((I.scale(lam).shift(c), d / lam) for I, d in m.pieces))


def equivariance(count=50, n=12):
    rng = random.Random(9)
    for k in range(count):
        inst = gen.density_instance(rng)
        lam = F(rng.randint(1, 9), rng.randint(1, 4))
        c = F(rng.randint(-9, 9), rng.randint(1, 5))
        K = solve(inst, n=n, mode="cells").K
        wide = Instance(inst.domain, inst.target_domain.scale(lam), inst.delta, inst.mu, _scaled(inst.nu, lam))
        moved = Instance(inst.domain.shift(c), inst.target_domain, inst.delta, _scaled(inst.mu, 1, c), inst.nu)
        if solve(wide, n=n, mode="cells").K != lam * K:
            return False, f"instance {k}: scaling by {lam}"
        if solve(moved, n=n, mode="cells").K != K:
            return False, f"instance {k}: translation by {c}"
    return True, f"{count} instances"


CRITERIA = [
    (1, "fold oscillations 1/5 and 2/5", fold_values, 1),
    (2, "increasing rearrangement = four-segment map", fold_rearrangement, 1),
    (3, "quantized fold K_16 < 2/5 with certificate", fold_gap, 60),
    (4, "solver = brute-force oracle on 200 instances", oracle_equivalence, 60),
    (5, "transform calculus on 1000 step functions", transform_calculus, 30),
    (6, "floor spacing and piece bounds on 500 conjugate pairs", floor_bounds, 30),
    (7, "end-to-end pipeline on 100 densities", pipeline, 300),
    (8, "scaling and translation equivariance", equivariance, 60),
]


@pytest.mark.parametrize("number,title,body,budget", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, body, budget):
    (ok, detail), seconds = timed(body)
    assert record(number, title, ok, seconds, budget, detail), RESULTS[-1]


if __name__ == "__main__":
    status = 0
    for number, title, body, budget in CRITERIA:
        (ok, detail), seconds = timed(body)
        status |= not record(number, title, ok, seconds, budget, detail)
        print(RESULTS[-1], flush=True)
    sys.exit(status)
