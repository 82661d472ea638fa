from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from osctransport.errors import ContractError, ValidationError
from osctransport.fixtures import fold_map, fold_mu
from osctransport.measure import Domain, Interval
from osctransport.osceval import osc_plan
from osctransport.stepcalc import StepFn, leq, up_transform
from osctransport.strip import Strip, contains_graph, contains_support, enlarge, extract_strip, is_optimal

from oracles import osc_plan_pairs

UNIT = Domain.interval(0, 1)
randoms = st.randoms(use_true_random=False)


def test_strip_needs_ordered_bounds():
    with pytest.raises(ValidationError):
        Strip(StepFn.constant(UNIT, 1), StepFn.constant(UNIT, 0))


def test_extract_strip_fibres():
    pts = [(0, 0), (0, F(1, 2)), (1, 1)]
    s = extract_strip(pts, UNIT)
    assert s.lower(0) == 0 and s.upper(0) == F(1, 2)
    assert s.lower(F(1, 2)) == 0 and s.lower(F(3, 4)) == 1
    with pytest.raises(ContractError):
        extract_strip([(2, 0)], UNIT)


@settings(max_examples=80)
@given(randoms)
def test_optimal_strip_level_is_the_support_cost(rng):
    """A point support's strip is optimal at K exactly when K >= its oscillation."""
    xs = sorted({F(rng.randint(0, 20), 20) for _ in range(rng.randint(1, 6))})
    pts = [(x, F(rng.randint(0, 10), 10)) for x in xs for _ in range(rng.randint(1, 2))]
    d = F(rng.randint(1, 5), 10)
    dom = Domain.points(xs)
    K = osc_plan_pairs(pts, d)
    s = extract_strip(pts, dom)
    assert is_optimal(s, d, K)
    if K > 0:
        assert not is_optimal(s, d, K - F(1, 1000))
    assert contains_support(s, pts)


@settings(max_examples=80)
@given(randoms)
def test_enlargement_contains_and_stays_optimal(rng):
    xs = sorted({F(rng.randint(0, 20), 20) for _ in range(rng.randint(1, 6))})
    pts = [(x, F(rng.randint(0, 10), 10)) for x in xs]
    d = F(rng.randint(1, 5), 10)
    dom = Domain.points(xs)
    K = osc_plan_pairs(pts, d)
    s = extract_strip(pts, dom)
    big = enlarge(s, d, K)
    assert is_optimal(big, d, K)
    assert leq(big.lower, s.lower) and leq(s.upper, big.upper)
    assert big.upper == up_transform(s.lower, d) + K


def test_enlarge_refuses_non_optimal():
    s = extract_strip([(0, 0), (F(1, 20), 1)], Domain.points([0, F(1, 20)]))
    with pytest.raises(ContractError):
        enlarge(s, F(1, 10), F(1, 2))


def test_fold_map_graph_in_band():
    T = fold_map()
    lower = StepFn(UNIT, ((Interval(0, F(1, 2)), F(0)), (Interval(F(1, 2), 1, True, False), F(0))))
    s = Strip(lower, StepFn.constant(UNIT, 1))
    assert contains_graph(s, T, fold_mu())
    tight = Strip(lower, StepFn.constant(UNIT, F(9, 10)))
    assert not contains_graph(tight, T, fold_mu())


def test_rectangle_support_uses_open_interior():
    s = Strip(StepFn(UNIT, ((Interval(0, F(1, 2)), F(0)), (Interval(F(1, 2), 1, True, False), F(1)))),
              StepFn.constant(UNIT, 2))
    assert contains_support(s, [(Interval(F(1, 2), 1), Interval(1, 2))])
    assert not contains_support(s, [(Interval(F(1, 4), 1), Interval(F(1, 2), 2))])
    assert contains_support(s, [(Interval(F(1, 4), F(1, 2)), Interval(0, 2))])
