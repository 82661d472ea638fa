from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from osctransport.errors import CoverageError, DomainError, ParseError, ValidationError
from osctransport.fixtures import fold_map, fold_mu, fold_nu
from osctransport.measure import (AtomicMeasure, DensityMeasure, Domain, Interval, cdf, measures_equal,
                                  mixture, pushforward, quantile, quantile_cells, quantize, restrict,
                                  set_difference, set_intersection, set_union, to_rat)
from osctransport.piecewise import PiecewiseMap
from osctransport.solver import Instance

import gen
from oracles import bisect_quantile

rats = st.fractions(min_value=-2, max_value=2, max_denominator=12)


@st.composite
def intervals(draw):
    a, b = sorted((draw(rats), draw(rats)))
    if a == b:
        return Interval.point(a)
    return Interval(a, b, draw(st.booleans()), draw(st.booleans()))


def test_to_rat_accepts_exact_forms():
    assert to_rat("3/4") == F(3, 4)
    assert to_rat("0.125") == F(1, 8)
    assert to_rat(7) == 7
    for bad in ("x", "1/0", True, 0.5):
        with pytest.raises(ParseError):
            to_rat(bad)


@given(intervals())
def test_interval_text_round_trip(I):
    assert Interval.parse(str(I)) == I


def test_interval_membership_respects_open_ends():
    I = Interval(0, 1, True, False)
    assert not I.contains(0) and I.contains(1) and I.contains(F(1, 2))
    with pytest.raises(ValidationError):
        Interval(1, 0)
    with pytest.raises(ValidationError):
        Interval(1, 1, True, False)


@settings(max_examples=200)
@given(st.lists(intervals(), min_size=1, max_size=4), st.lists(intervals(), min_size=1, max_size=4))
def test_set_algebra_matches_membership(A, B):
    pts = sorted({p for I in A + B for p in (I.lo, I.hi)})
    probes = pts + [(a + b) / 2 for a, b in zip(pts, pts[1:])] + [pts[0] - 1, pts[-1] + 1]
    inA = lambda x: any(I.contains(x) for I in A)
    inB = lambda x: any(I.contains(x) for I in B)
    U, N, D = set_union(A, B), set_intersection(A, B), set_difference(A, B)
    for x in probes:
        assert any(I.contains(x) for I in U) == (inA(x) or inB(x))
        assert any(I.contains(x) for I in N) == (inA(x) and inB(x))
        assert any(I.contains(x) for I in D) == (inA(x) and not inB(x))


def test_domain_rejects_overlaps_and_open_components():
    with pytest.raises(ValidationError):
        Domain((Interval(0, 1), Interval(1, 2)))
    with pytest.raises(ValidationError):
        Domain((Interval(0, 1, True, False),))


def test_cdf_and_quantile_of_fold_density():
    mu = fold_mu()
    assert mu.total == 1
    assert cdf(mu, F(1, 4)) == F(2, 5)
    assert cdf(mu, F(3, 4)) == F(3, 5)
    assert quantile(mu, F(2, 5)) == F(1, 4)
    assert quantile(mu, F(1, 2)) == F(1, 2)
    with pytest.raises(DomainError):
        quantile(mu, F(3, 2))


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False), st.fractions(min_value=F(1, 100), max_value=1, max_denominator=100))
def test_quantile_agrees_with_bisection(rng, p):
    m = gen.density(rng)
    q = quantile(m, p)
    assert cdf(m, q) == p
    assert abs(float(q) - bisect_quantile(lambda x: cdf(m, x), p, 0, 1)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 16))
def test_quantile_cells_carry_equal_mass(rng, n):
    m = gen.density(rng)
    cells = quantile_cells(m, n)
    assert len(cells) == n
    for (I, x, w), (J, _, _) in zip(cells, cells[1:]):
        assert I.hi == J.lo
    for I, x, w in cells:
        assert w == F(1, n)
        assert restrict(m, I)[1] == w
        assert I.contains(x)
    q = quantize(m, n)
    assert q.total == 1 and len(q.atoms) <= n


def test_quantize_uniform_midpoints():
    q = quantize(DensityMeasure.uniform(0, 1), 4)
    assert q.atoms == tuple((F(2 * i - 1, 8), F(1, 4)) for i in range(1, 5))


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_restrictions_recombine(rng):
    m = gen.density(rng)
    c = F(rng.randint(1, 19), 20)
    left, a = restrict(m, Interval(0, c))
    right, b = restrict(m, Interval(c, 1, True, False))
    assert a + b == 1
    assert measures_equal(mixture([(1, left), (1, right)]), m)


def test_pushforward_of_fold_maps():
    assert measures_equal(pushforward(fold_mu(), fold_map()), fold_nu())
    doubled = pushforward(DensityMeasure.uniform(0, 1), PiecewiseMap.affine_chain([(0, 0), (1, 2)]))
    assert measures_equal(doubled, DensityMeasure.from_pairs([((0, 2), F(1, 2))]))


def test_pushforward_constant_segment_gives_atom():
    T = PiecewiseMap.affine_chain([(0, F(1, 3)), (1, F(1, 3))])
    assert measures_equal(pushforward(DensityMeasure.uniform(0, 1), T), AtomicMeasure(((F(1, 3), F(1)),)))


def test_pushforward_needs_full_coverage():
    T = PiecewiseMap.affine_chain([(0, 0), (F(1, 2), 1)])
    with pytest.raises(CoverageError):
        pushforward(DensityMeasure.uniform(0, 1), T)


def test_instance_validation():
    unit = Domain.interval(0, 1)
    mu = DensityMeasure.uniform(0, 1)
    with pytest.raises(ValidationError):
        Instance(unit, unit, 0, mu, mu)
    heavy = DensityMeasure.from_pairs([((0, 1), 2)])
    with pytest.raises(ValidationError):
        Instance(unit, unit, F(1, 10), heavy, mu)
    outside = AtomicMeasure(((F(2), F(1)),))
    with pytest.raises(ValidationError):
        Instance(unit, unit, F(1, 10), mu, outside)


def test_atomic_measure_merges_and_validates():
    m = AtomicMeasure.from_pairs([(1, F(1, 4)), (0, F(1, 4)), (1, F(1, 2))])
    assert m.atoms == ((F(0), F(1, 4)), (F(1), F(3, 4)))
    with pytest.raises(ValidationError):
        AtomicMeasure(((F(1), F(1, 2)), (F(0), F(1, 2))))
