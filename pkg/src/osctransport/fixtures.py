"""The folding counterexample: a two-slope fold beats the monotone map."""
from __future__ import annotations

from fractions import Fraction

from .measure import DensityMeasure, Domain
from .piecewise import PiecewiseMap
from .solver import Instance

F = Fraction


def fold_mu() -> DensityMeasure:
    """Density 8/5 on [0,1/4] and [3/4,1], 2/5 on [1/4,3/4]."""
    return DensityMeasure.from_pairs([((0, F(1, 4)), F(8, 5)), ((F(1, 4), F(3, 4)), F(2, 5)),
                                      ((F(3, 4), 1), F(8, 5))])


def fold_nu() -> DensityMeasure:
    """Image of ``fold_mu`` under the fold: 8/5 on [0,1/2], 2/5 on [1/2,1]."""
    return DensityMeasure.from_pairs([((0, F(1, 2)), F(8, 5)), ((F(1, 2), 1), F(2, 5))])


def fold_map() -> PiecewiseMap:
    """x -> 2x on [0,1/2], 2 - 2x on [1/2,1]."""
    return PiecewiseMap.affine_chain([(0, 0), (F(1, 2), 1), (1, 0)])


def fold_monotone_map() -> PiecewiseMap:
    """The increasing rearrangement of ``fold_mu`` onto ``fold_nu``, written out."""
    return PiecewiseMap.affine_chain([(0, 0), (F(1, 4), F(1, 4)), (F(3, 4), F(3, 8)),
                                      (F(7, 8), F(1, 2)), (1, 1)])


def fold_instance(delta=F(1, 10)) -> Instance:
    unit = Domain.interval(0, 1)
    return Instance(unit, unit, delta, fold_mu(), fold_nu())
