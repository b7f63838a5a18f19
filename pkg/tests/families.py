"""Random instances of every built-in set-function family, for tests."""
import numpy as np

from subnorm.setfn import (
    Cardinality,
    ConcaveCardinality,
    GroupCover,
    IntervalCount,
    LogShift,
    Power,
    RangePlusConstant,
    Spectral,
    SumFunction,
    WeightedCardinality,
)

FAMILIES = (
    "cardinality",
    "weighted",
    "concave",
    "group_cover",
    "range",
    "intervals",
    "spectral_power",
    "spectral_log",
    "sum",
)


def sqrt_card(p):
    return ConcaveCardinality.from_function(p, np.sqrt)


def linf(p):
    return GroupCover(p, [list(range(p))])


def fig1_mixed():
    # F(A) = 1/2 [A meets {2}] + [A nonempty], 0-based groups
    return GroupCover(2, [[1], [0, 1]], [0.5, 1.0])


def make(family, p, rng):
    if family == "cardinality":
        return Cardinality(p)
    if family == "weighted":
        return WeightedCardinality(rng.uniform(0.2, 2.0, p))
    if family == "concave":
        gains = np.sort(rng.uniform(0.05, 1.0, p))[::-1]
        return ConcaveCardinality(np.concatenate([[0.0], np.cumsum(gains)]))
    if family == "group_cover":
        groups = [sorted(rng.choice(p, size=rng.integers(1, p + 1), replace=False).tolist()) for _ in range(rng.integers(1, 5))]
        # every element needs a group so singletons stay positive
        groups += [[k] for k in range(p) if not any(k in g for g in groups)]
        return GroupCover(p, groups, rng.uniform(0.2, 2.0, len(groups)))
    if family == "range":
        return RangePlusConstant(p)
    if family == "intervals":
        return IntervalCount(p)
    if family in ("spectral_power", "spectral_log"):
        X = rng.standard_normal((p + 2, p))
        h = Power(rng.uniform(0.2, 1.0)) if family == "spectral_power" else LogShift(rng.uniform(0.5, 2.0))
        return Spectral(X=X, h=h)
    if family == "sum":
        return SumFunction([RangePlusConstant(p), Cardinality(p), sqrt_card(p)], rng.uniform(0.1, 1.0, 3))
    raise ValueError(family)


def random_function(rng, p):
    return make(FAMILIES[rng.integers(len(FAMILIES))], p, rng)
