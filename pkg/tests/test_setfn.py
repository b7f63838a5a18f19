import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from families import FAMILIES, fig1_mixed, linf, make, sqrt_card
from subnorm.setfn import (
    Cardinality,
    CapabilityError,
    ConcaveCardinality,
    Contraction,
    FromCallable,
    GroupCover,
    IntervalCount,
    LogShift,
    Power,
    RangePlusConstant,
    SetFunctionError,
    Spectral,
    WeightedCardinality,
    contract,
    from_config,
    is_nondecreasing,
    is_separable,
    is_stable,
    is_submodular,
    load_config,
    restrict,
    smallest_stable_superset,
    stable_inseparable_sets,
    subset_bits,
)


def test_range_plus_constant():
    assert RangePlusConstant(4)([1]) == 3.0
    assert RangePlusConstant(4)([0, 3]) == 6.0


def test_interval_count():
    assert IntervalCount(5)([0, 1, 3]) == 5.0


@pytest.mark.parametrize("family", FAMILIES)
def test_empty_set_is_zero(family, rng):
    assert make(family, 5, rng)([]) == 0.0


def test_group_cover_counts_groups():
    F = GroupCover(3, [[0, 1], [1, 2]])
    assert F([1]) == 2.0
    assert F([0]) == 1.0


def test_spectral_diagonal():
    X = np.array([[2.0, 0.0], [0.0, 3.0]])
    assert Spectral(X=X)([0, 1]) == pytest.approx(5.0, abs=1e-14)
    assert Spectral(Q=X.T @ X)([0, 1]) == pytest.approx(5.0, abs=1e-12)


def test_spectral_log_shift_matches_eigenvalues(rng):
    X = rng.standard_normal((4, 6))
    F = Spectral(X=X, h=LogShift(0.7))
    for A in ([0], [1, 4], [0, 2, 3, 5], list(range(6))):
        ev = np.clip(np.linalg.eigvalsh(X[:, A].T @ X[:, A]), 0, None)
        assert F(A) == pytest.approx(np.log1p(ev / 0.7).sum(), rel=1e-12)


def test_spectral_rejects_bad_weights():
    with pytest.raises(SetFunctionError):
        Power(1.5)
    with pytest.raises(SetFunctionError):
        LogShift(0.0)


@pytest.mark.parametrize("family", FAMILIES)
def test_chain_matches_pointwise(family, rng):
    F = make(family, 7, rng)
    for _ in range(5):
        perm = rng.permutation(7)
        want = [F(perm[:k]) for k in range(8)]
        np.testing.assert_allclose(F.chain(perm), want, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(F.chain(perm, upto=3), want[:4], rtol=1e-12, atol=1e-12)


def test_spectral_chain_past_rank(rng):
    # more columns than rows exercises the Gram branch
    X = rng.standard_normal((3, 9))
    F = Spectral(X=X)
    perm = rng.permutation(9)
    np.testing.assert_allclose(F.chain(perm), [F(perm[:k]) for k in range(10)], rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("family", FAMILIES)
def test_table_matches_eval(family, rng):
    F = make(family, 5, rng)
    bits = subset_bits(5)
    np.testing.assert_allclose(F.table(), [F(b) for b in bits], rtol=1e-12, atol=1e-12)


def test_cardinality_is_submodular_and_nondecreasing():
    assert is_submodular(Cardinality(3)) and is_nondecreasing(Cardinality(3))


def test_spectral_is_submodular(rng):
    A = rng.standard_normal((6, 6))
    F = Spectral(Q=A @ A.T, h=Power(0.5))
    assert is_submodular(F) and is_nondecreasing(F)


def test_square_of_cardinality_is_not_submodular():
    assert not is_submodular(FromCallable(3, lambda A: len(A) ** 2))


@pytest.mark.parametrize("family", FAMILIES)
def test_families_are_submodular(family, rng):
    for p in (2, 4, 6):
        F = make(family, p, rng)
        assert is_submodular(F) and is_nondecreasing(F)


def test_stability():
    assert is_stable(Cardinality(4), [0, 2])
    assert not is_stable(RangePlusConstant(4), [0, 2])
    assert is_stable(RangePlusConstant(4), range(4))


def test_separability():
    assert is_separable(Cardinality(3), [0, 1])
    assert not is_separable(linf(3), [0, 1])
    assert not is_separable(linf(3), [2])


@pytest.mark.parametrize(
    "F, expected",
    [
        (Cardinality(2), [{0}, {1}]),
        (fig1_mixed(), [{0}, {0, 1}]),
        (sqrt_card(2), [{0}, {1}, {0, 1}]),
    ],
)
def test_stable_inseparable_sets(F, expected):
    got = stable_inseparable_sets(F).stable_inseparable_sets
    assert sorted(map(sorted, got)) == sorted(map(sorted, expected))


def test_smallest_stable_superset():
    assert smallest_stable_superset(Cardinality(4), [0, 2]) == {0, 2}
    assert smallest_stable_superset(RangePlusConstant(4), [0, 2]) == {0, 1, 2}
    assert smallest_stable_superset(RangePlusConstant(4), []) == frozenset()


def test_restrict_and_contract_cardinality():
    R = restrict(Cardinality(5), [1, 3])
    C = contract(Cardinality(5), [1, 3])
    assert R.p == 2 and R([0, 1]) == 2.0
    assert C.p == 3 and C([0, 2]) == 2.0 and not C.degenerate


def test_contract_linf_is_degenerate():
    C = contract(linf(2), [0])
    assert C.degenerate and C([0]) == 0.0


def test_contract_range():
    C = Contraction(RangePlusConstant(4), [1, 2])
    assert C([0]) == 1.0


@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_restriction_and_contraction_stay_submodular(p, seed):
    rng = np.random.default_rng(seed)
    F = make(FAMILIES[seed % len(FAMILIES)], p, rng)
    J = np.flatnonzero(rng.random(p) < 0.5)
    if 0 < len(J) < p:
        assert is_submodular(restrict(F, J))
        assert is_submodular(contract(F, J)) and is_nondecreasing(contract(F, J))


@given(st.lists(st.floats(0.01, 5.0), min_size=1, max_size=8))
def test_weighted_cardinality_is_modular(w):
    F = WeightedCardinality(w)
    p = len(w)
    for A in itertools.islice(itertools.product([False, True], repeat=p), 20):
        A = np.array(A)
        assert F(A) == pytest.approx(float(np.sum(np.array(w)[A])))


def test_bad_inputs():
    with pytest.raises(SetFunctionError):
        ConcaveCardinality([0.0, 1.0, 3.0])  # convex
    with pytest.raises(SetFunctionError):
        WeightedCardinality([1.0, 0.0])  # zero singleton
    with pytest.raises(SetFunctionError):
        GroupCover(3, [[0, 1]])  # element 2 uncovered
    with pytest.raises(SetFunctionError):
        Cardinality(3)([5])
    with pytest.raises(CapabilityError):
        is_submodular(Cardinality(30))


def test_from_config_kinds(tmp_path):
    cfgs = [
        ({"kind": "cardinality", "p": 3}, [0, 2], 2.0),
        ({"kind": "weighted_cardinality", "weights": [1, 2, 3]}, [1, 2], 5.0),
        ({"kind": "concave_cardinality", "p": 4, "power": 0.5}, [0, 1, 2, 3], 2.0),
        ({"kind": "group_cover", "p": 2, "groups": [[2], [1, 2]], "weights": [0.5, 1]}, [1], 1.5),
        ({"kind": "range", "p": 4}, [1], 3.0),
        ({"kind": "interval_count", "p": 5}, [0, 1, 3], 5.0),
        ({"kind": "spectral", "X": [[2, 0], [0, 3]]}, [0, 1], 5.0),
        ({"kind": "sum", "terms": [{"coef": 2, "function": {"kind": "cardinality", "p": 2}}]}, [0, 1], 4.0),
    ]
    for cfg, A, want in cfgs:
        assert from_config(cfg)(A) == pytest.approx(want)
    (tmp_path / "X.csv").write_text("2,0\n0,3\n")
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"function": {"kind": "spectral", "X_csv": "X.csv", "h": {"power": 0.5}}}))
    assert load_config(path)([0, 1]) == pytest.approx(5.0)


@pytest.mark.parametrize("cfg", [{"p": 3}, {"kind": "nope"}, {"kind": "range"}, {"kind": "spectral", "h": {"x": 1}, "Q": [[1]]}])
def test_from_config_errors(cfg):
    with pytest.raises(SetFunctionError):
        from_config(cfg)
