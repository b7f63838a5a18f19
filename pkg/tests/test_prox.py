import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from families import FAMILIES, linf, make, random_function, sqrt_card
from subnorm.lovasz import NormContext, dual_norm, omega
from subnorm.prox import (
    ProxWorkspace,
    kkt_residuals,
    prox,
    prox_by_levelsets,
    prox_bruteforce,
    prox_closed_form,
    prox_support,
    soft_threshold,
)
from subnorm.setfn import Cardinality, ConcaveCardinality, WeightedCardinality


def project_l1_ball(z, radius):
    """Euclidean projection onto {x : ||x||_1 <= radius} by sorting."""
    a = np.abs(z)
    if a.sum() <= radius:
        return z.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    k = np.nonzero(u * np.arange(1, z.size + 1) > css - radius)[0][-1]
    theta = (css[k] - radius) / (k + 1)
    return np.sign(z) * np.maximum(a - theta, 0)


def prox_objective(ctx, z, w, lam):
    return 0.5 * np.sum((w - z) ** 2) + lam * omega(ctx, w)


def test_l1_example():
    res = prox(NormContext(Cardinality(3)), np.array([3.0, -1.0, 0.5]), 1.0)
    np.testing.assert_allclose(res.w, [2, 0, 0])
    assert res.support == {0}


def test_linf_example():
    res = prox(NormContext(linf(2)), np.array([2.0, 1.0]), 1.0)
    np.testing.assert_allclose(res.w, [1, 1], atol=1e-10)


def test_zero_input(rng):
    ctx = NormContext(make("group_cover", 5, rng))
    assert not prox(ctx, np.zeros(5), 0.7).w.any()


@pytest.mark.parametrize("method", ["mnp", "split", "auto"])
def test_l1_is_soft_threshold(method, rng):
    ctx = NormContext(Cardinality(12))
    for _ in range(10):
        z, lam = 2 * rng.standard_normal(12), rng.uniform(0.1, 2)
        np.testing.assert_allclose(prox(ctx, z, lam, method=method).w, soft_threshold(z, lam), atol=1e-10)


@pytest.mark.parametrize("method", ["mnp", "split"])
def test_linf_is_moreau_complement(method, rng):
    ctx = NormContext(linf(9))
    for _ in range(10):
        z, lam = 2 * rng.standard_normal(9), rng.uniform(0.1, 3)
        np.testing.assert_allclose(prox(ctx, z, lam, method=method).w, z - project_l1_ball(z, lam), atol=1e-8)


@pytest.mark.parametrize("family", FAMILIES)
def test_matches_bruteforce_oracle(family, rng):
    for _ in range(4):
        p = int(rng.integers(2, 7))
        ctx = NormContext(make(family, p, rng))
        z = 2 * rng.standard_normal(p)
        lam = rng.uniform(0.05, 1.0) * dual_norm(ctx, z)
        ref = prox_bruteforce(ctx, z, lam)
        for method in ("mnp", "split", "auto"):
            res = prox(ctx, z, lam, method=method)
            np.testing.assert_allclose(res.w, ref.w, atol=1e-8)
            assert res.support == ref.support


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_kkt_and_optimality(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(2, 11))
    ctx = NormContext(random_function(rng, p))
    z = 3 * rng.standard_normal(p)
    lam = rng.uniform(0.05, 2.0)
    res = prox(ctx, z, lam)
    dual, comp = kkt_residuals(ctx, z, res.w, lam)
    assert dual <= 1e-8 and comp <= 1e-8
    # no random perturbation does better
    f0 = prox_objective(ctx, z, res.w, lam)
    for _ in range(5):
        assert prox_objective(ctx, z, res.w + 1e-3 * rng.standard_normal(p), lam) >= f0 - 1e-12


def test_closed_forms(rng):
    z = 2 * rng.standard_normal(10)
    ctx = NormContext(WeightedCardinality(rng.uniform(0.2, 1.5, 10)))
    np.testing.assert_allclose(prox_closed_form(ctx, z, 0.8), prox(ctx, z, 0.8, method="mnp").w, atol=1e-10)
    h = np.concatenate([[0.0], np.cumsum(np.sort(rng.uniform(0.1, 1, 10))[::-1])])
    ctx = NormContext(ConcaveCardinality(h))
    np.testing.assert_allclose(prox_closed_form(ctx, z, 0.8), prox(ctx, z, 0.8, method="mnp").w, atol=1e-9)
    assert prox_closed_form(NormContext(linf(3)), z[:3], 0.8) is None


def test_large_lambda_gives_zero(rng):
    ctx = NormContext(sqrt_card(6))
    z = rng.standard_normal(6)
    lam = dual_norm(ctx, z)
    assert not prox_bruteforce(ctx, z, lam * 1.001).w.any()
    assert not prox(ctx, z, lam * 1.001).w.any()
    assert prox(ctx, z, lam * 0.9).w.any()


def test_bruteforce_two_dimensional():
    ctx = NormContext(sqrt_card(2))
    z = np.array([2.0, 1.0])
    res = prox_bruteforce(ctx, z, 1.0)
    assert max(kkt_residuals(ctx, z, res.w, 1.0)) < 1e-8


def test_prox_support():
    ctx = NormContext(Cardinality(3))
    assert prox_support(ctx, np.array([3.0, -1.0, 0.5]), 1.0) == {0}
    assert prox_support(ctx, np.array([0.3, -0.2, 0.1]), 1.0) == frozenset()


def test_prox_support_matches_prox(rng):
    for _ in range(20):
        p = int(rng.integers(2, 10))
        ctx = NormContext(sqrt_card(p))
        z, lam = 2 * rng.standard_normal(p), rng.uniform(0.1, 1.5)
        assert prox_support(ctx, z, lam, method="mnp") == prox(ctx, z, lam, method="mnp").support


def test_levelsets_l1_exact():
    ctx = NormContext(Cardinality(4))
    z = np.array([3.0, -1.5, 0.5, 2.0])
    alphas = np.array([0.25, 0.5, 0.75, 1.0, 1.5, 2.0])
    w = soft_threshold(z, 1.0)
    approx = prox_by_levelsets(ctx, z, 1.0, alphas)
    # level sets are strict, {k : |w_k| > alpha}
    for a in alphas:
        np.testing.assert_array_equal(np.abs(approx) >= a, np.abs(w) > a)
    assert np.all(np.sign(approx[approx != 0]) == np.sign(z[approx != 0]))


def test_levelsets_within_grid_spacing(rng):
    for _ in range(10):
        p = int(rng.integers(2, 9))
        ctx = NormContext(random_function(rng, p))
        z = 2 * rng.standard_normal(p)
        w = prox(ctx, z, 0.5).w
        alphas = np.linspace(0, np.abs(w).max() + 0.1, 41)[1:]
        approx = prox_by_levelsets(ctx, z, 0.5, alphas)
        assert np.max(np.abs(approx - w)) <= alphas[1] - alphas[0] + 1e-9


def test_workspace_warm_start_gives_same_point(rng):
    ctx = NormContext(make("spectral_power", 15, rng))
    ws = ProxWorkspace()
    z = rng.standard_normal(15)
    for lam in (0.4, 0.35, 0.3):
        np.testing.assert_allclose(prox(ctx, z, lam, method="mnp", workspace=ws).w, prox(ctx, z, lam, method="mnp").w, atol=1e-7)
    assert ws.calls == 3


@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_rejects_nonpositive_lambda(lam):
    with pytest.raises(ValueError):
        prox(NormContext(Cardinality(2)), np.ones(2), lam)
