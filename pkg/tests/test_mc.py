import math

import numpy as np
import pytest

from mg1tail import (
    ExponentialIntegrated,
    GeomModel,
    Lattice,
    Method,
    ParetoIntegratedTail,
    QueueModel,
    ResourceBudgetError,
    ak_estimate,
    compound_geometric_sample,
    convolve_tail,
    convolve_tail_grid,
    crude_mc,
    geom_crude_mc,
    lattice_brackets,
    pk_truncated,
    tail_prob,
)
from mg1tail.rng import Stream

TWO_POINT = Lattice(h=1.0, mass=[0.0, 0.5, 0.5])


def test_convolve_tail_hand_values():
    # S_2 over {1,2}: P(S_2 > 2.5) = 1 - P(1,1) = 3/4
    assert convolve_tail(TWO_POINT, 2, 2.5) == 0.75
    # S_3 > 3.5 misses only (1,1,1)
    assert convolve_tail(TWO_POINT, 3, 3.5) == 0.875
    assert convolve_tail(TWO_POINT, 1, 0.5) == 1.0
    assert convolve_tail(TWO_POINT, 2, 4.0) == 0.0
    assert convolve_tail(TWO_POINT, 2, 3.9) == 0.25


def test_convolve_tail_grid_matches_scalar():
    xs = [0.0, 1.0, 2.5, 3.0, 5.5, 9.0]
    grid = convolve_tail_grid(TWO_POINT, 4, xs)
    for x, v in zip(xs, grid):
        assert v == convolve_tail(TWO_POINT, 4, x)


def test_convolve_tail_against_binomial():
    # S_n - n over {0,1} jumps is Binomial(n, 1/2)
    from math import comb

    n, x = 8, 12.5
    expect = sum(comb(n, k) for k in range(5, n + 1)) / 2.0 ** n
    assert math.isclose(convolve_tail(TWO_POINT, n, x), expect, rel_tol=1e-13)


def test_convolve_budget_guard():
    lat = Lattice(h=0.01, mass=np.full(1000, 1e-3))
    with pytest.raises(ResourceBudgetError):
        convolve_tail(lat, 300_000, 5.0)


def test_lattice_brackets_sandwich_continuous_tail():
    model = ParetoIntegratedTail(alpha=3.5)
    lo, hi = lattice_brackets(model, 0.25, 30.0)
    assert math.isclose(float(np.sum(lo.mass)), 1.0, rel_tol=1e-12)
    assert math.isclose(float(np.sum(hi.mass)), 1.0, rel_tol=1e-12)
    for x in (0.4, 1.0, 2.3, 7.7, 19.0):
        assert tail_prob(lo, x) <= tail_prob(model, x) + 1e-15
        assert tail_prob(hi, x) >= tail_prob(model, x) - 1e-15


def test_lattice_brackets_sandwich_erlang_tail():
    # independent oracle: S_3 of Exp(1) is Erlang(3)
    model = ExponentialIntegrated(rate=1.0)
    n, x = 3, 5.0
    exact = math.exp(-x) * (1.0 + x + x * x / 2.0)
    lo, hi = lattice_brackets(model, 0.02, 40.0)
    t_lo = convolve_tail(lo, n, x)
    t_hi = convolve_tail(hi, n, x)
    assert t_lo <= exact <= t_hi
    assert t_hi - t_lo < 0.02


def test_pk_brackets_mm1():
    q = QueueModel(model=ExponentialIntegrated(rate=1.0), rho=0.5)
    exact = 0.5 * math.exp(-0.5 * 2.0)
    pk = pk_truncated(q, 2.0, h=0.01)
    assert pk.lower <= exact <= pk.upper
    assert pk.upper - pk.lower < 2e-3
    assert abs(pk.value - exact) < 1e-3
    assert pk.truncation_bound <= 1e-10
    assert pk.lattice_spacing == 0.01


def test_pk_value_at_zero_is_rho():
    for rho in (0.3, 0.95):
        q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=rho)
        pk = pk_truncated(q, 0.0)
        assert abs(pk.value - rho) <= 1e-9
        # enclosure is exact up to float accumulation of the series
        assert pk.lower <= rho + 1e-12
        assert pk.upper >= rho - 1e-12


def test_pk_narrows_with_spacing():
    q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=0.8)
    w1 = (lambda p: p.upper - p.lower)(pk_truncated(q, 10.0, h=0.1))
    w2 = (lambda p: p.upper - p.lower)(pk_truncated(q, 10.0, h=0.05))
    assert w2 < w1


def test_pk_lattice_model_uses_own_spacing():
    q = QueueModel(model=TWO_POINT, rho=0.5)
    pk = pk_truncated(q, 2.5, h=0.33)
    assert pk.lattice_spacing == 1.0
    # direct series: sum (1-rho) rho^n P(S_n > 2.5)
    expect = sum(0.5 ** (n + 1) * convolve_tail(TWO_POINT, n, 2.5) for n in range(1, 40))
    assert math.isclose(pk.value, expect, rel_tol=1e-9)


def test_pk_budget_guard():
    q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=0.8)
    with pytest.raises(ResourceBudgetError):
        pk_truncated(q, 1e7, h=0.001)


def test_ak_estimate_covers_pk():
    q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=0.8)
    pk = pk_truncated(q, 100.0)
    est = ak_estimate(q, 100.0, seed=123)
    assert est.converged
    assert est.method is Method.ASMUSSEN_KROESE
    assert abs(est.estimate - pk.value) <= est.half_width + (pk.upper - pk.lower)


def test_ak_estimate_on_lattice_model_is_unbiased():
    # ties between the running max and fresh jumps need the atom correction;
    # against the exact series the corrected estimator stays centered
    q = QueueModel(model=TWO_POINT, rho=0.7)
    pk = pk_truncated(q, 6.5)
    est = ak_estimate(q, 6.5, target_rel_err=0.02, seed=42)
    assert abs(est.estimate - pk.value) <= est.half_width + (pk.upper - pk.lower)


def test_crude_mc_mm1():
    q = QueueModel(model=ExponentialIntegrated(rate=1.0), rho=0.5)
    exact = 0.5 * math.exp(-0.5 * 2.0)
    est = crude_mc(q, 2.0, 200_000, seed=3)
    assert est.method is Method.CRUDE
    assert est.n_samples == 200_000
    assert abs(est.estimate - exact) <= est.half_width


def test_estimates_are_deterministic():
    q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=0.8)
    assert ak_estimate(q, 25.0, seed=9) == ak_estimate(q, 25.0, seed=9)
    assert crude_mc(q, 5.0, 50_000, seed=9) == crude_mc(q, 5.0, 50_000, seed=9)
    assert ak_estimate(q, 25.0, seed=9) != ak_estimate(q, 25.0, seed=10)


def test_ak_stop_rule():
    q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=0.8)
    est = ak_estimate(q, 10.0, target_rel_err=0.05, seed=1)
    assert est.converged
    assert est.n_samples >= 100_000
    assert est.n_samples % 10_000 == 0
    assert est.rel_err <= 0.05
    capped = ak_estimate(q, 10.0, target_rel_err=1e-9, seed=1, max_samples=60_000)
    assert not capped.converged
    assert capped.n_samples == 60_000


def test_compound_geometric_sample_mean():
    q = QueueModel(model=ExponentialIntegrated(rate=1.0), rho=0.5)
    total = 0.0
    n = 40_000
    for rep in range(n):
        total += compound_geometric_sample(q, Stream(seed=77, rep=rep))
    # E W = rho/(1-rho) mu = 1; sd of the mean ~ sqrt(3/n)
    assert abs(total / n - 1.0) < 5.0 * math.sqrt(3.0 / n)


def test_geom_crude_mc_matches_conditioned_queue():
    # the geometric sum with count >= 1 is the queue sum given N >= 1:
    # P(Z > x) = P(W > x) / (1 - p) for x >= 0
    model = ParetoIntegratedTail(alpha=4.0)
    g = GeomModel(y_model=model, p=0.2)
    q = QueueModel(model=model, rho=0.8)
    x = 12.0
    pk = pk_truncated(q, x)
    est = geom_crude_mc(g, x, 400_000, seed=5)
    assert abs(est.estimate - pk.value / 0.8) <= est.half_width + (pk.upper - pk.lower)


def test_input_validation():
    q = QueueModel(model=ParetoIntegratedTail(alpha=3.5), rho=0.8)
    with pytest.raises(ValueError):
        crude_mc(q, 1.0, 50)
    with pytest.raises(ValueError):
        ak_estimate(q, -1.0)
    with pytest.raises(ValueError):
        pk_truncated(q, -1.0)
    with pytest.raises(ValueError):
        convolve_tail(TWO_POINT, 0, 1.0)
