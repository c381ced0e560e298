import numpy as np
import pytest

from d2dcoop.channel import NetworkConfig
from d2dcoop.montecarlo import (
    Estimate,
    EstimatorConfig,
    estimate_bernoulli,
    estimate_fields,
    sweep,
)

CFG = NetworkConfig(d10=20, d20=30, d12=12, gamma=2.4, p1=1.0, p2=1.0)


def test_chunk_sizes_partition():
    est = EstimatorConfig(master_seed=0, samples=1003, chunks=7)
    sizes = est.chunk_sizes()
    assert sum(sizes) == 1003 and len(sizes) == 7
    assert max(sizes) - min(sizes) <= 1
    with pytest.raises(ValueError):
        EstimatorConfig(master_seed=0, samples=0)


def test_estimate_from_count():
    e = Estimate.from_count(25, 100)
    assert e.mean == 0.25
    assert e.std_error == pytest.approx(np.sqrt(0.25 * 0.75 / 100))
    assert e.n == 100


def test_bernoulli_against_exponential_cdf():
    # |g10|^2 ~ Exp(mean mu10): P[|g10|^2 < x] = 1 - exp(-x/mu10).
    x = CFG.mu10 * 0.8
    est = EstimatorConfig(master_seed=5, samples=400_000, chunks=8)
    res = estimate_bernoulli(est, CFG, lambda ls: np.square(ls.g10) < x)
    truth = 1.0 - np.exp(-0.8)
    assert abs(res.mean - truth) < 4 * res.std_error
    assert res.n == 400_000


def test_thread_count_invariance():
    est = EstimatorConfig(master_seed=9, samples=50_000, chunks=16)
    fn = lambda ls: {"a": ls.g12 > ls.g10, "b": ls.g21 > ls.g20}
    r1 = estimate_fields(est, CFG, fn, threads=1)
    r2 = estimate_fields(est, CFG, fn, threads=8)
    assert r1["a"].mean == r2["a"].mean
    assert r1["b"].std_error == r2["b"].std_error


def test_same_seed_reproducible_different_seed_not():
    est = EstimatorConfig(master_seed=13, samples=20_000)
    f = lambda ls: ls.g12 > ls.g10
    a = estimate_bernoulli(est, CFG, f)
    b = estimate_bernoulli(est, CFG, f)
    c = estimate_bernoulli(EstimatorConfig(master_seed=14, samples=20_000), CFG, f)
    assert a.mean == b.mean
    assert a.mean != c.mean


def test_sweep_runs_and_rejects_empty():
    est = EstimatorConfig(master_seed=1, samples=1000)
    rows = sweep(est, [0.5, 1.0],
                 lambda x, est_: {"p": estimate_bernoulli(
                     est_, CFG.with_powers(x, x),
                     lambda ls: ls.g10 > ls.g20).mean})
    assert len(rows) == 2 and rows[0]["point"] == 0.5
    with pytest.raises(ValueError):
        sweep(est, [], lambda *a: {})
