import numpy as np
import pytest

from d2dcoop.channel import (
    LinkState,
    NetworkConfig,
    TransmissionCase,
    case_probability,
    classify_case,
    classify_cases,
    mean_gain,
    sample_block,
    sample_blocks,
)

PAPER = dict(d10=20.0, d20=30.0, d12=12.0, gamma=2.4, p1=1.0, p2=1.0)


def test_mean_gain_power_law():
    assert mean_gain(1.0, 2.4) == 1.0
    assert mean_gain(10.0, 2.0) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        mean_gain(0.0, 2.4)
    with pytest.raises(ValueError):
        mean_gain(5.0, -1.0)


def test_network_config_validation_and_gains():
    cfg = NetworkConfig(**PAPER)
    assert cfg.mu10 == pytest.approx(20.0 ** -2.4)
    assert cfg.mu20 == pytest.approx(30.0 ** -2.4)
    assert cfg.mu12 == cfg.mu21 == pytest.approx(12.0 ** -2.4)
    with pytest.raises(ValueError):
        NetworkConfig(d10=-1, d20=30, d12=12, gamma=2.4, p1=1, p2=1)
    with pytest.raises(ValueError):
        NetworkConfig(d10=20, d20=30, d12=12, gamma=2.4, p1=-1, p2=1)


def test_from_mean_gains_roundtrip():
    cfg = NetworkConfig.from_mean_gains(4.0, 1.0, 16.0, gamma=2.4, p1=2.0, p2=2.0)
    assert cfg.mu10 == pytest.approx(4.0)
    assert cfg.mu20 == pytest.approx(1.0)
    assert cfg.mu12 == pytest.approx(16.0)
    assert cfg.mu21 == pytest.approx(16.0)


def _ls(g10, g20, g12, g21):
    return LinkState(g10=g10, g20=g20, g12=g12, g21=g21,
                     theta10=0.0, theta20=0.0, theta12=0.0, theta21=0.0)


def test_classification_cases():
    assert classify_case(_ls(1.0, 1.0, 0.5, 0.5)) == TransmissionCase.CASE1_DIRECT_BOTH
    assert classify_case(_ls(0.5, 0.5, 1.0, 1.0)) == TransmissionCase.CASE2_COOP_BOTH
    assert classify_case(_ls(0.5, 1.0, 1.0, 0.5)) == TransmissionCase.CASE3_UE1_COOP
    assert classify_case(_ls(1.0, 0.5, 0.5, 1.0)) == TransmissionCase.CASE4_UE2_COOP
    # Ties take the direct (<=) branch.
    assert classify_case(_ls(1.0, 1.0, 1.0, 1.0)) == TransmissionCase.CASE1_DIRECT_BOTH


def test_classify_cases_vectorized_matches_scalar():
    cfg = NetworkConfig(**PAPER)
    rng = np.random.default_rng(3)
    ls = sample_blocks(cfg, 500, rng)
    vec = classify_cases(ls)
    names = ("g10", "g20", "g12", "g21", "theta10", "theta20", "theta12", "theta21")
    for i in range(500):
        one = LinkState(*(getattr(ls, f)[i] for f in names))
        assert vec[i] == classify_case(one)


def test_case_probability_sums_to_one_and_symmetric():
    cfg = NetworkConfig(**PAPER)
    probs = case_probability(cfg)
    assert sum(probs.values()) == pytest.approx(1.0)
    sym = NetworkConfig(d10=15, d20=15, d12=15, gamma=2.4, p1=1, p2=1)
    for p in case_probability(sym).values():
        assert p == pytest.approx(0.25)


def test_case_probability_paper_geometry():
    probs = case_probability(NetworkConfig(**PAPER))
    # q1 = mu10/(mu10+mu12), q2 = mu20/(mu20+mu21)
    assert probs[TransmissionCase.CASE2_COOP_BOTH] == pytest.approx(0.6959, abs=2e-4)


def test_sampling_determinism_and_marginals():
    cfg = NetworkConfig(**PAPER)
    a = sample_blocks(cfg, 1000, np.random.default_rng(9))
    b = sample_blocks(cfg, 1000, np.random.default_rng(9))
    assert np.array_equal(a.g10, b.g10) and np.array_equal(a.theta21, b.theta21)
    big = sample_blocks(cfg, 200_000, np.random.default_rng(1))
    assert np.mean(np.square(big.g10)) == pytest.approx(cfg.mu10, rel=0.02)
    assert np.mean(np.square(big.g12)) == pytest.approx(cfg.mu12, rel=0.02)
    assert np.all(big.theta10 >= 0) and np.all(big.theta10 < 2 * np.pi)


def test_sample_block_scalar():
    cfg = NetworkConfig(**PAPER)
    ls = sample_block(cfg, np.random.default_rng(2))
    assert np.isscalar(ls.g10) or np.ndim(ls.g10) == 0
    assert ls.g10 > 0
