import numpy as np
import pytest

from d2dcoop.channel import LinkState, NetworkConfig, TransmissionCase, sample_block
from d2dcoop.rate_region import PhaseSchedule, PowerAllocation, achievable_region, j_terms, _log2_1p
from d2dcoop.schemes import (
    Fd2Params,
    SchemePolicy,
    case_policy,
    fd2_region,
    fd3_region,
    mac_policy,
    mac_sic_region,
    rp_region,
)

CFG = NetworkConfig(d10=20, d20=30, d12=12, gamma=2.4, p1=4.0, p2=4.0)


def _ls(**kw):
    base = dict(g10=0.1, g20=0.05, g12=0.3, g21=0.3,
                theta10=0.0, theta20=0.0, theta12=0.0, theta21=0.0)
    base.update(kw)
    return LinkState(**base)


def test_rp_region_boost_convention():
    ls = _ls()
    reg = rp_region(ls, CFG, split=0.5)
    assert reg.bound(1, 0) == pytest.approx(0.5 * np.log2(1 + 0.01 * 8.0))
    flat = rp_region(ls, CFG, split=0.5, boost=False)
    assert flat.bound(1, 0) == pytest.approx(0.5 * np.log2(1 + 0.01 * 4.0))
    with pytest.raises(ValueError):
        rp_region(ls, CFG, split=0.0)


def test_rp_inside_mac_pentagon():
    rng = np.random.default_rng(2)
    for _ in range(200):
        ls = sample_block(CFG, rng)
        mac = mac_sic_region(ls, CFG)
        for split in (0.2, 0.5, 0.8):
            rp = rp_region(ls, CFG, split)
            assert mac.contains(rp.bound(1, 0), rp.bound(0, 1), tol=1e-12)


def test_mac_sic_region_oracle():
    ls = _ls()
    reg = mac_sic_region(ls, CFG)
    a, b = 0.01 * 4.0, 0.0025 * 4.0
    assert reg.bound(1, 0) == pytest.approx(np.log2(1 + a))
    assert reg.bound(0, 1) == pytest.approx(np.log2(1 + b))
    assert reg.bound(1, 1) == pytest.approx(np.log2(1 + a + b))


def test_fd2_params_budget():
    fp = Fd2Params(beta=0.5, rho12=2.0, rho21=2.0, rho1_1=2.0, rho1_2=2.0,
                   rho2_1=2.0, rho2_2=2.0)
    e1, e2 = fp.spend()
    assert e1 == pytest.approx(3.0) and e2 == pytest.approx(3.0)
    fp.check_budget(3.0, 3.0)
    with pytest.raises(ValueError):
        fp.check_budget(2.9, 3.0)
    with pytest.raises(ValueError):
        Fd2Params(beta=1.5, rho12=0, rho21=0, rho1_1=0, rho1_2=0,
                  rho2_1=0, rho2_2=0)


def test_fd2_region_coherent_combining():
    ls = _ls(g10=0.2, g20=0.1)
    fp = Fd2Params(beta=0.5, rho12=1.0, rho21=1.0, rho1_1=4.0, rho1_2=4.0,
                   rho2_1=0.0, rho2_2=0.0)
    reg = fd2_region(ls, fp)
    beam = (0.2 * 2.0 + 0.1 * 2.0) ** 2
    a3 = 0.25 * np.log2(1 + 0.04 * 1.0 + beam)
    a1 = 0.25 * np.log2(1 + 0.09 * 1.0)
    assert reg.bound(1, 0) == pytest.approx(min(a1, a3))


def test_fd3_region_equals_td_region():
    rng = np.random.default_rng(4)
    ps = PhaseSchedule(0.25, 0.25)
    pa = PowerAllocation(4.0, 4.0, 3.0, 3.0, 3.0, 3.0)
    for _ in range(50):
        ls = sample_block(CFG, rng)
        td = achievable_region(j_terms(ls, ps, pa))
        fd3 = fd3_region(ls, ps, pa)
        for ab in ((1, 0), (0, 1), (1, 1)):
            assert fd3.bound(*ab) == pytest.approx(td.bound(*ab), abs=1e-12)


def test_mac_policy_reduces_to_sic_region():
    rng = np.random.default_rng(6)
    pol = mac_policy(CFG)
    for _ in range(200):
        ls = sample_block(CFG, rng)
        td = achievable_region(j_terms(ls, pol.ps, pol.pa))
        mac = mac_sic_region(ls, CFG)
        for ab in ((1, 0), (0, 1), (1, 1)):
            assert td.bound(*ab) == pytest.approx(mac.bound(*ab), abs=1e-12)


def test_case_policy_zeroing_and_budget():
    base = SchemePolicy(
        ps=PhaseSchedule(0.25, 0.25),
        pa=PowerAllocation(4.0, 4.0, 3.0, 3.0, 3.0, 3.0))
    for case, zeros in [
        (TransmissionCase.CASE3_UE1_COOP, ("rho22",)),
        (TransmissionCase.CASE4_UE2_COOP, ("rho11",)),
    ]:
        pol = case_policy(case, base, CFG)
        for name in zeros:
            assert getattr(pol.pa, name) == 0.0
        pol.pa.check_budget(pol.ps, CFG.p1, CFG.p2)
    pol1 = case_policy(TransmissionCase.CASE1_DIRECT_BOTH, base, CFG)
    assert pol1.pa.rho10 == CFG.p1 and pol1.pa.rho20 == CFG.p2
    assert pol1.ps.alpha3 == pytest.approx(1.0)
    pol2 = case_policy(TransmissionCase.CASE2_COOP_BOTH, base, CFG)
    assert pol2 == base
