import numpy as np
import pytest

from d2dcoop.channel import LinkState, NetworkConfig, classify_case, sample_block, sample_blocks
from d2dcoop.rate_region import (
    Constraint,
    PhaseSchedule,
    PowerAllocation,
    RateRegion,
    achievable_region,
    j_terms,
    max_weighted_sum,
    outer_bound_region,
    redundancy_gap,
    weighted_max_bounds,
)
from d2dcoop.schemes import SchemePolicy, case_policy

CFG = NetworkConfig(d10=20, d20=30, d12=12, gamma=2.4, p1=4.0, p2=4.0)


def random_policy(cfg, rng):
    """A feasible full-cooperation policy with both budgets tight."""
    a1, a2 = rng.uniform(0.05, 0.45, 2)
    ps = PhaseSchedule(a1, a2)
    f = rng.uniform(0.0, 1.0, 4)
    pa = PowerAllocation(
        rho11=f[0] * cfg.p1 / a1,
        rho22=f[1] * cfg.p2 / a2,
        rho10=(1 - f[0]) * f[2] * cfg.p1 / ps.alpha3,
        rho20=(1 - f[1]) * f[3] * cfg.p2 / ps.alpha3,
        rho13=(1 - f[0]) * (1 - f[2]) * cfg.p1 / ps.alpha3,
        rho23=(1 - f[1]) * (1 - f[3]) * cfg.p2 / ps.alpha3,
    )
    return ps, pa


def test_phase_schedule_validation():
    ps = PhaseSchedule(0.25, 0.25)
    assert ps.alpha3 == pytest.approx(0.5)
    with pytest.raises(ValueError):
        PhaseSchedule(0.6, 0.5)
    with pytest.raises(ValueError):
        PhaseSchedule(-0.1, 0.2)


def test_power_allocation_budget():
    ps = PhaseSchedule(0.25, 0.25)
    pa = PowerAllocation(rho11=4.0, rho22=4.0, rho10=3.0, rho20=3.0,
                         rho13=3.0, rho23=3.0)
    assert pa.spend(ps) == (pytest.approx(4.0), pytest.approx(4.0))
    pa.check_budget(ps, 4.0, 4.0)
    with pytest.raises(ValueError):
        pa.check_budget(ps, 4.0, 3.9)
    with pytest.raises(ValueError):
        PowerAllocation(-1.0, 0, 0, 0, 0, 0)


def test_j_terms_hand_values():
    # Unit gains, aligned phases, simple powers: every log argument is exact.
    ls = LinkState(g10=1.0, g20=1.0, g12=1.0, g21=1.0,
                   theta10=0, theta20=0, theta12=0, theta21=0)
    ps = PhaseSchedule(0.25, 0.25)
    pa = PowerAllocation(rho11=3.0, rho22=3.0, rho10=1.0, rho20=1.0,
                         rho13=1.0, rho23=1.0)
    j = j_terms(ls, ps, pa)
    assert j.j1 == pytest.approx(0.25 * 2.0)          # log2(1+3) = 2
    assert j.j2 == pytest.approx(0.25 * 2.0)
    assert j.j3 == pytest.approx(0.5 * 1.0)           # log2(1+1) = 1
    assert j.j4 == pytest.approx(0.5 * 1.0)
    assert j.j5 == pytest.approx(0.5 * np.log2(3.0))
    # beamforming term: (1*1 + 1*1)^2 = 4
    assert j.zeta == pytest.approx(np.log2(1 + 1 + 1 + 4))
    assert j.j6 == pytest.approx(0.25 * 2.0 + 0.5 * j.zeta)
    assert j.j8 == pytest.approx(0.5 * 2.0 + 0.5 * j.zeta)


def test_region_bounds_and_contains():
    reg = RateRegion([Constraint(1, 0, 2.0, "a"), Constraint(0, 1, 1.0, "b"),
                      Constraint(1, 1, 2.5, "s")])
    assert reg.bound(1, 0) == 2.0
    assert reg.contains(1.5, 1.0)
    assert not reg.contains(2.0, 1.0)
    assert reg.contains(2.0, 0.5)


def test_outer_bound_dominates_and_j8_equality():
    rng = np.random.default_rng(7)
    for _ in range(200):
        ls = sample_block(CFG, rng)
        ps, pa = random_policy(CFG, rng)
        inner = achievable_region(j_terms(ls, ps, pa))
        outer = outer_bound_region(ls, ps, pa)
        for (a, b) in ((1, 0), (0, 1), (1, 1)):
            assert outer.bound(a, b) >= inner.bound(a, b) - 1e-12
        j = j_terms(ls, ps, pa)
        # The J8 constraint is untouched by the outer bound.
        o_s = min(c.c for c in outer.constraints if (c.a, c.b) == (1, 1) and c.tag == "J8")
        assert o_s == pytest.approx(float(j.j8), abs=0.0)


def test_redundancy_gap_case_matched():
    rng = np.random.default_rng(11)
    for _ in range(300):
        ls = sample_block(CFG, rng)
        ps, pa = random_policy(CFG, rng)
        pol = case_policy(classify_case(ls), SchemePolicy(ps, pa), CFG)
        assert float(redundancy_gap(j_terms(ls, pol.ps, pol.pa))) >= -1e-12


def test_weighted_max_bounds_vs_bruteforce():
    rng = np.random.default_rng(5)
    for _ in range(300):
        c1, c2 = rng.uniform(0.1, 4.0, 2)
        s = rng.uniform(0.1, c1 + c2)
        w1, w2 = rng.uniform(0.0, 2.0, 2)
        if w1 == 0 and w2 == 0:
            continue
        r1, r2, v = weighted_max_bounds(c1, c2, s, w1, w2)
        assert r1 <= c1 + 1e-12 and r2 <= c2 + 1e-12 and r1 + r2 <= s + 1e-12
        g = np.linspace(0, 1, 201)
        x, y = np.meshgrid(g * c1, g * c2)
        feas = x + y <= s
        brute = np.max(np.where(feas, w1 * x + w2 * y, -np.inf))
        assert v >= brute - 1e-9


def test_max_weighted_sum_errors():
    reg = RateRegion([Constraint(1, 0, 2.0, "a"), Constraint(0, 1, 1.0, "b")])
    r1, r2, v = max_weighted_sum(reg, 1.0, 1.0)
    assert (r1, r2, v) == (pytest.approx(2.0), pytest.approx(1.0), pytest.approx(3.0))
    with pytest.raises(ValueError):
        max_weighted_sum(reg, 0.0, 0.0)
    with pytest.raises(ValueError):
        max_weighted_sum(RateRegion([Constraint(1, 0, 2.0, "a")]), 1.0, 1.0)


def test_elementwise_j_terms_match_scalar():
    rng = np.random.default_rng(13)
    ls = sample_blocks(CFG, 50, rng)
    ps, pa = random_policy(CFG, rng)
    j = j_terms(ls, ps, pa)
    names = ("g10", "g20", "g12", "g21", "theta10", "theta20", "theta12", "theta21")
    for i in range(0, 50, 7):
        one = LinkState(*(getattr(ls, f)[i] for f in names))
        ji = j_terms(one, ps, pa)
        for field in ("j1", "j3", "j5", "j6", "j7", "j8", "zeta"):
            assert getattr(j, field)[i] == pytest.approx(float(getattr(ji, field)))
