"""Comparison schemes and case-specialized policies.

Besides the 3-phase TD scheme itself (rate_region module), the library
evaluates: resource partitioning (orthogonal slots, LTE-style), concurrent
transmission with SIC (plain two-user MAC), the 2-band FD relaying scheme,
and the 3-band FD scheme whose region coincides with TD.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .channel import LinkState, NetworkConfig, TransmissionCase
from .rate_region import (
    Constraint,
    PhaseSchedule,
    PowerAllocation,
    RateRegion,
    _log2_1p,
    achievable_region,
    j_terms,
)

__all__ = [
    "SchemeKind",
    "SchemePolicy",
    "Fd2Params",
    "rp_region",
    "mac_sic_region",
    "fd2_region",
    "fd3_region",
    "case_policy",
    "mac_policy",
]


class SchemeKind(str, Enum):
    TD_COOPERATIVE = "td"
    FD3_BAND = "fd3"
    FD2_BAND = "fd2"
    CONCURRENT_SIC = "sic"
    RESOURCE_PARTITIONING = "rp"
    OUTER_BOUND = "outer"


@dataclass(frozen=True)
class SchemePolicy:
    """Phase schedule plus power allocation for the TD scheme in one case."""

    ps: PhaseSchedule
    pa: PowerAllocation


@dataclass(frozen=True)
class Fd2Params:
    """2-band FD parameters: band split and the six per-band powers.

    Budgets: beta*(rho12 + rho1_1) + (1-beta)*rho2_1 <= P1 and
    (1-beta)*(rho21 + rho2_2) + beta*rho1_2 <= P2.
    """

    beta: float
    rho12: float
    rho21: float
    rho1_1: float
    rho1_2: float
    rho2_1: float
    rho2_2: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")
        if min(self.rho12, self.rho21, self.rho1_1, self.rho1_2,
               self.rho2_1, self.rho2_2) < 0:
            raise ValueError("powers must be >= 0")

    def spend(self) -> tuple[float, float]:
        bb = 1.0 - self.beta
        e1 = self.beta * (self.rho12 + self.rho1_1) + bb * self.rho2_1
        e2 = bb * (self.rho21 + self.rho2_2) + self.beta * self.rho1_2
        return e1, e2

    def check_budget(self, p1: float, p2: float, rtol: float = 1e-9) -> None:
        e1, e2 = self.spend()
        scale = max(p1, p2, 1.0)
        if e1 > p1 + rtol * scale or e2 > p2 + rtol * scale:
            raise ValueError(f"2-band power constraint violated: ({e1}, {e2}) > ({p1}, {p2})")


def rp_region(ls: LinkState, cfg: NetworkConfig, split: float,
              boost: bool = True) -> RateRegion:
    """Orthogonal resource partitioning: UE1 gets a `split` fraction of the block.

    With boost=True each UE concentrates its average power in its own slot
    (the fair equal-average-power convention); boost=False transmits at the
    budget level.
    """
    if not 0.0 < split < 1.0:
        raise ValueError("split must be in (0, 1)")
    b1 = 1.0 / split if boost else 1.0
    b2 = 1.0 / (1.0 - split) if boost else 1.0
    c1 = split * _log2_1p(np.square(ls.g10) * cfg.p1 * b1)
    c2 = (1.0 - split) * _log2_1p(np.square(ls.g20) * cfg.p2 * b2)
    return RateRegion([
        Constraint(1, 0, float(c1), "RP slot 1"),
        Constraint(0, 1, float(c2), "RP slot 2"),
    ])


def mac_sic_region(ls: LinkState, cfg: NetworkConfig) -> RateRegion:
    """Concurrent transmission with SIC: the standard two-user MAC pentagon."""
    a = np.square(ls.g10) * cfg.p1
    b = np.square(ls.g20) * cfg.p2
    return RateRegion([
        Constraint(1, 0, float(_log2_1p(a)), "MAC R1"),
        Constraint(0, 1, float(_log2_1p(b)), "MAC R2"),
        Constraint(1, 1, float(_log2_1p(a + b)), "MAC sum"),
    ])


def fd2_bounds(ls: LinkState, fp: Fd2Params):
    """The four 2-band rate terms A1..A4 (elementwise over batches)."""
    bb = 1.0 - fp.beta
    a1 = 0.5 * fp.beta * _log2_1p(np.square(ls.g12) * fp.rho12)
    a2 = 0.5 * bb * _log2_1p(np.square(ls.g21) * fp.rho21)
    beam1 = np.square(ls.g10 * np.sqrt(fp.rho1_1) + ls.g20 * np.sqrt(fp.rho1_2))
    beam2 = np.square(ls.g10 * np.sqrt(fp.rho2_1) + ls.g20 * np.sqrt(fp.rho2_2))
    a3 = 0.5 * fp.beta * _log2_1p(np.square(ls.g10) * fp.rho12 + beam1)
    a4 = 0.5 * bb * _log2_1p(np.square(ls.g20) * fp.rho21 + beam2)
    return a1, a2, a3, a4


def fd2_region(ls: LinkState, fp: Fd2Params,
               budgets: tuple[float, float] | None = None) -> RateRegion:
    """2-band FD region: R1 <= min(A1, A3), R2 <= min(A2, A4)."""
    if budgets is not None:
        fp.check_budget(*budgets)
    a1, a2, a3, a4 = fd2_bounds(ls, fp)
    return RateRegion([
        Constraint(1, 0, float(np.minimum(a1, a3)), "min(A1,A3)"),
        Constraint(0, 1, float(np.minimum(a2, a4)), "min(A2,A4)"),
    ])


def fd3_region(ls: LinkState, ps: PhaseSchedule, pa: PowerAllocation,
               budgets: tuple[float, float] | None = None) -> RateRegion:
    """3-band FD achieves exactly the TD region; only its outage events differ."""
    return achievable_region(j_terms(ls, ps, pa, budgets))


def mac_policy(cfg: NetworkConfig) -> SchemePolicy:
    """The Case-1 degenerate policy: everything direct during a single phase."""
    return SchemePolicy(
        ps=PhaseSchedule(0.0, 0.0),
        pa=PowerAllocation(0.0, 0.0, cfg.p1, cfg.p2, 0.0, 0.0),
    )


def _rescale_ue(ps: PhaseSchedule, phase_alpha: float, exch: float,
                priv: float, coop: float, budget: float) -> tuple[float, float, float]:
    """Scale one UE's (exchange, private, cooperative) powers to spend `budget` exactly."""
    spend = phase_alpha * exch + ps.alpha3 * (priv + coop)
    if budget == 0.0:
        return 0.0, 0.0, 0.0
    if spend <= 0.0:
        # Nothing left active: put the whole budget on the private signal.
        return 0.0, budget / ps.alpha3 if ps.alpha3 > 0 else 0.0, 0.0
    k = budget / spend
    return exch * k, priv * k, coop * k


def case_policy(case: TransmissionCase, base: SchemePolicy,
                cfg: NetworkConfig) -> SchemePolicy:
    """Specialize a base (full-cooperation) policy to a transmission case.

    Zeroes the signals the case does not use and rescales each UE's remaining
    powers so the average-power constraints hold with equality.
    """
    if case == TransmissionCase.CASE2_COOP_BOTH:
        return base
    if case == TransmissionCase.CASE1_DIRECT_BOTH:
        return mac_policy(cfg)

    pa = base.pa
    if case == TransmissionCase.CASE3_UE1_COOP:
        ps = PhaseSchedule(base.ps.alpha1, 0.0)
        r22 = 0.0
        r11 = pa.rho11
    else:  # CASE4_UE2_COOP
        ps = PhaseSchedule(0.0, base.ps.alpha2)
        r11 = 0.0
        r22 = pa.rho22
    r11, r10, r13 = _rescale_ue(ps, ps.alpha1, r11, pa.rho10, pa.rho13, cfg.p1)
    r22, r20, r23 = _rescale_ue(ps, ps.alpha2, r22, pa.rho20, pa.rho23, cfg.p2)
    return SchemePolicy(ps=ps, pa=PowerAllocation(r11, r22, r10, r20, r13, r23))
