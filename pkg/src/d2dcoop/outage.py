"""Per-block outage indicators and averaged outage probabilities.

Outage is evaluated per fading block as deterministic indicators, composed
bottom-up: UE decoding failures, cooperative-part failure at the BS,
private-part MAC failures at the BS, then the per-case overall common and
individual outages.  Averaging is a stratified joint Monte-Carlo: each block
is classified into its transmission case, evaluated under that case's policy
and targets, and the indicator means reproduce the product-of-conditionals
compositions by the law of total probability.

Boundary convention everywhere: a block is in outage iff the supported rate
is strictly below the target (equality counts as success).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .channel import (
    LinkState,
    NetworkConfig,
    TransmissionCase,
    classify_case,
    classify_cases,
)
from .montecarlo import Estimate, EstimatorConfig, estimate_fields
from .rate_region import JTerms, PhaseSchedule, PowerAllocation, _log2_1p, j_terms
from .schemes import Fd2Params, SchemePolicy, fd2_bounds, mac_policy

__all__ = [
    "RateTargets",
    "OutageTargets",
    "EventFlags",
    "OutageBreakdown",
    "OUTAGE_FIELDS",
    "ue_outage_indicators",
    "coop_common_outage_indicator",
    "private_outage_indicators",
    "bs_outage_indicators",
    "block_outage",
    "fd3_block_outage",
    "fd2_block_outage",
    "average_outage",
    "outage_rate_region",
    "CaseParams",
    "TdPolicyRule",
    "Fd2CaseParams",
    "Fd2PolicyRule",
    "SicRule",
    "RpRule",
    "DEFAULT_ALPHAS",
    "batch_indicators",
]

OUTAGE_FIELDS = ("pm1", "pm2", "pcc", "pcp", "p1p", "p2p",
                 "pbc", "pb1", "pb2", "pc", "p1", "p2")


@dataclass(frozen=True)
class RateTargets:
    """Target rates with their cooperative/private split per UE."""

    r1: float
    r2: float
    r10: float
    r12: float
    r20: float
    r21: float

    def __post_init__(self):
        vals = (self.r1, self.r2, self.r10, self.r12, self.r20, self.r21)
        if min(vals) < 0:
            raise ValueError("target rates must be >= 0")
        if abs(self.r10 + self.r12 - self.r1) > 1e-9 * max(self.r1, 1.0):
            raise ValueError("r10 + r12 must equal r1")
        if abs(self.r20 + self.r21 - self.r2) > 1e-9 * max(self.r2, 1.0):
            raise ValueError("r20 + r21 must equal r2")

    @classmethod
    def split(cls, r1: float, r2: float, s1: float, s2: float,
              case: TransmissionCase = TransmissionCase.CASE2_COOP_BOTH) -> "RateTargets":
        """Split totals by cooperative fractions, zeroing splits the case does not use."""
        if case in (TransmissionCase.CASE1_DIRECT_BOTH, TransmissionCase.CASE4_UE2_COOP):
            s1 = 0.0
        if case in (TransmissionCase.CASE1_DIRECT_BOTH, TransmissionCase.CASE3_UE1_COOP):
            s2 = 0.0
        return cls(r1=r1, r2=r2, r10=(1 - s1) * r1, r12=s1 * r1,
                   r20=(1 - s2) * r2, r21=s2 * r2)


@dataclass(frozen=True)
class OutageTargets:
    """Per-UE target outage probabilities for outage-rate-region tracing."""

    beta1: float
    beta2: float

    def __post_init__(self):
        if not (0.0 <= self.beta1 <= 1.0 and 0.0 <= self.beta2 <= 1.0):
            raise ValueError("outage targets must be in [0, 1]")


@dataclass
class EventFlags:
    """Conditioning events: xi1 (case 2, no UE outage), xi2 (cooperative
    constraints hold), xi3 (case 3, no outage at UE2)."""

    xi1: bool
    xi2: bool
    xi3: bool


@dataclass
class OutageBreakdown:
    """All intermediate and overall outage values.

    Holds booleans for a single block, boolean arrays for a batch, or
    Estimate objects after averaging.  Intermediate fields are gated: e.g.
    pcc is only raised on blocks where the cooperative stage is reached.
    """

    pm1: Any
    pm2: Any
    pcc: Any
    pcp: Any
    p1p: Any
    p2p: Any
    pbc: Any
    pb1: Any
    pb2: Any
    pc: Any
    p1: Any
    p2: Any


def _false_like(g):
    return np.zeros(np.shape(g), dtype=bool) if np.ndim(g) else False


def ue_outage_indicators(ls, ps: PhaseSchedule, pa: PowerAllocation,
                         rt: RateTargets):
    """(m1, m2): UE1 fails to decode UE2's cooperative part, and vice versa."""
    m2 = ps.alpha1 * _log2_1p(np.square(ls.g12) * pa.rho11) < rt.r12
    m1 = ps.alpha2 * _log2_1p(np.square(ls.g21) * pa.rho22) < rt.r21
    return m1, m2


def coop_common_outage_indicator(j: JTerms, rt: RateTargets, fd3: bool = False):
    """Case-2 cooperative-part failure at the BS.

    The TD joint decoder imposes three constraints; the 3-band FD backward
    decoder keeps only the sum constraint.
    """
    s = rt.r10 + rt.r20
    ok = rt.r12 + rt.r21 <= j.j8 - s
    if not fd3:
        ok = ok & (rt.r12 <= j.j6 - s) & (rt.r21 <= j.j7 - s)
    return ~np.asarray(ok) if np.ndim(ok) else not ok


def _mac_events(ra, rb, j: JTerms, mode: str):
    """Three-event decomposition of a two-user MAC outage at rates (ra, rb).

    mode="corrected": the standard decomposition with treat-as-noise bounds
    J5-J3 / J5-J4 on the cross rates (only_a, only_b, both partition the
    complement of the pentagon exactly).
    mode="literal": the events exactly as printed in the source analysis,
    which substitute the UE-side bounds J1/J2; kept for comparison only.
    """
    if mode == "corrected":
        only_a = (ra > j.j3) & (rb <= j.j5 - j.j3)
        only_b = (rb > j.j4) & (ra <= j.j5 - j.j4)
        both = (ra > j.j5 - j.j4) & (rb > j.j5 - j.j3) & (ra + rb > j.j5)
    elif mode == "literal":
        only_a = (ra > j.j3) & (rb <= j.j5 - j.j1)
        only_b = (rb > j.j4) & (ra <= j.j5 - j.j2)
        both = (ra <= j.j5 - j.j2) & (rb > j.j5 - j.j1) & (ra + rb > j.j5)
    else:
        raise ValueError(f"unknown private-event mode {mode!r}")
    return only_a, only_b, both


def private_outage_indicators(j: JTerms, rt: RateTargets, mode: str = "corrected"):
    """(common, ind1, ind2) private-part failures given decodable cooperative parts."""
    e1, e2, e3 = _mac_events(rt.r10, rt.r20, j, mode)
    return e1 | e2 | e3, e1 | e3, e2 | e3


def bs_outage_indicators(j: JTerms, rt: RateTargets, case: TransmissionCase,
                         mode: str = "corrected", fd3: bool = False):
    """(bc, b1, b2) BS-level outages for the given case (UE outages not included).

    A cooperative-part failure dooms both private parts (superposition), so
    it forces all three indicators.
    """
    if case == TransmissionCase.CASE1_DIRECT_BOTH:
        e1, e2, e3 = _mac_events(rt.r1, rt.r2, j, mode)
        return e1 | e2 | e3, e1 | e3, e2 | e3
    if case == TransmissionCase.CASE2_COOP_BOTH:
        cr = coop_common_outage_indicator(j, rt, fd3=fd3)
        cp, i1, i2 = private_outage_indicators(j, rt, mode)
    elif case == TransmissionCase.CASE3_UE1_COOP:
        cr = rt.r12 > j.j6 - (rt.r10 + rt.r2)
        pr = RateTargets(rt.r1, rt.r2, rt.r10, rt.r12, rt.r2, 0.0)
        cp, i1, i2 = private_outage_indicators(j, pr, mode)
    else:  # CASE4_UE2_COOP
        cr = rt.r21 > j.j7 - (rt.r20 + rt.r1)
        pr = RateTargets(rt.r1, rt.r2, rt.r1, 0.0, rt.r20, rt.r21)
        cp, i1, i2 = private_outage_indicators(j, pr, mode)
    return cr | cp, cr | i1, cr | i2


def case_indicators(ls, case: TransmissionCase, policy: SchemePolicy,
                    rt: RateTargets, mode: str = "corrected",
                    fd3: bool = False) -> dict[str, np.ndarray]:
    """All outage indicator fields for blocks known to be in `case`.

    ls fields may be scalars or arrays.  Gated fields follow the nested
    conditional structure: pcc/pcp/... are only raised where their gate
    (no UE outage, cooperative parts decodable) is open, so averaged values
    are joint probabilities of (gate and event).
    """
    j = j_terms(ls, policy.ps, policy.pa)
    zero = _false_like(ls.g10)

    if case == TransmissionCase.CASE1_DIRECT_BOTH:
        bc, b1, b2 = bs_outage_indicators(j, rt, case, mode)
        cp, i1p, i2p = bc, b1, b2
        return dict(pm1=zero, pm2=zero, pcc=zero, pcp=cp, p1p=i1p, p2p=i2p,
                    pbc=bc, pb1=b1, pb2=b2, pc=bc, p1=b1, p2=b2)

    m1, m2 = ue_outage_indicators(ls, policy.ps, policy.pa, rt)
    if case == TransmissionCase.CASE3_UE1_COOP:
        m1 = zero
    elif case == TransmissionCase.CASE4_UE2_COOP:
        m2 = zero
    no_ue = ~(m1 | m2)

    if case == TransmissionCase.CASE2_COOP_BOTH:
        cr = coop_common_outage_indicator(j, rt, fd3=fd3)
        cp, i1p, i2p = private_outage_indicators(j, rt, mode)
    elif case == TransmissionCase.CASE3_UE1_COOP:
        cr = rt.r12 > j.j6 - (rt.r10 + rt.r2)
        pr = RateTargets(rt.r1, rt.r2, rt.r10, rt.r12, rt.r2, 0.0)
        cp, i1p, i2p = private_outage_indicators(j, pr, mode)
    else:
        cr = rt.r21 > j.j7 - (rt.r20 + rt.r1)
        pr = RateTargets(rt.r1, rt.r2, rt.r1, 0.0, rt.r20, rt.r21)
        cp, i1p, i2p = private_outage_indicators(j, pr, mode)

    cr = cr & no_ue                      # gate: cooperative stage reached
    gate_priv = no_ue & ~cr              # gate: private stage reached
    cp, i1p, i2p = cp & gate_priv, i1p & gate_priv, i2p & gate_priv
    bc, b1, b2 = cr | cp, cr | i1p, cr | i2p
    return dict(pm1=m1, pm2=m2, pcc=cr, pcp=cp, p1p=i1p, p2p=i2p,
                pbc=bc, pb1=b1, pb2=b2,
                pc=m1 | m2 | bc, p1=m1 | m2 | b1, p2=m1 | m2 | b2)


def block_outage(ls: LinkState, policy: SchemePolicy, rt: RateTargets,
                 mode: str = "corrected") -> OutageBreakdown:
    """Indicator-valued outage breakdown for one block under the TD scheme."""
    case = classify_case(ls)
    return OutageBreakdown(**{k: bool(v) for k, v in
                              case_indicators(ls, case, policy, rt, mode).items()})


def fd3_block_outage(ls: LinkState, policy: SchemePolicy, rt: RateTargets,
                     mode: str = "corrected") -> OutageBreakdown:
    """Same as block_outage, with the relaxed Case-2 cooperative event of 3-band FD."""
    case = classify_case(ls)
    return OutageBreakdown(**{k: bool(v) for k, v in
                              case_indicators(ls, case, policy, rt, mode, fd3=True).items()})


def event_flags(ls: LinkState, policy: SchemePolicy, rt: RateTargets) -> EventFlags:
    """Conditioning-event indicators for one block."""
    case = classify_case(ls)
    m1, m2 = ue_outage_indicators(ls, policy.ps, policy.pa, rt)
    j = j_terms(ls, policy.ps, policy.pa)
    xi1 = case == TransmissionCase.CASE2_COOP_BOTH and not (m1 or m2)
    xi2 = not coop_common_outage_indicator(j, rt)
    xi3 = case == TransmissionCase.CASE3_UE1_COOP and not m2
    return EventFlags(bool(xi1), bool(xi2), bool(xi3))


# --------------------------------------------------------------------------
# 2-band FD outage
# --------------------------------------------------------------------------

def fd2_case_indicators(ls, case: TransmissionCase, fp: Fd2Params,
                        rt: RateTargets) -> dict[str, np.ndarray]:
    """2-band FD outage indicators for blocks in `case`.

    There are no joint constraints, so pc = p1 | p2.  Each UE relays the
    other's information in its own band: a decoding failure at the relay
    dooms only the relayed UE's information.  Relay constraints A1/A2 are
    active only for the UE(s) actually relayed in this case.
    """
    a1, a2, a3, a4 = fd2_bounds(ls, fp)
    zero = _false_like(ls.g10)
    ue1_relayed = case in (TransmissionCase.CASE2_COOP_BOTH, TransmissionCase.CASE3_UE1_COOP)
    ue2_relayed = case in (TransmissionCase.CASE2_COOP_BOTH, TransmissionCase.CASE4_UE2_COOP)
    # m2: UE2 (relay of UE1's information) fails to decode it, and the mirror.
    m2 = (rt.r1 > a1) if ue1_relayed else zero
    m1 = (rt.r2 > a2) if ue2_relayed else zero
    b1 = rt.r1 > a3
    b2 = rt.r2 > a4
    p1 = m2 | b1
    p2 = m1 | b2
    return dict(pm1=m1, pm2=m2, pcc=zero, pcp=zero, p1p=zero, p2p=zero,
                pbc=b1 | b2, pb1=b1, pb2=b2, pc=p1 | p2, p1=p1, p2=p2)


def fd2_block_outage(ls: LinkState, fp: Fd2Params, rt: RateTargets) -> OutageBreakdown:
    """Indicator-valued 2-band FD outage for one block (fp already case-specialized)."""
    case = classify_case(ls)
    return OutageBreakdown(**{k: bool(v) for k, v in
                              fd2_case_indicators(ls, case, fp, rt).items()})


# --------------------------------------------------------------------------
# Policy rules: per-case parameters for the averaging/search drivers
# --------------------------------------------------------------------------

DEFAULT_ALPHAS: dict[TransmissionCase, PhaseSchedule] = {
    TransmissionCase.CASE1_DIRECT_BOTH: PhaseSchedule(0.0, 0.0),
    TransmissionCase.CASE2_COOP_BOTH: PhaseSchedule(0.25, 0.25),
    TransmissionCase.CASE3_UE1_COOP: PhaseSchedule(0.4, 0.0),
    TransmissionCase.CASE4_UE2_COOP: PhaseSchedule(0.0, 0.4),
}


@dataclass(frozen=True)
class CaseParams:
    """Free TD parameters for one case, all as fractions in [0, 1].

    f_i: share of UE i's budget spent on its exchange-phase signal;
    t_i: share of the remaining (third-phase) budget on the private signal;
    s_i: cooperative share of UE i's target rate.
    """

    f1: float = 0.3
    t1: float = 0.5
    f2: float = 0.3
    t2: float = 0.5
    s1: float = 0.5
    s2: float = 0.5


@dataclass(frozen=True)
class TdPolicyRule:
    """Maps a transmission case to its TD policy and split targets."""

    params: Mapping[TransmissionCase, CaseParams] = field(
        default_factory=lambda: {c: CaseParams() for c in TransmissionCase})
    alphas: Mapping[TransmissionCase, PhaseSchedule] = field(
        default_factory=lambda: dict(DEFAULT_ALPHAS))
    fd3: bool = False
    private_mode: str = "corrected"

    def policy(self, case: TransmissionCase, cfg: NetworkConfig) -> SchemePolicy:
        if case == TransmissionCase.CASE1_DIRECT_BOTH:
            return mac_policy(cfg)
        ps = self.alphas[case]
        p = self.params[case]
        f1 = p.f1 if case != TransmissionCase.CASE4_UE2_COOP else 0.0
        f2 = p.f2 if case != TransmissionCase.CASE3_UE1_COOP else 0.0
        a3 = ps.alpha3
        rho11 = f1 * cfg.p1 / ps.alpha1 if ps.alpha1 > 0 else 0.0
        rho22 = f2 * cfg.p2 / ps.alpha2 if ps.alpha2 > 0 else 0.0
        rem1 = (1.0 - f1) * cfg.p1 / a3
        rem2 = (1.0 - f2) * cfg.p2 / a3
        pa = PowerAllocation(
            rho11=rho11, rho22=rho22,
            rho10=p.t1 * rem1, rho13=(1.0 - p.t1) * rem1,
            rho20=p.t2 * rem2, rho23=(1.0 - p.t2) * rem2,
        )
        return SchemePolicy(ps=ps, pa=pa)

    def targets(self, case: TransmissionCase, r1: float, r2: float) -> RateTargets:
        p = self.params[case]
        return RateTargets.split(r1, r2, p.s1, p.s2, case)

    def indicators(self, ls, case: TransmissionCase, cfg: NetworkConfig,
                   r1: float, r2: float) -> dict[str, np.ndarray]:
        return case_indicators(ls, case, self.policy(case, cfg),
                               self.targets(case, r1, r2),
                               mode=self.private_mode, fd3=self.fd3)


@dataclass(frozen=True)
class Fd2CaseParams:
    """Free 2-band parameters for one case.

    e_i: share of UE i's budget spent in its own band (rest helps relay the
    other UE); u_i: within the own band, share on the exchange signal.
    """

    e1: float = 0.7
    u1: float = 0.5
    e2: float = 0.7
    u2: float = 0.5


@dataclass(frozen=True)
class Fd2PolicyRule:
    """Maps a transmission case to 2-band FD parameters (band split beta fixed)."""

    params: Mapping[TransmissionCase, Fd2CaseParams] = field(
        default_factory=lambda: {c: Fd2CaseParams() for c in TransmissionCase})
    beta: float = 0.5

    def fd2_params(self, case: TransmissionCase, cfg: NetworkConfig) -> Fd2Params:
        p = self.params[case]
        e1 = p.e1 if case in (TransmissionCase.CASE2_COOP_BOTH,
                              TransmissionCase.CASE4_UE2_COOP) else 1.0
        e2 = p.e2 if case in (TransmissionCase.CASE2_COOP_BOTH,
                              TransmissionCase.CASE3_UE1_COOP) else 1.0
        b, bb = self.beta, 1.0 - self.beta
        return Fd2Params(
            beta=b,
            rho12=p.u1 * e1 * cfg.p1 / b,
            rho1_1=(1.0 - p.u1) * e1 * cfg.p1 / b,
            rho2_1=(1.0 - e1) * cfg.p1 / bb,
            rho21=p.u2 * e2 * cfg.p2 / bb,
            rho2_2=(1.0 - p.u2) * e2 * cfg.p2 / bb,
            rho1_2=(1.0 - e2) * cfg.p2 / b,
        )

    def indicators(self, ls, case: TransmissionCase, cfg: NetworkConfig,
                   r1: float, r2: float) -> dict[str, np.ndarray]:
        rt = RateTargets.split(r1, r2, 0.0, 0.0)
        return fd2_case_indicators(ls, case, self.fd2_params(case, cfg), rt)


@dataclass(frozen=True)
class SicRule:
    """Concurrent transmission with SIC: case-independent MAC outage, no splitting."""

    private_mode: str = "corrected"

    def indicators(self, ls, case, cfg: NetworkConfig, r1: float, r2: float):
        pol = mac_policy(cfg)
        rt = RateTargets.split(r1, r2, 0.0, 0.0)
        return case_indicators(ls, TransmissionCase.CASE1_DIRECT_BOTH, pol, rt,
                               mode=self.private_mode)


@dataclass(frozen=True)
class RpRule:
    """Orthogonal resource partitioning with per-slot power boosting."""

    split: float = 0.5
    boost: bool = True

    def indicators(self, ls, case, cfg: NetworkConfig, r1: float, r2: float):
        b1 = 1.0 / self.split if self.boost else 1.0
        b2 = 1.0 / (1.0 - self.split) if self.boost else 1.0
        o1 = r1 > self.split * _log2_1p(np.square(ls.g10) * cfg.p1 * b1)
        o2 = r2 > (1.0 - self.split) * _log2_1p(np.square(ls.g20) * cfg.p2 * b2)
        zero = _false_like(ls.g10)
        return dict(pm1=zero, pm2=zero, pcc=zero, pcp=zero, p1p=zero, p2p=zero,
                    pbc=o1 | o2, pb1=o1, pb2=o2, pc=o1 | o2, p1=o1, p2=o2)


def batch_indicators(ls: LinkState, cfg: NetworkConfig, rule,
                     r1: float, r2: float) -> dict[str, np.ndarray]:
    """Evaluate a rule's indicators over a batch, stratified by transmission case."""
    cases = classify_cases(ls)
    n = np.shape(np.asarray(ls.g10))[0]
    out = {k: np.zeros(n, dtype=bool) for k in OUTAGE_FIELDS}
    names = ("g10", "g20", "g12", "g21", "theta10", "theta20", "theta12", "theta21")
    for case in TransmissionCase:
        m = cases == case
        if not m.any():
            continue
        sub = LinkState(*(np.asarray(getattr(ls, f))[m] for f in names))
        res = rule.indicators(sub, case, cfg, r1, r2)
        for k in OUTAGE_FIELDS:
            out[k][m] = res[k]
    return out


def average_outage(cfg: NetworkConfig, rule, r1: float, r2: float,
                   est: EstimatorConfig, threads: int = 1) -> OutageBreakdown:
    """Monte-Carlo averaged outage breakdown for one rule at targets (r1, r2)."""
    fields = estimate_fields(
        est, cfg, lambda ls: batch_indicators(ls, cfg, rule, r1, r2),
        threads=threads)
    return OutageBreakdown(**{k: fields[k] for k in OUTAGE_FIELDS})


def outage_rate_region(cfg: NetworkConfig, scheme: str, ot: OutageTargets,
                       est: EstimatorConfig, rays: int = 9,
                       kind: str = "individual", search_spec=None,
                       rate_cap: float = 8.0, threads: int = 1,
                       bisect_iters: int = 8) -> list[dict]:
    """Trace the outage rate region boundary along rays from the origin.

    Along each ray (cos phi, sin phi) the largest scale t is found by
    bisection such that the (re-optimized) outage probabilities meet the
    targets: p1 <= beta1 and p2 <= beta2 for kind="individual", or
    pc <= min(beta1, beta2) for kind="common".  Monotonicity of outage in t
    is verified at the returned point.
    """
    from . import search  # local import: search builds on this module

    if kind not in ("individual", "common"):
        raise ValueError("kind must be 'individual' or 'common'")
    angles = np.linspace(0.0, np.pi / 2.0, rays)
    betas = (ot.beta1, ot.beta2)
    bmin = min(betas)
    points = []
    for i, phi in enumerate(angles):
        u = (np.cos(phi), np.sin(phi))
        if bmin <= 0.0:
            points.append(dict(phi=float(phi), r1=0.0, r2=0.0, feasible=True))
            continue
        if bmin >= 1.0:
            points.append(dict(phi=float(phi), r1=rate_cap * u[0],
                               r2=rate_cap * u[1], feasible=True))
            continue
        if bmin * est.samples < 100:
            raise ValueError("samples too small for target outage resolution")

        def feasible(t: float) -> bool:
            rr1, rr2 = t * u[0], t * u[1]
            _, bd = search.optimize_outage(
                cfg, scheme, rr1, rr2, spec=search_spec, est=est,
                objective=kind, betas=betas, threads=threads)
            if kind == "common":
                return bd.pc.mean <= bmin
            if bd.p1.mean <= betas[0] and bd.p2.mean <= betas[1]:
                return True
            # The common-objective search may find a different local optimum;
            # pc <= min(beta) certifies individual feasibility too, which
            # keeps the common region nested inside the individual region.
            _, bdc = search.optimize_outage(
                cfg, scheme, rr1, rr2, spec=search_spec, est=est,
                objective="common", betas=betas, threads=threads)
            return bdc.pc.mean <= bmin

        lo, hi = 0.0, rate_cap
        if feasible(hi):
            lo = hi
        else:
            for _ in range(bisect_iters):
                mid = 0.5 * (lo + hi)
                if feasible(mid):
                    lo = mid
                else:
                    hi = mid
        points.append(dict(phi=float(phi), r1=lo * u[0], r2=lo * u[1],
                           feasible=lo > 0.0))
    return points
