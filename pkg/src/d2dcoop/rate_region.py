"""Per-realization rate bounds and 2-D rate-region polytopes.

The eight J-terms are the decoding-rate bounds of the 3-phase scheme: J1/J2
from decoding at the UEs, J3..J8 from joint ML decoding at the BS, with the
beamforming log-term zeta capturing coherent third-phase combining.  Regions
are half-plane sets a*R1 + b*R2 <= c with (a, b) in {(1,0), (0,1), (1,1)},
so weighted-sum maximization is exact by vertex enumeration.

All rates are in bits per channel use (logs base 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseSchedule",
    "PowerAllocation",
    "JTerms",
    "Constraint",
    "RateRegion",
    "j_terms",
    "achievable_region",
    "outer_bound_region",
    "redundancy_gap",
    "max_weighted_sum",
    "weighted_max_bounds",
    "ergodic_boundary",
]

_BUDGET_RTOL = 1e-9


def _log2_1p(x):
    """log2(1 + x) that is exact at x = 0 and safe for arrays."""
    return np.log1p(x) / np.log(2.0)


@dataclass(frozen=True)
class PhaseSchedule:
    """Fractional phase durations; the third phase takes the remainder."""

    alpha1: float
    alpha2: float

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0 or self.alpha1 + self.alpha2 > 1 + 1e-12:
            raise ValueError(f"invalid phase durations ({self.alpha1}, {self.alpha2})")

    @property
    def alpha3(self) -> float:
        return max(0.0, 1.0 - self.alpha1 - self.alpha2)


@dataclass(frozen=True)
class PowerAllocation:
    """Per-signal transmit powers (linear).

    rho11/rho22: exchange-phase signals; rho10/rho20: private signals;
    rho13/rho23: the coherently combined cooperative signal in phase 3.
    """

    rho11: float
    rho22: float
    rho10: float
    rho20: float
    rho13: float
    rho23: float

    def __post_init__(self):
        if min(self.rho11, self.rho22, self.rho10, self.rho20, self.rho13, self.rho23) < 0:
            raise ValueError("powers must be >= 0")

    def spend(self, ps: PhaseSchedule) -> tuple[float, float]:
        """Average power drawn from each UE's budget under schedule ps."""
        e1 = ps.alpha1 * self.rho11 + ps.alpha3 * (self.rho10 + self.rho13)
        e2 = ps.alpha2 * self.rho22 + ps.alpha3 * (self.rho20 + self.rho23)
        return e1, e2

    def check_budget(self, ps: PhaseSchedule, p1: float, p2: float,
                     rtol: float = _BUDGET_RTOL) -> None:
        e1, e2 = self.spend(ps)
        scale = max(p1, p2, 1.0)
        if abs(e1 - p1) > rtol * scale or abs(e2 - p2) > rtol * scale:
            raise ValueError(
                f"power constraint violated: spend=({e1}, {e2}), budget=({p1}, {p2})")


@dataclass
class JTerms:
    """The eight rate bounds plus the beamforming log-term (scalars or arrays)."""

    j1: np.ndarray | float
    j2: np.ndarray | float
    j3: np.ndarray | float
    j4: np.ndarray | float
    j5: np.ndarray | float
    j6: np.ndarray | float
    j7: np.ndarray | float
    j8: np.ndarray | float
    zeta: np.ndarray | float


@dataclass(frozen=True)
class Constraint:
    """Half-plane a*R1 + b*R2 <= c, tagged with the J-combination it came from."""

    a: int
    b: int
    c: float
    tag: str


@dataclass
class RateRegion:
    """Intersection of half-plane constraints with R1, R2 >= 0."""

    constraints: list[Constraint]

    def bound(self, a: int, b: int) -> float:
        """Tightest c among constraints with the given normal; inf if none."""
        cs = [k.c for k in self.constraints if (k.a, k.b) == (a, b)]
        return min(cs) if cs else np.inf

    def contains(self, r1: float, r2: float, tol: float = 0.0) -> bool:
        if r1 < -tol or r2 < -tol:
            return False
        return all(k.a * r1 + k.b * r2 <= k.c + tol for k in self.constraints)


def j_terms(ls, ps: PhaseSchedule, pa: PowerAllocation,
            budgets: tuple[float, float] | None = None) -> JTerms:
    """Evaluate J1..J8 and zeta for one realization (or a batch).

    If budgets=(P1, P2) is given, the schedule/allocation pair is checked
    against the power constraints first.
    """
    if budgets is not None:
        pa.check_budget(ps, *budgets)
    a1, a2, a3 = ps.alpha1, ps.alpha2, ps.alpha3
    g10sq = np.square(ls.g10)
    g20sq = np.square(ls.g20)

    j1 = a1 * _log2_1p(np.square(ls.g12) * pa.rho11)
    j2 = a2 * _log2_1p(np.square(ls.g21) * pa.rho22)
    j3 = a3 * _log2_1p(g10sq * pa.rho10)
    j4 = a3 * _log2_1p(g20sq * pa.rho20)
    j5 = a3 * _log2_1p(g10sq * pa.rho10 + g20sq * pa.rho20)
    beam = np.square(ls.g10 * np.sqrt(pa.rho13) + ls.g20 * np.sqrt(pa.rho23))
    zeta = _log2_1p(g10sq * pa.rho10 + g20sq * pa.rho20 + beam)
    t1 = a1 * _log2_1p(g10sq * pa.rho11)   # phase-1 signal as heard by the BS
    t2 = a2 * _log2_1p(g20sq * pa.rho22)
    j6 = t1 + a3 * zeta
    j7 = t2 + a3 * zeta
    j8 = t1 + t2 + a3 * zeta
    return JTerms(j1, j2, j3, j4, j5, j6, j7, j8, zeta)


def achievable_region(j: JTerms) -> RateRegion:
    """Theorem-1 region: R1 <= J1+J3, R2 <= J2+J4, sum <= J1+J2+J5 and <= J8."""
    return RateRegion([
        Constraint(1, 0, float(j.j1 + j.j3), "J1+J3"),
        Constraint(0, 1, float(j.j2 + j.j4), "J2+J4"),
        Constraint(1, 1, float(j.j1 + j.j2 + j.j5), "J1+J2+J5"),
        Constraint(1, 1, float(j.j8), "J8"),
    ])


def outer_bound_region(ls, ps: PhaseSchedule, pa: PowerAllocation) -> RateRegion:
    """Cut-set style outer bound: exchange-phase gains become SIMO gains.

    Same shape as the achievable region with g12^2 -> g12^2 + g10^2 and
    g21^2 -> g21^2 + g20^2 in the J1/J2 roles; the J8 constraint is unchanged.
    """
    j = j_terms(ls, ps, pa)
    w1 = ps.alpha1 * _log2_1p((np.square(ls.g12) + np.square(ls.g10)) * pa.rho11)
    w2 = ps.alpha2 * _log2_1p((np.square(ls.g21) + np.square(ls.g20)) * pa.rho22)
    return RateRegion([
        Constraint(1, 0, float(w1 + j.j3), "W1+J3"),
        Constraint(0, 1, float(w2 + j.j4), "W2+J4"),
        Constraint(1, 1, float(w1 + w2 + j.j5), "W1+W2+J5"),
        Constraint(1, 1, float(j.j8), "J8"),
    ])


def redundancy_gap(j: JTerms):
    """min(J1+J7, J2+J6) - min(J1+J2+J5, J8).

    Non-negative whenever the policy matches the block's transmission case,
    which is why the UE-side sum constraints are redundant in the region.
    """
    return (np.minimum(j.j1 + j.j7, j.j2 + j.j6)
            - np.minimum(j.j1 + j.j2 + j.j5, j.j8))


def weighted_max_bounds(c1, c2, s, w1: float, w2: float):
    """Maximize w1*R1 + w2*R2 over {R1<=c1, R2<=c2, R1+R2<=s, R>=0}, elementwise.

    c1, c2, s may be arrays.  Returns (r1, r2, value); ties break toward
    larger R1.  The optimum is at one of four feasible vertices.
    """
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    s = np.asarray(s, dtype=float)
    ca = np.minimum(c1, s)
    cb = np.minimum(c2, s)
    # Upper-right vertices: walk the sum line from each axis bound.
    pts = [
        (ca, np.zeros_like(ca)),
        (np.zeros_like(cb), cb),
        (ca, np.clip(s - ca, 0.0, c2)),
        (np.clip(s - cb, 0.0, c1), cb),
    ]
    best_r1, best_r2 = pts[0]
    best_v = w1 * best_r1 + w2 * best_r2
    for r1, r2 in pts[1:]:
        v = w1 * r1 + w2 * r2
        take = (v > best_v) | ((v == best_v) & (r1 > best_r1))
        best_v = np.where(take, v, best_v)
        best_r1 = np.where(take, r1, best_r1)
        best_r2 = np.where(take, r2, best_r2)
    return best_r1, best_r2, best_v


def max_weighted_sum(region: RateRegion, w1: float, w2: float) -> tuple[float, float, float]:
    """Maximize w1*R1 + w2*R2 over the region; returns (r1, r2, value)."""
    if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
        raise ValueError("weights must be >= 0 and not both zero")
    c1 = region.bound(1, 0)
    c2 = region.bound(0, 1)
    s = region.bound(1, 1)
    # A missing axis bound is only usable when the sum bound caps it.
    if not np.isfinite(min(c1, s)) or not np.isfinite(min(c2, s)):
        raise ValueError("region is unbounded in an axis direction")
    big = max(x for x in (c1, c2, s) if np.isfinite(x))
    c1, c2, s = (min(x, 2 * big + 1.0) if not np.isfinite(x) else x for x in (c1, c2, s))
    r1, r2, v = weighted_max_bounds(c1, c2, s, w1, w2)
    return float(r1), float(r2), float(v)


def ergodic_boundary(cfg, scheme, weights, samples: int, rng,
                     search_spec=None) -> list[tuple[float, float]]:
    """Average supporting point of the per-block optimized region, per weight pair.

    For each weight pair the block's scheme parameters are re-optimized
    (grid search over case-matched policies), the weighted-sum optimum is
    located by vertex enumeration, and the optimal (R1, R2) is averaged over
    the fading draws.
    """
    from . import search  # local import: search builds on this module

    return search.ergodic_boundary_points(cfg, scheme, weights, samples, rng,
                                          spec=search_spec)
