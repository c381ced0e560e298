"""Network geometry, Rayleigh block-fading sampling and transmission-case statistics.

All links follow h = h_tilde / d^(gamma/2) with h_tilde ~ CN(0, 1), so the
amplitude g = |h| is Rayleigh with E[g^2] = mu = d^(-gamma) and the phase is
uniform on [0, 2pi).  A block holds one realization of the four links
(UE1->BS, UE2->BS, UE1->UE2, UE2->UE1); realizations are independent across
blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

__all__ = [
    "TransmissionCase",
    "NetworkConfig",
    "LinkState",
    "mean_gain",
    "sample_block",
    "sample_blocks",
    "classify_case",
    "classify_cases",
    "case_probability",
]


class TransmissionCase(IntEnum):
    """Which sub-scheme a fading block selects, from the inter-UE vs direct link order."""

    CASE1_DIRECT_BOTH = 1   # g12 <= g10 and g21 <= g20: both UEs transmit directly
    CASE2_COOP_BOTH = 2     # g12 >  g10 and g21 >  g20: both UEs cooperate
    CASE3_UE1_COOP = 3      # g12 >  g10 and g21 <= g20: only UE1's information is relayed
    CASE4_UE2_COOP = 4      # g12 <= g10 and g21 >  g20: only UE2's information is relayed


def mean_gain(d: float, gamma: float) -> float:
    """Mean squared link gain mu = d^(-gamma) for distance d and attenuation gamma."""
    if d <= 0:
        raise ValueError(f"distance must be > 0, got {d}")
    if gamma <= 0:
        raise ValueError(f"attenuation factor must be > 0, got {gamma}")
    return float(d) ** (-gamma)


@dataclass(frozen=True)
class NetworkConfig:
    """Geometry and power budgets. Mean gains are always recomputed from distances.

    d21 = d12 throughout, so mu12 = mu21.
    """

    d10: float
    d20: float
    d12: float
    gamma: float
    p1: float
    p2: float

    def __post_init__(self):
        for name in ("d10", "d20", "d12"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.p1 < 0 or self.p2 < 0:
            raise ValueError("power budgets must be >= 0")

    @property
    def mu10(self) -> float:
        return mean_gain(self.d10, self.gamma)

    @property
    def mu20(self) -> float:
        return mean_gain(self.d20, self.gamma)

    @property
    def mu12(self) -> float:
        return mean_gain(self.d12, self.gamma)

    @property
    def mu21(self) -> float:
        return self.mu12

    @classmethod
    def from_mean_gains(
        cls, mu10: float, mu20: float, mu12: float, gamma: float = 2.4,
        p1: float = 0.0, p2: float = 0.0,
    ) -> "NetworkConfig":
        """Build a config from target mean gains by inverting d = mu^(-1/gamma)."""
        if min(mu10, mu20, mu12) <= 0:
            raise ValueError("mean gains must be > 0")
        return cls(
            d10=mu10 ** (-1.0 / gamma),
            d20=mu20 ** (-1.0 / gamma),
            d12=mu12 ** (-1.0 / gamma),
            gamma=gamma, p1=p1, p2=p2,
        )

    def with_powers(self, p1: float, p2: float) -> "NetworkConfig":
        return NetworkConfig(self.d10, self.d20, self.d12, self.gamma, p1, p2)


@dataclass
class LinkState:
    """One block-fading realization: amplitudes and phases of the four links.

    Fields may be scalars (one block) or equally-shaped arrays (a batch of
    blocks); every operation downstream is elementwise in the gains.
    Phases are carried for fidelity only: transmitter phase knowledge makes
    the third-phase combining coherent, so rate formulas use amplitudes.
    """

    g10: np.ndarray | float
    g20: np.ndarray | float
    g12: np.ndarray | float
    g21: np.ndarray | float
    theta10: np.ndarray | float
    theta20: np.ndarray | float
    theta12: np.ndarray | float
    theta21: np.ndarray | float


def sample_blocks(cfg: NetworkConfig, n: int, rng: np.random.Generator) -> LinkState:
    """Sample n i.i.d. fading blocks. g_ij^2 ~ Exp(mean=mu_ij), phases ~ U[0, 2pi).

    Draw order is fixed (g10, g20, g12, g21, then phases in the same order) so
    a given generator state always yields the same batch.
    """
    g10 = np.sqrt(rng.exponential(cfg.mu10, n))
    g20 = np.sqrt(rng.exponential(cfg.mu20, n))
    g12 = np.sqrt(rng.exponential(cfg.mu12, n))
    g21 = np.sqrt(rng.exponential(cfg.mu21, n))
    th = [rng.uniform(0.0, 2.0 * np.pi, n) for _ in range(4)]
    return LinkState(g10, g20, g12, g21, th[0], th[1], th[2], th[3])


def sample_block(cfg: NetworkConfig, rng: np.random.Generator) -> LinkState:
    """Sample a single fading block (scalar fields)."""
    batch = sample_blocks(cfg, 1, rng)
    return LinkState(*(float(getattr(batch, f)[0]) for f in (
        "g10", "g20", "g12", "g21", "theta10", "theta20", "theta12", "theta21")))


def classify_cases(ls: LinkState) -> np.ndarray:
    """Vectorized case classification; returns an int array of TransmissionCase values.

    Ties g12 = g10 (or g21 = g20) resolve to the direct-transmission branch.
    """
    coop1 = np.asarray(ls.g12) > np.asarray(ls.g10)   # UE1's cooperative link stronger
    coop2 = np.asarray(ls.g21) > np.asarray(ls.g20)
    out = np.where(
        coop1 & coop2, TransmissionCase.CASE2_COOP_BOTH,
        np.where(coop1, TransmissionCase.CASE3_UE1_COOP,
                 np.where(coop2, TransmissionCase.CASE4_UE2_COOP,
                          TransmissionCase.CASE1_DIRECT_BOTH)),
    )
    return out


def classify_case(ls: LinkState) -> TransmissionCase:
    """Classify a single block."""
    return TransmissionCase(int(classify_cases(ls)))


def case_probability(cfg: NetworkConfig) -> dict[TransmissionCase, float]:
    """Closed-form occurrence probability of each transmission case.

    g_ij^2 are independent exponentials, so
    P[g12 <= g10] = mu10 / (mu10 + mu12) and P[g21 <= g20] = mu20 / (mu20 + mu21);
    the two link pairs are independent and the four probabilities sum to 1.
    """
    q1 = cfg.mu10 / (cfg.mu10 + cfg.mu12)   # P[g12 <= g10]
    q2 = cfg.mu20 / (cfg.mu20 + cfg.mu21)   # P[g21 <= g20]
    return {
        TransmissionCase.CASE1_DIRECT_BOTH: q1 * q2,
        TransmissionCase.CASE2_COOP_BOTH: (1 - q1) * (1 - q2),
        TransmissionCase.CASE3_UE1_COOP: (1 - q1) * q2,
        TransmissionCase.CASE4_UE2_COOP: q1 * (1 - q2),
    }
