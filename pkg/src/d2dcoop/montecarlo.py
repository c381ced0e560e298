"""Seeded, chunked, reproducible Monte-Carlo estimation.

Chunk seeds derive from the master seed through numpy's SeedSequence
spawning, so the stream layout is fixed by (master_seed, samples, chunks)
alone: results are bit-identical across runs and across worker counts.
Reduction is an integer success count accumulated in chunk order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .channel import LinkState, NetworkConfig, sample_blocks

__all__ = ["EstimatorConfig", "Estimate", "estimate_bernoulli", "estimate_fields", "sweep"]


@dataclass(frozen=True)
class EstimatorConfig:
    """Master seed, sample count and substream count for one estimation."""

    master_seed: int
    samples: int = 100_000
    chunks: int = 16

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.chunks < 1:
            raise ValueError("chunks must be >= 1")

    def chunk_sizes(self) -> list[int]:
        """Deterministic near-even partition of samples into chunks."""
        n, k = self.samples, min(self.chunks, self.samples)
        base, extra = divmod(n, k)
        return [base + (1 if i < extra else 0) for i in range(k)]

    def chunk_rngs(self) -> list[np.random.Generator]:
        k = min(self.chunks, self.samples)
        return [np.random.Generator(np.random.PCG64(s))
                for s in np.random.SeedSequence(self.master_seed).spawn(k)]

    def with_samples(self, samples: int) -> "EstimatorConfig":
        return EstimatorConfig(self.master_seed, samples, self.chunks)


@dataclass(frozen=True)
class Estimate:
    """Bernoulli mean with its standard error."""

    mean: float
    std_error: float
    n: int

    @classmethod
    def from_count(cls, successes: float, n: int) -> "Estimate":
        p = successes / n
        return cls(mean=p, std_error=float(np.sqrt(p * (1.0 - p) / n)), n=n)


def _map_chunks(cfg: EstimatorConfig, net: NetworkConfig, fn, threads: int = 1) -> list:
    """Evaluate fn(LinkState batch) per chunk; results returned in chunk order."""
    sizes = cfg.chunk_sizes()
    rngs = cfg.chunk_rngs()

    def one(i: int):
        return fn(sample_blocks(net, sizes[i], rngs[i]))

    if threads <= 1 or len(sizes) == 1:
        return [one(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(len(sizes))))


def estimate_bernoulli(cfg: EstimatorConfig, net: NetworkConfig,
                       indicator: Callable[[LinkState], np.ndarray],
                       threads: int = 1) -> Estimate:
    """Mean of a boolean per-block indicator over exactly cfg.samples draws."""
    counts = _map_chunks(cfg, net, lambda ls: int(np.count_nonzero(indicator(ls))),
                         threads=threads)
    return Estimate.from_count(sum(counts), cfg.samples)


def estimate_fields(cfg: EstimatorConfig, net: NetworkConfig,
                    fields_fn: Callable[[LinkState], Mapping[str, np.ndarray]],
                    threads: int = 1) -> dict[str, Estimate]:
    """Like estimate_bernoulli but for a function returning named indicator arrays."""
    chunk_counts = _map_chunks(
        cfg, net,
        lambda ls: {k: int(np.count_nonzero(v)) for k, v in fields_fn(ls).items()},
        threads=threads)
    totals: dict[str, int] = {}
    for counts in chunk_counts:
        for k, v in counts.items():
            totals[k] = totals.get(k, 0) + v
    return {k: Estimate.from_count(v, cfg.samples) for k, v in totals.items()}


def sweep(cfg: EstimatorConfig, grid: Iterable, estimator: Callable) -> list[dict]:
    """One estimate row per grid point, in grid order.

    estimator(point, cfg) must return a mapping of result fields; the grid
    point is echoed into each row under "point".
    """
    rows = []
    for point in grid:
        out = dict(estimator(point, cfg))
        out["point"] = point
        rows.append(out)
    if not rows:
        raise ValueError("empty sweep grid")
    return rows
