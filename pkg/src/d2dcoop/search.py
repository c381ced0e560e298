"""Derivative-free parameter search for the schemes.

Two search problems share the same machinery:

* weighted-rate maximization (per fading block, or averaged over blocks,
  for ergodic boundary tracing) — nested grid search over phase fractions
  and power-split fractions, with vertex enumeration inside each candidate;
* outage minimization at fixed rate targets — per-case grid search with
  local refinement, using common random numbers across candidates so that
  comparisons are not dominated by Monte-Carlo noise.

All TD parameters are fractions in [0, 1], so grids are boxes that shrink
around the incumbent; the incumbent is always a member of the refined grid,
which makes refinement monotone (the objective never worsens).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .channel import (
    LinkState,
    NetworkConfig,
    TransmissionCase,
    classify_cases,
    sample_blocks,
)
from .montecarlo import EstimatorConfig
from .outage import (
    CaseParams,
    DEFAULT_ALPHAS,
    Fd2CaseParams,
    Fd2PolicyRule,
    OutageBreakdown,
    RpRule,
    SicRule,
    TdPolicyRule,
    average_outage,
)
from .rate_region import (
    PhaseSchedule,
    PowerAllocation,
    _log2_1p,
    j_terms,
    weighted_max_bounds,
)
from .schemes import Fd2Params, SchemePolicy, case_policy, fd2_bounds, mac_policy

__all__ = [
    "SearchSpec",
    "optimize_outage",
    "optimize_weighted_rate",
    "ergodic_boundary_points",
]

_LS_FIELDS = ("g10", "g20", "g12", "g21",
              "theta10", "theta20", "theta12", "theta21")


@dataclass(frozen=True)
class SearchSpec:
    """Budget knobs for the nested grid search.

    resolution: grid points per free parameter and round;
    depth: number of local refinement rounds after the initial grid;
    subsample: fading draws used while ranking candidates (the returned
    incumbent is always re-evaluated on the full estimator budget).
    """

    resolution: int = 4
    depth: int = 2
    subsample: int = 20_000

    def __post_init__(self):
        if self.resolution < 2 or self.depth < 0 or self.subsample < 1:
            raise ValueError("invalid search budget")


def _subset(ls: LinkState, mask: np.ndarray) -> LinkState:
    return LinkState(*(np.asarray(getattr(ls, f))[mask] for f in _LS_FIELDS))


def _refine(lo: np.ndarray, hi: np.ndarray, best: np.ndarray, res: int):
    """Shrink each box dimension to one grid cell around the incumbent."""
    w = (hi - lo) / (res - 1)
    return np.clip(best - w, 0.0, 1.0), np.clip(best + w, 0.0, 1.0)


def _grid_search(objective, ndim: int, spec: SearchSpec,
                 lo=None, hi=None, skip=None):
    """Minimize objective(x) for x in [0,1]^ndim by nested grid search.

    objective maps a tuple of floats to a float; skip(x) -> True prunes a
    candidate (used for the alpha1 + alpha2 < 1 constraint).
    Returns (best_x, best_value).
    """
    lo = np.zeros(ndim) if lo is None else np.asarray(lo, dtype=float)
    hi = np.ones(ndim) if hi is None else np.asarray(hi, dtype=float)
    best_x, best_v = None, np.inf
    for _ in range(spec.depth + 1):
        axes = [np.linspace(lo[d], hi[d], spec.resolution) for d in range(ndim)]
        for x in itertools.product(*axes):
            if skip is not None and skip(x):
                continue
            v = objective(x)
            if v < best_v:
                best_x, best_v = np.asarray(x), v
        if best_x is None:
            raise ValueError("grid search found no feasible candidate")
        lo, hi = _refine(lo, hi, best_x, spec.resolution)
    return tuple(float(t) for t in best_x), float(best_v)


def _coord_descent(objective, ndim: int, spec: SearchSpec):
    """Minimize objective over [0,1]^ndim: multistart + cyclic line searches.

    Used when evaluations are expensive (Monte-Carlo vectors): a full grid
    product over 4-6 dimensions would need thousands of evaluations.  Starts
    from a fixed low-discrepancy set of points, takes the best, then sweeps
    each coordinate over a shrinking grid, accepting only improvements
    (monotone in the incumbent by construction).
    """
    if ndim <= 2:
        return _grid_search(objective, ndim, spec)
    starts = [np.full(ndim, 0.5)]
    rng = np.random.default_rng(20240901)  # fixed: search must be reproducible
    starts += list(rng.random((16, ndim)))
    best_x, best_v = None, np.inf
    for x in starts:
        v = objective(tuple(x))
        if v < best_v:
            best_x, best_v = np.array(x), v
    npts = 2 * spec.resolution + 1
    width = 0.5
    for _ in range(spec.depth + 2):
        for d in range(ndim):
            vals = np.linspace(max(best_x[d] - width, 0.0),
                               min(best_x[d] + width, 1.0), npts)
            for t in vals:
                x = best_x.copy()
                x[d] = t
                v = objective(tuple(x))
                if v < best_v:
                    best_x, best_v = x, v
        width *= 0.35
    return tuple(float(t) for t in best_x), float(best_v)


# --------------------------------------------------------------------------
# Outage minimization
# --------------------------------------------------------------------------

_TD_CASE_PARAMS = {
    TransmissionCase.CASE1_DIRECT_BOTH: (),
    TransmissionCase.CASE2_COOP_BOTH: ("f1", "t1", "f2", "t2", "s1", "s2"),
    TransmissionCase.CASE3_UE1_COOP: ("f1", "t1", "t2", "s1"),
    TransmissionCase.CASE4_UE2_COOP: ("f2", "t2", "t1", "s2"),
}

_FD2_CASE_PARAMS = {
    TransmissionCase.CASE1_DIRECT_BOTH: (),
    TransmissionCase.CASE2_COOP_BOTH: ("e1", "u1", "e2", "u2"),
    TransmissionCase.CASE3_UE1_COOP: ("e2", "u1"),
    TransmissionCase.CASE4_UE2_COOP: ("e1", "u2"),
}


def _outage_objective(res: dict, objective: str, betas) -> float:
    if objective == "common":
        return float(np.mean(res["pc"]))
    b1, b2 = betas
    return max(float(np.mean(res["p1"])) / b1, float(np.mean(res["p2"])) / b2)


def _search_rng(est: EstimatorConfig) -> np.random.Generator:
    # A stream disjoint from the estimator's chunk streams; fixed per seed so
    # every candidate (common random numbers) and every probe sees the same draws.
    return np.random.default_rng(np.random.SeedSequence([est.master_seed, 0x5EA2C4]))


def optimize_outage(cfg: NetworkConfig, scheme: str, r1: float, r2: float,
                    spec: SearchSpec | None = None,
                    est: EstimatorConfig | None = None,
                    objective: str = "common",
                    betas: tuple[float, float] | None = None,
                    threads: int = 1,
                    fixed_alphas: dict | None = None):
    """Minimize outage at targets (r1, r2); returns (rule, OutageBreakdown).

    The TD/FD3/FD2 searches run independently per transmission case on a
    case-stratified subsample (valid because total outage is a fixed convex
    combination of the per-case conditional outages).  The returned
    breakdown is the incumbent re-evaluated on the full estimator budget.
    If every candidate is in outage on (almost) every draw the search still
    returns the least-bad incumbent; callers detect infeasibility from the
    returned probabilities.
    """
    spec = spec or SearchSpec()
    est = est or EstimatorConfig(master_seed=0)
    if objective not in ("common", "individual"):
        raise ValueError("objective must be 'common' or 'individual'")
    betas = betas or (1.0, 1.0)
    alphas = dict(DEFAULT_ALPHAS)
    if fixed_alphas:
        alphas.update(fixed_alphas)

    # Grow the ranking subsample until a reference policy sees enough outage
    # events; otherwise the high-SNR search objective is all estimator noise.
    from .outage import batch_indicators
    probe_rule = {"td": TdPolicyRule(alphas=alphas),
                  "fd3": TdPolicyRule(alphas=alphas, fd3=True),
                  "fd2": Fd2PolicyRule(), "rp": RpRule(),
                  "sic": SicRule()}.get(scheme)
    nsub = spec.subsample
    rng = _search_rng(est)
    ls = sample_blocks(cfg, nsub, rng)
    if probe_rule is not None and max(r1, r2) > 0:
        while nsub < 100 * spec.subsample:
            events = float(np.sum(batch_indicators(ls, cfg, probe_rule,
                                                   r1, r2)["pc"]))
            if events >= 1000:
                break
            nsub *= 4
            ls = sample_blocks(cfg, nsub, _search_rng(est))
    cases = classify_cases(ls)

    if scheme == "sic":
        rule = SicRule()
    elif scheme == "rp":
        def rp_obj(x):
            res = RpRule(split=min(max(x[0], 1e-6), 1 - 1e-6)).indicators(
                ls, None, cfg, r1, r2)
            return _outage_objective(res, objective, betas)
        (split,), _ = _grid_search(rp_obj, 1, spec, lo=[0.05], hi=[0.95])
        rule = RpRule(split=split)
    elif scheme in ("td", "fd3"):
        params = {}
        for case in TransmissionCase:
            names = _TD_CASE_PARAMS[case]
            sub = _subset(ls, cases == case)
            if not names or sub.g10.size == 0:
                params[case] = CaseParams()
                continue

            def obj(x, case=case, names=names, sub=sub):
                cp = CaseParams(**dict(zip(names, x)))
                probe = TdPolicyRule(params={case: cp}, alphas=alphas,
                                     fd3=(scheme == "fd3"))
                res = probe.indicators(sub, case, cfg, r1, r2)
                return _outage_objective(res, objective, betas)

            x, _ = _coord_descent(obj, len(names), spec)
            params[case] = CaseParams(**dict(zip(names, x)))
        rule = TdPolicyRule(params=params, alphas=alphas, fd3=(scheme == "fd3"))
    elif scheme == "fd2":
        params = {}
        for case in TransmissionCase:
            names = _FD2_CASE_PARAMS[case]
            sub = _subset(ls, cases == case)
            if not names or sub.g10.size == 0:
                params[case] = Fd2CaseParams()
                continue

            def obj(x, case=case, names=names, sub=sub):
                probe = Fd2PolicyRule(params={case: Fd2CaseParams(**dict(zip(names, x)))})
                res = probe.indicators(sub, case, cfg, r1, r2)
                return _outage_objective(res, objective, betas)

            x, _ = _coord_descent(obj, len(names), spec)
            params[case] = Fd2CaseParams(**dict(zip(names, x)))
        rule = Fd2PolicyRule(params=params)
    else:
        raise ValueError(f"unknown scheme {scheme!r} for outage optimization")

    bd = average_outage(cfg, rule, r1, r2, est, threads=threads)
    return rule, bd


# --------------------------------------------------------------------------
# Weighted-rate maximization
# --------------------------------------------------------------------------

def _td_base_policy(cfg: NetworkConfig, a1: float, a2: float, f1: float,
                    t1: float, f2: float, t2: float) -> SchemePolicy:
    """Full-cooperation policy from fractional parameters, budgets tight."""
    ps = PhaseSchedule(a1, a2)
    a3 = ps.alpha3
    rho11 = f1 * cfg.p1 / a1 if a1 > 0 else 0.0
    rho22 = f2 * cfg.p2 / a2 if a2 > 0 else 0.0
    rem1 = (1.0 - (f1 if a1 > 0 else 0.0)) * cfg.p1 / a3
    rem2 = (1.0 - (f2 if a2 > 0 else 0.0)) * cfg.p2 / a3
    return SchemePolicy(ps=ps, pa=PowerAllocation(
        rho11=rho11, rho22=rho22,
        rho10=t1 * rem1, rho13=(1.0 - t1) * rem1,
        rho20=t2 * rem2, rho23=(1.0 - t2) * rem2))


def _td_region_consts(ls, pol: SchemePolicy, outer: bool):
    """Pentagon constants (c1, c2, s) of the TD region or its outer bound."""
    j = j_terms(ls, pol.ps, pol.pa)
    if outer:
        w1 = pol.ps.alpha1 * _log2_1p(
            (np.square(ls.g12) + np.square(ls.g10)) * pol.pa.rho11)
        w2 = pol.ps.alpha2 * _log2_1p(
            (np.square(ls.g21) + np.square(ls.g20)) * pol.pa.rho22)
    else:
        w1, w2 = j.j1, j.j2
    c1 = w1 + j.j3
    c2 = w2 + j.j4
    s = np.minimum(w1 + w2 + j.j5, j.j8)
    return c1, c2, s


def _alpha_grid(spec: SearchSpec):
    vals = np.linspace(0.0, 0.8, spec.resolution)
    return [(a1, a2) for a1 in vals for a2 in vals if a1 + a2 <= 0.8 + 1e-12]


def _frac_grid(spec: SearchSpec):
    return np.linspace(0.0, 1.0, spec.resolution)


def _td_candidates(cfg: NetworkConfig, spec: SearchSpec):
    """Base TD policies: an alpha grid crossed with power-split fractions,
    plus the degenerate MAC policy (guarantees the region contains the
    concurrent-SIC pentagon for every draw)."""
    yield mac_policy(cfg)
    fr = _frac_grid(spec)
    for a1, a2 in _alpha_grid(spec):
        if a1 == 0.0 and a2 == 0.0:
            continue
        for f1 in (fr if a1 > 0 else [0.0]):
            for f2 in (fr if a2 > 0 else [0.0]):
                for t1 in fr:
                    for t2 in fr:
                        yield _td_base_policy(cfg, a1, a2, f1, t1, f2, t2)


def _fd2_candidates(cfg: NetworkConfig, spec: SearchSpec):
    fr = _frac_grid(spec)
    betas = np.linspace(0.3, 0.7, 3)
    for beta in betas:
        for e1 in fr:
            for u1 in fr:
                for e2 in fr:
                    for u2 in fr:
                        yield beta, Fd2CaseParams(e1=e1, u1=u1, e2=e2, u2=u2)


def _fd2_case_consts(ls, case: TransmissionCase, fp: Fd2Params):
    a1, a2, a3, a4 = fd2_bounds(ls, fp)
    c1 = np.minimum(a1, a3) if case in (TransmissionCase.CASE2_COOP_BOTH,
                                        TransmissionCase.CASE3_UE1_COOP) else np.asarray(a3, dtype=float)
    c2 = np.minimum(a2, a4) if case in (TransmissionCase.CASE2_COOP_BOTH,
                                        TransmissionCase.CASE4_UE2_COOP) else np.asarray(a4, dtype=float)
    # No joint constraint in the 2-band scheme: the region is a rectangle.
    return c1, c2, c1 + c2


def ergodic_boundary_points(cfg: NetworkConfig, scheme: str, weights,
                            samples: int, rng, spec: SearchSpec | None = None) -> list[dict]:
    """Per-weight ergodic boundary points E[(R1*, R2*)] for one scheme.

    For each fading draw and each weight pair, the weighted sum is maximized
    over the candidate policy grid (case-matched via case_policy) and the
    maximizing rate pair is recorded; the boundary point is the average over
    draws.  Returns one dict per weight pair with keys w1, w2, r1, r2, value.
    """
    spec = spec or SearchSpec()
    weights = [(float(w1), float(w2)) for (w1, w2) in weights]
    for w1, w2 in weights:
        if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
            raise ValueError("weights must be >= 0 and not both zero")
    ls = sample_blocks(cfg, samples, rng)
    cases = classify_cases(ls)
    n = samples
    best_v = [np.full(n, -np.inf) for _ in weights]
    best_r1 = [np.zeros(n) for _ in weights]
    best_r2 = [np.zeros(n) for _ in weights]

    def consider(mask, c1, c2, s):
        for k, (w1, w2) in enumerate(weights):
            r1, r2, v = weighted_max_bounds(c1, c2, s, w1, w2)
            take = v > best_v[k][mask]
            best_v[k][mask] = np.where(take, v, best_v[k][mask])
            best_r1[k][mask] = np.where(take, r1, best_r1[k][mask])
            best_r2[k][mask] = np.where(take, r2, best_r2[k][mask])

    if scheme == "sic":
        a = np.square(ls.g10) * cfg.p1
        b = np.square(ls.g20) * cfg.p2
        consider(np.ones(n, dtype=bool), _log2_1p(a), _log2_1p(b), _log2_1p(a + b))
    elif scheme == "rp":
        for split in np.linspace(0.05, 0.95, max(spec.resolution * 4, 16)):
            c1 = split * _log2_1p(np.square(ls.g10) * cfg.p1 / split)
            c2 = (1 - split) * _log2_1p(np.square(ls.g20) * cfg.p2 / (1 - split))
            consider(np.ones(n, dtype=bool), c1, c2, c1 + c2)
    elif scheme in ("td", "fd3", "outer"):
        bases = list(_td_candidates(cfg, spec))
        for case in TransmissionCase:
            mask = cases == case
            if not mask.any():
                continue
            sub = _subset(ls, mask)
            seen = set()
            for base in bases:
                pol = case_policy(case, base, cfg)
                key = (pol.ps.alpha1, pol.ps.alpha2, pol.pa.rho11, pol.pa.rho22,
                       pol.pa.rho10, pol.pa.rho20, pol.pa.rho13, pol.pa.rho23)
                if key in seen:
                    continue
                seen.add(key)
                c1, c2, s = _td_region_consts(sub, pol, outer=(scheme == "outer"))
                consider(mask, c1, c2, s)
    elif scheme == "fd2":
        for case in TransmissionCase:
            mask = cases == case
            if not mask.any():
                continue
            sub = _subset(ls, mask)
            seen = set()
            for beta, cp in _fd2_candidates(cfg, spec):
                fp = Fd2PolicyRule(params={case: cp}, beta=beta).fd2_params(case, cfg)
                key = (fp.beta, fp.rho12, fp.rho21, fp.rho1_1,
                       fp.rho1_2, fp.rho2_1, fp.rho2_2)
                if key in seen:
                    continue
                seen.add(key)
                c1, c2, s = _fd2_case_consts(sub, case, fp)
                consider(mask, c1, c2, s)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    out = []
    for k, (w1, w2) in enumerate(weights):
        r1m = float(np.mean(best_r1[k]))
        r2m = float(np.mean(best_r2[k]))
        out.append(dict(w1=w1, w2=w2, r1=r1m, r2=r2m,
                        value=float(np.mean(best_v[k]))))
    return out


def optimize_weighted_rate(ls: LinkState, cfg: NetworkConfig, scheme: str,
                           w1: float, w2: float,
                           spec: SearchSpec | None = None):
    """Maximize w1*R1 + w2*R2 for a single fading block.

    Returns a dict with keys value, r1, r2 and (for parametrized schemes)
    the winning policy/params.  Grid search plus local refinement over the
    same fractional parametrization as the outage search.
    """
    spec = spec or SearchSpec()
    if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
        raise ValueError("weights must be >= 0 and not both zero")
    from .channel import classify_case
    case = classify_case(ls)

    if scheme == "sic":
        pol = mac_policy(cfg)
        j = j_terms(ls, pol.ps, pol.pa)
        r1, r2, v = weighted_max_bounds(j.j3, j.j4, j.j5, w1, w2)
        return dict(value=float(v), r1=float(r1), r2=float(r2), policy=pol)

    if scheme == "rp":
        def obj(x):
            split = min(max(x[0], 1e-6), 1 - 1e-6)
            c1 = split * _log2_1p(ls.g10 ** 2 * cfg.p1 / split)
            c2 = (1 - split) * _log2_1p(ls.g20 ** 2 * cfg.p2 / (1 - split))
            return -float(w1 * c1 + w2 * c2)
        (split,), negv = _grid_search(obj, 1, spec, lo=[0.05], hi=[0.95])
        c1 = split * _log2_1p(ls.g10 ** 2 * cfg.p1 / split)
        c2 = (1 - split) * _log2_1p(ls.g20 ** 2 * cfg.p2 / (1 - split))
        return dict(value=-negv, r1=float(c1), r2=float(c2), split=split)

    if scheme in ("td", "fd3", "outer"):
        outer = scheme == "outer"

        def eval_policy(pol: SchemePolicy):
            c1, c2, s = _td_region_consts(ls, pol, outer)
            return weighted_max_bounds(c1, c2, s, w1, w2)

        def obj(x):
            pol = case_policy(case, _td_base_policy(cfg, *x), cfg)
            return -float(eval_policy(pol)[2])

        def skip(x):
            return x[0] + x[1] > 0.95

        x, negv = _grid_search(obj, 6, spec, hi=[0.8, 0.8, 1, 1, 1, 1], skip=skip)
        pol = case_policy(case, _td_base_policy(cfg, *x), cfg)
        # The degenerate MAC policy is always admissible; keep the better one.
        mac = case_policy(case, mac_policy(cfg), cfg)
        if eval_policy(mac)[2] > -negv:
            pol = mac
        r1, r2, v = eval_policy(pol)
        return dict(value=float(v), r1=float(r1), r2=float(r2), policy=pol)

    if scheme == "fd2":
        def make(x):
            beta = 0.2 + 0.6 * x[0]
            return Fd2PolicyRule(
                params={case: Fd2CaseParams(*x[1:])}, beta=beta).fd2_params(case, cfg)

        def obj(x):
            c1, c2, s = _fd2_case_consts(ls, case, make(x))
            return -float(weighted_max_bounds(c1, c2, s, w1, w2)[2])

        x, negv = _grid_search(obj, 5, spec)
        fp = make(x)
        c1, c2, s = _fd2_case_consts(ls, case, fp)
        r1, r2, v = weighted_max_bounds(c1, c2, s, w1, w2)
        return dict(value=float(v), r1=float(r1), r2=float(r2), params=fp)

    raise ValueError(f"unknown scheme {scheme!r}")
