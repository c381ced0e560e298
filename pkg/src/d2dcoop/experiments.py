"""Experiment drivers: config handling, presets, CSV emission.

Each run_* function consumes a validated config dict and returns
(columns, rows, infeasible).  The CLI is a thin argparse wrapper around
these; tests call them directly.  All randomness derives from the config
seed through SeedSequence spawning, so reruns with the same config are
byte-identical regardless of thread count.
"""

from __future__ import annotations

import copy
import json
import sys

import jsonschema
import numpy as np

from .channel import NetworkConfig, TransmissionCase, case_probability, classify_cases, sample_blocks
from .montecarlo import EstimatorConfig
from .outage import OutageTargets, TdPolicyRule, outage_rate_region
from .search import SearchSpec, ergodic_boundary_points, optimize_outage

__all__ = [
    "CONFIG_SCHEMA",
    "DEFAULT_CONFIG",
    "load_config",
    "build_network",
    "rho_from_snr",
    "run_rate_region",
    "run_outage_sweep",
    "run_outage_region",
    "run_case_prob",
    "write_csv",
]

_SCHEMES = ["td", "fd3", "fd2", "sic", "rp", "outer"]

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schemes": {"type": "array", "minItems": 1,
                    "items": {"enum": _SCHEMES}},
        "geometry": {
            "type": "object", "additionalProperties": False,
            "properties": {"d10": {"type": "number", "exclusiveMinimum": 0},
                           "d20": {"type": "number", "exclusiveMinimum": 0},
                           "d12": {"type": "number", "exclusiveMinimum": 0},
                           "gamma": {"type": "number", "exclusiveMinimum": 0}},
        },
        "mean_gains": {
            "type": "object", "additionalProperties": False,
            "properties": {"mu10": {"type": "number", "exclusiveMinimum": 0},
                           "mu20": {"type": "number", "exclusiveMinimum": 0},
                           "mu12": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["mu10", "mu20", "mu12"],
        },
        "p1": {"type": "number", "exclusiveMinimum": 0},
        "p2": {"type": "number", "exclusiveMinimum": 0},
        "snr_db": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        "r1": {"type": "number", "minimum": 0},
        "r2": {"type": "number", "minimum": 0},
        "beta1": {"type": "number", "minimum": 0, "maximum": 1},
        "beta2": {"type": "number", "minimum": 0, "maximum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "max_samples": {"type": "integer", "minimum": 1},
        "min_events": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "chunks": {"type": "integer", "minimum": 1},
        "threads": {"type": "integer", "minimum": 1},
        "snr_convention": {"enum": ["mu", "literal"]},
        "optimize": {"type": "boolean"},
        "search": {
            "type": "object", "additionalProperties": False,
            "properties": {"resolution": {"type": "integer", "minimum": 2},
                           "depth": {"type": "integer", "minimum": 0},
                           "subsample": {"type": "integer", "minimum": 1}},
        },
        "weights": {"type": "integer", "minimum": 2},
        "rays": {"type": "integer", "minimum": 2},
        "rate_cap": {"type": "number", "exclusiveMinimum": 0},
        "kinds": {"type": "array", "minItems": 1,
                  "items": {"enum": ["common", "individual"]}},
        "out": {"type": "string"},
    },
}

DEFAULT_CONFIG = {
    "schemes": ["td", "fd3", "fd2", "sic", "rp"],
    "geometry": {"d10": 20.0, "d20": 30.0, "d12": 12.0, "gamma": 2.4},
    "p1": 1.0,
    "p2": 1.0,
    "snr_db": [0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0],
    "r1": 2.0,
    "r2": 2.0,
    "beta1": 0.01,
    "beta2": 0.01,
    "samples": 100_000,
    "max_samples": 10_000_000,
    "min_events": 100,
    "seed": 12345,
    "chunks": 16,
    "threads": 1,
    "snr_convention": "mu",
    "optimize": True,
    "search": {"resolution": 4, "depth": 1, "subsample": 20_000},
    "weights": 11,
    "rays": 9,
    "rate_cap": 8.0,
    "kinds": ["individual", "common"],
}


class ConfigError(ValueError):
    """Raised on schema violations; message carries the offending field path."""


def load_config(path: str | None = None, overrides: dict | None = None) -> dict:
    """Merge defaults <- config file <- CLI overrides, then validate."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        for k, v in user.items():
            if isinstance(v, dict) and isinstance(cfg.get(k), dict):
                cfg[k].update(v)
            else:
                cfg[k] = v
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path_str = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ConfigError(f"config field {path_str}: {exc.message}") from exc
    return cfg


def build_network(config: dict, p1: float | None = None,
                  p2: float | None = None) -> NetworkConfig:
    p1 = config["p1"] if p1 is None else p1
    p2 = config["p2"] if p2 is None else p2
    if "mean_gains" in config:
        mg = config["mean_gains"]
        gamma = config.get("geometry", {}).get("gamma", 2.4)
        return NetworkConfig.from_mean_gains(mg["mu10"], mg["mu20"], mg["mu12"],
                                             gamma=gamma, p1=p1, p2=p2)
    g = config["geometry"]
    return NetworkConfig(d10=g["d10"], d20=g["d20"], d12=g["d12"],
                         gamma=g["gamma"], p1=p1, p2=p2)


def rho_from_snr(snr_db: float, mu10: float, convention: str) -> float:
    """Per-UE power budget giving the requested UE1 average received SNR.

    convention="mu": SNR1 = 10*log10(mu10 * rho);
    convention="literal": SNR1 = 10*log10(mu10 * rho / d10**gamma), i.e. the
    path loss applied twice (a constant dB shift of the same sweep).
    """
    if convention == "mu":
        return 10.0 ** (snr_db / 10.0) / mu10
    if convention == "literal":
        return 10.0 ** (snr_db / 10.0) / (mu10 * mu10)
    raise ValueError(f"unknown SNR convention {convention!r}")


def _snr_pair(rho: float, net: NetworkConfig, convention: str) -> tuple[float, float]:
    k = 2 if convention == "literal" else 1
    return (10.0 * np.log10(net.mu10 ** k * rho),
            10.0 * np.log10(net.mu20 ** k * rho))


def _search_spec(config: dict) -> SearchSpec:
    s = config["search"]
    return SearchSpec(resolution=s["resolution"], depth=s["depth"],
                      subsample=s["subsample"])


def _estimator(config: dict, seed_tag: int) -> EstimatorConfig:
    # seed_tag keeps independent experiments on disjoint streams while
    # remaining a pure function of the config seed.
    ss = np.random.SeedSequence([config["seed"], seed_tag])
    return EstimatorConfig(master_seed=int(ss.generate_state(1)[0]),
                           samples=config["samples"], chunks=config["chunks"])


def run_rate_region(config: dict):
    """Ergodic boundary points per scheme per weight pair (Fig. 5 style)."""
    net = build_network(config)
    nw = config["weights"]
    ts = np.linspace(0.0, 1.0, nw)
    weights = [(float(1.0 - t), float(t)) for t in ts]
    spec = _search_spec(config)
    rows = []
    for scheme in config["schemes"]:
        rng = np.random.default_rng(np.random.SeedSequence([config["seed"], 1]))
        pts = ergodic_boundary_points(net, scheme, weights, config["samples"],
                                      rng, spec=spec)
        for pt in pts:
            rows.append({"scheme": scheme, "w1": pt["w1"], "w2": pt["w2"],
                         "r1": pt["r1"], "r2": pt["r2"], "value": pt["value"],
                         "samples": config["samples"], "seed": config["seed"]})
    cols = ["scheme", "w1", "w2", "r1", "r2", "value", "samples", "seed"]
    return cols, rows, False


def _sweep_point(config: dict, net: NetworkConfig, scheme: str,
                 est: EstimatorConfig):
    """Optimize (or use presets) and estimate one outage point, escalating
    the sample count until the common-outage event count is resolvable."""
    spec = _search_spec(config)
    r1, r2 = config["r1"], config["r2"]
    threads = config["threads"]
    if config["optimize"] and scheme != "sic":
        rule, bd = optimize_outage(net, scheme, r1, r2, spec=spec, est=est,
                                   objective="common", threads=threads)
    else:
        from .outage import Fd2PolicyRule, RpRule, SicRule, average_outage
        rule = {"td": TdPolicyRule(), "fd3": TdPolicyRule(fd3=True),
                "fd2": Fd2PolicyRule(), "sic": SicRule(),
                "rp": RpRule()}[scheme]
        bd = average_outage(net, rule, r1, r2, est, threads=threads)
    from .outage import average_outage
    while (bd.pc.mean * bd.pc.n < config["min_events"]
           and est.samples < config["max_samples"]):
        est = est.with_samples(min(est.samples * 10, config["max_samples"]))
        bd = average_outage(net, rule, r1, r2, est, threads=threads)
    return bd, est.samples


def run_outage_sweep(config: dict):
    """Common/individual outage vs SNR per scheme (Figs. 6-7 style)."""
    schemes = [s for s in config["schemes"] if s != "outer"]
    conv = config["snr_convention"]
    rows = []
    infeasible = False
    base = build_network(config)
    for scheme in schemes:
        for i, snr in enumerate(config["snr_db"]):
            rho = rho_from_snr(snr, base.mu10, conv)
            net = base.with_powers(rho, rho)
            est = _estimator(config, 2)
            bd, used = _sweep_point(config, net, scheme, est)
            snr1, snr2 = _snr_pair(rho, net, conv)
            if bd.pc.mean >= 0.999:
                infeasible = True
            rows.append({"scheme": scheme, "snr1_db": snr1, "snr2_db": snr2,
                         "pc": bd.pc.mean, "pc_se": bd.pc.std_error,
                         "p1": bd.p1.mean, "p1_se": bd.p1.std_error,
                         "p2": bd.p2.mean, "p2_se": bd.p2.std_error,
                         "samples": used, "seed": config["seed"]})
    cols = ["scheme", "snr1_db", "snr2_db", "pc", "pc_se",
            "p1", "p1_se", "p2", "p2_se", "samples", "seed"]
    return cols, rows, infeasible


def run_outage_region(config: dict):
    """Outage rate region boundaries per scheme and region kind (Fig. 8 style)."""
    net = build_network(config)
    ot = OutageTargets(config["beta1"], config["beta2"])
    est = _estimator(config, 3)
    spec = _search_spec(config)
    rows = []
    any_feasible = False
    for scheme in config["schemes"]:
        if scheme == "outer":
            continue
        for kind in config["kinds"]:
            pts = outage_rate_region(net, scheme, ot, est, rays=config["rays"],
                                     kind=kind, search_spec=spec,
                                     rate_cap=config["rate_cap"],
                                     threads=config["threads"])
            for pt in pts:
                any_feasible = any_feasible or pt["feasible"]
                rows.append({"scheme": scheme, "kind": kind, "phi": pt["phi"],
                             "r1": pt["r1"], "r2": pt["r2"],
                             "beta1": ot.beta1, "beta2": ot.beta2,
                             "samples": config["samples"],
                             "seed": config["seed"]})
    cols = ["scheme", "kind", "phi", "r1", "r2", "beta1", "beta2",
            "samples", "seed"]
    return cols, rows, not any_feasible


def run_case_prob(config: dict):
    """Closed-form vs Monte-Carlo transmission-case probabilities."""
    net = build_network(config)
    closed = case_probability(net)
    n = config["samples"]
    rng = np.random.default_rng(np.random.SeedSequence([config["seed"], 4]))
    cases = classify_cases(sample_blocks(net, n, rng))
    rows = []
    for case in TransmissionCase:
        p_mc = float(np.mean(cases == case))
        se = float(np.sqrt(max(p_mc * (1 - p_mc), 0.0) / n))
        rows.append({"case": int(case), "p_closed": closed[case],
                     "p_mc": p_mc, "p_mc_se": se,
                     "samples": n, "seed": config["seed"]})
    cols = ["case", "p_closed", "p_mc", "p_mc_se", "samples", "seed"]
    return cols, rows, False


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def write_csv(columns, rows, config: dict, out=None) -> str:
    """Render rows as CSV with a #-prefixed JSON config header; returns the text."""
    # threads and out are execution details: excluding them keeps the CSV
    # byte-identical across thread counts and destinations.
    cfg = {k: v for k, v in config.items() if k not in ("out", "threads")}
    lines = ["# " + json.dumps(cfg, sort_keys=True, separators=(",", ":"))]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    text = "\n".join(lines) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
    return text
