"""Command-line entry point.

Subcommands mirror the experiment drivers: rate-region, outage-sweep,
outage-region, case-prob.  A JSON config file provides the full experiment
description; every flag overrides the corresponding config field.

Exit codes: 0 success, 2 config validation error, 3 infeasible-target report
(the CSV is still written in that case).
"""

from __future__ import annotations

import argparse
import sys

from . import experiments
from .experiments import ConfigError


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="d2dcoop",
        description="Rate-region and outage experiments for the cooperative "
                    "D2D uplink schemes.")
    sub = top.add_subparsers(dest="command", required=True)
    runners = {
        "rate-region": experiments.run_rate_region,
        "outage-sweep": experiments.run_outage_sweep,
        "outage-region": experiments.run_outage_region,
        "case-prob": experiments.run_case_prob,
    }
    for name, fn in runners.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.set_defaults(runner=fn)
        p.add_argument("--config", metavar="PATH",
                       help="JSON experiment config (defaults mirror the "
                            "built-in presets)")
        p.add_argument("--seed", type=int, metavar="U64")
        p.add_argument("--samples", type=int, metavar="N")
        p.add_argument("--out", metavar="PATH",
                       help="output CSV path ('-' or omitted: stdout)")
        p.add_argument("--snr-convention", choices=["mu", "literal"],
                       dest="snr_convention")
        p.add_argument("--threads", type=int, metavar="N")
        p.add_argument("--schemes", nargs="+", metavar="SCHEME")
        p.add_argument("--snr-db", nargs="+", type=float, dest="snr_db",
                       metavar="DB")
        p.add_argument("--r1", type=float)
        p.add_argument("--r2", type=float)
        p.add_argument("--beta1", type=float)
        p.add_argument("--beta2", type=float)
        p.add_argument("--rays", type=int)
        p.add_argument("--weights", type=int)
        p.add_argument("--no-optimize", action="store_const", const=False,
                       dest="optimize",
                       help="use the fixed preset parameters instead of the "
                            "grid search")
    return top


_OVERRIDE_KEYS = ("seed", "samples", "out", "snr_convention", "threads",
                  "schemes", "snr_db", "r1", "r2", "beta1", "beta2",
                  "rays", "weights", "optimize")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    try:
        config = experiments.load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    cols, rows, infeasible = args.runner(config)
    experiments.write_csv(cols, rows, config, out=config.get("out"))
    if infeasible:
        print("infeasible targets: no operating point met the requested "
              "rates/outage targets", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
