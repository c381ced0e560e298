"""Closed-form transmission-case probabilities vs Monte-Carlo frequencies.

The link-order comparison (inter-UE vs direct) selects one of four
transmission cases per fading block; for independent Rayleigh links the
case probabilities are products of mu-ratios.

Run:  python3 demos/case_probabilities.py
"""

import numpy as np

from d2dcoop import NetworkConfig, case_probability, classify_cases, sample_blocks

cfg = NetworkConfig(d10=20.0, d20=30.0, d12=12.0, gamma=2.4, p1=1.0, p2=1.0)
closed = case_probability(cfg)
cases = classify_cases(sample_blocks(cfg, 1_000_000, np.random.default_rng(0)))

print("case  closed-form  monte-carlo")
for case, p in closed.items():
    print(f"{int(case):>4}  {p:11.4f}  {np.mean(cases == case):11.4f}")
