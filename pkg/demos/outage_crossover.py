"""Common-outage crossover: cooperation beats concurrent SIC at high SNR.

Sweeps the UE1 received SNR with target rates R1 = R2 = 2 bits/channel use,
re-optimizing the TD scheme's splits per point. At low SNR the cooperative
scheme pays for its exchange phase; past the crossover its diversity
advantage takes over.

Run:  python3 demos/outage_crossover.py
"""

import numpy as np

from d2dcoop import EstimatorConfig, NetworkConfig, SearchSpec, optimize_outage

base = NetworkConfig(d10=20.0, d20=30.0, d12=12.0, gamma=2.4, p1=1.0, p2=1.0)
spec = SearchSpec(resolution=3, depth=1, subsample=10_000)

print("snr1_db    td_pc      sic_pc")
for snr in (8.0, 12.0, 16.0, 20.0, 24.0, 28.0):
    rho = 10.0 ** (snr / 10.0) / base.mu10
    net = base.with_powers(rho, rho)
    est = EstimatorConfig(master_seed=7, samples=50_000)
    _, td = optimize_outage(net, "td", 2.0, 2.0, spec=spec, est=est)
    _, sic = optimize_outage(net, "sic", 2.0, 2.0, spec=spec, est=est)
    mark = "  <- TD ahead" if td.pc.mean < sic.pc.mean else ""
    print(f"{snr:7.1f}  {td.pc.mean:9.4g}  {sic.pc.mean:9.4g}{mark}")
