#!/usr/bin/env python3
"""Scan PID - FT1E across design-prior prevalences and report the crossing
points where the PID stops exceeding the Frequentist Type I error.

Usage: python scripts/pid_t1e_scan.py [sigma_d] [n_T]
"""

import sys

import numpy as np

from bayescal.design import DecisionRule, DesignSpec, NormalPrior
from bayescal.theory import difference_scan


def main() -> int:
    sigma_d = float(sys.argv[1]) if len(sys.argv) > 1 else 0.15
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 74
    template = DesignSpec(
        endpoint="continuous_single",
        rule=DecisionRule(margin=0.0, c=None, direction="greater"),
        analysis_prior=NormalPrior(0.0, 1e3),
        design_prior=NormalPrior(0.0, sigma_d),
        n_t=n, sigma_t=1.0,
    )
    grid = list(np.linspace(0.02, 0.98, 97))
    for c in (0.90, 0.95, 0.975):
        scan = difference_scan(template, c, sigma_d, grid)
        cross = ", ".join(f"{x:.4f}" for x in scan.crossings) or "none"
        print(f"c = {c}: crossing prevalence(s): {cross}")
        for point in scan.points[:: len(scan.points) // 8]:
            print(f"    gamma1={point.gamma1:.3f}  PID={point.pid:.4f}  "
                  f"FT1E={point.ft1e:.4f}  diff={point.difference:+.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
