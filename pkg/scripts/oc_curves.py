#!/usr/bin/env python3
"""Write OC-versus-threshold tables for the reference presets as CSV.

Usage: python scripts/oc_curves.py [outdir]
"""

import csv
import pathlib
import sys

import numpy as np

from bayescal.calibrate import oc_curve
from bayescal.presets import list_presets, load_preset

COLUMNS = ("bp", "bcp", "bt1e", "ft1e", "pid", "for", "gamma1")


def main() -> int:
    outdir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "curves")
    outdir.mkdir(parents=True, exist_ok=True)
    grid = list(np.linspace(0.5, 0.995, 199))
    for name in list_presets():
        spec = load_preset(name)
        points = oc_curve(spec, grid)
        path = outdir / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["c", *COLUMNS])
            for c, oc in points:
                doc = oc.to_dict()
                writer.writerow([c, *[doc[k] for k in COLUMNS]])
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
