"""Map the sampled N-parabolicity verdict and the dispersion sign over an
(alpha, beta) grid, for a fixed transport vector.

    python scripts/symbol_scan.py --c 0.5 --n 11 --out scan.json
"""

from __future__ import annotations

import argparse
import json
import logging

import numpy as np

from evapfront.errors import ConvergenceError
from evapfront.symbol import SectorSpec, SymbolParams, delta_max, dispersion_root, n_parabolicity_scan

log = logging.getLogger("symbol_scan")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--c", type=float, default=0.0)
    ap.add_argument("--n", type=int, default=11, help="grid points per axis on [-1, 1]")
    ap.add_argument("--radial", type=int, default=16)
    ap.add_argument("--angular", type=int, default=32)
    ap.add_argument("--out")
    a = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    spec = SectorSpec(n_samples_radial=a.radial, n_samples_angular=a.angular)
    vals = np.linspace(-1.0, 1.0, a.n)
    rows = []
    for al in vals:
        line = []
        for be in vals:
            p = SymbolParams(al, be, (a.c,))
            rep = n_parabolicity_scan(p, spec, 0.05)
            try:
                re = dispersion_root(p, [1.0]).lam.real
            except ConvergenceError:
                re = float("nan")  # no root on the principal sheet
            rows.append({"alpha": al, "beta": be, "passed": rep.passed, "re_lambda_k1": re,
                         "delta_max": delta_max(p)})
            line.append("+" if rep.passed else ".")
        log.info("alpha=%+.2f  %s", al, " ".join(line))
    log.info("columns: beta from %.2f to %.2f; '+' = scan passed", vals[0], vals[-1])
    if a.out:
        with open(a.out, "w") as fh:
            json.dump({"c": a.c, "cells": rows}, fh, indent=1)


if __name__ == "__main__":
    main()
