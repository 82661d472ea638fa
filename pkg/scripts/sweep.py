"""Quantized optimum K_n of the fold instance against n, as CSV on stdout."""
import argparse
import csv
import sys
import time
from fractions import Fraction

from osctransport.fixtures import fold_instance
from osctransport.solver import solve

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=Fraction, default=Fraction(1, 10))
    ap.add_argument("--atoms", type=int, nargs="*", default=[4, 8, 12, 16, 20])
    ap.add_argument("--cells", type=int, nargs="*", default=[4, 8, 12, 16])
    a = ap.parse_args()
    inst = fold_instance(a.delta)
    w = csv.writer(sys.stdout)
    w.writerow(["mode", "n", "K", "K_float", "seconds", "search"])
    for mode, ns in (("atoms", a.atoms), ("cells", a.cells)):
        for n in ns:
            t = time.perf_counter()
            res = solve(inst, n=n, mode=mode)
            w.writerow([mode, n, res.K, f"{float(res.K):.4f}", f"{time.perf_counter() - t:.2f}",
                        res.stats.get("search", "")])
            sys.stdout.flush()
