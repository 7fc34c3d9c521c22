"""Scott coefficient S(0, beta) over a beta sweep, with the hydrogen oracle at beta = 0.

    python3 scripts/scott_sweep.py --betas 0 0.05 0.1 0.2 --out scott_sweep.csv
"""

import argparse
import csv
import time

from relscott.spectral.hydrogen import hydrogen_scott_differences
from relscott.spectral.scott import ScottProtocol, extrapolate, scott_estimate


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--betas", type=float, nargs="+", default=[0.0, 0.05, 0.1])
    p.add_argument("--Z", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=4)
    p.add_argument("--out", default="scott_sweep.csv")
    a = p.parse_args()
    proto = ScottProtocol(threads=a.threads)
    oracle = extrapolate(proto.radii, hydrogen_scott_differences(proto.radii), proto.fit_exponent, proto.fit_points)[0] / 2
    print(f"hydrogen oracle S(0,0) = {oracle:.6f}")
    rows = []
    for beta in a.betas:
        t = time.perf_counter()
        est = scott_estimate(a.Z, beta, proto, strict=False)
        rows.append((beta * a.Z, est.S, est.error, est.converged))
        print(f"Z beta = {beta * a.Z:<6g} S = {est.S:.6f} +- {est.error:.4f} converged={est.converged} "
              f"({time.perf_counter() - t:.1f} s)")
    with open(a.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta_arg", "S", "err", "converged"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
