"""Self-generated-field descent on the Gaussian-bump benchmark over a kappa sweep.

    python3 scripts/sgf_benchmark.py --n 6 --kappas 1e-6 0.05 0.1 0.2
"""

import argparse
import time

import numpy as np

from relscott.sgf import FieldConfiguration, energy_functional, gaussian_bump, minimize, random_smooth_field
from relscott.spectral import GaugeLattice


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--spacing", type=float, default=0.5)
    p.add_argument("--amplitude", type=float, default=8.0)
    p.add_argument("--width", type=float, default=0.6)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--kappas", type=float, nargs="+", default=[1e-6, 0.05, 0.1, 0.2])
    p.add_argument("--init", type=float, default=0.3, help="size of the random initial field")
    p.add_argument("--seed", type=int, default=7)
    a = p.parse_args()
    lat = GaugeLattice.cube(a.n, a.spacing, periodic=(False,) * 3)
    V = gaussian_bump(lat, a.amplitude, a.width)
    A0 = random_smooth_field(lat, np.random.default_rng(a.seed), a.init)
    print(f"{'kappa':>8} {'E(A0)':>12} {'E(A*)':>12} {'E(A*)-E(0)':>12} {'|curl A*|^2':>12} {'residual':>9} {'steps':>5} {'s':>5}")
    for k in a.kappas:
        cfg = FieldConfiguration(lat.with_fields(A=A0), k)
        E0 = energy_functional(FieldConfiguration(lat, k), V, a.gamma)
        t = time.perf_counter()
        res = minimize(cfg, V, a.gamma)
        print(f"{k:8.2g} {res.history[0][1]:12.6f} {res.energy:12.6f} {res.energy - E0:12.2e} "
              f"{cfg.field_energy(res.A):12.2e} {res.residual:9.1e} {len(res.history) - 1:5d} {time.perf_counter() - t:5.1f}")


if __name__ == "__main__":
    main()
