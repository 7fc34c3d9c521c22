"""Thomas-Fermi energies of neutral atoms against the Z^{7/3} law.

    python3 scripts/tf_scaling.py --Z 1 2 5 10 20 50
"""

import argparse

from relscott import phase_space as ps
from relscott.tf_atom import RadialGrid, solve_tf_atom, solve_universal_tf, tf_energy, universal_energy_constant


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--Z", type=float, nargs="+", default=[1, 2, 5, 10, 20, 50])
    p.add_argument("--points", type=int, default=2001)
    a = p.parse_args()
    const = universal_energy_constant(solve_universal_tf())
    print(f"universal constant {const:.10f}")
    print(f"{'Z':>6} {'E_TF':>16} {'E/Z^(7/3)':>14} {'rel.dev':>10} {'gap':>10}")
    law = ps.PressureLaw(ps.NONREL)
    for Z in a.Z:
        e = tf_energy(solve_tf_atom(Z, Z, law, RadialGrid.for_atom(Z, n=a.points)))
        c = e.total / Z ** (7 / 3)
        print(f"{Z:6g} {e.total:16.8f} {c:14.10f} {c / const - 1:10.2e} {e.primal_dual_gap:10.2e}")


if __name__ == "__main__":
    main()
