"""Closed-form phase-space laws against quadrature, plus the regularized RCT integrand.

    python3 scripts/phase_space_check.py
"""

import numpy as np

from relscott import phase_space as ps


def main():
    w = np.geomspace(1e-3, 1e3, 60)
    for law in (ps.PressureLaw(ps.NONREL), ps.PressureLaw(ps.REL, 1.0), ps.PressureLaw(ps.REL, 0.1)):
        d = max(abs(ps.weyl_density(x, law) / ps.weyl_density_quadrature(x, law) - 1) for x in w)
        P = max(abs(ps.weyl_pressure(x, law) / ps.weyl_pressure_quadrature(x, law) - 1) for x in w)
        print(f"{law.kind:7s} gamma={law.gamma:<4g} density {d:.1e} pressure {P:.1e}")
    print(f"\n{'w':>10} " + " ".join(f"{s:>14}" for s in ps.COUNTERTERM_SCHEMES))
    for x in np.geomspace(1e-2, 1e6, 9):
        vals = [ps.rel_correction_integrand(x, 0.1, scheme=s)[0] for s in ps.COUNTERTERM_SCHEMES]
        print(f"{x:10.3g} " + " ".join(f"{v:14.6g}" for v in vals))


if __name__ == "__main__":
    main()
