"""Ground-state energy expansion, remainder estimates and bound formulas.

All formulas here are pure arithmetic on inputs produced by the other
modules. Energies are in physical units (``hbar = e = mu = 1``).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import phase_space as ps
from .errors import CoefficientUnset, MissingScottEntry, RegimeViolation
from .params import PhysicalSystem, atomic_rescale
from .tf_atom import RadialGrid, TFSolution, density_integral, solve_tf_atom, tf_energy

# Exchange-type coefficients for the spin-summed density (q = 2): the Dirac
# term -(3/4)(3/pi)^{1/3} int rho^{4/3}, and the Schwinger term as 2/9 of it.
DIRAC_DEFAULT = -0.75 * (3.0 / math.pi) ** (1.0 / 3.0)
SCHWINGER_DEFAULT = 2.0 / 9.0 * DIRAC_DEFAULT


# Scott table -------------------------------------------------------------------


@dataclass(frozen=True)
class ScottEntry:
    kappa_arg: float
    beta_arg: float
    S: float
    err: float = 0.0


@dataclass
class ScottLookup:
    S: float
    err: float
    interpolated: bool
    source: tuple


@dataclass
class ScottTable:
    entries: list[ScottEntry] = field(default_factory=list)
    tol: float = 1e-12

    @classmethod
    def read_csv(cls, path: str | Path) -> "ScottTable":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls([ScottEntry(float(r["kappa_arg"]), float(r["beta_arg"]), float(r["S"]), float(r.get("err") or 0.0)) for r in rows])

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kappa_arg", "beta_arg", "S", "err"])
            for e in sorted(self.entries, key=lambda e: (e.kappa_arg, e.beta_arg)):
                w.writerow([repr(e.kappa_arg), repr(e.beta_arg), repr(e.S), repr(e.err)])

    def lookup(self, kappa_arg: float, beta_arg: float) -> ScottLookup:
        """Exact entry, else nearest ``kappa_arg`` row with linear interpolation in ``beta_arg``."""
        if not self.entries:
            raise MissingScottEntry("empty Scott table")
        for e in self.entries:
            if abs(e.kappa_arg - kappa_arg) <= self.tol and abs(e.beta_arg - beta_arg) <= self.tol:
                return ScottLookup(e.S, e.err, False, ((e.kappa_arg, e.beta_arg),))
        kappas = sorted({e.kappa_arg for e in self.entries})
        k = min(kappas, key=lambda x: abs(x - kappa_arg))
        row = sorted((e for e in self.entries if e.kappa_arg == k), key=lambda e: e.beta_arg)
        bs = [e.beta_arg for e in row]
        if not bs[0] - self.tol <= beta_arg <= bs[-1] + self.tol or len(row) < 2:
            raise MissingScottEntry(f"no entry covers (kappa_arg={kappa_arg}, beta_arg={beta_arg})")
        j = min(max(int(np.searchsorted(bs, beta_arg)), 1), len(bs) - 1)
        lo, hi = row[j - 1], row[j]
        t = (beta_arg - lo.beta_arg) / (hi.beta_arg - lo.beta_arg)
        S = (1 - t) * lo.S + t * hi.S
        err = max(lo.err, hi.err)
        return ScottLookup(S, err, True, ((lo.kappa_arg, lo.beta_arg), (hi.kappa_arg, hi.beta_arg)))


# energy assembly ----------------------------------------------------------------


@dataclass
class Coefficients:
    c_dirac: float | None = DIRAC_DEFAULT
    c_schwinger: float | None = SCHWINGER_DEFAULT
    dirac: bool = True
    schwinger: bool = True
    rct: bool = True
    rct_scheme: str = "asymptotic"

    @classmethod
    def off(cls) -> "Coefficients":
        return cls(dirac=False, schwinger=False, rct=False)


@dataclass
class EnergyBreakdown:
    E_TF: float
    scott_sum: float
    dirac: float
    schwinger: float
    rct: float
    total: float
    remainder_R1: float
    remainder_R2: float
    remainder_scale: float  # Z^{4/3}
    provenance: list = field(default_factory=list)

    @property
    def interpolated(self) -> bool:
        return any(p["interpolated"] for p in self.provenance)

    def to_dict(self) -> dict:
        return asdict(self)


def remainder_terms(h: float, a: float, kappa: float) -> tuple[float, float]:
    """``(R1, R2)`` as piecewise functions of ``(h, a, kappa)``; ``a = inf`` allowed."""
    if not h > 0:
        raise RegimeViolation("h must be positive")
    if a < h * h:
        raise RegimeViolation(f"a = {a} below h^2 = {h * h}")
    mag = kappa * abs(math.log(kappa)) ** (1.0 / 3.0) if kappa > 0 else 0.0
    if a >= 1:
        R1 = 1.0 / h + mag * h ** (-4.0 / 3.0)
    else:
        R1 = a**-0.5 / h + mag * a ** (-1.0 / 3.0) * h ** (-4.0 / 3.0)
    if a >= abs(math.log(h)) ** (1.0 / 3.0):
        R2 = kappa / (h * h) * a**-3.0
    else:
        den = abs(math.log(h * h / a))
        R2 = kappa / (h * h) / den if den > 0 else (math.inf if kappa > 0 else 0.0)
    return R1, R2


def _charge_groups(sys: PhysicalSystem):
    """Distinct charges with the electron number each atom gets in the superposition."""
    Ztot = sum(sys.Z)
    groups: dict[float, int] = {}
    for z in sys.Z:
        groups[z] = groups.get(z, 0) + 1
    return {z: (count, sys.N * z / Ztot) for z, count in groups.items()}


def solve_atoms(sys: PhysicalSystem, grid_n: int = 2001, law=None) -> dict[float, TFSolution]:
    """One non-relativistic TF solution per distinct charge (superposition limit)."""
    out = {}
    for z, (_, n_e) in _charge_groups(sys).items():
        lw = law or ps.PressureLaw(ps.NONREL, q=sys.q)
        out[z] = solve_tf_atom(z, n_e, lw, RadialGrid.for_atom(z, n=grid_n))
    return out


def rct_integral(sol: TFSolution, beta: float, scheme: str = "asymptotic") -> float:
    """Energy contribution ``-int (P_rel - P_nonrel)(W + nu)`` with the counterterm removed."""
    if beta <= 0:
        return 0.0
    reg, _ = ps.rel_correction_integrand(sol.W + sol.nu, beta, sol.law.q, 1.0, scheme)
    return -sol.grid.integrate(reg)


def assemble_energy(
    sys: PhysicalSystem,
    tf: dict[float, TFSolution],
    scott_table: ScottTable,
    coeffs: Coefficients | None = None,
    E_TF_override: float | None = None,
    molecular_correction: float = 0.0,
) -> EnergyBreakdown:
    c = coeffs or Coefficients()
    groups = _charge_groups(sys)
    missing = [z for z in groups if z not in tf]
    if missing and E_TF_override is None:
        raise MissingScottEntry(f"no TF solution for charges {missing}")
    if c.dirac and c.c_dirac is None:
        raise CoefficientUnset("Dirac coefficient is enabled but unset")
    if c.schwinger and c.c_schwinger is None:
        raise CoefficientUnset("Schwinger coefficient is enabled but unset")

    E_TF = 0.0
    dirac = schwinger = rct = 0.0
    for z, (count, _) in sorted(groups.items()):
        if z in tf:
            sol = tf[z]
            E_TF += count * tf_energy(sol).total
            i43 = density_integral(sol, 4.0 / 3.0)
            if c.dirac:
                dirac += count * c.c_dirac * i43
            if c.schwinger:
                schwinger += count * c.c_schwinger * i43
            if c.rct:
                rct += count * rct_integral(sol, sys.beta, c.rct_scheme)
    if E_TF_override is not None:
        E_TF = E_TF_override
    E_TF += molecular_correction

    scott_sum = 0.0
    provenance = []
    for z in sys.Z:
        look = scott_table.lookup(sys.alpha * z, sys.beta * z)
        scott_sum += 2 * z * z * look.S
        provenance.append({"Z": z, "kappa_arg": sys.alpha * z, "beta_arg": sys.beta * z, "S": look.S,
                           "err": look.err, "interpolated": look.interpolated, "source": list(look.source)})

    total = E_TF + scott_sum + dirac + schwinger + rct
    reg = atomic_rescale(sys)
    R1, R2 = remainder_terms(reg.h, reg.a, reg.kappa)
    return EnergyBreakdown(E_TF, scott_sum, dirac, schwinger, rct, total, R1, R2, reg.Z ** (4.0 / 3.0), provenance)


# bounds -------------------------------------------------------------------------


@dataclass
class BoundConstants:
    C: float = 1.0
    delta: float = 0.1
    delta_prime: float = 0.1
    C0: float = 1.0
    C1: float = 1.0
    b: float | None = None


@dataclass
class BoundReport:
    Z: float
    N: float
    d: float
    alpha: float
    beta: float
    d_branch: str
    excess_charge: float
    excess_charge_margin: float
    excess_charge_separated: float
    ionization_fixed: float
    ionization_free: float
    ionization_negative_ion: float | None
    stability_threshold: float
    distance_lower_bound: float
    constants: dict
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _pow(x, p):
    # x^p with the conventions 0^p = 0 (p > 0), 0^p = inf (p < 0), inf^p likewise
    if x == 0:
        return 0.0 if p > 0 else math.inf
    return x**p


def bounds_report(sys: PhysicalSystem, k: BoundConstants | None = None) -> BoundReport:
    """Evaluate the excess-charge, ionization, stability and distance bounds.

    ``Z`` is the total nuclear charge. Report only: nothing is asserted.
    """
    k = k or BoundConstants()
    Z, N, a = sum(sys.Z), sys.N, sys.alpha
    d = sys.min_distance()
    aZ = a * Z
    dz = d * Z ** (1 / 3)
    close = d <= Z ** (-1 / 3)
    near_far = 1.0 if close else Z**-k.delta + _pow(dz, -k.delta) + _pow(aZ, k.delta)
    excess = k.C * Z ** (5 / 7) * near_far
    sep = Z ** (5 / 7) * (Z**-k.delta + _pow(aZ, k.delta))
    ion_free = Z ** (20 / 21) * (Z**-k.delta_prime + _pow(aZ, k.delta_prime))
    notes = []
    neg_ion = None
    if N <= Z - k.C0 * Z ** (5 / 7):
        fac = 1.0 if close else Z**-k.delta + _pow(dz, -k.delta)
        neg_ion = k.C * (Z - N) ** (17 / 18) * Z ** (5 / 18) * fac
        if k.b is None:
            notes.append("ionization bound for N <= Z - C0 Z^{5/7} assumes b >= C1 (N - Z)^{-1/3}; b not supplied")
        else:
            notes.append(f"b = {k.b} supplied; assumption b >= C1 (N - Z)^(-1/3) not checked (N - Z < 0)")
    dist = min(Z ** (-5 / 21 + k.delta), Z ** (-5 / 21) * _pow(aZ, -k.delta), _pow(a, -0.25) * Z**-0.5)
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    return BoundReport(
        Z=Z, N=N, d=d, alpha=a, beta=sys.beta,
        d_branch="d<=Z^-1/3" if close else "d>=Z^-1/3",
        excess_charge=excess,
        excess_charge_margin=excess - max(N - Z, 0.0),
        excess_charge_separated=sep,
        ionization_fixed=k.C * Z ** (20 / 21),
        ionization_free=ion_free,
        ionization_negative_ion=neg_ion,
        stability_threshold=sep,
        distance_lower_bound=dist,
        constants=asdict(k),
        warnings=notes,
    )
