"""Empirical checks of magnetic Daubechies-type trace inequalities on lattices.

The universal constants in these inequalities are not known numerically, so
each check reports ``ratio = -lhs / rhs_sum`` and ensembles track the
largest ratio seen. Lattice units: ``h = 1``; the Coulomb term takes the
value ``2 / s`` at the nucleus site.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import GammaSupercritical, PreconditionViolation
from .params import CRITICAL_COUPLING
from .sgf import curl_matrix
from .spectral.lattice import GaugeLattice, build_pauli_lattice, kinetic_function, relativistic_hamiltonian, trace_neg
from .spectral.scott import cutoff


def eta(gamma: float) -> float:
    """``(1 - (pi gamma / 2)^2) / 10``."""
    return (1 - (math.pi * gamma / 2) ** 2) / 10


@dataclass
class InequalityInstance:
    seed: int
    shape: tuple[int, int, int]
    spacing: float
    U: np.ndarray
    A: np.ndarray
    gamma: float
    r: float | None = None  # Coulomb variant only
    coulomb: float = 1.0
    periodic: tuple[bool, bool, bool] = (False, False, False)

    def lattice(self) -> GaugeLattice:
        return GaugeLattice(self.shape, self.spacing, A=self.A, periodic=self.periodic)


@dataclass
class InequalityReport:
    seed: int
    variant: str
    gamma: float
    lhs: float
    rhs_terms: dict
    ratio: float
    r: float | None = None
    eta: float | None = None
    coulomb_site_value: float | None = None

    def to_row(self) -> dict:
        row = {"seed": self.seed, "variant": self.variant, "gamma": self.gamma, "r": self.r, "lhs": self.lhs, "ratio": self.ratio}
        row.update(self.rhs_terms)
        return row


def _field_energy(lat: GaugeLattice) -> float:
    c = curl_matrix(lat) @ lat.A.ravel()
    return float(lat.cell_volume * np.sum(c * c))


def _integrals(lat: GaugeLattice, U, gamma):
    Up = np.clip(U, 0.0, None)
    dv = lat.cell_volume
    return float(dv * np.sum(Up**2.5)), float(dv * np.sum(Up**4)), _field_energy(lat)


def _ratio(lhs, total):
    if total == 0:
        return 0.0 if lhs == 0 else math.inf
    return -lhs / total


def daubechies_check(inst: InequalityInstance) -> InequalityReport:
    """Plain (non-Coulomb) inequality; the separate field energy is reported but not in the sum."""
    lat = inst.lattice()
    H = relativistic_hamiltonian(build_pauli_lattice(lat), inst.U, inst.gamma).H
    lhs = trace_neg(H).trace
    i52, i4, fe = _integrals(lat, inst.U, inst.gamma)
    terms = {
        "U52": i52,
        "gamma3_U4": inst.gamma**3 * i4,
        "cross": fe**0.75 * i4**0.25,
        "field_energy": fe,
    }
    total = terms["U52"] + terms["gamma3_U4"] + terms["cross"]
    return InequalityReport(inst.seed, "plain", inst.gamma, lhs, terms, _ratio(lhs, total))


def coulomb_potential(lat: GaugeLattice, Z: float = 1.0) -> np.ndarray:
    x = lat.coordinates()
    r = np.sqrt(np.sum(x * x, axis=0))
    out = np.empty_like(r)
    nz = r > 0
    out[nz] = Z / r[nz]
    out[~nz] = Z * 2.0 / lat.spacing
    return out


def coulomb_daubechies_check(inst: InequalityInstance) -> InequalityReport:
    g = inst.gamma
    if not 0 < g < CRITICAL_COUPLING:
        raise GammaSupercritical(f"gamma = {g} outside (0, 2/pi)")
    if inst.r is None or inst.r <= 0:
        raise PreconditionViolation("Coulomb variant needs a cutoff radius r > 0")
    lat = inst.lattice()
    Vc = coulomb_potential(lat, inst.coulomb)
    H = relativistic_hamiltonian(build_pauli_lattice(lat), Vc + inst.U, g).H.matrix
    x = lat.coordinates()
    phi = cutoff(np.sqrt(np.sum(x * x, axis=0)) / inst.r).ravel()
    phi2 = np.concatenate([phi, phi])
    lhs = trace_neg(phi2[:, None] * H * phi2[None, :]).trace
    e = eta(g)
    i52, i4, fe = _integrals(lat, inst.U, g)
    terms = {
        "field": e**-1.5 * fe,
        "r3": e**-3 * inst.r**3,
        "U52": e**-1.5 * i52,
        "gamma3_U4": e**-3 * g**3 * i4,
        "cross": fe**0.75 * i4**0.25,
    }
    return InequalityReport(
        inst.seed, "coulomb", g, lhs, terms, _ratio(lhs, sum(terms.values())),
        r=inst.r, eta=e, coulomb_site_value=2.0 / lat.spacing,
    )


def pauli_limit_check(L, gamma: float, slack: float = 1e-12) -> tuple[float, float]:
    """``(||f_gamma(L) - L/2||, gamma^2 ||L||^2 / 8)``; the bound is asserted."""
    lam = np.linalg.eigvalsh(np.asarray(L))
    lam = np.clip(lam, 0.0, None)
    nrm = float(lam.max()) if lam.size else 0.0
    if gamma**2 * nrm > 1:
        raise PreconditionViolation("gamma^2 ||L|| > 1")
    dev = float(np.max(np.abs(kinetic_function(lam, gamma) - 0.5 * lam))) if lam.size else 0.0
    bound = gamma**2 * nrm**2 / 8
    if dev > bound + slack * max(1.0, bound):
        raise AssertionError(f"Pauli-limit bound violated: {dev} > {bound}")
    return dev, bound


@dataclass
class SamplerConfig:
    n: int = 6
    spacing: float = 0.5
    max_bumps: int = 3
    amplitude: tuple[float, float] = (0.0, 5.0)
    width: tuple[float, float] = (0.3, 0.8)
    field_energy: tuple[float, float] = (0.0, 10.0)
    k_max: int = 1
    gammas: tuple[float, ...] = (0.1, 0.3, 0.5)
    radii: tuple[float, ...] = (0.75, 1.0, 1.25)


def instance_rng(base_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream: the instance index is part of the key."""
    return np.random.Generator(np.random.Philox(key=[base_seed, index]))


def _smooth_field(lat, rng, k_max):
    x = lat.coordinates(centered=False)
    Lbox = np.array(lat.shape) * lat.spacing
    A = np.zeros((3, *lat.shape))
    for mu in range(3):
        for k in np.ndindex(*(k_max + 1,) * 3):
            if sum(k) == 0:
                continue
            phase = sum(2 * np.pi * k[i] * x[i] / Lbox[i] for i in range(3))
            A[mu] += rng.standard_normal() * np.cos(phase) + rng.standard_normal() * np.sin(phase)
    return A


def sample_instance(base_seed: int, index: int, variant: str = "plain", cfg: SamplerConfig | None = None) -> InequalityInstance:
    c = cfg or SamplerConfig()
    rng = instance_rng(base_seed, index)
    lat = GaugeLattice.cube(c.n, c.spacing, periodic=(False,) * 3)
    x = lat.coordinates()
    half = 0.5 * c.n * c.spacing
    U = np.zeros(lat.shape)
    for _ in range(rng.integers(1, c.max_bumps + 1)):
        a = rng.uniform(*c.amplitude)
        w = rng.uniform(*c.width)
        ctr = rng.uniform(-0.5 * half, 0.5 * half, size=3)
        U += a * np.exp(-sum((x[i] - ctr[i]) ** 2 for i in range(3)) / (2 * w * w))
    A = _smooth_field(lat, rng, c.k_max)
    fe = _field_energy(lat.with_fields(A=A))
    target = rng.uniform(*c.field_energy)
    A = A * math.sqrt(target / fe) if fe > 0 else A
    if variant == "plain":
        gamma = float(rng.choice([1.0, 0.1, 0.01, 0.5]))
        r = None
    else:
        gamma = float(rng.choice(c.gammas))
        r = float(rng.choice(c.radii))
    return InequalityInstance(index, lat.shape, c.spacing, U, A, gamma, r)


@dataclass
class EnsembleSummary:
    variant: str
    base_seed: int
    samples: int
    max_ratio: float
    argmax_seed: int
    all_finite: bool
    reports: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reports"] = [r.to_row() for r in self.reports]
        return d


def run_ensemble(variant: str, samples: int, base_seed: int = 0, threads: int = 1, cfg: SamplerConfig | None = None) -> EnsembleSummary:
    check = daubechies_check if variant == "plain" else coulomb_daubechies_check

    def one(i):
        return check(sample_instance(base_seed, i, variant, cfg))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            reports = list(pool.map(one, range(samples)))
    else:
        reports = [one(i) for i in range(samples)]
    ratios = np.array([r.ratio for r in reports])
    k = int(np.argmax(ratios))
    return EnsembleSummary(variant, base_seed, samples, float(ratios[k]), reports[k].seed, bool(np.all(np.isfinite(ratios))), reports)


def load_baseline(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def check_against_baseline(summary: EnsembleSummary, baseline: dict, factor: float = 1.1) -> bool:
    """True while the new maximum stays within ``factor`` times the frozen one."""
    return summary.max_ratio <= factor * baseline[summary.variant]["max_ratio"]
