"""Self-generated magnetic field: energy, exact gradient and descent.

The functional on a lattice is

    E(A) = Tr(H_A^-) + (1 / kappa h^2) * s^3 * sum |curl A|^2,
    H_A = f_gamma(L_A) - V,   L_A = M_A^2,   M_A = sigma . pi_A.

With ``S = sqrt(gamma^2 L + 1)`` and ``f = (S - 1) / gamma^2``, first-order
perturbation gives ``d Tr(H^-) = Tr(dL X)`` where ``X`` solves the
Sylvester equation ``S X + X S = P``, ``P = theta(-H)``; in the eigenbasis
of ``S`` this is ``X_ij = P_ij / (s_i + s_j)``. Since ``dL = dM M + M dM``
the trace becomes ``Tr(dM Y)`` with ``Y = M X + X M``. At ``gamma = 0`` the
same formula holds with ``s_i = 1``.

Gradients are taken with respect to the lattice L^2 product
``<a, b> = s^3 sum a . b``, so a directional derivative is ``s^3 <G, dA>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import GapViolation, LineSearchFailure, PreconditionViolation
from .spectral.lattice import (
    PAULI,
    GaugeLattice,
    build_pauli_lattice,
    relativistic_hamiltonian,
)

log = logging.getLogger(__name__)


def _forward_difference(lat: GaugeLattice, mu: int) -> sparse.csr_matrix:
    src, dst, mask = lat.links(mu)
    n = lat.sites
    D = sparse.csr_matrix(
        (np.concatenate([np.ones(src.size), -np.ones(src.size)]),
         (np.concatenate([src, src]), np.concatenate([dst, src]))),
        shape=(n, n),
    )
    return D / lat.spacing


def curl_matrix(lat: GaugeLattice) -> sparse.csr_matrix:
    """Forward-difference curl acting on the flattened ``(3, *shape)`` field."""
    D = [_forward_difference(lat, mu) for mu in range(3)]
    Z = sparse.csr_matrix((lat.sites, lat.sites))
    return sparse.bmat(
        [[Z, -D[2], D[1]], [D[2], Z, -D[0]], [-D[1], D[0], Z]], format="csr"
    )


@dataclass
class FieldConfiguration:
    lat: GaugeLattice
    kappa: float
    h: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise PreconditionViolation("kappa must be positive")
        self._curl = curl_matrix(self.lat)

    @property
    def A(self) -> np.ndarray:
        return self.lat.A

    @property
    def penalty_prefactor(self) -> float:
        return 1.0 / (self.kappa * self.h**2)

    def curl(self, A=None) -> np.ndarray:
        A = self.A if A is None else A
        return (self._curl @ A.ravel()).reshape(3, *self.lat.shape)

    def field_energy(self, A=None) -> float:
        """``int |curl A|^2`` by lattice quadrature."""
        return float(self.lat.cell_volume * np.sum(self.curl(A) ** 2))

    def penalty(self, A=None) -> float:
        return self.penalty_prefactor * self.field_energy(A)

    def penalty_gradient(self, A=None) -> np.ndarray:
        """L^2 gradient of the penalty: ``(2 / kappa h^2) curl^T curl A``."""
        A = self.A if A is None else A
        cc = self._curl.T @ (self._curl @ A.ravel())
        return 2 * self.penalty_prefactor * cc.reshape(A.shape)

    def with_A(self, A) -> "FieldConfiguration":
        out = FieldConfiguration.__new__(FieldConfiguration)
        out.lat, out.kappa, out.h, out._curl = self.lat.with_fields(A=A), self.kappa, self.h, self._curl
        return out


@dataclass
class GradientReport:
    Phi: np.ndarray  # L^2 gradient of Tr(H^-), shape (3, *shape)
    G: np.ndarray  # full gradient
    energy: float
    trace: float
    penalty: float
    min_gap: float

    @staticmethod
    def _norm(a, cell):
        return float(np.sqrt(cell * np.sum(a * a)))

    def residual(self, cell: float = 1.0) -> float:
        """``||G|| / max(1, ||Phi||)``."""
        return self._norm(self.G, cell) / max(1.0, self._norm(self.Phi, cell))


def _spectral_state(cfg: FieldConfiguration, V, gamma, gap_rel):
    Lop = build_pauli_lattice(cfg.lat, cfg.h)
    rh = relativistic_hamiltonian(Lop, V, gamma)
    lam, Q = np.linalg.eigh(rh.H.matrix)
    scale = max(1.0, float(np.max(np.abs(lam))))
    gap = float(np.min(np.abs(lam))) if lam.size else np.inf
    if gap_rel is not None and gap < gap_rel * scale:
        raise GapViolation(f"eigenvalue within {gap:.3g} of 0")
    return Lop, rh, lam, Q, gap


def energy_functional(cfg: FieldConfiguration, V, gamma: float) -> float:
    _, _, lam, _, _ = _spectral_state(cfg, V, gamma, None)
    return float(np.sum(lam[lam < 0])) + cfg.penalty()


def phi_gradient(cfg: FieldConfiguration, V, gamma: float, gap_rel: float = 1e-6) -> GradientReport:
    Lop, rh, lam, Q, gap = _spectral_state(cfg, V, gamma, gap_rel)
    neg = lam < 0
    P = Q[:, neg] @ Q[:, neg].conj().T
    # X solves S X + X S = P in the L (= S) eigenbasis
    W = rh.L_eigenvectors
    s = rh.S_eigenvalues if gamma > 0 else np.ones_like(rh.L_eigenvalues)
    Pt = W.conj().T @ P @ W
    X = W @ (Pt / (s[:, None] + s[None, :])) @ W.conj().T
    M = Lop.sigma_pi
    Y = M @ X + X @ M
    lat = cfg.lat
    n = lat.sites
    U = lat.link_phases(cfg.h)
    Phi = np.zeros((3, n))
    for mu in range(3):
        src, dst, mask = lat.links(mu)
        Um = U[mu].ravel()[mask]
        acc = np.zeros(src.size, dtype=complex)
        for a in range(2):
            for b in range(2):
                sab = PAULI[mu][a, b]
                if sab == 0:
                    continue
                acc += sab * (Um * Y[b * n + dst, a * n + src] + np.conj(Um) * Y[b * n + src, a * n + dst])
        Phi[mu, src] = -0.5 * acc.real / lat.cell_volume
    Phi = Phi.reshape(3, *lat.shape)
    G = Phi + cfg.penalty_gradient()
    trace = float(np.sum(lam[neg]))
    pen = cfg.penalty()
    return GradientReport(Phi=Phi, G=G, energy=trace + pen, trace=trace, penalty=pen, min_gap=gap)


def coulomb_gauge_projection(A: np.ndarray, lat: GaugeLattice) -> np.ndarray:
    """Remove the forward-gradient component of ``A`` (periodic lattices, FFT)."""
    if not all(lat.periodic):
        return A
    s = lat.spacing
    ks = np.meshgrid(*[2 * np.pi * np.fft.fftfreq(n) for n in lat.shape], indexing="ij")
    d = np.array([(np.exp(1j * k) - 1) / s for k in ks])
    Ah = np.fft.fftn(A, axes=(1, 2, 3))
    den = np.sum(np.abs(d) ** 2, axis=0)
    den[den == 0] = np.inf
    chi = np.sum(np.conj(d) * Ah, axis=0) / den
    return np.real(np.fft.ifftn(Ah - d * chi, axes=(1, 2, 3)))


@dataclass
class MinimizeOptions:
    tol: float = 1e-6
    max_iter: int = 500
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 40
    energy_noise: float = 1e-12
    project: bool = True
    gap_rel: float = 1e-6
    restart_perturbation: float = 1e-4
    max_restarts: int = 3
    seed: int = 0


@dataclass
class MinimizeResult:
    A: np.ndarray
    energy: float
    residual: float
    converged: bool
    history: list = field(default_factory=list)  # (step, E, residual, field energy)
    restarts: int = 0
    report: GradientReport | None = None


def minimize(cfg: FieldConfiguration, V, gamma: float, opts: MinimizeOptions | None = None) -> MinimizeResult:
    """Gradient descent with Armijo backtracking; BB step as the trial length.

    Periodic lattices carry constant (holonomy) modes that the penalty does
    not see, so descent along them is slow; open boundaries avoid this.
    """
    o = opts or MinimizeOptions()
    rng = np.random.default_rng(o.seed)
    cell = cfg.lat.cell_volume
    A = cfg.A.copy()
    if o.project:
        A = coulomb_gauge_projection(A, cfg.lat)
    restarts = 0
    while True:
        try:
            rep = phi_gradient(cfg.with_A(A), V, gamma, o.gap_rel)
            break
        except GapViolation:
            if restarts >= o.max_restarts:
                raise
            restarts += 1
            A = A + o.restart_perturbation * rng.standard_normal(A.shape)
    E0 = rep.energy
    history = [(0, rep.energy, rep.residual(cell), cfg.field_energy(A))]
    step = 1.0
    prev = None
    for it in range(1, o.max_iter + 1):
        if rep.residual(cell) <= o.tol:
            break
        g = rep.G
        if o.project:
            g = coulomb_gauge_projection(g, cfg.lat)
        gg = cell * np.sum(g * g)
        if prev is not None:
            dA, dg = A - prev[0], g - prev[1]
            curv = cell * np.sum(dA * dg)
            if curv > 0:
                step = cell * np.sum(dA * dA) / curv
        for _ in range(o.max_backtracks):
            trial = A - step * g
            try:
                new = phi_gradient(cfg.with_A(trial), V, gamma, o.gap_rel)
            except GapViolation:
                if restarts >= o.max_restarts:
                    raise
                restarts += 1
                log.warning("gap violation at step %d; perturbing", it)
                trial = trial + o.restart_perturbation * rng.standard_normal(A.shape)
                new = phi_gradient(cfg.with_A(trial), V, gamma, o.gap_rel)
            if new.energy <= rep.energy - o.armijo * step * gg:
                break
            # energies equal to roundoff: fall back to gradient-norm decrease
            noise = o.energy_noise * max(1.0, abs(rep.energy))
            if abs(new.energy - rep.energy) <= noise and np.sum(new.G**2) < np.sum(rep.G**2):
                break
            step *= o.shrink
        else:
            raise LineSearchFailure(f"no sufficient decrease at step {it}")
        prev = (A, g)
        A, rep = trial, new
        history.append((it, rep.energy, rep.residual(cell), cfg.field_energy(A)))
    res = rep.residual(cell)
    if rep.energy > E0:
        # perturbation restarts can in principle lose the descent guarantee
        log.warning("final energy above the start")
    return MinimizeResult(A, rep.energy, res, res <= o.tol, history, restarts, rep)


def gaussian_bump(lat: GaugeLattice, amplitude: float, width: float, center=(0.0, 0.0, 0.0)) -> np.ndarray:
    x = lat.coordinates()
    r2 = sum((x[i] - center[i]) ** 2 for i in range(3))
    return amplitude * np.exp(-r2 / (2 * width**2))


def random_smooth_field(lat: GaugeLattice, rng, amplitude: float = 1.0, k_max: int = 1) -> np.ndarray:
    """Band-limited real vector field with Fourier modes ``|k_i| <= k_max``."""
    shape = lat.shape
    Ah = np.zeros((3, *shape), dtype=complex)
    for mu in range(3):
        for k in np.ndindex(*(2 * k_max + 1,) * 3):
            idx = tuple(ki - k_max for ki in k)
            Ah[mu][idx] = rng.standard_normal() + 1j * rng.standard_normal()
    A = np.real(np.fft.ifftn(Ah, axes=(1, 2, 3)))
    nrm = np.max(np.abs(A))
    return amplitude * A / nrm if nrm > 0 else A
