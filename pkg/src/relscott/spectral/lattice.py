"""Pauli operators on a cubic lattice with link-phase vector potentials.

``A[mu][x]`` lives on the directed link ``x -> x + e_mu`` and enters through
the phase ``U = exp(-i s A / h)``. The covariant momentum is the central
difference

    (pi_mu psi)(x) = -i h (U_{x,mu} psi(x+mu) - conj(U_{x-mu,mu}) psi(x-mu)) / (2 s)

which is Hermitian for any real ``A`` and transforms covariantly under
``A -> A + grad chi`` (forward differences), so spectra are exactly gauge
invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import EigendecompositionFailure

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass
class GaugeLattice:
    shape: tuple[int, int, int]
    spacing: float = 1.0
    A: np.ndarray | None = None  # (3, *shape)
    V: np.ndarray | None = None  # shape
    periodic: tuple[bool, bool, bool] = (True, True, True)

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        if len(self.shape) != 3 or min(self.shape) < 3:
            raise ValueError("lattice needs three axes of at least 3 sites")
        if self.A is None:
            self.A = np.zeros((3, *self.shape))
        if self.V is None:
            self.V = np.zeros(self.shape)
        self.A = np.asarray(self.A, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        if self.A.shape != (3, *self.shape) or self.V.shape != self.shape:
            raise ValueError("field shapes do not match the lattice")

    @classmethod
    def cube(cls, n: int, spacing: float = 1.0, **kw) -> "GaugeLattice":
        return cls((n, n, n), spacing, **kw)

    @property
    def sites(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    def coordinates(self, centered: bool = True) -> np.ndarray:
        """Site coordinates, shape ``(3, *shape)``; the centre site sits at the origin."""
        axes = []
        for n in self.shape:
            k = np.arange(n, dtype=float)
            if centered:
                k -= n // 2
            axes.append(k * self.spacing)
        return np.array(np.meshgrid(*axes, indexing="ij"))

    def link_phases(self, h: float = 1.0) -> np.ndarray:
        return np.exp(-1j * self.spacing * self.A / h)

    def with_fields(self, A=None, V=None) -> "GaugeLattice":
        return GaugeLattice(
            self.shape, self.spacing,
            self.A.copy() if A is None else A,
            self.V.copy() if V is None else V,
            self.periodic,
        )

    def gauge_transform(self, chi: np.ndarray) -> "GaugeLattice":
        """``A -> A + grad chi`` with forward differences (``V`` unchanged)."""
        return self.with_fields(A=self.A + forward_gradient(chi, self.spacing, self.periodic))

    def links(self, mu: int):
        """Flat indices ``(x, x + e_mu)`` of the links present along axis ``mu``."""
        idx = np.arange(self.sites).reshape(self.shape)
        nxt = np.roll(idx, -1, axis=mu)
        src, dst = idx, nxt
        if not self.periodic[mu]:
            sl = [slice(None)] * 3
            sl[mu] = slice(0, self.shape[mu] - 1)
            src, dst = src[tuple(sl)], dst[tuple(sl)]
            mask = np.zeros(self.shape, dtype=bool)
            mask[tuple(sl)] = True
            return src.ravel(), dst.ravel(), mask.ravel()
        return src.ravel(), dst.ravel(), np.ones(self.sites, dtype=bool)


def forward_gradient(chi, spacing, periodic=(True, True, True)):
    out = np.empty((3, *chi.shape))
    for mu in range(3):
        d = (np.roll(chi, -1, axis=mu) - chi) / spacing
        if not periodic[mu]:
            sl = [slice(None)] * 3
            sl[mu] = -1
            d[tuple(sl)] = 0.0
        out[mu] = d
    return out


def covariant_momentum(lat: GaugeLattice, mu: int, h: float = 1.0) -> sparse.csr_matrix:
    """Sparse Hermitian matrix of ``pi_mu = h D_mu - A_mu`` on scalar fields."""
    src, dst, mask = lat.links(mu)
    U = lat.link_phases(h)[mu].ravel()[mask]
    c = -1j * h / (2 * lat.spacing)
    rows = np.concatenate([src, dst])
    cols = np.concatenate([dst, src])
    vals = np.concatenate([c * U, -c * np.conj(U)])
    n = lat.sites
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass
class SpinorOperator:
    """Dense Hermitian matrix on 2-spinor lattice fields (spin-major ordering)."""

    matrix: np.ndarray
    h: float = 1.0
    gamma: float = 0.0
    meta: dict = field(default_factory=dict)
    sigma_pi: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def sigma_dot_pi(lat: GaugeLattice, h: float = 1.0) -> np.ndarray:
    n = lat.sites
    M = sparse.csr_matrix((2 * n, 2 * n), dtype=complex)
    for mu in range(3):
        M = M + sparse.kron(PAULI[mu], covariant_momentum(lat, mu, h), format="csr")
    return M.toarray()


def build_pauli_lattice(lat: GaugeLattice, h: float = 1.0) -> SpinorOperator:
    """``L = ((hD - A) . sigma)^2`` as the exact square of the Hermitian ``sigma . pi``."""
    M = sigma_dot_pi(lat, h)
    L = M @ M
    L = 0.5 * (L + L.conj().T)
    return SpinorOperator(L, h=h, meta={"shape": lat.shape, "spacing": lat.spacing}, sigma_pi=M)


def free_symbol_spectrum(lat: GaugeLattice, h: float = 1.0) -> np.ndarray:
    """Eigenvalues of ``L`` at ``A = 0`` on a periodic lattice, each listed twice (spin)."""
    s = lat.spacing
    comps = []
    for n in lat.shape:
        k = 2 * np.pi * np.arange(n) / (n * s)
        comps.append((h * np.sin(s * k) / s) ** 2)
    vals = comps[0][:, None, None] + comps[1][None, :, None] + comps[2][None, None, :]
    return np.sort(np.repeat(vals.ravel(), 2))


def kinetic_function(x, gamma: float):
    """``sqrt(gamma^-2 x + gamma^-4) - gamma^-2``, and ``x/2`` at ``gamma = 0``."""
    x = np.asarray(x, dtype=float)
    if gamma == 0:
        return 0.5 * x
    return x / (np.sqrt(1.0 + gamma * gamma * x) + 1.0)


@dataclass
class RelativisticHamiltonian:
    H: SpinorOperator
    L_eigenvalues: np.ndarray
    L_eigenvectors: np.ndarray
    gamma: float

    @property
    def S_eigenvalues(self) -> np.ndarray:
        """Spectrum of ``S = sqrt(gamma^2 L + 1)`` in the eigenbasis of ``L``."""
        return np.sqrt(1.0 + self.gamma**2 * self.L_eigenvalues)

    def S(self) -> np.ndarray:
        Q = self.L_eigenvectors
        return (Q * self.S_eigenvalues) @ Q.conj().T


def _eigh(a):
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionFailure(str(exc)) from exc


def relativistic_hamiltonian(Lop: SpinorOperator, V, gamma: float) -> RelativisticHamiltonian:
    """``H = f_gamma(L) - V`` with ``f_gamma`` applied through the eigenbasis of ``L``.

    ``V`` is a site potential (broadcast over spin) or a full diagonal.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    lam, Q = _eigh(Lop.matrix)
    lam = np.clip(lam, 0.0, None)
    F = (Q * kinetic_function(lam, gamma)) @ Q.conj().T
    V = np.asarray(V, dtype=float).ravel()
    if V.size * 2 == Lop.dim:
        V = np.concatenate([V, V])
    H = F - np.diag(V)
    H = 0.5 * (H + H.conj().T)
    op = SpinorOperator(H, h=Lop.h, gamma=gamma, meta=dict(Lop.meta), sigma_pi=Lop.sigma_pi)
    return RelativisticHamiltonian(op, lam, Q, gamma)


@dataclass
class NegativeTrace:
    trace: float
    eigenvalues: np.ndarray
    density: np.ndarray  # e(x, x, tau) per site, spin-summed
    count: int
    eigenvectors: np.ndarray | None = None


def trace_neg(H, tau: float = 0.0, keep_vectors: bool = False) -> NegativeTrace:
    """``sum_{lambda < tau} (lambda - tau)`` with the projector diagonal ``e(x, x, tau)``."""
    M = H.matrix if isinstance(H, SpinorOperator) else np.asarray(H)
    lam, Q = _eigh(M)
    below = lam < tau
    Qb = Q[:, below]
    diag = np.sum(np.abs(Qb) ** 2, axis=1)
    if diag.size % 2 == 0:
        half = diag.size // 2
        density = diag[:half] + diag[half:]
    else:
        density = diag
    return NegativeTrace(
        trace=float(np.sum(lam[below] - tau)),
        eigenvalues=lam,
        density=density,
        count=int(below.sum()),
        eigenvectors=Q if keep_vectors else None,
    )
