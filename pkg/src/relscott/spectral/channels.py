"""Radial Coulomb channels of the (relativistic) kinetic energy.

In angular-momentum channel ``ell`` the radial function ``u = r R`` sees
``-d^2/dr^2 + ell(ell+1)/r^2`` with ``u(0) = u(R) = 0``. The second
derivative is discretized by a finite-volume stencil on a mapped grid
``r = c (e^x - 1)``, symmetrized with the lumped mass so the channel
Laplacian is a symmetric tridiagonal matrix; the kinetic function is then
applied through its eigendecomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import EigendecompositionFailure, SubcriticalityViolation
from ..params import CRITICAL_COUPLING
from .lattice import kinetic_function


@dataclass(frozen=True)
class ChannelGrid:
    """Interior nodes of a mapped radial grid on ``[0, R]``."""

    R: float = 60.0
    n: int = 1000
    c: float = 1.0

    def nodes(self) -> np.ndarray:
        x = np.linspace(0.0, math.log(self.R / self.c + 1.0), self.n + 2)
        return self.c * np.expm1(x)

    @property
    def r(self) -> np.ndarray:
        return self.nodes()[1:-1]

    def scaled(self, Z: float) -> "ChannelGrid":
        """Same grid in units of ``1/Z``."""
        return ChannelGrid(self.R / Z, self.n, self.c / Z)

    def laplacian(self, ell: int) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of the symmetrized channel operator."""
        r = self.nodes()
        d = np.diff(r)
        ri = r[1:-1]
        m = 0.5 * (r[2:] - r[:-2])
        diag = (1.0 / d[1:] + 1.0 / d[:-1]) / m + ell * (ell + 1) / ri**2
        off = -1.0 / d[1:-1] / np.sqrt(m[1:] * m[:-1])
        return diag, off


@dataclass
class ChannelSpectrum:
    ell: int
    eigenvalues: np.ndarray  # negative eigenvalues, ascending
    vectors: np.ndarray  # columns normalized in the lumped-mass inner product
    r: np.ndarray

    def localized(self, weight: np.ndarray) -> np.ndarray:
        """``<u_k, weight u_k>`` for every bound state."""
        return weight @ (self.vectors**2)


def chandrasekhar_channel(
    Z: float, gamma: float, ell: int, grid: ChannelGrid | None = None, vectors: bool = False
):
    """Negative eigenvalues of ``f_gamma(-d^2/dr^2 + ell(ell+1)/r^2) - Z/r``.

    ``gamma = 0`` gives the Schrodinger channel ``(-d^2/dr^2 + ...)/2 - Z/r``.
    """
    if Z * gamma >= CRITICAL_COUPLING:
        raise SubcriticalityViolation(f"Z*gamma = {Z * gamma:.6g} >= 2/pi")
    grid = grid or ChannelGrid()
    diag, off = grid.laplacian(ell)
    r = grid.r
    try:
        if gamma == 0:
            lam, Q = linalg.eigh_tridiagonal(
                0.5 * diag - Z / r, 0.5 * off, select="v", select_range=(-np.inf, 0.0)
            )
        else:
            mu, P = linalg.eigh_tridiagonal(diag, off)
            H = (P * kinetic_function(np.clip(mu, 0, None), gamma)) @ P.T
            H[np.diag_indices_from(H)] -= Z / r
            lam, Q = linalg.eigh(H, subset_by_value=(-np.inf, 0.0), driver="evr")
    except (linalg.LinAlgError, ValueError) as exc:
        raise EigendecompositionFailure(str(exc)) from exc
    if vectors:
        return ChannelSpectrum(ell, lam, Q, r)
    return lam
