"""Phase-space (Weyl) laws for the Pauli kinetic energy.

For a dispersion ``T(p)`` the Fermi-gas density and pressure at level ``w`` are

    n(w) = q (2 pi h)^-3 |{xi : T(|xi|) < w}|
    P(w) = q (2 pi h)^-3 int (w - T(|xi|))_+ dxi

with ``P' = n``. Two dispersions are supported: ``p^2/2`` and the
Chandrasekhar form ``sqrt(gamma^-2 p^2 + gamma^-4) - gamma^-2``.
Closed forms are used throughout; the ``*_quadrature`` functions are the
adaptive-quadrature references they are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import binom

NONREL = "nonrel"
REL = "rel"

# below this value of gamma*p_F the relativistic pressure is summed as a series
_SERIES_U = 0.25
_SERIES_K = np.arange(1, 20)
_SERIES_C = binom(0.5, _SERIES_K) / (2 * _SERIES_K + 3)


@dataclass(frozen=True)
class PressureLaw:
    kind: str = NONREL
    gamma: float = 0.0
    q: int = 2
    h: float = 1.0

    def __post_init__(self):
        if self.kind not in (NONREL, REL):
            raise ValueError(f"unknown law {self.kind!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    @property
    def relativistic(self) -> bool:
        return self.kind == REL and self.gamma > 0

    @property
    def prefactor(self) -> float:
        """q / (2 pi^2 h^3): the radial measure of q (2 pi h)^-3 d^3 xi."""
        return self.q / (2 * math.pi**2 * self.h**3)

    def nonrel(self) -> "PressureLaw":
        return PressureLaw(NONREL, 0.0, self.q, self.h)


def dispersion(p, law: PressureLaw):
    p = np.asarray(p, dtype=float)
    if not law.relativistic:
        return 0.5 * p * p
    g2 = law.gamma**2
    # sqrt(g^-2 p^2 + g^-4) - g^-2 written without cancellation
    return p * p / (np.sqrt(1.0 + g2 * p * p) + 1.0)


def fermi_momentum(w, law: PressureLaw):
    """Inverse dispersion; zero for ``w <= 0``."""
    w = np.asarray(w, dtype=float)
    wp = np.where(w > 0, w, 0.0)
    if not law.relativistic:
        return np.sqrt(2 * wp)
    return np.sqrt(2 * wp + (law.gamma * wp) ** 2)


def weyl_density(w, law: PressureLaw):
    pf = fermi_momentum(w, law)
    return law.prefactor * pf**3 / 3.0


def _g_series(u):
    # int_0^u t^2 (sqrt(1+t^2) - 1) dt
    u2 = u * u
    out = np.zeros_like(u)
    pw = u**5
    for c in _SERIES_C:
        out += c * pw
        pw = pw * u2
    return out


def _rel_pressure_reduced(x):
    """gamma^5 P / prefactor as a function of x = gamma^2 w >= 0."""
    x = np.asarray(x, dtype=float)
    u = np.sqrt(2 * x + x * x)
    out = np.empty_like(x)
    small = u < _SERIES_U
    us, xs = u[small], x[small]
    out[small] = xs * us**3 / 3.0 - _g_series(us)
    ul, xl = u[~small], x[~small]
    out[~small] = ul * (1 + xl) * (2 * ul * ul - 3) / 24.0 + np.arcsinh(ul) / 8.0
    return out


def weyl_pressure(w, law: PressureLaw):
    w = np.asarray(w, dtype=float)
    wp = np.where(w > 0, w, 0.0)
    if not law.relativistic:
        return law.prefactor * (2 * wp) ** 2.5 / 15.0
    g = law.gamma
    return law.prefactor * _rel_pressure_reduced(g * g * wp) / g**5


def weyl1_density(w, law: PressureLaw):
    """Semiclassical energy density of the negative spectrum, ``-P(w)``."""
    return -weyl_pressure(w, law)


def kinetic_density(rho, law: PressureLaw):
    """Legendre dual ``K(rho) = sup_w (w rho - P(w))``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("density must be nonnegative")
    if not law.relativistic:
        ck = 0.3 * (6 * math.pi**2 / law.q) ** (2.0 / 3.0) * law.h**2
        return ck * rho ** (5.0 / 3.0)
    w = kinetic_potential(rho, law)
    return w * rho - weyl_pressure(w, law)


def kinetic_potential(rho, law: PressureLaw):
    """``dK/drho``: the level ``w`` whose Fermi ball carries density ``rho``."""
    rho = np.asarray(rho, dtype=float)
    pf = np.cbrt(3.0 * rho / law.prefactor)
    return dispersion(pf, law)


# relativistic correction -------------------------------------------------------

COUNTERTERM_SCHEMES = ("switched", "asymptotic", "none")


def rel_counterterm(w, gamma: float, q: int = 2, h: float = 1.0):
    """Large-``w`` terms of ``P_rel - P_nonrel`` that are not integrable near a nucleus.

    ``P_rel`` grows like ``gamma^3 w^4/12 + gamma w^3/3 + O(w^2)`` (times the
    prefactor); against ``r^2 dr`` with ``w ~ Z/r`` both terms diverge.
    """
    w = np.asarray(w, dtype=float)
    wp = np.where(w > 0, w, 0.0)
    pref = q / (2 * math.pi**2 * h**3)
    return pref * (gamma**3 * wp**4 / 12.0 + gamma * wp**3 / 3.0)


def rel_correction_integrand(w, gamma: float, q: int = 2, h: float = 1.0, scheme: str = "asymptotic"):
    """Return ``(regularized, raw)`` pressure differences ``P_rel - P_nonrel``.

    ``asymptotic`` subtracts ``rel_counterterm`` everywhere. ``switched``
    multiplies it by ``x^2 / (1 + x^2)``, ``x = gamma^2 w``, so the far
    region (``x << 1``), where the difference is ``O(gamma^2)``, is left alone.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if scheme not in COUNTERTERM_SCHEMES:
        raise ValueError(f"unknown counterterm scheme {scheme!r}")
    rel = PressureLaw(REL, gamma, q, h)
    raw = weyl_pressure(w, rel) - weyl_pressure(w, rel.nonrel())
    if scheme == "none":
        return raw, raw
    ct = rel_counterterm(w, gamma, q, h)
    if scheme == "switched":
        x = gamma * gamma * np.asarray(w, dtype=float)
        ct = ct * x * x / (1.0 + x * x)
    return raw - ct, raw


# quadrature references ---------------------------------------------------------


def fermi_momentum_bisect(w: float, law: PressureLaw) -> float:
    if w <= 0:
        return 0.0
    hi = 1.0
    while dispersion(hi, law) < w:
        hi *= 2
    return optimize.bisect(lambda p: float(dispersion(p, law)) - w, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=2000)


def weyl_density_quadrature(w: float, law: PressureLaw) -> float:
    pf = fermi_momentum_bisect(w, law)
    if pf == 0:
        return 0.0
    val, _ = integrate.quad(lambda p: p * p, 0.0, pf, epsabs=0, epsrel=2e-14)
    return law.prefactor * val


def weyl_pressure_quadrature(w: float, law: PressureLaw) -> float:
    pf = fermi_momentum_bisect(w, law)
    if pf == 0:
        return 0.0
    val, _ = integrate.quad(
        lambda p: (w - float(dispersion(p, law))) * p * p, 0.0, pf, epsabs=0, epsrel=2e-14, limit=200
    )
    return law.prefactor * val


def kinetic_density_numeric(rho: float, law: PressureLaw) -> float:
    """Direct maximization of ``w rho - P(w)`` (reference for the dual)."""
    if rho == 0:
        return 0.0
    res = optimize.minimize_scalar(
        lambda w: -(w * rho - float(weyl_pressure(w, law))),
        bracket=(0.0, float(kinetic_potential(rho, law)) * 2 + 1.0),
        tol=1e-14,
    )
    return -res.fun
