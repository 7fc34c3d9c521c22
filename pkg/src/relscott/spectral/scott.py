"""Scott coefficient from localized Coulomb traces.

For ``H = f_beta(-Delta) - Z/|x|`` (``h = 1``) the quantity

    Tr(phi_r H^- phi_r) - int Weyl_1(x) phi_r(x)^2 dx

converges as ``r -> infinity`` to ``2 Z^2 S``. ``Weyl_1`` is the
non-relativistic phase-space energy density ``-P(Z/|x|)``. The trace is
assembled from radial channels with degeneracy ``q (2 ell + 1)``, so
``phi_r`` must be radial.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from ..errors import NotConverged, ValidationError
from .channels import ChannelGrid, chandrasekhar_channel

log = logging.getLogger(__name__)


def cutoff(t):
    """Radial cutoff profile: 1 on ``[0, 1/2]``, quintic C^2 taper to 0 at 1.

    With ``s = 2t - 1`` the taper is ``1 - (10 s^3 - 15 s^4 + 6 s^5)``.
    """
    s = np.clip(2.0 * np.asarray(t, dtype=float) - 1.0, 0.0, 1.0)
    return 1.0 - s**3 * (10.0 - 15.0 * s + 6.0 * s * s)


_CUTOFF_MOMENT = None


def _cutoff_moment() -> float:
    # int_0^1 t^{-1/2} phi(t)^2 dt, substituting t = u^2
    global _CUTOFF_MOMENT
    if _CUTOFF_MOMENT is None:
        _CUTOFF_MOMENT = integrate.quad(lambda u: 2.0 * float(cutoff(u * u)) ** 2, 0.0, 1.0, epsabs=1e-15)[0]
    return _CUTOFF_MOMENT


def coulomb_weyl_term(r: float, Z: float = 1.0, q: int = 2) -> float:
    """``int Weyl_1 phi_r^2 dx`` for ``V = Z/|x|`` with the non-relativistic law, ``h = 1``."""
    pref = q / (2 * math.pi**2) * (2 * Z) ** 2.5 / 15.0
    return -pref * 4 * math.pi * math.sqrt(r) * _cutoff_moment()


@dataclass
class ScottProtocol:
    radii: tuple[float, ...] = (8.0, 16.0, 32.0, 64.0)  # units of 1/Z
    L_max: int = 12
    grid: ChannelGrid = field(default_factory=lambda: ChannelGrid(R=300.0, n=2000, c=1.0))  # units of 1/Z
    fit_exponent: float = 0.5
    fit_points: int = 3
    rel_tol: float = 0.02
    q: int = 2
    threads: int = 1


@dataclass
class ScottEstimate:
    Z: float
    beta: float
    kappa: float
    radii: np.ndarray
    traces: np.ndarray
    weyl: np.ndarray
    channel_traces: np.ndarray  # (L_max + 1, len(radii))
    tail: np.ndarray
    S: float
    error: float
    limit: float
    fit: tuple[float, float]
    L_max: int
    converged: bool

    @property
    def differences(self) -> np.ndarray:
        return self.traces - self.weyl

    @property
    def successive(self) -> np.ndarray:
        return np.abs(np.diff(self.differences))

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in d.items()}


def channel_tail(channel_traces: np.ndarray, L_max: int) -> np.ndarray:
    """Channels above ``L_max`` extrapolated from ``t_ell ~ c ell^{-3}`` fitted at ``L_max``."""
    last = channel_traces[-1]
    ells = np.arange(L_max + 1, L_max + 2000)
    return last * np.sum((ells / L_max) ** -3.0) if L_max > 0 else np.zeros_like(last)


def localized_channel_traces(Z, beta, radii, L_max, grid, q=2, threads=1) -> np.ndarray:
    """``q (2 ell + 1) sum_k lambda_k <u_k, phi_r^2 u_k>`` per channel and radius."""

    def one(ell):
        sp = chandrasekhar_channel(Z, beta, ell, grid, vectors=True)
        weights = np.array([cutoff(sp.r / r) ** 2 for r in radii])
        return q * (2 * ell + 1) * (sp.localized(weights) @ sp.eigenvalues)

    ells = range(L_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(one, ells))
    else:
        rows = [one(ell) for ell in ells]
    return np.array(rows)


def extrapolate(radii, values, exponent: float, points: int):
    """Least-squares fit of ``c0 + c1 r^-exponent`` to the last ``points`` values."""
    r = np.asarray(radii, dtype=float)[-points:]
    v = np.asarray(values, dtype=float)[-points:]
    X = np.column_stack([np.ones_like(r), r**-exponent])
    (c0, c1), *_ = np.linalg.lstsq(X, v, rcond=None)
    return float(c0), float(c1)


def scott_estimate(
    Z: float, beta: float, protocol: ScottProtocol | None = None, kappa: float = 0.0, strict: bool = True
) -> ScottEstimate:
    """Estimate ``S(kappa Z, beta Z)`` at ``kappa = 0`` from the localized-trace limit.

    Radii and the channel grid in ``protocol`` are in units of ``1/Z``. The
    limit is divided by ``2 Z^2``.
    """
    if kappa != 0:
        raise ValidationError("only kappa = 0 is supported; use the sgf pipeline for fields")
    p = protocol or ScottProtocol()
    radii = np.asarray(p.radii, dtype=float) / Z
    grid = p.grid.scaled(Z)
    if max(radii) >= grid.R:
        raise ValidationError("cutoff radii must lie inside the channel box")
    ch = localized_channel_traces(Z, beta, radii, p.L_max, grid, p.q, p.threads)
    tail = channel_tail(ch, p.L_max)
    traces = ch.sum(axis=0) + tail
    weyl = np.array([coulomb_weyl_term(r, Z, p.q) for r in radii])
    diff = traces - weyl
    c0, c1 = extrapolate(radii * Z, diff, p.fit_exponent, p.fit_points)
    succ = np.abs(np.diff(diff))
    last3 = succ[-2:]
    decreasing = bool(np.all(np.diff(last3) < 0)) if last3.size > 1 else True
    converged = decreasing and succ[-1] <= p.rel_tol * abs(diff[-1])
    err = max(float(succ[-1]), abs(c0 - float(diff[-1])))
    est = ScottEstimate(
        Z=Z, beta=beta, kappa=kappa, radii=radii, traces=traces, weyl=weyl,
        channel_traces=ch, tail=tail, S=c0 / (2 * Z * Z), error=err / (2 * Z * Z),
        limit=c0, fit=(c0, c1), L_max=p.L_max, converged=converged,
    )
    log.info("Scott Z=%g beta=%g: S=%.6f +- %.2e", Z, beta, est.S, est.error)
    if strict and not converged:
        raise NotConverged(f"localized traces not converged: successive differences {succ}")
    return est
