"""Analytic hydrogen oracle for localized Coulomb traces.

Uses the exact bound states ``-Z^2/(2 n^2)`` and closed-form radial
functions, integrated by composite Gauss-Legendre. Independent of the
discretized channel solver, so it serves as a cross-check for
``scott_estimate`` at ``beta = 0``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .scott import coulomb_weyl_term, cutoff


def radial_function(n: int, ell: int, r, Z: float = 1.0):
    """``u_{n ell}(r) = r R_{n ell}(r)``, normalized in ``L^2(dr)``."""
    r = np.asarray(r, dtype=float)
    x = 2.0 * Z * r / n
    lognorm = 0.5 * (3 * np.log(2 * Z / n) + gammaln(n - ell) - np.log(2 * n) - gammaln(n + ell + 1))
    with np.errstate(divide="ignore"):
        logx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
    return r * np.exp(lognorm - x / 2 + ell * logx) * eval_genlaguerre(n - ell - 1, 2 * ell + 1, x)


def _quadrature(r_max: float, panels: int = 400, order: int = 20):
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, r_max, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    r = ((xg + 1) / 2 * (b - a) + a).ravel()
    w = (wg * (b - a) / 2).ravel()
    return r, w


def hydrogen_localized_traces(radii, Z: float = 1.0, q: int = 2, n_max: int = 120, L_max: int = 24):
    """``sum q(2 ell+1) E_n <u, phi_r^2 u>`` over ``ell <= L_max`` and ``n < n_max``."""
    radii = np.asarray(radii, dtype=float)
    r, w = _quadrature(float(radii.max()))
    W = np.array([w * cutoff(r / rc) ** 2 for rc in radii])
    out = np.zeros(len(radii))
    for ell in range(L_max + 1):
        for n in range(ell + 1, n_max):
            out += q * (2 * ell + 1) * (-0.5 * Z * Z / n**2) * (W @ radial_function(n, ell, r, Z) ** 2)
    return out


def hydrogen_scott_differences(radii, Z: float = 1.0, q: int = 2, **kw) -> np.ndarray:
    traces = hydrogen_localized_traces(radii, Z, q, **kw)
    return traces - np.array([coulomb_weyl_term(rc, Z, q) for rc in radii])
