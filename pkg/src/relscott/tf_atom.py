"""Thomas-Fermi theory of a single atom on a logarithmic radial grid.

Two independent routes to the non-relativistic neutral atom are provided:
the universal ODE ``phi'' = phi^{3/2}/sqrt(x)`` solved by shooting, and a
self-consistent field iteration for ``rho = P'(Z/r - Phi_rho + nu)`` on a
radial grid. The second route also handles ions and the relativistic law.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import phase_space as ps
from .errors import GridTooCoarse, NoConvergence

log = logging.getLogger(__name__)

# --- universal non-relativistic profile -----------------------------------------


@dataclass
class UniversalProfile:
    slope: float
    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.x, self.phi)


def _shoot(B, x0, xmax, rtol):
    phi0 = 1.0 - B * x0 + 4.0 / 3.0 * x0**1.5
    dphi0 = -B + 2.0 * math.sqrt(x0)

    def rhs(x, y):
        return [y[1], max(y[0], 0.0) ** 1.5 / math.sqrt(x)]

    def crossed(x, y):
        return y[0]

    def turned(x, y):
        return y[1]

    crossed.terminal, crossed.direction = True, -1
    turned.terminal, turned.direction = True, 1
    sol = integrate.solve_ivp(
        rhs, (x0, xmax), [phi0, dphi0], method="DOP853", rtol=rtol, atol=1e-14,
        events=[crossed, turned], dense_output=True,
    )
    if sol.t_events[0].size:
        return -1, sol
    if sol.t_events[1].size:
        return 1, sol
    return 0, sol


def solve_universal_tf(x_max: float = 200.0, rtol: float = 1e-12, bracket=(1.5, 1.7)) -> UniversalProfile:
    """Initial slope ``B = -phi'(0)`` and profile of the neutral-atom TF function.

    Bisection on ``B``: too steep and ``phi`` crosses zero, too shallow and it
    turns upward. The profile is stored on ``[0, x_stop]`` where ``x_stop`` is
    the last point integrated for the final bracket.
    """
    lo, hi = bracket
    x0 = 1e-8
    if _shoot(lo, x0, x_max, rtol)[0] != 1 or _shoot(hi, x0, x_max, rtol)[0] != -1:
        raise NoConvergence("TF shooting bracket does not enclose the slope")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        flag, _sol = _shoot(mid, x0, x_max, rtol)
        if flag == -1:
            hi = mid
        elif flag == 1:
            lo = mid
        else:
            lo = hi = mid
            break
        if hi - lo < 1e-15:
            break
    B = 0.5 * (lo + hi)
    _, sol = _shoot(lo, x0, x_max, rtol)
    xs = np.concatenate([[0.0], np.geomspace(x0, sol.t[-1], 4000)[1:]])
    ys = sol.sol(np.clip(xs, x0, None))
    phi = np.where(xs == 0, 1.0, ys[0])
    dphi = np.where(xs == 0, -B, ys[1])
    return UniversalProfile(slope=-B, x=xs, phi=phi, dphi=dphi)


def tf_length_scale(q: int = 2) -> float:
    """``b`` in ``r = b x Z^{-1/3}`` for spin degeneracy ``q`` (0.8853 for q = 2)."""
    c = q * 2**1.5 / (6 * math.pi**2)
    return (4 * math.pi * c) ** (-2.0 / 3.0)


def universal_energy_constant(profile: UniversalProfile | None = None, q: int = 2) -> float:
    """``E_TF / Z^{7/3}`` for the neutral atom: ``(3/7) phi'(0) / b``."""
    profile = profile or solve_universal_tf()
    return 3.0 / 7.0 * profile.slope / tf_length_scale(q)


# --- radial grid -------------------------------------------------------------------


@dataclass
class RadialGrid:
    r: np.ndarray
    weights: np.ndarray  # int f(r) r^2 dr ~ sum(weights * f)

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def dt(self) -> float:
        return float(math.log(self.r[1] / self.r[0]))

    @classmethod
    def log(cls, r_min: float, r_max: float, n: int = 2001) -> "RadialGrid":
        if not 0 < r_min < r_max:
            raise ValueError("need 0 < r_min < r_max")
        if n % 2 == 0:
            n += 1  # composite Simpson
        t = np.linspace(math.log(r_min), math.log(r_max), n)
        r = np.exp(t)
        dt = t[1] - t[0]
        simpson = np.ones(n)
        simpson[1:-1:2] = 4.0
        simpson[2:-1:2] = 2.0
        return cls(r=r, weights=simpson * dt / 3.0 * r**3)

    @classmethod
    def for_atom(cls, Z: float, n: int = 2001, r_min: float = 1e-6, r_max: float = 1000.0) -> "RadialGrid":
        """Grid on ``[r_min/Z, r_max Z^{-1/3}]``."""
        return cls.log(r_min / Z, r_max * Z ** (-1.0 / 3.0), n)

    def integrate(self, f) -> float:
        """``int f dx`` over R^3 for a radial function sampled on the grid.

        The ball inside ``r_min`` is added assuming ``f`` follows a power law there.
        """
        f = np.asarray(f, dtype=float)
        return 4 * math.pi * (float(np.dot(self.weights, f)) + self._inner_ball(f))

    def _inner_ball(self, f) -> float:
        # int_0^{r_min} f r^2 dr for f ~ f0 (r/r_min)^p
        f0, f1 = f[0], f[1]
        if f0 == 0 or f1 == 0 or np.sign(f0) != np.sign(f1):
            return 0.0
        p = math.log(f1 / f0) / math.log(self.r[1] / self.r[0])
        if p <= -3:
            return 0.0
        return f0 * self.r[0] ** 3 / (p + 3)

    def coulomb_potential(self, rho: np.ndarray) -> np.ndarray:
        """Electrostatic potential of a radial charge density (double cumulative integral)."""
        t = np.log(self.r)
        r = self.r
        q0 = 4 * math.pi * self._inner_ball(rho)
        inner = q0 + integrate.cumulative_simpson(4 * math.pi * rho * r**3, x=t, initial=0.0)
        outer_f = 4 * math.pi * rho * r**2
        tail = integrate.cumulative_simpson(outer_f[::-1], x=-t[::-1], initial=0.0)[::-1]
        return inner / r + tail


# --- self-consistent solve ------------------------------------------------------------


@dataclass
class EnergyParts:
    kinetic: float
    attraction: float
    repulsion: float
    total: float
    dual: float

    @property
    def primal_dual_gap(self) -> float:
        return abs(self.total - self.dual) / max(abs(self.total), 1e-300)


@dataclass
class SCFOptions:
    mixing: str = "anderson"
    damping: float = 0.3
    anderson_depth: int = 5
    tol: float = 1e-8
    max_iter: int = 500
    # relativistic law is used only outside this radius (in units of gamma)
    match_radius: float | None = None


@dataclass
class TFSolution:
    grid: RadialGrid
    W: np.ndarray
    rho: np.ndarray
    nu: float
    Z: float
    N: float
    law: ps.PressureLaw
    iterations: int
    residual: float
    history: list = field(default_factory=list)
    match_radius: float = 0.0

    @property
    def r(self):
        return self.grid.r

    def electron_count(self) -> float:
        return self.grid.integrate(self.rho)

    def local_law_mask(self) -> np.ndarray:
        """True where the relativistic law applies."""
        if not self.law.relativistic:
            return np.zeros(self.grid.n, dtype=bool)
        return self.grid.r >= self.match_radius


def _density(W, nu, laws, mask):
    nonrel, rel = laws
    out = ps.weyl_density(W + nu, nonrel)
    if rel is not None and mask.any():
        out = np.where(mask, ps.weyl_density(W + nu, rel), out)
    return out


def _pressure(w, laws, mask):
    nonrel, rel = laws
    out = ps.weyl_pressure(w, nonrel)
    if rel is not None and mask.any():
        out = np.where(mask, ps.weyl_pressure(w, rel), out)
    return out


def _kinetic(rho, laws, mask):
    nonrel, rel = laws
    out = ps.kinetic_density(rho, nonrel)
    if rel is not None and mask.any():
        out = np.where(mask, ps.kinetic_density(rho, rel), out)
    return out


def _initial_potential(Z, r, q):
    # Tietz approximation of the universal profile
    x = r * Z ** (1.0 / 3.0) / tf_length_scale(q)
    return Z / r / (1.0 + 0.53625 * x) ** 2


def _find_nu(W, N, grid, laws, mask, Z):
    def excess(nu):
        return grid.integrate(_density(W, nu, laws, mask)) - N

    if excess(0.0) <= 0:
        return 0.0
    lo = -Z * Z
    if excess(lo) > 0:
        raise NoConvergence("chemical potential below -Z^2")
    return optimize.brentq(excess, lo, 0.0, xtol=1e-15 * Z * Z, rtol=4 * np.finfo(float).eps)


def solve_tf_atom(
    Z: float,
    N: float | None = None,
    law: ps.PressureLaw | None = None,
    grid: RadialGrid | None = None,
    opts: SCFOptions | None = None,
) -> TFSolution:
    """Damped fixed-point iteration ``rho <- P'(Z/r - Phi_rho + nu)``.

    ``nu = 0`` whenever ``N >= Z``; otherwise it is re-solved by bracketing at
    every iteration so that ``int rho = N``. For a relativistic law the
    non-relativistic pressure is used inside ``opts.match_radius`` (default
    ``gamma``), since the relativistic density is not integrable at a Coulomb
    centre.
    """
    N = Z if N is None else N
    if Z <= 0 or N <= 0:
        raise ValueError("Z and N must be positive")
    law = law or ps.PressureLaw()
    grid = grid or RadialGrid.for_atom(Z)
    opts = opts or SCFOptions()
    r = grid.r
    nonrel = law.nonrel()
    rel = law if law.relativistic else None
    r0 = 0.0
    if rel is not None:
        r0 = opts.match_radius if opts.match_radius is not None else law.gamma * law.h
    mask = r >= r0
    laws = (nonrel, rel)
    target = min(N, Z)

    W = _initial_potential(Z, r, law.q)
    nu = _find_nu(W, target, grid, laws, mask, Z) if N < Z else 0.0
    rho = _density(W, nu, laws, mask)
    if N < Z:
        rho *= target / grid.integrate(rho)

    hist_in, hist_res = [], []
    history = []
    residual = math.inf
    for it in range(1, opts.max_iter + 1):
        W = Z / r - grid.coulomb_potential(rho)
        nu = _find_nu(W, target, grid, laws, mask, Z) if N < Z else 0.0
        rho_out = _density(W, nu, laws, mask)
        res = rho_out - rho
        residual = grid.integrate(np.abs(res)) / target
        history.append(residual)
        if residual <= opts.tol:
            rho = rho_out
            break
        if opts.mixing == "anderson":
            hist_in.append(rho.copy())
            hist_res.append(res.copy())
            if len(hist_in) > opts.anderson_depth + 1:
                hist_in.pop(0)
                hist_res.pop(0)
            rho = _anderson(hist_in, hist_res, opts.damping, grid)
        else:
            rho = rho + opts.damping * res
        rho = np.maximum(rho, 0.0)
    else:
        floor = min(history[-20:])
        if floor > 1e3 * opts.tol and np.std(history[-20:]) < 0.1 * floor:
            raise GridTooCoarse(f"self-consistency residual stalls at {floor:.3e}")
        raise NoConvergence(f"TF mixing did not converge: residual {residual:.3e} after {opts.max_iter} iterations")

    W = Z / r - grid.coulomb_potential(rho)
    log.debug("TF Z=%g N=%g converged in %d iterations (residual %.2e)", Z, N, it, residual)
    return TFSolution(
        grid=grid, W=W, rho=rho, nu=nu, Z=Z, N=N, law=law, iterations=it,
        residual=residual, history=history, match_radius=r0,
    )


def _anderson(xs, fs, beta, grid):
    """Anderson (Pulay) mixing with weights from the radial quadrature."""
    x, f = xs[-1], fs[-1]
    if len(xs) == 1:
        return x + beta * f
    dF = np.array([fs[i + 1] - fs[i] for i in range(len(fs) - 1)]).T
    dX = np.array([xs[i + 1] - xs[i] for i in range(len(xs) - 1)]).T
    wts = np.sqrt(grid.weights)
    coef, *_ = np.linalg.lstsq(dF * wts[:, None], f * wts, rcond=None)
    return x + beta * f - (dX + beta * dF) @ coef


def tf_energy(sol: TFSolution) -> EnergyParts:
    """Primal energy and the Legendre-dual expression at the SCF solution.

    primal: ``int K(rho) - int Z rho / r + D(rho, rho)``
    dual:   ``-int P(W + nu) - D(rho, rho) + nu N_e``
    with ``D(f, g) = 1/2 iint f(x) g(y) / |x - y|`` and ``N_e = int rho``.
    """
    g = sol.grid
    mask = sol.local_law_mask()
    laws = (sol.law.nonrel(), sol.law if sol.law.relativistic else None)
    kin = g.integrate(_kinetic(sol.rho, laws, mask))
    att = -g.integrate(sol.Z / g.r * sol.rho)
    D = 0.5 * g.integrate(g.coulomb_potential(sol.rho) * sol.rho)
    total = kin + att + D
    dual = -g.integrate(_pressure(sol.W + sol.nu, laws, mask)) - D + sol.nu * g.integrate(sol.rho)
    return EnergyParts(kinetic=kin, attraction=att, repulsion=D, total=total, dual=dual)


def density_integral(sol: TFSolution, power: float) -> float:
    """``int rho^power dx``; used for the exchange-type corrections."""
    return sol.grid.integrate(sol.rho**power)
