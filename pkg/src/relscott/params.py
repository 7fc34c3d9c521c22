"""Physical parameter model, regime checks and rescalings.

Units follow the normalization hbar = e = mu = 1, so a system is fully described
by the nuclear charges and positions, the electron number, the magnetic coupling
``alpha`` and the relativistic parameter ``beta``.
"""

from __future__ import annotations

import ast
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CouplingViolation,
    GammaOutOfRange,
    GeometryViolation,
    SubcriticalityViolation,
    ValidationError,
)

CRITICAL_COUPLING = 2.0 / math.pi

DEFAULT_EPS = 0.01
DEFAULT_KAPPA_STAR = 0.1


@dataclass(frozen=True)
class PhysicalSystem:
    Z: tuple[float, ...]
    Y: tuple[tuple[float, float, float], ...]
    N: float
    alpha: float = 0.0
    beta: float = 0.0
    q: int = 2

    def __post_init__(self):
        object.__setattr__(self, "Z", tuple(float(z) for z in self.Z))
        object.__setattr__(self, "Y", tuple(tuple(float(c) for c in y) for y in self.Y))
        if len(self.Z) == 0:
            raise ValidationError("at least one nucleus is required")
        if len(self.Y) != len(self.Z):
            raise ValidationError(f"{len(self.Z)} charges but {len(self.Y)} positions")
        if any(len(y) != 3 for y in self.Y):
            raise ValidationError("positions must be points in 3-space")
        if any(z <= 0 for z in self.Z):
            raise ValidationError("nuclear charges must be positive")
        if self.N <= 0:
            raise ValidationError("electron number must be positive")
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("alpha and beta must be nonnegative")
        if self.q < 1:
            raise ValidationError("spin factor q must be a positive integer")

    @property
    def M(self) -> int:
        return len(self.Z)

    @property
    def Zmax(self) -> float:
        return max(self.Z)

    def min_distance(self) -> float:
        """Smallest internuclear distance, ``inf`` for a single nucleus."""
        if self.M < 2:
            return math.inf
        pts = np.asarray(self.Y)
        return min(
            float(np.linalg.norm(pts[i] - pts[j]))
            for i, j in itertools.combinations(range(self.M), 2)
        )

    @classmethod
    def atom(cls, Z: float, N: float | None = None, alpha: float = 0.0, beta: float = 0.0, q: int = 2):
        return cls(Z=(Z,), Y=((0.0, 0.0, 0.0),), N=Z if N is None else N, alpha=alpha, beta=beta, q=q)


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[Check]
    eps: float
    kappa_star: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def margin(self, name: str) -> float:
        return next(c.margin for c in self.checks if c.name == name)

    def raise_for_failure(self) -> None:
        errors = {
            "subcriticality": SubcriticalityViolation,
            "coupling": CouplingViolation,
            "geometry": GeometryViolation,
        }
        for c in self.checks:
            if not c.passed:
                raise errors[c.name](f"{c.name} fails: {c.detail} (margin {c.margin:.6g})")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "eps": self.eps,
            "kappa_star": self.kappa_star,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(type(x))


def validate_system(
    sys: PhysicalSystem, eps: float = DEFAULT_EPS, kappa_star: float = DEFAULT_KAPPA_STAR
) -> ValidationReport:
    """Check subcriticality, the magnetic coupling cap and the nuclear geometry.

    Every check reports its worst-case margin; a negative margin means failure.
    Call :meth:`ValidationReport.raise_for_failure` to turn the report into an
    exception.
    """
    sub = [CRITICAL_COUPLING - eps - z * sys.beta for z in sys.Z]
    m_sub = min(sub)
    worst = int(np.argmin(sub))
    checks = [
        Check(
            "subcriticality",
            m_sub >= 0,
            m_sub,
            f"Z*beta = {sys.Z[worst] * sys.beta:.17g} vs 2/pi - eps = {CRITICAL_COUPLING - eps:.17g}",
        )
    ]

    cap = []
    for z in sys.Z:
        room = CRITICAL_COUPLING - sys.beta * z
        cap.append(kappa_star * max(room, 0.0) ** 1.5 - sys.alpha * z)
    m_cap = min(cap)
    checks.append(Check("coupling", m_cap >= 0, m_cap, "alpha*Z vs kappa_star*(2/pi - beta*Z)^(3/2)"))

    d = sys.min_distance()
    checks.append(Check("geometry", d > 0, d, "minimal internuclear distance"))
    return ValidationReport(checks=checks, eps=eps, kappa_star=kappa_star)


@dataclass(frozen=True)
class Regime:
    """Semiclassical variables after the atomic rescaling x -> Z^{1/3} x."""

    Z: float
    h: float
    kappa: float
    gamma_m: tuple[float, ...]
    z_m: tuple[float, ...]
    a: float

    def to_physical(self) -> dict:
        """Invert the rescaling; returns alpha, beta, the charges and ``d``."""
        Zs = tuple(zm * self.Z for zm in self.z_m)
        alpha = self.kappa / self.Z
        beta = self.gamma_m[0] / Zs[0]
        d = self.a * self.h
        return {"Z": Zs, "alpha": alpha, "beta": beta, "d": d}


def atomic_rescale(sys: PhysicalSystem) -> Regime:
    """Map a system to ``h = Z^{-1/3}``, ``kappa = alpha Z`` and ``gamma_m = beta Z_m``.

    ``Z`` is the largest nuclear charge.
    """
    Z = sys.Zmax
    h = Z ** (-1.0 / 3.0)
    return Regime(
        Z=Z,
        h=h,
        kappa=sys.alpha * Z,
        gamma_m=tuple(sys.beta * z for z in sys.Z),
        z_m=tuple(z / Z for z in sys.Z),
        a=sys.min_distance() / h,
    )


@dataclass(frozen=True)
class LocalRegime:
    ell: float
    h_loc: float
    gamma_loc: float
    kappa_loc: float
    varsigma: float
    penalty_prefactor: float


def local_rescale(sys: PhysicalSystem, ell: float, defect_scale: float = 1.0) -> LocalRegime:
    """Rescale a ball of radius ``ell`` to the unit ball.

    The penalty prefactor is evaluated both as ``1/(kappa h^2)`` and as
    ``ell/alpha``; the two must agree.
    """
    if ell <= 0:
        raise ValidationError("ell must be positive")
    Z = sys.Zmax
    h = Z ** -0.5 * ell ** -0.5
    gamma = sys.beta / h
    kappa = Z * sys.alpha
    if gamma > 1.0 + 1e-12:
        raise GammaOutOfRange(f"gamma_loc = {gamma:.6g} > 1")
    if sys.alpha > 0:
        pref = 1.0 / (kappa * h * h)
        direct = ell / sys.alpha
        if not math.isclose(pref, direct, rel_tol=1e-12):
            raise AssertionError(f"penalty identity broken: {pref} vs {direct}")
    else:
        pref = math.inf
    return LocalRegime(
        ell=ell,
        h_loc=h,
        gamma_loc=gamma,
        kappa_loc=kappa,
        varsigma=kappa * defect_scale * h,
        penalty_prefactor=pref,
    )


# configuration files ---------------------------------------------------------


def read_keyvalue(path: str | Path) -> dict:
    """Parse ``key = value`` lines; values are Python/JSON literals or bare strings."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            out[key] = value
    return out


@dataclass
class SystemConfig:
    system: PhysicalSystem
    eps: float = DEFAULT_EPS
    kappa_star: float = DEFAULT_KAPPA_STAR
    extra: dict = field(default_factory=dict)


def system_from_mapping(cfg: dict) -> SystemConfig:
    Z = cfg["Z"]
    Z = [Z] if isinstance(Z, (int, float)) else list(Z)
    Y = cfg.get("Y", [[0.0, 0.0, 0.0]] * len(Z))
    if "M" in cfg and int(cfg["M"]) != len(Z):
        raise ValidationError(f"M = {cfg['M']} but {len(Z)} charges given")
    sys = PhysicalSystem(
        Z=tuple(Z),
        Y=tuple(tuple(y) for y in Y),
        N=float(cfg.get("N", sum(Z))),
        alpha=float(cfg.get("alpha", 0.0)),
        beta=float(cfg.get("beta", 0.0)),
        q=int(cfg.get("q", 2)),
    )
    known = {"M", "Z", "Y", "N", "alpha", "beta", "q", "eps", "kappa_star"}
    return SystemConfig(
        system=sys,
        eps=float(cfg.get("eps", DEFAULT_EPS)),
        kappa_star=float(cfg.get("kappa_star", DEFAULT_KAPPA_STAR)),
        extra={k: v for k, v in cfg.items() if k not in known},
    )


def load_system(path: str | Path) -> SystemConfig:
    return system_from_mapping(read_keyvalue(path))
