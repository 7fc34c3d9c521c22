import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relscott import phase_space as ps

NR = ps.PressureLaw(ps.NONREL)
R1 = ps.PressureLaw(ps.REL, 1.0)
LAWS = [NR, R1, ps.PressureLaw(ps.REL, 0.1)]
GRID = np.geomspace(1e-3, 1e3, 60)


def test_dispersion_examples():
    for law in LAWS:
        assert ps.dispersion(0.0, law) == 0.0
    assert ps.dispersion(math.sqrt(3), R1) == pytest.approx(1.0, rel=1e-15)
    assert ps.dispersion(1.0, ps.PressureLaw(ps.REL, 1e-3)) == pytest.approx(0.5, abs=1e-5)


def test_density_examples():
    assert ps.weyl_density(-1.0, R1) == 0.0
    assert ps.weyl_density(0.5, NR) == pytest.approx(1 / (3 * math.pi**2), rel=1e-14)
    assert ps.fermi_momentum(1.0, R1) == pytest.approx(math.sqrt(3))
    assert ps.weyl_density(1.0, R1) == pytest.approx(2 * 3 * math.sqrt(3) / (6 * math.pi**2), rel=1e-14)
    assert ps.fermi_momentum_bisect(1.0, R1) == pytest.approx(math.sqrt(3), rel=1e-14)


@pytest.mark.parametrize("law", LAWS, ids=["nonrel", "rel1", "rel0.1"])
def test_closed_forms_match_quadrature(law):
    for w in GRID[::6]:
        assert ps.weyl_density(w, law) == pytest.approx(ps.weyl_density_quadrature(w, law), rel=1e-10)
        assert ps.weyl_pressure(w, law) == pytest.approx(ps.weyl_pressure_quadrature(w, law), rel=1e-10)


@pytest.mark.parametrize("law", LAWS, ids=["nonrel", "rel1", "rel0.1"])
def test_pressure_derivative_is_density(law):
    eps = 1e-5 * GRID
    dP = (ps.weyl_pressure(GRID + eps, law) - ps.weyl_pressure(GRID - eps, law)) / (2 * eps)
    np.testing.assert_allclose(dP, ps.weyl_density(GRID, law), rtol=1e-6)


@pytest.mark.parametrize("law", LAWS, ids=["nonrel", "rel1", "rel0.1"])
def test_legendre_duality(law):
    rho = ps.weyl_density(GRID, law)
    res = ps.kinetic_density(rho, law) + ps.weyl_pressure(GRID, law) - GRID * rho
    assert np.max(np.abs(res) / (GRID * rho)) <= 1e-8
    np.testing.assert_allclose(ps.kinetic_potential(rho, law), GRID, rtol=1e-10)


def test_kinetic_examples():
    assert ps.kinetic_density(0.0, NR) == 0.0
    rho = ps.weyl_density(1.0, R1)
    assert ps.kinetic_density(rho, R1) == pytest.approx(rho - ps.weyl_pressure(1.0, R1), rel=1e-12)
    # the sup definition, evaluated numerically
    assert ps.kinetic_density(rho, R1) == pytest.approx(ps.kinetic_density_numeric(float(rho), R1), rel=1e-8)


def test_nonpositive_levels_are_exact_zero():
    w = np.array([-5.0, -1e-300, 0.0])
    for law in LAWS:
        assert np.all(ps.weyl_pressure(w, law) == 0) and np.all(ps.weyl_density(w, law) == 0)


@given(w=st.floats(1e-3, 1e3), t=st.floats(0.01, 0.99))
def test_pressure_convex_nondecreasing(w, t):
    for law in LAWS:
        a, b = w, 2 * w
        m = t * a + (1 - t) * b
        Pa, Pb, Pm = (float(ps.weyl_pressure(x, law)) for x in (a, b, m))
        assert Pb >= Pa
        assert Pm <= t * Pa + (1 - t) * Pb * (1 + 1e-12)


def test_rel_to_nonrel_order():
    w = np.array([0.1, 1.0, 10.0])
    gammas = np.array([1e-1, 1e-2, 1e-3])
    diffs = np.array([np.abs(ps.weyl_pressure(w, ps.PressureLaw(ps.REL, g)) - ps.weyl_pressure(w, NR)) for g in gammas])
    for j in range(len(w)):
        order = np.polyfit(np.log(gammas), np.log(diffs[:, j]), 1)[0]
        assert order >= 1.9


def test_rel_correction_sign_and_limits():
    assert ps.rel_correction_integrand(-1.0, 0.1)[1] == 0.0
    assert abs(ps.rel_correction_integrand(1.0, 1e-4)[1]) < 1e-8
    reg, raw = ps.rel_correction_integrand(1.0, 0.1)
    # the Chandrasekhar dispersion lies below p^2/2, so more states fit under w
    assert raw > 0
    assert raw == pytest.approx(
        ps.weyl_pressure_quadrature(1.0, ps.PressureLaw(ps.REL, 0.1)) - ps.weyl_pressure_quadrature(1.0, NR), rel=1e-8
    )
    assert reg == pytest.approx(raw - ps.rel_counterterm(1.0, 0.1))


@pytest.mark.parametrize("scheme", ["asymptotic", "switched"])
def test_counterterm_removes_nuclear_divergence(scheme):
    # against r^2 dr with w = 1/r the regularized integrand must decay faster than r^-3
    g = 0.3
    r = np.array([1e-6, 1e-7])
    reg, raw = ps.rel_correction_integrand(1 / r, g, scheme=scheme)
    assert np.all(np.abs(reg * r**3) < 1e-3 * np.abs(raw * r**3))
