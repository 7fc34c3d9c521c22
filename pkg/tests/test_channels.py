import numpy as np
import pytest

from relscott.errors import SubcriticalityViolation
from relscott.spectral.channels import ChannelGrid, chandrasekhar_channel
from relscott.spectral.hydrogen import radial_function


def test_hydrogen_levels():
    assert chandrasekhar_channel(1.0, 0.0, 0)[0] == pytest.approx(-0.5, abs=1e-3)
    assert chandrasekhar_channel(1.0, 0.0, 1)[0] == pytest.approx(-0.125, abs=1e-3)
    lam = chandrasekhar_channel(1.0, 0.0, 0)
    np.testing.assert_allclose(lam[:4], [-0.5 / n**2 for n in range(1, 5)], atol=2e-3)


def test_relativistic_lowering_monotone():
    grid = ChannelGrid(60.0, 600)
    e0 = [chandrasekhar_channel(1.0, g, 0, grid)[0] for g in (0.0, 0.1, 0.2, 0.4)]
    assert e0[1] < -0.5
    assert all(b < a for a, b in zip(e0, e0[1:]))


def test_coulomb_ordering_in_ell():
    grid = ChannelGrid(60.0, 600)
    lows = [chandrasekhar_channel(2.0, 0.1, ell, grid)[0] for ell in range(4)]
    assert all(b > a for a, b in zip(lows, lows[1:]))


def test_subcritical_precondition():
    with pytest.raises(SubcriticalityViolation):
        chandrasekhar_channel(10.0, 0.07, 0)


def test_channel_vectors_normalized():
    sp = chandrasekhar_channel(1.0, 0.0, 0, vectors=True)
    np.testing.assert_allclose(np.sum(sp.vectors**2, axis=0), 1.0, atol=1e-12)
    assert np.allclose(sp.localized(np.ones_like(sp.r)), 1.0)


def test_analytic_radial_functions_orthonormal():
    r = np.linspace(0, 200, 200001)
    dr = r[1] - r[0]
    us = [radial_function(n, 1, r, Z=2.0) for n in (2, 3, 4)]
    gram = np.array([[np.trapezoid(a * b, dx=dr) for b in us] for a in us])
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-8)
