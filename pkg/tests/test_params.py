import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relscott.errors import GammaOutOfRange, SubcriticalityViolation, ValidationError
from relscott.params import (
    CRITICAL_COUPLING,
    DEFAULT_KAPPA_STAR,
    PhysicalSystem,
    atomic_rescale,
    load_system,
    local_rescale,
    validate_system,
)


def test_heavy_atom_subcritical_margin():
    rep = validate_system(PhysicalSystem.atom(50, beta=0.01), eps=0.01)
    assert rep.passed
    assert rep.margin("subcriticality") == pytest.approx(2 / math.pi - 0.5 - 0.01, rel=1e-14)


def test_couplings_off_margins():
    rep = validate_system(PhysicalSystem.atom(1))
    assert rep.passed
    assert rep.margin("subcriticality") == pytest.approx(CRITICAL_COUPLING - 0.01)
    assert rep.margin("coupling") == pytest.approx(DEFAULT_KAPPA_STAR * CRITICAL_COUPLING**1.5)


def test_supercritical_fails_and_raises():
    # 100 * 0.0064 = 0.64 exceeds 2/pi - 0.01 = 0.6266...
    rep = validate_system(PhysicalSystem.atom(100, beta=0.0064), eps=0.01)
    assert not rep.passed
    with pytest.raises(SubcriticalityViolation):
        rep.raise_for_failure()


def test_geometry_margin_is_distance():
    s = PhysicalSystem(Z=(1, 2), Y=((0, 0, 0), (0, 3, 4)), N=3)
    assert validate_system(s).margin("geometry") == pytest.approx(5.0)


@pytest.mark.parametrize(
    "kw",
    [dict(Z=(), Y=(), N=1), dict(Z=(1,), Y=(), N=1), dict(Z=(-1,), Y=((0, 0, 0),), N=1),
     dict(Z=(1,), Y=((0, 0, 0),), N=0), dict(Z=(1,), Y=((0, 0, 0),), N=1, beta=-1)],
)
def test_malformed_systems_rejected(kw):
    with pytest.raises(ValidationError):
        PhysicalSystem(**kw)


def test_atomic_rescale_examples():
    r = atomic_rescale(PhysicalSystem.atom(1000))
    assert (r.h, r.kappa, r.gamma_m) == (pytest.approx(0.1), 0.0, (0.0,))
    mol = PhysicalSystem(Z=(27, 27), Y=((0, 0, 0), (1 / 3, 0, 0)), N=54)
    assert atomic_rescale(mol).a == pytest.approx(1.0)
    r = atomic_rescale(PhysicalSystem.atom(100, alpha=1e-4, beta=1e-3))
    assert r.kappa == pytest.approx(0.01) and r.gamma_m[0] == pytest.approx(0.1)
    back = r.to_physical()
    assert back["alpha"] == pytest.approx(1e-4) and back["beta"] == pytest.approx(1e-3)


def test_local_rescale_examples():
    loc = local_rescale(PhysicalSystem.atom(100, alpha=1e-3), 0.01)
    assert loc.h_loc == pytest.approx(1.0)
    assert loc.penalty_prefactor == pytest.approx(0.01 / 1e-3)
    assert local_rescale(PhysicalSystem.atom(1e6), 1.0).h_loc == pytest.approx(1e-3)


def test_local_rescale_gamma_boundary():
    # h_loc = (1e4 * 1e-2)^{-1/2} = 0.1, so gamma_loc = 1 needs beta = 0.1
    assert local_rescale(PhysicalSystem.atom(1e4, beta=1e-3), 1e-2).gamma_loc == pytest.approx(0.01)
    assert local_rescale(PhysicalSystem.atom(1e4, beta=0.1), 1e-2).gamma_loc == pytest.approx(1.0)
    with pytest.raises(GammaOutOfRange):
        local_rescale(PhysicalSystem.atom(1e4, beta=0.11), 1e-2)


@given(
    Z=st.floats(1, 1e4), alpha=st.floats(1e-8, 1e-2), ell=st.floats(1e-3, 10.0)
)
def test_penalty_identity(Z, alpha, ell):
    loc = local_rescale(PhysicalSystem.atom(Z, alpha=alpha), ell)
    assert 1 / (loc.kappa_loc * loc.h_loc**2) == pytest.approx(ell / alpha, rel=1e-12)


@given(Z1=st.floats(1, 1e3), dZ=st.floats(1e-3, 1e3), beta=st.floats(0, 1e-3), db=st.floats(1e-6, 1e-3))
def test_rescale_monotone(Z1, dZ, beta, db):
    a = atomic_rescale(PhysicalSystem.atom(Z1, beta=beta))
    b = atomic_rescale(PhysicalSystem.atom(Z1 + dZ, beta=beta))
    c = atomic_rescale(PhysicalSystem.atom(Z1, beta=beta + db))
    assert b.h < a.h
    assert c.gamma_m[0] > a.gamma_m[0]


def test_validation_is_pure():
    s = PhysicalSystem(Z=(3, 4), Y=((0, 0, 0), (0, 0, 2)), N=7, alpha=1e-3, beta=0.05)
    assert validate_system(s).to_json() == validate_system(s).to_json()


def test_config_file(tmp_path):
    p = tmp_path / "sys.cfg"
    p.write_text("# molecule\nM = 2\nZ = [1, 2]\nY = [[0,0,0],[0,0,1.5]]\nN = 3\nbeta = 0.01  # small\neps = 0.02\n")
    sc = load_system(p)
    assert sc.system.Z == (1.0, 2.0) and sc.system.min_distance() == 1.5
    assert sc.eps == 0.02 and sc.system.beta == 0.01
    p.write_text("M = 3\nZ = [1, 2]\nY = [[0,0,0],[0,0,1]]\n")
    with pytest.raises(ValidationError):
        load_system(p)
